from .regularized import RegularizationConfig, regularized_amplitudes, regularized_scatter
from .validate import ValidationReport, cross_validate
from .wavepacket import TransportResult, WavepacketConfig, wavepacket_run

__all__ = [
    "RegularizationConfig",
    "TransportResult",
    "ValidationReport",
    "WavepacketConfig",
    "cross_validate",
    "regularized_amplitudes",
    "regularized_scatter",
    "wavepacket_run",
]
