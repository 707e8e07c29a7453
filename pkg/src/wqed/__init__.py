"""Single-photon scattering off a cavity-emitter loop side-coupled to a waveguide."""

from .analytic import (
    dressed_energies,
    isolation_db,
    quasidark_energy,
    t_colocated,
    t_left,
    t_right,
    t_right_image,
)
from .model import Direction, GeneralizedCouplings, SystemParams, denormalize, validate_params, wavevector
from .solver import Gauge, ScatteringSolution, apply_gauge, solve_batch, solve_scattering
from .sweep import Engine, find_features, isolation_map, spectrum

__all__ = [
    "Direction",
    "Engine",
    "Gauge",
    "GeneralizedCouplings",
    "ScatteringSolution",
    "SystemParams",
    "apply_gauge",
    "denormalize",
    "dressed_energies",
    "find_features",
    "isolation_db",
    "isolation_map",
    "quasidark_energy",
    "solve_batch",
    "solve_scattering",
    "spectrum",
    "t_colocated",
    "t_left",
    "t_right",
    "t_right_image",
    "validate_params",
    "wavevector",
]
