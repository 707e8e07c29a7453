"""Physical parameters of the cavity/emitter/waveguide system.

Frequencies are in the same unit as the group velocity ``v_g`` (the
waveguide length unit is 1, so ``v_g`` carries frequency units).  The
cavity sits at ``x = 0`` and the emitter at ``x = x0``.

The rotating-wave picture behind the model assumes ``f**2, g**2 << v_g * omega``;
nothing here enforces it.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NegativeCoupling,
    NegativeDecay,
    NonPositiveEnergy,
    NonPositiveGroupVelocity,
    ParameterError,
)

# Fields that scale with the frequency unit.  phi and x0 are invariant.
FREQUENCY_FIELDS = (
    "omega_a",
    "omega_e",
    "lambda_mag",
    "f",
    "g",
    "v_g",
    "gamma_a",
    "gamma_e",
)


class Direction(enum.Enum):
    LEFT = "left"  # photon enters from x = -inf and travels right
    RIGHT = "right"

    @property
    def flipped(self) -> "Direction":
        return Direction.RIGHT if self is Direction.LEFT else Direction.LEFT

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {"l": "left", "lr": "left", "right": "right", "r": "right", "rl": "right"}
        return cls(aliases.get(text, text))


@dataclass(frozen=True)
class SystemParams:
    """Cavity-emitter loop coupled to a chiral waveguide.

    ``unit_scale`` and ``mirrored`` are bookkeeping set by
    :func:`validate_params`: the factor that was divided out of every
    frequency, and whether a negative ``x0`` was folded by a mirror
    reflection (which swaps the incidence directions).
    """

    omega_a: float = 1.0
    omega_e: float = 1.0
    lambda_mag: float = 0.1
    phi: float = 0.0
    f: float = 0.3
    g: float = 0.2
    v_g: float = 1.0
    x0: float = 0.0
    gamma_a: float = 0.0
    gamma_e: float = 0.0
    unit_scale: float = 1.0
    mirrored: bool = False

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    @property
    def degenerate(self) -> bool:
        """True when the closed-form expressions apply (equal node frequencies and decays)."""
        return self.omega_a == self.omega_e and self.gamma_a == self.gamma_e

    @property
    def omega(self) -> float:
        """Reference frequency for detunings (the cavity frequency)."""
        return self.omega_a


@dataclass(frozen=True)
class GeneralizedCouplings:
    """SystemParams plus extra phases on the two waveguide couplings.

    The cavity couples as ``f * exp(i theta_f) a^dag c(0) + h.c.`` and the
    emitter as ``g * exp(i theta_g) sigma_+ c(x0) + h.c.``.  Only the loop
    phase ``phi - theta_f + theta_g`` is physical.
    """

    base: SystemParams = dataclasses.field(default_factory=SystemParams)
    theta_f: float = 0.0
    theta_g: float = 0.0

    def replace(self, **changes) -> "GeneralizedCouplings":
        return dataclasses.replace(self, **changes)

    @property
    def f_complex(self) -> complex:
        return self.base.f * complex(math.cos(self.theta_f), math.sin(self.theta_f))

    @property
    def g_complex(self) -> complex:
        return self.base.g * complex(math.cos(self.theta_g), math.sin(self.theta_g))

    @property
    def loop_phase(self) -> float:
        return self.base.phi - self.theta_f + self.theta_g


def as_generalized(params) -> GeneralizedCouplings:
    if isinstance(params, GeneralizedCouplings):
        return params
    if isinstance(params, SystemParams):
        return GeneralizedCouplings(base=params)
    raise TypeError(f"expected SystemParams or GeneralizedCouplings, got {type(params).__name__}")


def validate_params(raw: SystemParams) -> SystemParams:
    """Check ``raw`` and return it rescaled to ``v_g = 1`` with ``x0 >= 0``.

    The divided-out factor accumulates in ``unit_scale`` so that
    :func:`denormalize` can restore the caller's units.  Idempotent.
    """
    values = [getattr(raw, name) for name in FREQUENCY_FIELDS] + [raw.phi, raw.x0]
    if not all(math.isfinite(v) for v in values):
        raise ParameterError("all parameters must be finite")
    if not raw.v_g > 0:
        raise NonPositiveGroupVelocity(f"v_g must be > 0, got {raw.v_g}")
    if raw.lambda_mag < 0:
        raise NegativeCoupling(f"lambda_mag must be >= 0, got {raw.lambda_mag}")
    if raw.gamma_a < 0 or raw.gamma_e < 0:
        raise NegativeDecay(f"decay rates must be >= 0, got ({raw.gamma_a}, {raw.gamma_e})")

    scale = raw.v_g
    changes = {}
    if scale != 1.0:
        changes = {name: getattr(raw, name) / scale for name in FREQUENCY_FIELDS}
        changes["v_g"] = 1.0
        changes["unit_scale"] = raw.unit_scale * scale
    if raw.x0 < 0:
        changes["x0"] = -raw.x0
        changes["mirrored"] = not raw.mirrored
    return raw.replace(**changes) if changes else raw


def denormalize(params: SystemParams) -> SystemParams:
    """Undo the rescaling of :func:`validate_params` (the mirror fold is kept)."""
    s = params.unit_scale
    if s == 1.0:
        return params
    changes = {name: getattr(params, name) * s for name in FREQUENCY_FIELDS}
    changes["unit_scale"] = 1.0
    return params.replace(**changes)


def wavevector(E, params: SystemParams):
    """Photon wavenumber ``k = E / v_g`` for the linearized dispersion."""
    E_arr = np.asarray(E, dtype=float)
    if np.any(~(E_arr > 0)):
        raise NonPositiveEnergy(f"photon energy must be > 0, got {E}")
    if not params.v_g > 0:
        raise NonPositiveGroupVelocity(f"v_g must be > 0, got {params.v_g}")
    k = E_arr / params.v_g
    return float(k) if k.ndim == 0 else k
