"""Closed-form transmission amplitudes for the degenerate loop.

Valid when the cavity and emitter share one frequency ``omega`` and one
decay rate ``gamma``; decay enters as ``Delta -> Delta + i*gamma``.  The
wavenumber in ``sin(k x0)`` and ``exp(i k x0)`` is the full ``E / v_g``,
so results depend on the absolute frequency, not only on the detuning.

All amplitude functions accept a scalar or an array of energies and
return a Python ``complex`` or a complex ndarray accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BothCouplingsZero, DegeneracyRequired, RequiresColocated
from .model import Direction, SystemParams, validate_params, wavevector

# Reported in place of +-inf when one direction has exactly zero transmission.
SATURATION_DB = 310.0


def _folded(params: SystemParams) -> tuple[SystemParams, bool]:
    """Validate and fold a negative x0, keeping the caller's units."""
    checked = validate_params(params)
    if checked.mirrored == params.mirrored:
        return params, params.mirrored
    return params.replace(x0=-params.x0, mirrored=checked.mirrored), checked.mirrored


def _require_degenerate(p: SystemParams) -> None:
    if not p.degenerate:
        raise DegeneracyRequired(
            "closed form needs omega_a == omega_e and gamma_a == gamma_e "
            f"(got {p.omega_a}, {p.omega_e}; {p.gamma_a}, {p.gamma_e}); use the solver"
        )


def _pack(values: np.ndarray, E):
    return complex(values) if np.ndim(E) == 0 else values


def _amplitude(p: SystemParams, E, sign: int, phase_sign: int = -1) -> np.ndarray:
    """Closed-form transmission.

    ``sign=+1, phase_sign=-1`` is left incidence.  Right incidence is the
    same expression with the two nodes' roles swapped, which only flips the
    loop phase in the numerator (``phase_sign=+1``).  ``sign=-1`` evaluates
    the left formula at ``-x0`` (the image expression).
    """
    E_arr = np.asarray(E, dtype=float)
    shape = E_arr.shape
    E_arr = E_arr.reshape(-1)
    k = wavevector(E_arr, p)
    if p.f == 0.0 and p.g == 0.0:
        return np.ones(shape, dtype=complex)
    v = p.v_g
    f, g, lam = p.f, p.g, p.lambda_mag
    delta = E_arr - p.omega_a + 1j * p.gamma_a
    s = sign * np.sin(k * p.x0)
    phase = np.exp(1j * sign * k * p.x0)
    fg = f * g
    d2 = delta * delta - lam * lam
    numerator = d2 - 2.0 * fg * lam * np.exp(1j * phase_sign * p.phi) * s / v
    K = (delta * (f * f + g * g) + 2.0 * phase * fg * (lam * math.cos(p.phi) + fg * s / v)) / v
    with np.errstate(divide="ignore", invalid="ignore"):
        t = numerator / (d2 + 1j * K)
    bad = ~np.isfinite(t)
    if np.any(bad):
        # 0/0 at a dressed state that decouples from the guide: two-sided limit.
        eps = 1e-7 * np.maximum(E_arr[bad], 1.0)
        lo = _amplitude(p, E_arr[bad] - eps, sign, phase_sign)
        hi = _amplitude(p, E_arr[bad] + eps, sign, phase_sign)
        t[bad] = 0.5 * (lo + hi)
    return t.reshape(shape)


def t_left(params: SystemParams, E):
    """Transmission amplitude for a photon incident from the left."""
    p, mirrored = _folded(params)
    _require_degenerate(p)
    return _pack(_amplitude(p, E, 1, +1 if mirrored else -1), E)


def t_right(params: SystemParams, E):
    """Transmission amplitude for a photon incident from the right.

    Equal to :func:`t_left` with the cavity and emitter exchanged
    (``f <-> g``, ``phi -> -phi``).  The denominator is shared with the
    left amplitude, so without loss ``|t_right| == |t_left|``.
    """
    p, mirrored = _folded(params)
    _require_degenerate(p)
    return _pack(_amplitude(p, E, 1, -1 if mirrored else +1), E)


def t_right_image(params: SystemParams, E):
    """The left-incidence formula evaluated at ``-x0``.

    This image expression is *not* a solution of the right-incidence
    problem: it violates flux conservation whenever ``sin(k x0) != 0`` and
    ``f g != 0``.  Kept so that spectra built on it can be regenerated and
    compared against :func:`t_right`.
    """
    p, _ = _folded(params)
    _require_degenerate(p)
    if p.mirrored:
        raise ValueError("image expression is defined for x0 >= 0 only")
    return _pack(_amplitude(p, E, -1, -1), E)


def transmission_amplitude(params: SystemParams, E, direction=Direction.LEFT):
    direction = Direction.parse(direction)
    return t_left(params, E) if direction is Direction.LEFT else t_right(params, E)


def t_colocated(params: SystemParams, E):
    """Transmission with cavity and emitter at the same point (x0 = 0)."""
    p, _ = _folded(params)
    if p.x0 != 0.0:
        raise RequiresColocated(f"x0 must be 0, got {params.x0}")
    _require_degenerate(p)
    E_arr = np.asarray(E, dtype=float)
    wavevector(E_arr, p)
    if p.f == 0.0 and p.g == 0.0:
        return _pack(np.ones(E_arr.shape, dtype=complex), E)
    delta = E_arr - p.omega_a + 1j * p.gamma_a
    d2 = delta * delta - p.lambda_mag**2
    bright = delta * (p.f**2 + p.g**2) + 2.0 * p.f * p.g * p.lambda_mag * math.cos(p.phi)
    denominator = d2 + 1j * bright / p.v_g
    if np.any(denominator == 0):
        return t_left(params, E)
    return _pack(d2 / denominator, E)


def dressed_energies(params: SystemParams) -> tuple[float, float]:
    """Energies ``(omega + lambda, omega - lambda)`` of the two dressed states."""
    p, _ = _folded(params)
    if p.omega_a != p.omega_e:
        raise DegeneracyRequired("dressed energies need omega_a == omega_e")
    return p.omega_a + p.lambda_mag, p.omega_a - p.lambda_mag


def quasidark_energy(params: SystemParams) -> float:
    """Mean energy of the state ``(f|e;0> - g|g;1>)/sqrt(f^2+g^2)``.

    With x0 = 0 and no loss, a photon at this energy is fully transmitted.
    """
    p, _ = _folded(params)
    if p.omega_a != p.omega_e:
        raise DegeneracyRequired("quasidark energy needs omega_a == omega_e")
    norm = p.f**2 + p.g**2
    if norm == 0.0:
        raise BothCouplingsZero("quasidark state undefined for f = g = 0")
    return p.omega_a - 2.0 * p.f * p.g * p.lambda_mag * math.cos(p.phi) / norm


@dataclass(frozen=True)
class SpectralFeatures:
    dressed_plus: float
    dressed_minus: float
    quasidark: float
    # (emitter, cavity) components of the quasidark ket in the {|e;0>, |g;1>} basis
    dark_state: tuple[float, float]


def spectral_features(params: SystemParams) -> SpectralFeatures:
    plus, minus = dressed_energies(params)
    qd = quasidark_energy(params)
    norm = math.hypot(params.f, params.g)
    return SpectralFeatures(plus, minus, qd, (params.f / norm, -params.g / norm))


class Isolation(NamedTuple):
    db: float
    saturated: bool


def isolation_from_rates(T_lr, T_rl):
    """Isolation ratio in dB from the two transmission rates.

    Exact zeros and ratios beyond the saturation level are clipped to
    ``+-SATURATION_DB`` and flagged.  Works elementwise on arrays and
    returns ``(db, saturated)``.
    """
    T_lr = np.asarray(T_lr, dtype=float)
    T_rl = np.asarray(T_rl, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        db = -10.0 * (np.log10(T_lr) - np.log10(T_rl))
    both_zero = (T_lr == 0) & (T_rl == 0)
    db = np.where(both_zero, 0.0, db)
    db = db + 0.0  # no negative zero
    saturated = both_zero | ~np.isfinite(db) | (np.abs(db) >= SATURATION_DB)
    db = np.clip(np.nan_to_num(db, posinf=SATURATION_DB, neginf=-SATURATION_DB), -SATURATION_DB, SATURATION_DB)
    if db.ndim == 0:
        return float(db), bool(saturated)
    return db, saturated


def isolation_db(params: SystemParams, E, image: bool = False) -> Isolation:
    """Isolation ratio ``-10 log10(T_LR / T_RL)`` from the closed forms.

    Without loss this is identically 0 dB.  ``image=True`` uses
    :func:`t_right_image` for the right-going rate instead.
    """
    T_lr = np.abs(t_left(params, E)) ** 2
    T_rl = np.abs((t_right_image if image else t_right)(params, E)) ** 2
    db, saturated = isolation_from_rates(T_lr, T_rl)
    return Isolation(db, saturated)
