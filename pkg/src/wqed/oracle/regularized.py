"""Frequency-domain oracle with each delta coupling replaced by a narrow Gaussian.

The stationary field equations are integrated on a uniform grid as linear
responses to the incoming wave and to the two node amplitudes.  Inserting
those responses into the node equations leaves a 2x2 system for
``(u_a, u_e)``.  Nothing here uses the jump conditions or the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..errors import ConfigViolation, NonConvergent
from ..model import Direction, GeneralizedCouplings, as_generalized, validate_params, wavevector


@dataclass(frozen=True)
class RegularizationConfig:
    sigma: float = 1e-3
    dx: float = 1.25e-4
    span: float = 1.0

    def halved(self) -> "RegularizationConfig":
        return RegularizationConfig(self.sigma / 2, self.dx / 2, self.span)

    @classmethod
    def for_problem(cls, params, E: float, sigma: float = 1e-3, points_per_sigma: int = 8):
        """Smallest config satisfying every constraint at this energy."""
        p = as_generalized(params).base
        k = wavevector(E, p)
        limit = 0.1 / k
        if p.x0 != 0:
            limit = min(limit, abs(p.x0) / 4)
        sigma = min(sigma, limit)
        return cls(sigma=sigma, dx=sigma / points_per_sigma, span=abs(p.x0) + 12 * sigma)

    def check(self, params, E: float) -> None:
        p = as_generalized(params).base
        k = wavevector(E, p)
        x0 = abs(p.x0)
        if not (self.sigma > 0 and self.dx > 0):
            raise ConfigViolation("sigma and dx must be positive")
        if self.dx > self.sigma / 8 * (1 + 1e-12):
            raise ConfigViolation(f"dx={self.dx} exceeds sigma/8={self.sigma / 8}")
        limit = 0.1 / k if x0 == 0 else min(0.1 / k, x0 / 4)
        if self.sigma > limit * (1 + 1e-12):
            raise ConfigViolation(f"sigma={self.sigma} exceeds {limit:.4g}")
        if self.span < x0 + 10 * self.sigma:
            raise ConfigViolation(f"span={self.span} must be >= x0 + 10 sigma")


def _gaussian(x: np.ndarray, center: float, sigma: float, dx: float) -> np.ndarray:
    w = np.exp(-0.5 * ((x - center) / sigma) ** 2)
    return w / trapezoid(w, dx=dx)  # unit weight under the same quadrature


def regularized_amplitudes(params, E: float, direction, cfg: RegularizationConfig) -> tuple[complex, complex]:
    """``(t, r)`` at a single Gaussian width, without extrapolation."""
    gp = as_generalized(params)
    checked = validate_params(gp.base)
    direction = Direction.parse(direction)
    if checked.mirrored != gp.base.mirrored:
        gp = gp.replace(base=gp.base.replace(x0=-gp.base.x0, mirrored=checked.mirrored))
        direction = direction.flipped
    p = gp.base
    cfg.check(gp, E)
    if p.f == 0.0 and p.g == 0.0:
        return 1.0 + 0j, 0j

    k = wavevector(E, p)
    v = p.v_g
    n = int(math.ceil(2 * cfg.span / cfg.dx)) + 1
    x = -cfg.span + cfg.dx * np.arange(n)
    dx = cfg.dx
    weights = (_gaussian(x, 0.0, cfg.sigma, dx), _gaussian(x, p.x0, cfg.sigma, dx))
    coup = (gp.f_complex, gp.g_complex)
    right = np.exp(1j * k * x)
    left = np.conj(right)

    # Field generated by a unit node amplitude j, without its coupling prefactor:
    #   psi_R(x) = -(i/v) int_{-span}^{x} e^{-ikx'} w_j,   psi_L(x) = -(i/v) int_{x}^{span} e^{ikx'} w_j
    responses = []
    for w in weights:
        cum_r = cumulative_trapezoid(left * w, dx=dx, initial=0.0)
        cum_l_total = trapezoid(right * w, dx=dx)
        cum_l = cum_l_total - cumulative_trapezoid(right * w, dx=dx, initial=0.0)
        field = right * (-1j / v) * cum_r + left * (-1j / v) * cum_l
        responses.append((field, cum_r[-1], cum_l_total))

    incoming = right if direction is Direction.LEFT else left
    M = np.empty((2, 2), dtype=complex)
    rhs = np.empty(2, dtype=complex)
    node_energy = (p.omega_a - 1j * p.gamma_a, p.omega_e - 1j * p.gamma_e)
    lam = (p.lambda_mag * complex(math.cos(p.phi), math.sin(p.phi)),)
    lam_pair = ((0, lam[0]), (lam[0].conjugate(), 0))
    for i in range(2):
        rhs[i] = -coup[i] * trapezoid(weights[i] * incoming, dx=dx)
        for j in range(2):
            overlap = trapezoid(weights[i] * responses[j][0], dx=dx)
            M[i, j] = coup[i] * coup[j].conjugate() * overlap
        M[i, i] += node_energy[i] - E
        M[i, 1 - i] += lam_pair[i][1 - i]
    u = np.linalg.solve(M, rhs)

    # outgoing amplitudes at the far ends
    out_r = sum(-1j / v * coup[j].conjugate() * u[j] * responses[j][1] for j in range(2))
    out_l = sum(-1j / v * coup[j].conjugate() * u[j] * responses[j][2] for j in range(2))
    if direction is Direction.LEFT:
        return complex(1.0 + out_r), complex(out_l)
    return complex(1.0 + out_l), complex(out_r)


def regularized_scatter(
    params,
    E: float,
    direction=Direction.LEFT,
    cfg: RegularizationConfig | None = None,
    rtol: float = 1e-2,
    order: int = 1,
) -> tuple[complex, complex]:
    """``(t, r)`` Richardson-extrapolated from widths ``sigma`` and ``sigma/2``.

    Raises :class:`NonConvergent` if the extrapolated value differs from the
    finer estimate by more than ``rtol`` (relative to ``max(|t|, |r|)``).
    """
    gp = as_generalized(params)
    if cfg is None:
        cfg = RegularizationConfig.for_problem(gp, E)
    coarse = np.array(regularized_amplitudes(gp, E, direction, cfg))
    fine = np.array(regularized_amplitudes(gp, E, direction, cfg.halved()))
    factor = 2.0**order
    extrap = (factor * fine - coarse) / (factor - 1.0)
    scale = max(np.max(np.abs(extrap)), 1e-300)
    if np.max(np.abs(extrap - fine)) > rtol * scale:
        raise NonConvergent(
            f"sigma extrapolation at E={E}: |extrapolated - fine| = {np.max(np.abs(extrap - fine)):.3g}"
        )
    return complex(extrap[0]), complex(extrap[1])
