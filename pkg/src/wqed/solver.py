"""Stationary single-photon scattering from the jump conditions.

Unknowns, in order: ``(r, A, B, t, u_a, u_e)``.  Left incidence uses

    phi_R = e^{ikx} {1 | A | t},   phi_L = e^{-ikx} {r | B | 0}

on the three regions ``x < 0``, ``0 < x < x0``, ``x > x0``.  Right
incidence uses the mirrored ansatz

    phi_R = e^{ikx} {0 | A | r},   phi_L = e^{-ikx} {t | B | 1}.

Integrating the field equations across a coupling point ``x_c`` with
coupling ``c`` (``c = f e^{i theta_f}`` for the cavity, ``g e^{i theta_g}``
for the emitter) gives

    phi_R(x_c+) - phi_R(x_c-) = -i conj(c) u / v_g
    phi_L(x_c+) - phi_L(x_c-) = +i conj(c) u / v_g

and the node equations sample the fields at the midpoint value
``[phi(x_c+) + phi(x_c-)] / 2`` (step function equal to 1/2 at zero):

    (omega_a - i gamma_a - E) u_a + lambda e^{+i phi} u_e + c_a [phi_R + phi_L](0)  = 0
    (omega_e - i gamma_e - E) u_e + lambda e^{-i phi} u_a + c_e [phi_R + phi_L](x0) = 0

For ``x0 = 0`` the middle region collapses; the same six equations remain
valid because the sum ``phi_R + phi_L`` seen by each node is unchanged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem
from .model import Direction, GeneralizedCouplings, as_generalized, validate_params, wavevector

COND_LIMIT = 1e12


@dataclass(frozen=True)
class ScatteringSolution:
    t: complex
    r: complex
    A: complex
    B: complex
    u_a: complex
    u_e: complex
    E: float
    direction: Direction

    @property
    def T(self) -> float:
        return abs(self.t) ** 2

    @property
    def R(self) -> float:
        return abs(self.r) ** 2

    @property
    def loss(self) -> float:
        return 1.0 - self.T - self.R


@dataclass(frozen=True)
class SolutionArrays:
    """Vectorized counterpart of :class:`ScatteringSolution`."""

    E: np.ndarray
    direction: Direction
    r: np.ndarray
    A: np.ndarray
    B: np.ndarray
    t: np.ndarray
    u_a: np.ndarray
    u_e: np.ndarray
    condition: np.ndarray

    @property
    def T(self) -> np.ndarray:
        return np.abs(self.t) ** 2

    @property
    def R(self) -> np.ndarray:
        return np.abs(self.r) ** 2

    @property
    def loss(self) -> np.ndarray:
        return 1.0 - self.T - self.R

    def __getitem__(self, i) -> ScatteringSolution:
        return ScatteringSolution(
            t=complex(self.t[i]),
            r=complex(self.r[i]),
            A=complex(self.A[i]),
            B=complex(self.B[i]),
            u_a=complex(self.u_a[i]),
            u_e=complex(self.u_e[i]),
            E=float(self.E[i]),
            direction=self.direction,
        )


def _fold(gp: GeneralizedCouplings) -> tuple[GeneralizedCouplings, bool]:
    checked = validate_params(gp.base)
    if checked.mirrored == gp.base.mirrored:
        return gp, False
    return gp.replace(base=gp.base.replace(x0=-gp.base.x0, mirrored=checked.mirrored)), True


def assemble(gp: GeneralizedCouplings, E, direction: Direction) -> tuple[np.ndarray, np.ndarray]:
    """Stacked matrices ``M`` (n, 6, 6) and right-hand sides ``b`` (n, 6).

    The two node rows are divided by ``v_g`` so that every row is
    dimensionless; this keeps the condition number meaningful.
    """
    p = gp.base
    E = np.atleast_1d(np.asarray(E, dtype=float))
    k = wavevector(E, p)
    v = p.v_g
    ca, ce = gp.f_complex, gp.g_complex
    ca_j, ce_j = ca.conjugate(), ce.conjugate()
    lam_up = p.lambda_mag * complex(math.cos(p.phi), math.sin(p.phi))
    lam_dn = lam_up.conjugate()
    e0 = np.exp(1j * k * p.x0)
    em = np.exp(-1j * k * p.x0)
    n = E.size
    M = np.zeros((n, 6, 6), dtype=complex)
    b = np.zeros((n, 6), dtype=complex)
    R_, A_, B_, T_, UA, UE = range(6)

    # field jumps at the cavity (x = 0) and the emitter (x = x0)
    M[:, 0, A_] = 1.0
    M[:, 0, UA] = 1j * ca_j / v
    M[:, 1, B_] = 1.0
    M[:, 1, UA] = -1j * ca_j / v
    M[:, 2, UE] = 1j * ce_j / v
    M[:, 3, B_] = -em
    M[:, 3, UE] = -1j * ce_j / v
    # node equations
    M[:, 4, UA] = (p.omega_a - 1j * p.gamma_a - E) / v
    M[:, 4, UE] = lam_up / v
    M[:, 5, UE] = (p.omega_e - 1j * p.gamma_e - E) / v
    M[:, 5, UA] = lam_dn / v
    half_a = 0.5 * ca / v
    half_e = 0.5 * ce / v

    if direction is Direction.LEFT:
        b[:, 0] = 1.0
        M[:, 1, R_] = -1.0
        M[:, 2, T_] = e0
        M[:, 2, A_] = -e0
        # cavity sees (1 + A)/2 + (r + B)/2
        M[:, 4, A_] = half_a
        M[:, 4, R_] = half_a
        M[:, 4, B_] = half_a
        b[:, 4] = -half_a
        # emitter sees e0 (A + t)/2 + em B/2
        M[:, 5, A_] = half_e * e0
        M[:, 5, T_] = half_e * e0
        M[:, 5, B_] = half_e * em
    else:
        M[:, 1, T_] = -1.0
        M[:, 2, R_] = e0
        M[:, 2, A_] = -e0
        b[:, 3] = -em
        # cavity sees (0 + A)/2 + (t + B)/2
        M[:, 4, A_] = half_a
        M[:, 4, T_] = half_a
        M[:, 4, B_] = half_a
        # emitter sees e0 (A + r)/2 + em (B + 1)/2
        M[:, 5, A_] = half_e * e0
        M[:, 5, R_] = half_e * e0
        M[:, 5, B_] = half_e * em
        b[:, 5] = -half_e * em
    return M, b


def solve_batch(params, E, direction=Direction.LEFT, check_condition: bool = True) -> SolutionArrays:
    """Solve the scattering problem at every energy in ``E``.

    Raises :class:`SingularSystem` if any system has a 2-norm condition
    number above ``COND_LIMIT``.
    """
    gp, mirrored = _fold(as_generalized(params))
    direction = Direction.parse(direction)
    E = np.atleast_1d(np.asarray(E, dtype=float))
    frame_direction = direction.flipped if mirrored else direction
    n = E.size

    if gp.base.f == 0.0 and gp.base.g == 0.0:
        wavevector(E, gp.base)
        zeros = np.zeros(n, dtype=complex)
        ones = np.ones(n, dtype=complex)
        through = ones if frame_direction is Direction.LEFT else zeros
        back = zeros if frame_direction is Direction.LEFT else ones
        return SolutionArrays(E, direction, zeros, through, back, ones, zeros, zeros.copy(), np.ones(n))

    M, b = assemble(gp, E, frame_direction)
    if check_condition:
        cond = np.linalg.cond(M)
        worst = int(np.argmax(np.where(np.isfinite(cond), cond, np.inf)))
        if not cond[worst] <= COND_LIMIT:
            raise SingularSystem(
                f"scattering system is singular at E={E[worst]!r} (condition {cond[worst]:.3g})",
                condition=float(cond[worst]),
            )
    else:
        cond = np.full(n, np.nan)
    x = np.linalg.solve(M, b[..., None])[..., 0]
    return SolutionArrays(E, direction, x[:, 0], x[:, 1], x[:, 2], x[:, 3], x[:, 4], x[:, 5], cond)


def solve_scattering(params, E: float, direction=Direction.LEFT) -> ScatteringSolution:
    """Full stationary solution at a single energy.

    ``A`` and ``B`` refer to the frame with the emitter at ``|x0|``; for a
    negative ``x0`` that frame is the mirror image of the input.
    """
    return solve_batch(params, [float(E)], direction)[0]


class Gauge(enum.Enum):
    CAVITY = "cavity"  # a -> a e^{i chi}
    EMITTER = "emitter"  # sigma_- -> sigma_- e^{-i chi}


def apply_gauge(gp: GeneralizedCouplings, chi: float, which=Gauge.CAVITY) -> GeneralizedCouplings:
    """Move ``chi`` of the loop phase between the emitter-cavity coupling and a waveguide coupling.

    ``CAVITY`` takes ``phi -> phi - chi`` and ``theta_f -> theta_f - chi``;
    ``EMITTER`` takes ``phi -> phi - chi`` and ``theta_g -> theta_g + chi``.
    Both leave ``phi - theta_f + theta_g`` and every observable unchanged;
    with ``chi = phi`` the emitter-cavity coupling becomes real.
    """
    gp = as_generalized(gp)
    which = Gauge(which) if not isinstance(which, Gauge) else which
    base = gp.base.replace(phi=gp.base.phi - chi)
    if which is Gauge.CAVITY:
        return gp.replace(base=base, theta_f=gp.theta_f - chi)
    return gp.replace(base=base, theta_g=gp.theta_g + chi)
