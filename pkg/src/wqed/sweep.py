"""Transmission spectra, isolation maps and spectral-feature extraction."""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import analytic, solver
from .errors import EngineMismatch
from .model import Direction, GeneralizedCouplings, as_generalized

# feature refinement
E_TOL = 1e-10
MAX_BISECT = 200
ZERO_RESIDUAL = 1e-8
FLAT_RANGE = 1e-12


class Engine(enum.Enum):
    ANALYTIC = "analytic"
    SOLVER = "solver"
    IMAGE = "image"  # closed forms, with the -x0 image expression for right incidence

    @classmethod
    def parse(cls, value) -> "Engine":
        return value if isinstance(value, cls) else cls(str(value).strip().lower())


def default_delta_grid(n: int = 801, span: float = 0.4) -> np.ndarray:
    return np.linspace(-span, span, n)


def default_phi_grid(n: int = 601) -> np.ndarray:
    return np.linspace(0.0, math.pi, n)


def thread_count() -> int:
    n = int(os.environ.get("WQED_THREADS", "0") or 0)
    return n if n > 0 else (os.cpu_count() or 1)


def _check_grid(grid, name: str) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError(f"{name} grid must be a nonempty 1-D sequence")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError(f"{name} grid must be strictly ascending")
    return grid


def _check_engine(gp: GeneralizedCouplings, engine: Engine) -> None:
    if engine is Engine.SOLVER:
        return
    if not gp.base.degenerate:
        raise EngineMismatch(f"{engine.value} engine needs omega_a == omega_e and gamma_a == gamma_e")
    if gp.theta_f != 0 or gp.theta_g != 0:
        raise EngineMismatch(f"{engine.value} engine has no waveguide coupling phases; use the solver")


def rates(gp: GeneralizedCouplings, E, direction: Direction, engine: Engine) -> tuple[np.ndarray, np.ndarray]:
    """``(T, R)`` arrays.  Closed-form engines give R only when it follows from flux (no loss)."""
    E = np.atleast_1d(np.asarray(E, dtype=float))
    if engine is Engine.SOLVER:
        sol = solver.solve_batch(gp, E, direction)
        return sol.T, sol.R
    p = gp.base
    if direction is Direction.LEFT:
        t = analytic.t_left(p, E)
    elif engine is Engine.IMAGE:
        t = analytic.t_right_image(p, E)
    else:
        t = analytic.t_right(p, E)
    T = np.abs(t) ** 2
    lossless = p.gamma_a == 0 and p.gamma_e == 0
    flux_ok = lossless and not (engine is Engine.IMAGE and direction is Direction.RIGHT)
    R = 1.0 - T if flux_ok else np.full_like(T, np.nan)
    return T, R


@dataclass
class SpectrumTable:
    delta: np.ndarray
    E: np.ndarray
    T_LR: np.ndarray
    R_LR: np.ndarray
    T_RL: np.ndarray
    R_RL: np.ndarray
    engine: Engine = Engine.SOLVER

    COLUMNS = ("delta", "E", "T_LR", "R_LR", "T_RL", "R_RL", "loss_LR", "loss_RL")

    @property
    def loss_LR(self) -> np.ndarray:
        return 1.0 - self.T_LR - self.R_LR

    @property
    def loss_RL(self) -> np.ndarray:
        return 1.0 - self.T_RL - self.R_RL

    def __len__(self) -> int:
        return self.delta.size

    def columns(self) -> list[np.ndarray]:
        return [getattr(self, name) for name in self.COLUMNS]

    def rows(self):
        for values in zip(*self.columns()):
            yield dict(zip(self.COLUMNS, (float(v) for v in values)))


def spectrum(params, delta_grid=None, engine=Engine.SOLVER) -> SpectrumTable:
    """Both-direction rates at ``E = omega_a + delta`` for every detuning."""
    gp = as_generalized(params)
    engine = Engine.parse(engine)
    _check_engine(gp, engine)
    delta = _check_grid(default_delta_grid() if delta_grid is None else delta_grid, "delta")
    E = gp.base.omega_a + delta
    T_lr, R_lr = rates(gp, E, Direction.LEFT, engine)
    T_rl, R_rl = rates(gp, E, Direction.RIGHT, engine)
    return SpectrumTable(delta, E, T_lr, R_lr, T_rl, R_rl, engine)


@dataclass
class IsolationMap:
    delta_axis: np.ndarray
    phi_axis: np.ndarray
    values_db: np.ndarray  # shape (len(phi_axis), len(delta_axis))
    saturated: np.ndarray  # same shape, True where clipped at +-SATURATION_DB

    def at(self, delta: float, phi: float) -> float:
        i = int(np.argmin(np.abs(self.phi_axis - phi)))
        j = int(np.argmin(np.abs(self.delta_axis - delta)))
        return float(self.values_db[i, j])


def isolation_map(params, delta_grid=None, phi_grid=None, engine=Engine.SOLVER, workers: int | None = None):
    """Isolation ratio over detuning and emitter-cavity phase.

    Rows are computed independently (optionally on a thread pool) and
    assembled in ``phi`` order, so the result does not depend on
    ``workers``.
    """
    gp = as_generalized(params)
    engine = Engine.parse(engine)
    _check_engine(gp, engine)
    delta = _check_grid(default_delta_grid() if delta_grid is None else delta_grid, "delta")
    phis = _check_grid(default_phi_grid() if phi_grid is None else phi_grid, "phi")
    E = gp.base.omega_a + delta

    def row(phi):
        g = gp.replace(base=gp.base.replace(phi=float(phi)))
        T_lr, _ = rates(g, E, Direction.LEFT, engine)
        T_rl, _ = rates(g, E, Direction.RIGHT, engine)
        return analytic.isolation_from_rates(T_lr, T_rl)

    workers = thread_count() if workers is None else workers
    if workers > 1 and phis.size > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, phis))
    else:
        rows = [row(phi) for phi in phis]
    values = np.array([r[0] for r in rows])
    flags = np.array([r[1] for r in rows], dtype=bool)
    return IsolationMap(delta, phis, values, flags)


# x0 values for the separation scan; the detuning and decay scans take explicit values
X0_SCAN = (0.0, 0.5, 1.0, 2.0)


def scan(params, name: str, values=None, delta_grid=None, engine=Engine.SOLVER) -> dict:
    """One spectrum per value of the parameter ``name`` (e.g. ``x0``, ``omega_e``, ``gamma_a``)."""
    gp = as_generalized(params)
    if values is None:
        if name != "x0":
            raise ValueError(f"no default scan values for {name!r}")
        values = X0_SCAN
    if name in ("theta_f", "theta_g"):
        return {v: spectrum(gp.replace(**{name: v}), delta_grid, engine) for v in values}
    if not hasattr(gp.base, name):
        raise ValueError(f"unknown parameter {name!r}")
    return {v: spectrum(gp.replace(base=gp.base.replace(**{name: v})), delta_grid, engine) for v in values}


# --- feature extraction -----------------------------------------------------


@dataclass(frozen=True)
class Zero:
    E: float
    direction: Direction
    T: float
    label: str | None = None
    predicted: float | None = None


@dataclass(frozen=True)
class UnitPeak:
    E: float
    direction: Direction
    T: float
    label: str | None = None
    predicted: float | None = None


@dataclass(frozen=True)
class IsolationExtremum:
    E: float
    phi: float
    I_db: float
    saturated: bool


@dataclass
class FeatureSet:
    zeros: list = field(default_factory=list)
    unit_peaks: list = field(default_factory=list)
    isolation_extrema: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.zeros or self.unit_peaks or self.isolation_extrema)


def _refine_extremum(func, lo: float, hi: float, sign: int, guess: float | None = None) -> float:
    """Locate the extremum of ``func`` in ``[lo, hi]`` by bisection on the slope sign.

    ``sign=+1`` for a minimum, ``-1`` for a maximum.  The slope is the
    symmetric difference ``func(x + h) - func(x - h)``, which for a locally
    quadratic function has the sign of ``x - x*`` independently of ``h``.
    """

    def slope(x):
        h = 1e-9 * max(1.0, abs(x))
        return sign * (func(x + h) - func(x - h))

    s_lo, s_hi = slope(lo), slope(hi)
    if not (s_lo <= 0 <= s_hi):
        return lo if func(lo) * sign < func(hi) * sign else hi
    for it in range(MAX_BISECT):
        if hi - lo <= E_TOL:
            break
        mid = guess if it == 0 and guess is not None and lo < guess < hi else 0.5 * (lo + hi)
        if slope(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _vertex(x, y) -> float:
    """Vertex of the parabola through three points, clamped to their span."""
    (x0, x1, x2), (y0, y1, y2) = x, y
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
    if a == 0:
        return x1
    return min(max(-b / (2 * a), x0), x2)


def _local_extrema(y: np.ndarray, sign: int) -> list[int]:
    """Interior indices of isolated local minima (sign=+1) or maxima (sign=-1)."""
    s = sign * y
    idx = []
    for i in range(1, y.size - 1):
        if s[i] < s[i - 1] and s[i] <= s[i + 1] or s[i] <= s[i - 1] and s[i] < s[i + 1]:
            if not idx or idx[-1] != i - 1:
                idx.append(i)
    return idx


def _bracket(E: np.ndarray, y: np.ndarray, i: int) -> tuple[float, float, float]:
    """Neighbouring grid points and the parabolic estimate between them."""
    return float(E[i - 1]), float(E[i + 1]), float(_vertex(E[i - 1 : i + 2], y[i - 1 : i + 2]))


def numerator_roots(params, E_lo: float, E_hi: float, direction=Direction.LEFT, samples: int = 2001) -> list[float]:
    """Real energies in ``[E_lo, E_hi]`` where the closed-form transmission numerator vanishes.

    Without loss the numerator is real only when ``sin(phi) = 0``; at other
    phases its real roots coincide with dressed energies at ``sin(k x0) = 0``
    and are not searched for.
    """
    p = as_generalized(params).base
    if p.gamma_a != 0 or p.gamma_e != 0 or not p.degenerate or abs(math.sin(p.phi)) > 1e-15:
        return []
    v, lam = p.v_g, p.lambda_mag
    c = 2.0 * p.f * p.g * lam * math.cos(p.phi) / v
    # with sin(phi) = 0 both directions share one real numerator

    def numerator(E):
        d = E - p.omega_a
        return d * d - lam * lam - c * math.sin(E / v * p.x0)

    E = np.linspace(E_lo, E_hi, samples)
    vals = np.array([numerator(e) for e in E])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]:
        if vals[i] == 0:
            roots.append(float(E[i]))
        elif vals[i + 1] != 0:
            roots.append(brentq(numerator, E[i], E[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return sorted(set(roots))


def _predictions(gp: GeneralizedCouplings, direction: Direction, lo: float, hi: float) -> list[tuple[str, float]]:
    p = gp.base
    if not p.degenerate or p.gamma_a != 0 or gp.theta_f != 0 or gp.theta_g != 0:
        return []
    out = []
    plus, minus = analytic.dressed_energies(p)
    out += [("dressed_plus", plus), ("dressed_minus", minus)]
    if p.x0 == 0 and (p.f or p.g):
        out.append(("quasidark", analytic.quasidark_energy(p)))
    if p.x0 != 0:
        out += [("numerator_root", r) for r in numerator_roots(p, lo, hi, direction)]
    return [(name, e) for name, e in out if lo <= e <= hi]


def _label(preds, lo, hi, E):
    inside = [(abs(e - E), name, e) for name, e in preds if lo <= e <= hi]
    if not inside:
        return None, None
    _, name, e = min(inside)
    return name, e


def find_features(table: SpectrumTable, params, engine=None) -> FeatureSet:
    """Transmission zeros, unit-transmission peaks and isolation extrema in ``table``.

    Candidates are grid-local extrema; each is refined on the underlying
    engine to ``E_TOL`` and kept only if it meets its defining residual
    (``T < 1e-8`` for a zero, ``1 - T < 1e-8`` for a peak).  A flat
    column yields no features.
    """
    gp = as_generalized(params)
    engine = Engine.parse(engine or table.engine)
    features = FeatureSet()
    if len(table) < 3:
        return features
    E = table.E

    for direction, T in ((Direction.LEFT, table.T_LR), (Direction.RIGHT, table.T_RL)):
        if np.ptp(T) < FLAT_RANGE:
            continue

        def T_at(x, direction=direction):
            return float(rates(gp, [x], direction, engine)[0][0])

        for sign, kind in ((+1, Zero), (-1, UnitPeak)):
            for i in _local_extrema(T, sign):
                lo, hi, guess = _bracket(E, T, i)
                x = _refine_extremum(T_at, lo, hi, sign, guess)
                val = T_at(x)
                residual = val if kind is Zero else 1.0 - val
                if residual >= ZERO_RESIDUAL:
                    continue
                label, pred = _label(_predictions(gp, direction, E[i - 1], E[i + 1]), E[i - 1], E[i + 1], x)
                features_list = features.zeros if kind is Zero else features.unit_peaks
                features_list.append(kind(x, direction, val, label, pred))

    I, _ = analytic.isolation_from_rates(table.T_LR, table.T_RL)
    if np.ptp(I) >= FLAT_RANGE * 1e3:

        def I_at(x):
            T_lr = rates(gp, [x], Direction.LEFT, engine)[0][0]
            T_rl = rates(gp, [x], Direction.RIGHT, engine)[0][0]
            return analytic.isolation_from_rates(T_lr, T_rl)[0]

        for sign in (+1, -1):
            for i in _local_extrema(I, sign):
                lo, hi, guess = _bracket(E, I, i)
                x = _refine_extremum(I_at, lo, hi, sign, guess)
                db = I_at(x)
                features.isolation_extrema.append(
                    IsolationExtremum(x, gp.base.phi, db, abs(db) >= analytic.SATURATION_DB)
                )
        features.isolation_extrema.sort(key=lambda f: f.E)
    features.zeros.sort(key=lambda f: (f.E, f.direction.value))
    features.unit_peaks.sort(key=lambda f: (f.E, f.direction.value))
    return features
