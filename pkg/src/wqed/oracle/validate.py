"""Cross-checks of the closed forms and the solver against the oracles."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import analytic, solver
from ..errors import WqedError
from ..model import Direction, as_generalized
from .regularized import RegularizationConfig, regularized_scatter
from .wavepacket import WavepacketConfig, wavepacket_run

DEFAULT_TOLERANCES = {"analytic": 1e-11, "regularized": 1e-3, "wavepacket": 2e-2}


@dataclass
class ValidationReport:
    records: list = field(default_factory=list)
    max_deviation: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    @property
    def verdicts(self) -> dict:
        return {m: self.max_deviation[m] <= tol for m, tol in self.tolerances.items() if m in self.max_deviation}

    @property
    def passed(self) -> bool:
        return not self.errors and all(self.verdicts.values())

    def summary(self) -> str:
        lines = []
        for method, tol in self.tolerances.items():
            if method not in self.max_deviation:
                continue
            dev = self.max_deviation[method]
            verdict = "PASS" if dev <= tol else "FAIL"
            lines.append(f"{verdict} {method:<12s} max deviation {dev:.3e} (tolerance {tol:.1e})")
        for err in self.errors:
            lines.append(f"ERROR {err['method']} E={err['E']!r}: {err['error']}")
        return "\n".join(lines)

    def to_json(self) -> str:
        doc = {
            "records": self.records,
            "summary": {
                "max_deviation": self.max_deviation,
                "tolerances": self.tolerances,
                "verdicts": self.verdicts,
                "passed": self.passed,
                "errors": self.errors,
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _point(gp, E, directions, methods, reg_cfg, wp_kwargs):
    records, errors = [], []
    for direction in directions:
        try:
            ref = solver.solve_scattering(gp, E, direction)
        except WqedError as exc:
            errors.append({"E": E, "direction": direction.value, "method": "solver", "error": str(exc)})
            continue
        records.append(_record(E, direction, "solver", ref.t, ref.T, 0.0))
        for method in methods:
            try:
                if method == "analytic":
                    t = analytic.transmission_amplitude(gp.base, E, direction)
                    records.append(_record(E, direction, method, t, abs(t) ** 2, abs(t - ref.t)))
                elif method == "regularized":
                    cfg = reg_cfg or RegularizationConfig.for_problem(gp, E)
                    t, r = regularized_scatter(gp, E, direction, cfg)
                    dev = abs(t - ref.t) + abs(r - ref.r)
                    records.append(_record(E, direction, method, t, abs(t) ** 2, dev))
                elif method == "wavepacket":
                    cfg = WavepacketConfig.for_problem(gp, E, **wp_kwargs)
                    res = wavepacket_run(gp, cfg, direction)
                    records.append(_record(E, direction, method, None, res.T_num, abs(res.T_num - ref.T)))
            except WqedError as exc:
                errors.append({"E": E, "direction": direction.value, "method": method, "error": str(exc)})
    return records, errors


def _record(E, direction, method, t, T, deviation):
    return {
        "E": float(E),
        "direction": direction.value,
        "method": method,
        "t_re": None if t is None else float(np.real(t)),
        "t_im": None if t is None else float(np.imag(t)),
        "T": float(T),
        "deviation": float(deviation),
    }


def cross_validate(
    params,
    E_grid,
    tolerances: dict | None = None,
    wavepacket: bool = False,
    regularization: RegularizationConfig | None = None,
    wavepacket_options: dict | None = None,
    workers: int | None = None,
) -> ValidationReport:
    """Run every applicable method at each energy and collect deviations from the solver.

    Deviations: ``|t - t_solver|`` for the closed form, ``|t - t_s| + |r - r_s|``
    for the regularized oracle, ``|T_num - T_solver|`` for wavepackets.
    Sub-operation failures are recorded in ``errors`` instead of raised.
    """
    gp = as_generalized(params)
    E_grid = [float(E) for E in np.atleast_1d(E_grid)]
    if not E_grid:
        raise ValueError("energy grid is empty")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    methods = []
    if gp.base.degenerate and gp.theta_f == 0 and gp.theta_g == 0:
        methods.append("analytic")
    methods.append("regularized")
    if wavepacket:
        methods.append("wavepacket")
    directions = (Direction.LEFT, Direction.RIGHT)
    wp_kwargs = wavepacket_options or {}

    if workers is None:
        workers = int(os.environ.get("WQED_THREADS", "0") or 0) or (os.cpu_count() or 1)

    def task(E):
        return _point(gp, E, directions, methods, regularization, wp_kwargs)

    if workers > 1 and len(E_grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, E_grid))
    else:
        results = [task(E) for E in E_grid]

    report = ValidationReport(tolerances={m: tol[m] for m in methods})
    for records, errors in results:
        report.records.extend(records)
        report.errors.extend(errors)
    for method in methods:
        devs = [r["deviation"] for r in report.records if r["method"] == method]
        if devs:
            report.max_deviation[method] = max(devs)
    return report
