"""Command-line front end.

Usage::

    wqed COMMAND [--key value ...] [--config FILE]

Commands: spectrum, map, features, wavepacket, validate.  Every key can be
given as a flag (``--delta-steps 201`` or ``--delta_steps 201``) or in an
INI-style config file of ``key = value`` lines with ``#`` comments; flags
win.  Exit status: 0 success, 1 computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np

from . import oracle, solver, sweep
from .errors import ConfigError, MalformedValue, MissingCommand, ParameterError, UnknownKey, WqedError
from .model import Direction, GeneralizedCouplings, SystemParams, validate_params

COMMANDS = ("spectrum", "map", "features", "wavepacket", "validate")
FORMATS = ("csv", "json")


def _direction(text):
    try:
        return Direction.parse(text)
    except ValueError:
        raise ValueError(f"expected left or right, got {text!r}") from None


def _engine(text):
    try:
        return sweep.Engine.parse(text)
    except ValueError:
        raise ValueError(f"expected one of {[e.value for e in sweep.Engine]}, got {text!r}") from None


def _format(text):
    text = text.strip().lower()
    if text not in FORMATS:
        raise ValueError(f"expected csv or json, got {text!r}")
    return text


def _steps(text):
    n = int(text)
    if n < 2:
        raise ValueError("need at least 2 steps")
    return n


def _finite(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


# key -> (parser, default); defaults are the colocated benchmark with omega = v_g = 1
KEYS = {
    "omega_a": (_finite, 1.0),
    "omega_e": (_finite, 1.0),
    "lambda": (_finite, 0.1),
    "phi": (_finite, 0.0),
    "f": (_finite, 0.3),
    "g": (_finite, 0.2),
    "v_g": (_finite, 1.0),
    "x0": (_finite, 0.0),
    "gamma_a": (_finite, 0.0),
    "gamma_e": (_finite, 0.0),
    "theta_f": (_finite, 0.0),
    "theta_g": (_finite, 0.0),
    "delta_min": (_finite, -0.4),
    "delta_max": (_finite, 0.4),
    "delta_steps": (_steps, 801),
    "phi_min": (_finite, 0.0),
    "phi_max": (_finite, math.pi),
    "phi_steps": (_steps, 601),
    "direction": (_direction, Direction.LEFT),
    "engine": (_engine, sweep.Engine.SOLVER),
    "sigma": (_finite, None),
    "dx": (_finite, None),
    "k0": (_finite, None),
    "sigma_x": (_finite, None),
    "t_max": (_finite, None),
    "output": (str, None),
    "format": (_format, "csv"),
}

# validate sweeps the regularized oracle at every point; keep its default grid small
VALIDATE_DELTA_STEPS = 101


@dataclass
class GridSpec:
    lo: float
    hi: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass
class RunConfig:
    command: str
    params: GeneralizedCouplings
    delta: GridSpec
    phi: GridSpec
    direction: Direction = Direction.LEFT
    engine: sweep.Engine = sweep.Engine.SOLVER
    sigma: float | None = None
    dx: float | None = None
    k0: float | None = None
    sigma_x: float | None = None
    t_max: float | None = None
    output: str | None = None
    format: str = "csv"
    explicit: frozenset = field(default_factory=frozenset)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise MalformedValue(message)


def _convert(key: str, raw: str):
    parser = KEYS[key][0]
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        raise MalformedValue(f"bad value for {key} ({exc})", raw) from None


def parse_file(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, ``[section]`` lines are ignored."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise MalformedValue(f"line {lineno}: expected key = value", line)
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KEYS:
            raise UnknownKey(f"line {lineno}: unknown key", key)
        values[key] = _convert(key, raw)
    return values


def _normalize_flag(token: str) -> str:
    if token.startswith("--") and len(token) > 2:
        name, eq, rest = token[2:].partition("=")
        return "--" + name.replace("-", "_") + eq + rest
    return token


def parse_config(argv, file: str | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from command-line tokens and optional config-file text."""
    argv = [_normalize_flag(tok) for tok in argv]
    parser = _Parser(prog="wqed", add_help=False, allow_abbrev=False)
    parser.add_argument("command", nargs="?")
    parser.add_argument("--config")
    for key in KEYS:
        parser.add_argument(f"--{key}", dest=key, default=None)
    ns, extra = parser.parse_known_args(argv)
    for tok in extra:
        if tok.startswith("-"):
            raise UnknownKey("unknown option", tok.split("=", 1)[0])
        raise MalformedValue("unexpected argument", tok)
    if ns.command is None:
        raise MissingCommand(f"no command given; expected one of {', '.join(COMMANDS)}")
    if ns.command not in COMMANDS:
        raise MissingCommand(f"unknown command; expected one of {', '.join(COMMANDS)}", ns.command)

    values = {key: default for key, (_, default) in KEYS.items()}
    explicit = set()
    if ns.config is not None:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                file = fh.read() if file is None else file + "\n" + fh.read()
        except OSError as exc:
            raise MalformedValue(f"cannot read config file ({exc.strerror})", ns.config) from None
    if file is not None:
        from_file = parse_file(file)
        values.update(from_file)
        explicit.update(from_file)
    for key in KEYS:
        raw = getattr(ns, key)
        if raw is not None:
            values[key] = _convert(key, raw)
            explicit.add(key)

    base = SystemParams(
        omega_a=values["omega_a"],
        omega_e=values["omega_e"],
        lambda_mag=values["lambda"],
        phi=values["phi"],
        f=values["f"],
        g=values["g"],
        v_g=values["v_g"],
        x0=values["x0"],
        gamma_a=values["gamma_a"],
        gamma_e=values["gamma_e"],
    )
    try:
        validate_params(base)
    except ParameterError as exc:
        raise MalformedValue(str(exc)) from None
    delta = GridSpec(values["delta_min"], values["delta_max"], values["delta_steps"])
    phi = GridSpec(values["phi_min"], values["phi_max"], values["phi_steps"])
    if ns.command == "validate" and "delta_steps" not in explicit:
        delta.steps = VALIDATE_DELTA_STEPS
    for name, grid in (("delta", delta), ("phi", phi)):
        if not grid.lo < grid.hi:
            raise MalformedValue(f"{name}_min must be < {name}_max", f"{grid.lo} >= {grid.hi}")
    return RunConfig(
        command=ns.command,
        params=GeneralizedCouplings(base, values["theta_f"], values["theta_g"]),
        delta=delta,
        phi=phi,
        direction=values["direction"],
        engine=values["engine"],
        sigma=values["sigma"],
        dx=values["dx"],
        k0=values["k0"],
        sigma_x=values["sigma_x"],
        t_max=values["t_max"],
        output=values["output"],
        format=values["format"],
        explicit=frozenset(explicit),
    )


# --- output formats ------------------------------------------------------------


def _num(x) -> str:
    return "%.12e" % x


def spectrum_csv(table: sweep.SpectrumTable) -> str:
    lines = [",".join(sweep.SpectrumTable.COLUMNS)]
    for values in zip(*table.columns()):
        lines.append(",".join(_num(v) for v in values))
    return "\n".join(lines) + "\n"


def map_csv(imap: sweep.IsolationMap) -> str:
    lines = ["phi\\delta," + ",".join(_num(d) for d in imap.delta_axis)]
    for phi, values, flags in zip(imap.phi_axis, imap.values_db, imap.saturated):
        cells = [_num(v) + ("*" if s else "") for v, s in zip(values, flags)]
        lines.append(_num(phi) + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _params_dict(gp: GeneralizedCouplings) -> dict:
    doc = asdict(gp.base)
    doc.update(theta_f=gp.theta_f, theta_g=gp.theta_g)
    return doc


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def spectrum_json(table: sweep.SpectrumTable, gp) -> str:
    rows = [[_jsonable(float(v)) for v in values] for values in zip(*table.columns())]
    return _dump({"columns": list(table.COLUMNS), "rows": rows, "engine": table.engine.value, "params": _params_dict(gp)})


def map_json(imap: sweep.IsolationMap, gp, engine) -> str:
    return _dump(
        {
            "delta_axis": imap.delta_axis.tolist(),
            "phi_axis": imap.phi_axis.tolist(),
            "values_db": imap.values_db.tolist(),
            "flags": [["saturated_zero" if s else "normal" for s in row] for row in imap.saturated],
            "engine": engine.value,
            "params": _params_dict(gp),
        }
    )


def features_doc(fs: sweep.FeatureSet) -> dict:
    def item(f):
        doc = asdict(f)
        if "direction" in doc:
            doc["direction"] = f.direction.value
        return doc

    return {
        "zeros": [item(f) for f in fs.zeros],
        "unit_peaks": [item(f) for f in fs.unit_peaks],
        "isolation_extrema": [item(f) for f in fs.isolation_extrema],
    }


def features_csv(fs: sweep.FeatureSet) -> str:
    lines = ["kind,E,direction,value,label"]
    for kind, items in (("zero", fs.zeros), ("unit_peak", fs.unit_peaks)):
        for f in items:
            lines.append(f"{kind},{_num(f.E)},{f.direction.value},{_num(f.T)},{f.label or ''}")
    for f in fs.isolation_extrema:
        lines.append(f"isolation_extremum,{_num(f.E)},,{_num(f.I_db)},{'saturated' if f.saturated else ''}")
    return "\n".join(lines) + "\n"


def write_atomic(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename; ``None`` or ``-`` is stdout."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wqed-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- commands ---------------------------------------------------------------------


def _render(cfg: RunConfig) -> tuple[str, bool]:
    """Text to write and whether the command succeeded."""
    gp = cfg.params
    if cfg.command == "spectrum":
        table = sweep.spectrum(gp, cfg.delta.values(), cfg.engine)
        return (spectrum_csv(table) if cfg.format == "csv" else spectrum_json(table, gp)), True

    if cfg.command == "map":
        imap = sweep.isolation_map(gp, cfg.delta.values(), cfg.phi.values(), cfg.engine)
        return (map_csv(imap) if cfg.format == "csv" else map_json(imap, gp, cfg.engine)), True

    if cfg.command == "features":
        table = sweep.spectrum(gp, cfg.delta.values(), cfg.engine)
        fs = sweep.find_features(table, gp)
        return (features_csv(fs) if cfg.format == "csv" else _dump(features_doc(fs))), True

    if cfg.command == "wavepacket":
        p = gp.base
        k0 = cfg.k0 if cfg.k0 is not None else p.omega_a / p.v_g
        E = p.v_g * k0
        kwargs = {"dx": cfg.dx if cfg.dx is not None else 0.05}
        if cfg.sigma_x is not None:
            kwargs["sigma_x"] = cfg.sigma_x
        wp = oracle.WavepacketConfig.for_problem(gp, E, **kwargs)
        if cfg.t_max is not None:
            wp = oracle.WavepacketConfig(wp.n_sites, wp.dx, wp.k0, wp.sigma_x, cfg.t_max)
        res = oracle.wavepacket_run(gp, wp, cfg.direction)
        ref = solver.solve_scattering(gp, E, cfg.direction)
        doc = {
            "E": E,
            "direction": cfg.direction.value,
            "T_num": res.T_num,
            "R_num": res.R_num,
            "absorbed": res.absorbed,
            "residual_node_norm": res.residual_node_norm,
            "residual_field_norm": res.residual_field_norm,
            "T_solver": ref.T,
            "R_solver": ref.R,
            "sigma_x": wp.sigma_x,
            "dx": wp.dx,
            "t_max": wp.t_max,
            "steps": res.steps,
        }
        if cfg.format == "json":
            return _dump(doc), True
        lines = ["key,value"] + [
            f"{k},{v}" if isinstance(v, str) else f"{k},{_num(v)}" for k, v in doc.items()
        ]
        return "\n".join(lines) + "\n", True

    if cfg.command == "validate":
        reg = None
        if cfg.sigma is not None:
            dx = cfg.dx if cfg.dx is not None else cfg.sigma / 8
            span = abs(gp.base.x0) + 12 * cfg.sigma
            reg = oracle.RegularizationConfig(cfg.sigma, dx, span)
        E_grid = gp.base.omega_a + cfg.delta.values()
        report = oracle.cross_validate(gp, E_grid, regularization=reg)
        print(report.summary(), file=sys.stderr)
        return report.to_json(), report.passed

    raise MissingCommand("unknown command", cfg.command)


def run(cfg: RunConfig) -> int:
    try:
        text, ok = _render(cfg)
        write_atomic(cfg.output, text)
    except ConfigError as exc:
        print(f"wqed: {exc}", file=sys.stderr)
        return 2
    except (WqedError, ValueError, ArithmeticError) as exc:
        print(f"wqed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"wqed: cannot write {cfg.output}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    return 0 if ok else 1


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ("-h", "--help"):
        print(__doc__.strip())
        print("\nkeys: " + ", ".join(KEYS))
        return 0
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"wqed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
