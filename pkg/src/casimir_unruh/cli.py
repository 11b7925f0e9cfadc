"""Command-line front end: ``energy``, ``sweep``, ``crossover``, ``validate``.

Exit codes: 0 ok, 1 validation failure, 2 configuration error, 3 accuracy
error, 4 sweep failure quota exceeded, 5 range error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import asymptotics as asy
from .core import (
    CONVENTION,
    AccuracyError,
    CasimirError,
    ConfigError,
    DomainError,
    PhysicalConfig,
    Scenario,
    classify_regime,
    errors_only,
    validate_config,
)
from .energy_engine import QuadratureSpec, energy_vf, energy_vf_oracle

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_ACCURACY, EXIT_SWEEP, EXIT_RANGE = 0, 1, 2, 3, 4, 5
CONFIG_DIR_ENV = "CASIMIR_UNRUH_CONFIG_DIR"
DEFAULT_CONFIG_NAME = "default.ini"

CSV_COLUMNS = (
    "swept_var", "value", "omega_z", "a_z", "T_z", "regime", "E", "E_err", "E_oracle", "E_oracle_err",
    "E_near", "E_far", "E_thermal", "E_accel", "ratio_acc_thermal",
)
CROSSOVER_COLUMNS = ("z", "a_z", "E_acc", "E_acc_err", "E_thermal_TU", "E_thermal_TU_err", "ratio", "ratio_scaled", "regime")

PHYSICAL_KEYS = {"coupling": float, "gap": float, "separation": float, "acceleration": float, "temperature": float, "scenario": str}
QUADRATURE_KEYS = {
    "regulator": float, "n_extrapolation": int, "omega_max_factor": float, "u_max": float,
    "tolerance": float, "subdivision_limit": int, "pv_halfwidth": float,
}
SWEEP_KEYS = {"variable": str, "start": float, "stop": float, "count": int, "spacing": str, "methods": str, "threshold": float}
SECTIONS = {"physical": PHYSICAL_KEYS, "quadrature": QUADRATURE_KEYS, "sweep": SWEEP_KEYS}
ALIASES = {"lambda": "coupling", "omega": "gap", "z": "separation", "a": "acceleration", "T": "temperature"}
SWEEP_FIELDS = {"z": "separation", "a": "acceleration", "T": "temperature", "omega": "gap"}


class RangeError(CasimirError):
    """Requested scan range does not cover the feature being located."""


@dataclass(frozen=True)
class SweepSpec:
    base: PhysicalConfig
    variable: str = "z"
    start: float = 1.0
    stop: float = 10.0
    count: int = 10
    spacing: str = "log"
    methods: tuple = ("engine", "closed")
    threshold: float = 0.5

    def __post_init__(self):
        if self.variable not in SWEEP_FIELDS:
            raise ConfigError(f"sweep.variable must be one of {sorted(SWEEP_FIELDS)}, got {self.variable!r}")
        if not 2 <= self.count <= 10**6:
            raise ConfigError(f"sweep.count must lie in [2, 1e6], got {self.count}")
        if not (self.start > 0 and self.stop > 0 and math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("sweep endpoints must be finite and > 0")
        if self.spacing not in ("log", "linear"):
            raise ConfigError(f"sweep.spacing must be 'log' or 'linear', got {self.spacing!r}")
        bad = set(self.methods) - {"engine", "oracle", "closed"}
        if bad:
            raise ConfigError(f"unknown sweep methods {sorted(bad)}")
        sc = self.base.scenario
        if self.variable == "a" and sc is not Scenario.ACCELERATED:
            raise ConfigError("sweeping a requires scenario = accelerated")
        if self.variable == "T" and sc is not Scenario.THERMAL:
            raise ConfigError("sweeping T requires scenario = thermal")
        if not 0 < self.threshold < 1:
            raise ConfigError("sweep.threshold must lie in (0, 1)")

    def grid(self) -> np.ndarray:
        lo, hi = sorted((self.start, self.stop))
        g = np.geomspace(lo, hi, self.count) if self.spacing == "log" else np.linspace(lo, hi, self.count)
        return np.unique(g)


@dataclass
class RunConfig:
    physical: dict = field(default_factory=dict)
    quadrature: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    def physical_config(self) -> PhysicalConfig:
        p = dict(self.physical)
        missing = [k for k in ("coupling", "gap", "separation") if k not in p]
        if missing:
            raise ConfigError(f"missing [physical] keys: {', '.join(missing)}")
        a, t = p.get("acceleration", 0.0), p.get("temperature", 0.0)
        if "scenario" not in p:
            p["scenario"] = Scenario.ACCELERATED if a > 0 else Scenario.THERMAL if t > 0 else Scenario.STATIC_VACUUM
        try:
            p["scenario"] = Scenario(p["scenario"])
        except ValueError:
            raise ConfigError(f"unknown scenario {p['scenario']!r}; expected one of {[s.value for s in Scenario]}") from None
        cfg = PhysicalConfig(**p)
        bad = errors_only(validate_config(cfg))
        if bad:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(str(v) for v in bad))
        return cfg

    def quad_spec(self) -> QuadratureSpec:
        return QuadratureSpec(**self.quadrature)

    def sweep_spec(self, base: PhysicalConfig) -> SweepSpec:
        s = dict(self.sweep)
        if "methods" in s:
            s["methods"] = tuple(m.strip() for m in s["methods"].split(",") if m.strip())
        return SweepSpec(base=base, **s)


def _convert(section: str, key: str, raw: str):
    kind = SECTIONS[section][key]
    try:
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as {kind.__name__}") from None


def _resolve_key(key: str) -> tuple[str, str]:
    if "." in key:
        section, name = key.split(".", 1)
    else:
        section, name = None, key
    name = ALIASES.get(name, name)
    if section is None:
        hits = [s for s, keys in SECTIONS.items() if name in keys]
        if len(hits) != 1:
            raise ConfigError(f"unknown configuration key {key!r}")
        section = hits[0]
    if section not in SECTIONS or name not in SECTIONS[section]:
        raise ConfigError(f"unknown configuration key {key!r}")
    return section, name


def _locate_config(path: str | None) -> str | None:
    base = os.environ.get(CONFIG_DIR_ENV)
    if path is None:
        if base and os.path.isfile(os.path.join(base, DEFAULT_CONFIG_NAME)):
            return os.path.join(base, DEFAULT_CONFIG_NAME)
        return None
    if os.path.isfile(path) or os.path.isabs(path) or not base:
        return path
    return os.path.join(base, path)


def load_config(path: str | None, overrides=()) -> RunConfig:
    """Read an INI file (sections ``physical``, ``quadrature``, ``sweep``) and apply overrides."""
    run = RunConfig()
    path = _locate_config(path)
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path!r}: {exc}") from None
        for section in parser.sections():
            if section not in SECTIONS:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                name = ALIASES.get(key, key)
                if name not in SECTIONS[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                getattr(run, section)[name] = _convert(section, name, raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        section, name = _resolve_key(key.strip())
        getattr(run, section)[name] = _convert(section, name, raw)
    return run


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if not math.isfinite(x):
        return ""
    return "%.17g" % x


def _closed_forms(c: PhysicalConfig) -> dict:
    lam, om, z, a, t = c.coupling, c.gap, c.separation, c.acceleration, c.temperature
    out = {"E_near": asy.e_near_static(lam, om, z), "E_far": asy.e_far_static(lam, om, z), "E_thermal": None, "E_accel": None}
    if t > 0:
        out["E_thermal"] = asy.e_thermal_classical(lam, om, z, t)
    if a > 0:
        out["E_thermal"] = asy.e_thermal_classical(lam, om, z, asy.unruh_temperature(a))
        out["E_accel"] = asy.e_accelerated(lam, om, z, a)
    return out


def _error_code(exc: Exception) -> str:
    if isinstance(exc, AccuracyError):
        return "ERROR:accuracy"
    if isinstance(exc, (ConfigError, DomainError)):
        return "ERROR:config"
    return "ERROR:internal"


def _thermal_partner(c: PhysicalConfig) -> PhysicalConfig:
    return c.replace(acceleration=0.0, temperature=asy.unruh_temperature(c.acceleration), scenario=Scenario.THERMAL)


def evaluate_point(args) -> dict:
    """One sweep row; failures are recorded in the ``regime`` field."""
    spec, value, quad = args
    c = spec.base.replace(**{SWEEP_FIELDS[spec.variable]: float(value)})
    g = c.groups()
    row = {k: None for k in CSV_COLUMNS}
    row.update(swept_var=spec.variable, value=float(value), omega_z=g.omega_z, a_z=g.a_z, T_z=g.t_z)
    try:
        bad = errors_only(validate_config(c))
        if bad:
            raise ConfigError("; ".join(map(str, bad)))
        row["regime"] = classify_regime(g).value
        if "closed" in spec.methods:
            row.update(_closed_forms(c))
        if "engine" in spec.methods:
            r = energy_vf(c, quad)
            row["E"], row["E_err"] = r.value, r.error
            if c.scenario is Scenario.ACCELERATED:
                row["ratio_acc_thermal"] = r.value / energy_vf(_thermal_partner(c), quad).value
        if "oracle" in spec.methods:
            o = energy_vf_oracle(c, quad)
            row["E_oracle"], row["E_oracle_err"] = o.value, o.error
    except Exception as exc:  # per-point failures must not abort the sweep
        row["regime"] = _error_code(exc)
    return row


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def run_sweep(spec: SweepSpec, quad: QuadratureSpec, jobs: int = 1) -> list[dict]:
    return _map(evaluate_point, [(spec, v, quad) for v in spec.grid()], jobs)


def rows_to_csv(rows, columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(k)) for k in columns])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def rows_to_json(rows, metadata: dict) -> str:
    clean = [{k: _jsonable(v) for k, v in r.items()} for r in rows]
    return json.dumps({"metadata": metadata, "rows": clean}, indent=2, sort_keys=False, default=str) + "\n"


def _metadata(quad: QuadratureSpec, extra: dict | None = None) -> dict:
    m = {
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "quadrature": {k: _jsonable(v) for k, v in asdict(quad).items()},
        "convention": dict(CONVENTION),
    }
    m.update(extra or {})
    return m


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _quad_from(run: RunConfig, tolerance: float | None) -> QuadratureSpec:
    q = run.quad_spec()
    return q.replace(tolerance=tolerance) if tolerance is not None else q


def cmd_energy(args) -> int:
    run = load_config(args.config, args.set)
    cfg = run.physical_config()
    quad = _quad_from(run, args.tolerance)
    r = energy_vf(cfg, quad)
    record = {
        "value": r.value,
        "error": r.error,
        "regime": r.regime,
        "method": r.method,
        "scenario": cfg.scenario.value,
        "groups": asdict(cfg.groups()),
        "convention": r.convention,
        "diagnostics": {k: v for k, v in r.diagnostics.items() if isinstance(v, (int, float, str))},
    }
    warnings = [str(v) for v in validate_config(cfg) if v.severity == "warning"]
    if warnings:
        record["warnings"] = warnings
    if args.format == "csv":
        g = cfg.groups()
        row = {k: None for k in CSV_COLUMNS}
        row.update(omega_z=g.omega_z, a_z=g.a_z, T_z=g.t_z, regime=r.regime, E=r.value, E_err=r.error, **_closed_forms(cfg))
        _emit(rows_to_csv([row]), args.out)
    else:
        _emit(json.dumps(record, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    run = load_config(args.config, args.set)
    cfg = run.physical_config()
    quad = _quad_from(run, args.tolerance)
    spec = run.sweep_spec(cfg)
    rows = run_sweep(spec, quad, args.jobs)
    if args.format == "json":
        _emit(rows_to_json(rows, _metadata(quad, {"sweep": {**asdict(spec), "base": asdict(cfg)}})), args.out)
    else:
        _emit(rows_to_csv(rows), args.out)
    failed = sum(1 for r in rows if str(r["regime"]).startswith("ERROR:"))
    if failed > 0.1 * len(rows):
        print(f"sweep: {failed}/{len(rows)} points failed", file=sys.stderr)
        return EXIT_SWEEP
    return EXIT_OK


def _crossover_row(args) -> dict:
    c, quad = args
    e = energy_vf(c, quad)
    t = energy_vf(_thermal_partner(c), quad)
    az = c.acceleration * c.separation
    ratio = e.value / t.value
    return {
        "z": c.separation, "a_z": az, "E_acc": e.value, "E_acc_err": e.error,
        "E_thermal_TU": t.value, "E_thermal_TU_err": t.error,
        "ratio": ratio, "ratio_scaled": ratio / asy.acc_to_thermal_ratio(az), "regime": e.regime,
    }


def crossover_scan(cfg: PhysicalConfig, spec: SweepSpec, quad: QuadratureSpec, jobs: int = 1):
    """Paired accelerated/thermal(T_U) energies over ``z`` and the departure point ``z*``.

    ``z*`` is where ``|ratio - 1|`` first reaches ``spec.threshold``,
    interpolated linearly in ``log z``.
    """
    if cfg.scenario is not Scenario.ACCELERATED:
        raise ConfigError("crossover requires scenario = accelerated with a > 0")
    if spec.variable != "z":
        raise ConfigError("crossover scans sweep.variable = z")
    a = cfg.acceleration
    zs = spec.grid()
    if not (a * zs[0] <= 0.1 and a * zs[-1] >= 10.0):
        raise RangeError(
            f"z-range [{zs[0]:g}, {zs[-1]:g}] gives az in [{a * zs[0]:.3g}, {a * zs[-1]:.3g}]; "
            f"it must span az <= 0.1 to az >= 10 (try start <= {0.1 / a:.3g}, stop >= {10 / a:.3g})"
        )
    rows = _map(_crossover_row, [(cfg.replace(separation=float(z)), quad) for z in zs], jobs)
    dev = np.array([abs(r["ratio"] - 1.0) for r in rows])
    idx = np.flatnonzero(dev >= spec.threshold)
    z_star = None
    if idx.size:
        i = int(idx[0])
        if i == 0:
            z_star = float(zs[0])
        else:
            lz0, lz1 = math.log(zs[i - 1]), math.log(zs[i])
            f = (spec.threshold - dev[i - 1]) / (dev[i] - dev[i - 1])
            z_star = math.exp(lz0 + f * (lz1 - lz0))
    last = rows[-1]["ratio_scaled"]
    report = {
        "acceleration": a,
        "threshold": spec.threshold,
        "z_star": z_star,
        "z_star_times_a": None if z_star is None else z_star * a,
        "crossover_length": asy.crossover_length(a),
        "small_az_ratio": rows[0]["ratio"],
        "large_az_ratio_times_az2_over_2": last,
        "large_az_ratio_check": "pass" if abs(last - 1) <= 0.05 else "fail",
    }
    return rows, report


def cmd_crossover(args) -> int:
    run = load_config(args.config, args.set)
    cfg = run.physical_config()
    quad = _quad_from(run, args.tolerance)
    spec = run.sweep_spec(cfg)
    rows, report = crossover_scan(cfg, spec, quad, args.jobs)
    if args.format == "json":
        _emit(rows_to_json(rows, _metadata(quad, {"crossover": report})), args.out)
    else:
        _emit(rows_to_csv(rows, CROSSOVER_COLUMNS), args.out)
    for k, v in report.items():
        print(f"{k}: {v}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import FAIL, format_table, run_validation

    quad = QuadratureSpec() if args.tolerance is None else QuadratureSpec(tolerance=args.tolerance)
    checks = run_validation(quad)
    text = format_table(checks) + "\n"
    n_fail = sum(c.status == FAIL for c in checks)
    text += f"\n{len(checks) - n_fail}/{len(checks)} checks passed\n"
    if args.format == "json":
        _emit(json.dumps([asdict(c) | {"deps": sorted(c.deps)} for c in checks], indent=2) + "\n", args.out)
        sys.stderr.write(text)
    else:
        _emit(text, args.out)
    return EXIT_VALIDATION if n_fail else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="casimir-unruh", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help=f"INI config file (relative paths also searched in ${CONFIG_DIR_ENV})")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], help="override a config key (repeatable)")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for grid evaluation")
    common.add_argument("--tolerance", type=float, default=None, metavar="X", help="relative quadrature tolerance")
    for name, fn, fmt, helptext in (
        ("energy", cmd_energy, "json", "evaluate one configuration"),
        ("sweep", cmd_sweep, "csv", "evaluate a parameter grid"),
        ("crossover", cmd_crossover, "csv", "scan the thermal to non-thermal crossover"),
        ("validate", cmd_validate, "csv", "run the release checks"),
    ):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.set_defaults(func=fn, default_format=fmt)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except RangeError as exc:
        print(f"range error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AccuracyError as exc:
        print(f"accuracy error: {exc} (residual {exc.residual:.3g})", file=sys.stderr)
        for k, v in exc.diagnostics.items():
            print(f"  {k}: {v}", file=sys.stderr)
        return EXIT_ACCURACY


if __name__ == "__main__":
    sys.exit(main())
