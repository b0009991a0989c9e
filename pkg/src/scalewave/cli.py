"""Command-line front end: simulations, sweeps, verification suites, fits.

Configuration is a flat JSON object whose keys are exactly the model/run
field names (plus grid and data keys, documented in the README); overrides
come from repeated ``--set key=value`` flags.  Unknown keys are rejected.
CSV and JSON outputs are byte-stable for identical inputs: floats are
written with 17 significant digits, '.' decimal separator and '\\n' line
endings, and JSON keys are sorted.

Exit codes: 0 success, 1 usage error, 2 regime/config error, 3 run diverged.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import fit_decay, sweep
from .errors import RegimeError, WeightOverflowError
from .grid import make_radial_grid
from .model import ModelParams, decay_exponents, discriminant, regime_check
from .odi import OdiProblem, comparison_check, solve
from .solver import OUTCOME_DIVERGED, RunConfig, RunReport, SAMPLE_KEYS, run
from .verify import (
    bihari_check,
    check_dissipativity_signs,
    check_embeddings,
    check_energy_identity,
    check_weighted_gradient_bound,
    check_psi_identities,
    default_manufactured_solution,
    gn_ratio_check,
    standard_family,
)

log = logging.getLogger("scalewave")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

CSV_COLUMNS = ("t",) + SAMPLE_KEYS

_MODEL_KEYS = {"n": int, "mu1": float, "mu2sq": float, "p": float}
_RUN_KEYS = {
    "s": float,
    "t_max": float,
    "nonlinear": bool,
    "cfl_safety": float,
    "blowup_threshold": float,
    "record_every": int,
}
_GRID_KEYS = {"r_max": float, "dr": float}
_DATA_KEYS = {
    "u0_kind": str,
    "u0_amplitude": float,
    "u0_width": float,
    "u1_kind": str,
    "u1_amplitude": float,
    "u1_width": float,
}
_SWEEP_KEYS = {"p_values": list, "amplitudes": list}
_ODI_KEYS = {"k0": float, "k1": float, "alpha": float, "p": float, "f0": float,
             "df0": float, "dt": float}
_FIT_KEYS = {"column": str, "t_min": float, "t_max": float, "log_corrected": bool,
             "n": int, "mu1": float, "mu2sq": float, "p": float}
_VERIFY_KEYS = {"n": int, "mu1": float, "mu2sq": float, "p": float, "sigma": float,
                "q": float, "r_max": float, "dr": float}

SIMULATE_DEFAULTS = {
    "n": 1, "mu1": 4.0, "mu2sq": 0.0, "p": 2.0,
    "s": 0.0, "t_max": 10.0, "nonlinear": True, "cfl_safety": 0.9,
    "blowup_threshold": 1e8, "record_every": 10,
    "r_max": 30.0, "dr": 0.05,
    # width 0.4 keeps Gaussian data inside the weighted space up to mu1 = 4
    "u0_kind": "gaussian", "u0_amplitude": 1.0, "u0_width": 0.4,
    "u1_kind": "zero", "u1_amplitude": 0.0, "u1_width": 0.4,
}
ODI_DEFAULTS = {"k0": 4.0, "k1": 1.0, "alpha": -2.0, "p": 3.0, "f0": 1.0,
                "df0": 1.0, "dt": 0.0}
FIT_DEFAULTS = {"column": "l2", "t_min": 0.0, "t_max": math.inf,
                "log_corrected": False, "n": 1, "mu1": 1.0, "mu2sq": 0.0, "p": 2.0}
VERIFY_DEFAULTS = {"n": 1, "mu1": 1.0, "mu2sq": 0.0, "p": 2.0, "sigma": 0.5,
                   "q": 4.0, "r_max": 40.0, "dr": 0.02}


class ConfigError(ValueError):
    pass


def format_float(x: float) -> str:
    """Fixed 17-significant-digit formatting; byte-identical across runs."""
    return f"{float(x):.17g}"


def _coerce(key: str, value, target_type):
    if target_type is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str):
            lowered = value.strip().lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
        raise ConfigError(f"key {key!r}: cannot parse {value!r} as a boolean")
    if target_type is list:
        if isinstance(value, str):
            value = json.loads(value)
        if not isinstance(value, list):
            raise ConfigError(f"key {key!r}: expected a list, got {value!r}")
        return [float(v) for v in value]
    try:
        return target_type(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"key {key!r}: cannot parse {value!r} as {target_type.__name__}") from exc


def load_config(allowed: dict, defaults: dict, config_path: str | None,
                overrides: list[str]) -> dict:
    """Merge defaults, a flat JSON config file and --set overrides; reject unknown keys."""
    merged = dict(defaults)
    if config_path is not None:
        try:
            raw = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a flat JSON object")
        for key, value in raw.items():
            if key not in allowed:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = _coerce(key, value, allowed[key])
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        if key not in allowed:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = _coerce(key, value, allowed[key])
    return merged


@dataclass(frozen=True)
class DataProfile:
    """Radial data profile; a picklable callable so sweeps can fan out to processes."""

    kind: str
    amplitude: float
    width: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-((r / self.width) ** 2))
        s = np.clip(r / self.width, 0.0, 1.0)
        return self.amplitude * (1.0 - s**2) ** 3


def _data_profile(kind: str, amplitude: float, width: float) -> DataProfile:
    if kind not in ("zero", "gaussian", "bump"):
        raise ConfigError(f"unknown data kind {kind!r} (expected zero, gaussian or bump)")
    return DataProfile(kind=kind, amplitude=amplitude, width=width)


def write_run_csv(report: RunReport, path) -> None:
    """Serialize the recorded samples with the canonical column set."""
    lines = [",".join(CSV_COLUMNS)]
    for sample in report.samples:
        cells = [format_float(sample.t)]
        cells += [format_float(sample.values[key]) for key in SAMPLE_KEYS]
        lines.append(",".join(cells))
    with open(path, "w", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def read_series_csv(path, column: str):
    """Read (t, column) out of a CSV produced by ``simulate``."""
    with open(path, "r", newline="") as handle:
        header = handle.readline().strip().split(",")
        rows = [line.strip().split(",") for line in handle if line.strip()]
    if "t" not in header or column not in header:
        raise ConfigError(f"CSV {path} lacks a 't' or {column!r} column")
    ti = header.index("t")
    ci = header.index(column)
    t = np.array([float(row[ti]) for row in rows])
    v = np.array([float(row[ci]) for row in rows])
    return t, v


def _write_json(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="\n") as handle:
            handle.write(text)


def _report_header(kind: str, seed: int) -> dict:
    return {"kind": kind, "seed": int(seed), "tool": f"scalewave {__version__}"}


def _model_params(cfg: dict) -> ModelParams:
    return ModelParams(n=cfg["n"], mu1=cfg["mu1"], mu2sq=cfg["mu2sq"], p=cfg["p"])


def _build_run(cfg: dict):
    params = _model_params(cfg)
    grid = make_radial_grid(cfg["n"], cfg["r_max"], cfg["dr"])
    config = RunConfig(
        params=params, s=cfg["s"], t_max=cfg["t_max"], nonlinear=cfg["nonlinear"],
        cfl_safety=cfg["cfl_safety"], blowup_threshold=cfg["blowup_threshold"],
        record_every=cfg["record_every"],
    )
    u0 = _data_profile(cfg["u0_kind"], cfg["u0_amplitude"], cfg["u0_width"])
    u1 = _data_profile(cfg["u1_kind"], cfg["u1_amplitude"], cfg["u1_width"])
    return grid, config, u0, u1


def _cmd_simulate(args) -> int:
    cfg = load_config({**_MODEL_KEYS, **_RUN_KEYS, **_GRID_KEYS, **_DATA_KEYS},
                      SIMULATE_DEFAULTS, args.config, args.set)
    grid, config, u0, u1 = _build_run(cfg)
    report = run(grid, u0, u1, config)
    out = args.out or "run.csv"
    write_run_csv(report, out)
    log.info("simulate: outcome=%s samples=%d -> %s", report.outcome, len(report.samples), out)
    print(f"outcome: {report.outcome}"
          + (f" (blow-up at t={format_float(report.blowup_time)})" if report.blowup_time else ""))
    return EXIT_DIVERGED if report.outcome == OUTCOME_DIVERGED else EXIT_OK


def _cmd_sweep(args) -> int:
    allowed = {**_MODEL_KEYS, **_RUN_KEYS, **_GRID_KEYS, **_DATA_KEYS, **_SWEEP_KEYS}
    defaults = {**SIMULATE_DEFAULTS, "p_values": [2.0], "amplitudes": [1.0]}
    cfg = load_config(allowed, defaults, args.config, args.set)
    grid, config, u0, u1 = _build_run(cfg)
    zero_u1 = cfg["u1_kind"] == "zero"
    rows = sweep(grid, _model_params(cfg), cfg["p_values"], cfg["amplitudes"], config,
                 u0, None if zero_u1 else u1, jobs=args.jobs)
    header = ("p,amplitude,outcome,blowup_time,l2_exponent,p_crit,"
              "global_existence_applicable,blowup_range_applicable,delta")
    lines = [header]
    for row in rows:
        cells = [
            format_float(row.params.p),
            format_float(row.amplitude),
            row.outcome,
            format_float(row.blowup_time) if row.blowup_time is not None else "",
            format_float(row.l2_exponent) if row.l2_exponent is not None else "",
            format_float(row.p_crit) if row.p_crit is not None else "",
            str(row.global_existence_applicable).lower(),
            str(row.blowup_range_applicable).lower(),
            format_float(discriminant(row.params)),
        ]
        lines.append(",".join(cells))
    out = args.out or "sweep.csv"
    with open(out, "w", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    print(f"sweep: {len(rows)} rows -> {out}")
    return EXIT_OK


def _verify_identities(cfg: dict, seed: int) -> list:
    rng = np.random.default_rng(seed)
    params = _model_params(cfg)
    times = rng.uniform(0.0, 5.0, size=1000)
    radii = rng.uniform(0.0, 3.0, size=1000)
    checks = [
        check_psi_identities(params, times, radii),
        check_dissipativity_signs(params, times, radii),
    ]
    ms = default_manufactured_solution()
    pts = list(zip(rng.uniform(0.0, 5.0, size=100), rng.uniform(0.1, 3.0, size=100)))
    checks.append(check_energy_identity(ms, params, pts))
    return checks


def _verify_inequalities(cfg: dict, seed: int) -> list:
    params = _model_params(cfg)
    family = standard_family(seed=seed)
    grid = make_radial_grid(cfg["n"], cfg["r_max"], cfg["dr"])
    sigmas = (0.25, 0.5, 1.0)
    times = (0.0, 1.0, 4.0, 9.0)
    checks = [check_weighted_gradient_bound(family, params, sigmas, times, grid)]
    for t in times:
        checks.append(check_embeddings(family, params, cfg["sigma"], t, grid))
    wide = make_radial_grid(cfg["n"], 4.0 * cfg["r_max"], 2.0 * cfg["dr"])
    checks.append(gn_ratio_check(family, params, cfg["sigma"], cfg["q"], times, wide))
    return checks


def _verify_bihari(cfg: dict, seed: int) -> list:
    del cfg, seed  # canonical instantiation needs no knobs
    sqrt2 = math.sqrt(2.0)
    g = lambda u: math.sqrt(2.0 * max(u, 0.0))
    antideriv = lambda u: sqrt2 * math.sqrt(max(u, 0.0))
    times = np.linspace(0.0, 5.0, 4001)
    bound = 1.0
    k_const = np.full_like(times, 0.3)
    y_eq = 0.5 * (sqrt2 * math.sqrt(bound) + 0.3 * times) ** 2
    checks = [bihari_check(times, y_eq, k_const, g, bound, antideriv)]
    k_zero = np.zeros_like(times)
    y_flat = np.full_like(times, bound)
    checks.append(bihari_check(times, y_flat, k_zero, g, bound, antideriv, tolerance=0.0))
    return checks


def _cmd_verify(args) -> int:
    cfg = load_config(_VERIFY_KEYS, VERIFY_DEFAULTS, args.config, args.set)
    suites = {
        "identities": _verify_identities,
        "inequalities": _verify_inequalities,
        "bihari": _verify_bihari,
    }
    checks = suites[args.suite](cfg, args.seed)
    payload = _report_header("verify", args.seed)
    payload["suite"] = args.suite
    payload["checks"] = [c.to_dict() for c in checks]
    _write_json(payload, args.out)
    failed = [c for c in checks if not c.passed and not c.skipped]
    for c in checks:
        status = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
        print(f"{status} {c.check_id}: worst={c.worst:.3g} tol={c.tolerance:.3g}")
    return EXIT_OK if not failed else EXIT_CONFIG


def _cmd_odi(args) -> int:
    cfg = load_config(_ODI_KEYS, ODI_DEFAULTS, args.config, args.set)
    problem = OdiProblem(k0=cfg["k0"], k1=cfg["k1"], alpha=cfg["alpha"], p=cfg["p"],
                         f0=cfg["f0"], df0=cfg["df0"])
    dt = cfg["dt"] if cfg["dt"] > 0.0 else None
    solution = solve(problem, dt)
    check = comparison_check(problem, dt)
    payload = _report_header("odi", args.seed)
    payload["problem"] = asdict(problem)
    payload["nu"] = solution.nu
    payload["life_span"] = solution.life_span
    payload["trajectory_blowup_time"] = solution.blowup_time
    payload["checks"] = [check.to_dict()]
    _write_json(payload, args.out)
    print(f"nu={format_float(solution.nu)} life_span={format_float(solution.life_span)} "
          f"dominance={'PASS' if check.passed else 'FAIL'}")
    return EXIT_OK if check.passed else EXIT_CONFIG


def _cmd_decay_fit(args) -> int:
    cfg = load_config(_FIT_KEYS, FIT_DEFAULTS, args.config, args.set)
    t, v = read_series_csv(args.csv, cfg["column"])
    hi = cfg["t_max"] if math.isfinite(cfg["t_max"]) else float(t.max())
    log_factor = None
    if cfg["log_corrected"]:
        from .model import borderline_log_factor
        params = _model_params(cfg)
        log_factor = lambda tt: borderline_log_factor(params, tt)
    fit = fit_decay(t, v, (cfg["t_min"], hi), log_factor)
    payload = _report_header("decay_fit", args.seed)
    payload["column"] = cfg["column"]
    payload["fit"] = {
        "exponent": fit.exponent,
        "stderr": fit.stderr,
        "window": list(fit.window),
        "log_corrected": fit.log_corrected,
        "n_points": fit.n_points,
    }
    _write_json(payload, args.out)
    return EXIT_OK


def _cmd_info(args) -> int:
    cfg = load_config(_MODEL_KEYS, {"n": 1, "mu1": 4.0, "mu2sq": 0.0, "p": 2.0},
                      args.config, args.set)
    params = _model_params(cfg)
    regime = regime_check(params)
    print(f"n={params.n} mu1={params.mu1} mu2sq={params.mu2sq} p={params.p}")
    print(f"delta = {format_float(regime.delta)}")
    print("sqrt_delta = "
          + (format_float(regime.sqrt_delta) if regime.sqrt_delta is not None else "undefined"))
    print("p_crit = "
          + (format_float(regime.p_crit) if regime.p_crit is not None else "undefined"))
    print(f"global_existence_applicable = {str(regime.global_existence_applicable).lower()}")
    print(f"blowup_range_applicable = {str(regime.blowup_range_applicable).lower()}")
    table_payload = None
    if regime.delta > 0.0:
        table = decay_exponents(params)
        print(f"l2_exponent = {format_float(table.l2_exponent)}")
        print(f"grad_exponent = {format_float(table.grad_exponent)}")
        print(f"log_correction = {str(table.log_correction).lower()}")
        table_payload = {
            "l2_exponent": table.l2_exponent,
            "grad_exponent": table.grad_exponent,
            "log_correction": table.log_correction,
        }
    if args.out:
        payload = _report_header("info", args.seed)
        payload["params"] = {"n": params.n, "mu1": params.mu1,
                             "mu2sq": params.mu2sq, "p": params.p}
        payload["delta"] = regime.delta
        payload["regime"] = {
            "sqrt_delta": regime.sqrt_delta,
            "p_crit": regime.p_crit,
            "global_existence_applicable": regime.global_existence_applicable,
            "blowup_range_applicable": regime.blowup_range_applicable,
        }
        payload["decay_exponents"] = table_payload
        _write_json(payload, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scalewave",
        description="Numerical laboratory for the wave equation with "
                    "scale-invariant damping and mass.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="flat JSON config file")
        p.add_argument("--out", default=None, help="output path")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override one config key (repeatable)")
        p.add_argument("--jobs", type=int, default=1, help="parallel fan-out degree")
        p.add_argument("--seed", type=int, default=0, help="seed recorded in reports")

    common(sub.add_parser("simulate", help="one run, norm series to CSV"))
    common(sub.add_parser("sweep", help="(p, amplitude) sweep to CSV"))
    verify_p = sub.add_parser("verify", help="identity/inequality/comparison suites")
    verify_p.add_argument("suite", choices=["identities", "inequalities", "bihari"])
    common(verify_p)
    common(sub.add_parser("odi", help="blow-up comparison toolkit report"))
    fit_p = sub.add_parser("decay-fit", help="fit a decay exponent from a series CSV")
    fit_p.add_argument("csv", help="input CSV (as written by simulate)")
    common(fit_p)
    common(sub.add_parser("info", help="print regime facts for given parameters"))
    return parser


def parse_and_dispatch(argv) -> int:
    level = os.environ.get("SCALEWAVE_LOG", "error").lower()
    logging.basicConfig(level={"error": logging.ERROR, "info": logging.INFO,
                               "debug": logging.DEBUG}.get(level, logging.ERROR))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    handlers = {
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "verify": _cmd_verify,
        "odi": _cmd_odi,
        "decay-fit": _cmd_decay_fit,
        "info": _cmd_info,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, RegimeError, WeightOverflowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
