"""``crossover-lab`` command line: sweep, critical, verify and circuit.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 model-constraint violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import circuit
from .crossover import DEFAULT_SCAN_POINTS, DEFAULT_TOL, SweepRecord, critical_points, default_workers, sweep
from .model import SystemParams
from .spectral import DegenerateGroundStateError, RatioUndefinedError
from .verify import DEFAULT_TOLERANCES, GROUPS, VerifyConfig, all_passed, run_checks

log = logging.getLogger("crossover_lab")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_MODEL = 0, 1, 2, 3

SWEEP_COLUMNS = (
    "jc", "omega_ab", "omega_ac", "v_ab", "v_ac", "e_c_ab", "e_b_ac", "y_a", "y_c",
    "f_a", "f_c", "qfi", "p001", "p010", "p100", "p111",
    "p_sym_010_100_direct", "p_sym_010_100_paper", "p_001_111_direct", "p_001_111_paper",
    "p_010_001_direct", "p_010_001_paper", "degenerate_ab", "degenerate_ac", "provenance",
)
CRITICAL_COLUMNS = ("kind", "jc_star", "lo", "hi", "residual")

DEFAULT_PARAMS = {"omega0": 0.1, "omegaC": 5.0, "J": 0.1, "JC": 0.5}
DEFAULT_SWEEP = {"jc_min": 0.01, "jc_max": 2.0, "points": 200}
DEFAULT_FLUX_SWEEP = {"flux_min": 0.0, "flux_max": 0.45, "points": 200}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: SystemParams
    jc_min: float
    jc_max: float
    points: int
    step: float | None = None
    tol: float = DEFAULT_TOL
    scan_points: int = DEFAULT_SCAN_POINTS
    workers: int | None = None
    out: str | None = None
    circuit: dict | None = None
    verify: dict = field(default_factory=dict)

    def grid(self) -> np.ndarray:
        return np.linspace(self.jc_min, self.jc_max, self.points)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _write_csv(header: Sequence[str], rows: Sequence[Sequence], out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def sweep_rows(records: Sequence[SweepRecord]) -> list[list]:
    names = SweepRecord.field_names()
    return [[getattr(r, n) for n in names] for r in records]


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number")
    return float(value)


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the JSON config file (if any) with command-line overrides."""
    raw: dict = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    params = {**DEFAULT_PARAMS, **raw.get("params", {})}
    sw = {**DEFAULT_SWEEP, **raw.get("sweep", {})}
    for key in ("omega0", "omegaC", "J", "JC"):
        if getattr(args, key, None) is not None:
            params[key] = getattr(args, key)
    for key in ("jc_min", "jc_max", "points"):
        if getattr(args, key, None) is not None:
            sw[key] = getattr(args, key)
    opts = {k: raw.get(k) for k in ("step", "tol", "scan_points", "workers", "out")}
    for key in opts:
        if getattr(args, key, None) is not None:
            opts[key] = getattr(args, key)

    values = {k: _number(params[k], k) for k in ("omega0", "omegaC", "J", "JC")}
    jc_min, jc_max = _number(sw["jc_min"], "jc_min"), _number(sw["jc_max"], "jc_max")
    if not (math.isfinite(jc_min) and math.isfinite(jc_max) and jc_min < jc_max):
        raise ConfigError("invalid sweep range")
    points = sw["points"]
    if isinstance(points, bool) or not isinstance(points, int) or points < 2:
        raise ConfigError("points must be an integer >= 2")
    step = None if opts["step"] is None else _number(opts["step"], "step")
    tol = DEFAULT_TOL if opts["tol"] is None else _number(opts["tol"], "tol")
    scan = DEFAULT_SCAN_POINTS if opts["scan_points"] is None else opts["scan_points"]
    if (step is not None and not step > 0) or not tol > 0:
        raise ConfigError("step and tol must be positive")
    if isinstance(scan, bool) or not isinstance(scan, int) or scan < 2:
        raise ConfigError("scan_points must be an integer >= 2")
    workers = opts["workers"]
    if workers is not None and (isinstance(workers, bool) or not isinstance(workers, int) or workers < 1):
        raise ConfigError("workers must be a positive integer")
    verify_cfg = raw.get("verify", {})
    if not isinstance(verify_cfg, dict):
        raise ConfigError("verify must be a JSON object")
    # model constraints (positive splittings) surface as ValueError -> exit 3
    return RunConfig(
        params=SystemParams(**values),
        jc_min=jc_min,
        jc_max=jc_max,
        points=points,
        step=step,
        tol=tol,
        scan_points=scan,
        workers=workers,
        out=opts["out"],
        circuit=raw.get("circuit"),
        verify=verify_cfg,
    )


def cmd_sweep(cfg: RunConfig) -> int:
    workers = default_workers() if cfg.workers is None else cfg.workers
    records = sweep(cfg.params, cfg.grid(), cfg.step, workers)
    _write_csv(SWEEP_COLUMNS, sweep_rows(records), cfg.out)
    return EXIT_OK


def cmd_critical(cfg: RunConfig) -> int:
    found = critical_points(cfg.params, (cfg.jc_min, cfg.jc_max), cfg.tol, cfg.scan_points)
    rows = [[c.kind, c.JC_star, c.bracket[0], c.bracket[1], c.residual] for c in found]
    _write_csv(CRITICAL_COLUMNS, rows, cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, skip: Sequence[str] = ()) -> int:
    tolerances = cfg.verify.get("tolerances", {})
    skip = list(skip) + list(cfg.verify.get("skip", []))
    bad = [g for g in skip if g not in GROUPS]
    if bad:
        raise ConfigError(f"unknown check group(s) {bad}; choose from {', '.join(GROUPS)}")
    bad = [k for k in tolerances if k not in DEFAULT_TOLERANCES]
    if bad:
        raise ConfigError(f"unknown tolerance(s) {bad}")
    if any(isinstance(v, bool) or not isinstance(v, (int, float)) or not v >= 0 for v in tolerances.values()):
        raise ConfigError("verify tolerances must be nonnegative numbers")
    vcfg = VerifyConfig(omega0=cfg.params.omega0, omegaC=cfg.params.omegaC, tol=cfg.tol, scan_points=cfg.scan_points)
    results = run_checks(vcfg, tolerances, skip)
    lines = [r.line() for r in results]
    failed = sum(r.passed is False for r in results)
    lines.append(f"{len(results) - failed} of {len(results)} checks passed or skipped, {failed} failed")
    text = "\n".join(lines) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK if all_passed(results) else EXIT_VERIFY


def _circuit_inputs(cfg: RunConfig, args: argparse.Namespace):
    spec = cfg.circuit
    if not isinstance(spec, dict):
        raise ConfigError("circuit subcommand needs a 'circuit' object in the config")
    try:
        tr = spec["transmons"]
        t = circuit.TransmonParams(*(circuit.Transmon(float(tr[q]["EC"]), float(tr[q]["EJ"])) for q in "ABC"))
        cp = spec["coupler"]
        coupler = circuit.CouplerParams(float(cp["L0"]), float(cp["flux_AB"]), float(cp["flux_AC"]), float(cp["flux_BC"]))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"incomplete circuit config: {exc}") from exc
    shift = bool(spec.get("include_inductive_shift", False))
    scale = float(spec.get("energy_to_angular", circuit.ENERGY_TO_ANGULAR))
    return t, coupler, shift, scale


def cmd_circuit(cfg: RunConfig, args: argparse.Namespace) -> int:
    t, coupler, shift, scale = _circuit_inputs(cfg, args)
    m = circuit.effective_params(t, coupler, shift, scale)
    p = m.params
    echo = f"omega0={p.omega0:.17g} omegaC={p.omegaC:.17g} J={p.J:.17g} JC={p.JC:.17g}\n"
    if not getattr(args, "sweep", False):
        sys.stdout.write(echo)
        return EXIT_OK
    sys.stderr.write(echo)
    fs = {**DEFAULT_FLUX_SWEEP, **cfg.circuit.get("flux_sweep", {})}
    fluxes = np.linspace(float(fs["flux_min"]), float(fs["flux_max"]), int(fs["points"]))
    jcs = sorted({
        circuit.effective_params(
            t, circuit.CouplerParams(coupler.L0, coupler.flux_AB, f, f), shift, scale
        ).params.JC
        for f in fluxes
    })
    if len(jcs) < 2:
        raise ConfigError("flux sweep maps to fewer than two distinct JC values")
    workers = default_workers() if cfg.workers is None else cfg.workers
    records = sweep(p, jcs, cfg.step, workers)
    _write_csv(SWEEP_COLUMNS, sweep_rows(records), cfg.out)
    return EXIT_OK


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--out", help="output file (default: stdout)")
    sp.add_argument("--omega0", type=float)
    sp.add_argument("--omegaC", type=float)
    sp.add_argument("--J", type=float)
    sp.add_argument("--JC", type=float)
    sp.add_argument("--jc-min", dest="jc_min", type=float)
    sp.add_argument("--jc-max", dest="jc_max", type=float)
    sp.add_argument("--points", type=int)
    sp.add_argument("--step", type=float, help="finite-difference stride in JC")
    sp.add_argument("--tol", type=float, help="root refinement tolerance")
    sp.add_argument("--scan-points", dest="scan_points", type=int)
    sp.add_argument("--workers", type=int, help="threads for grid evaluation (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crossover-lab", description="Three-qubit crossover toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("sweep", "evaluate all indicators on a JC grid and write CSV"),
        ("critical", "locate crossover signatures and write CSV"),
        ("verify", "run the self-consistency suite"),
        ("circuit", "map transmon/SQUID parameters to the model"),
    ):
        sp = sub.add_parser(name, help=text)
        _add_common(sp)
        if name == "verify":
            sp.add_argument("--skip", action="append", default=[], choices=GROUPS, help="skip a check group")
        if name == "circuit":
            sp.add_argument("--sweep", action="store_true", help="sweep flux_AC = flux_BC and write CSV")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "critical":
            return cmd_critical(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.skip)
        return cmd_circuit(cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (circuit.CircuitConstraintError, DegenerateGroundStateError, RatioUndefinedError, ValueError) as exc:
        print(f"model constraint violated: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
