"""Command-line entry point: ``rubberfront run|sweep|verify``.

Exit codes
----------
0 completed / study passed
1 configuration error or unknown suite
2 invariant violation (or a solver failure that is neither collapse nor Picard)
3 front collapse
4 Picard failure
5 verification study failed
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import config as config_mod
from . import output, presets, verify
from .bounds import apriori_front_cap
from .config import Config, ConfigError
from .coupler import (
    COMPLETED,
    FRONT_COLLAPSE,
    INVARIANT_VIOLATION,
    PICARD_FAILURE,
    RunResult,
    run,
)
from .errors import ParameterError, SimulationError

logger = logging.getLogger("rubberfront")

OUT_ENV = "RUBBERFRONT_OUT"
DEFAULT_OUT = "rubberfront_out"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INVARIANT = 2
EXIT_COLLAPSE = 3
EXIT_PICARD = 4
EXIT_STUDY = 5

STATUS_EXIT = {
    COMPLETED: EXIT_OK,
    INVARIANT_VIOLATION: EXIT_INVARIANT,
    FRONT_COLLAPSE: EXIT_COLLAPSE,
    PICARD_FAILURE: EXIT_PICARD,
}
SUITES = ("mms", "epsilon", "alpha0", "bounds")
SOLVER_FAILURE = "solver_failure"


def _load(args) -> Config:
    if args.preset and args.config:
        raise ConfigError("give either --config or --preset, not both")
    if args.preset:
        return presets.load_preset(args.preset)
    if args.config:
        return config_mod.load(args.config)
    raise ConfigError("one of --config or --preset is required")


def output_dir(cli_value: str | None, cfg: Config | None = None) -> Path:
    """--out, then $RUBBERFRONT_OUT, then the config's [output] dir, then a default."""
    for candidate in (cli_value, os.environ.get(OUT_ENV), cfg.output_dir if cfg else None):
        if candidate:
            return Path(candidate)
    return Path(DEFAULT_OUT)


def execute(cfg: Config) -> tuple[RunResult | None, int, str]:
    """Run one configuration; solver exceptions become exit code 2."""
    try:
        result = run(cfg.params, cfg.drive, cfg.initial, cfg.run)
    except SimulationError as exc:
        return None, EXIT_INVARIANT, f"{type(exc).__name__}: {exc}"
    return result, STATUS_EXIT[result.status], result.message


def write_run(result: RunResult | None, code: int, message: str, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    if result is None:
        output.write_json({"status": SOLVER_FAILURE, "exit_code": code, "message": message}, out / "summary.json")
        return
    output.write_timeseries(result, out / "timeseries.csv")
    output.write_invariants(result, out / "invariants.csv")
    output.write_json(output.summary(result, code), out / "summary.json")


def cmd_run(args) -> int:
    cfg = _load(args)
    if cfg.sweep:
        logger.info("config has sweep axes; 'run' uses the base point only")
    out = output_dir(args.out, cfg)
    result, code, message = execute(cfg)
    write_run(result, code, message, out)
    status = result.status if result else SOLVER_FAILURE
    print(f"status: {status} (exit {code})" + (f": {message}" if message else ""))
    if result is not None:
        print(f"final s = {result.states[-1].s:.10g}, max u = {result.max_u:.10g}; artifacts in {out}")
    return code


def sweep_points(cfg: Config) -> list[dict]:
    """Cartesian product in axis order; the last axis varies fastest."""
    names = [name for name, _ in cfg.sweep]
    return [dict(zip(names, combo)) for combo in itertools.product(*(vals for _, vals in cfg.sweep))]


def _sweep_point(cfg: Config, point: dict, out: Path) -> dict:
    result, code, message = execute(cfg.with_values(**point))
    write_run(result, code, message, out)
    if result is None:
        return {"status": SOLVER_FAILURE, "code": code, "final_s": np.nan, "max_s": np.nan, "M_front": np.nan}
    return {
        "status": result.status,
        "code": code,
        "final_s": result.states[-1].s,
        "max_s": float(np.max(result.s_values)),
        "M_front": result.bounds.M_front if result.bounds else np.inf,
    }


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if not cfg.sweep:
        return cmd_run(args)
    out = output_dir(args.out, cfg)
    out.mkdir(parents=True, exist_ok=True)
    points = sweep_points(cfg)
    dirs = [out / f"point_{i:04d}" for i in range(len(points))]
    parallel = max(1, args.parallel)
    if parallel == 1:
        rows = [_sweep_point(cfg, p, d) for p, d in zip(points, dirs)]
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(_sweep_point, cfg, p, d) for p, d in zip(points, dirs)]
            rows = [f.result() for f in futures]

    names = [name for name, _ in cfg.sweep]
    header = ["point", *names, "status", "final_s", "max_s", "M_front"]
    table = [
        [i, *(output.fmt(p[n]) for n in names), r["status"], *(output.fmt(r[k]) for k in ("final_s", "max_s", "M_front"))]
        for i, (p, r) in enumerate(zip(points, rows))
    ]
    output.write_rows(out / "aggregate.csv", header, table)
    for row in table:
        print(" ".join(str(x) for x in row))

    codes = [r["code"] for r in rows]
    if EXIT_INVARIANT in codes:
        return EXIT_INVARIANT
    return next((c for c in codes if c), EXIT_OK)


def _suite_mms(out: Path) -> bool:
    case = verify.static_cosine()
    spatial = verify.convergence_study(case, [(N, 2.0 / N**2) for N in (50, 100, 200)])
    temporal = verify.convergence_study(case, [(400, dt) for dt in (4e-3, 2e-3, 1e-3)], t_final=0.5)
    moving = verify.convergence_study(verify.moving_cosine(), [(N, 2.0 / N**2) for N in (50, 100, 200)])
    checks = {
        "spatial order >= 1.9": spatial.passed and min(spatial.orders) >= 1.9,
        "temporal order >= 0.9": temporal.passed and min(temporal.orders) >= 0.9,
        "moving front converges": moving.passed,
    }
    text = "\n\n".join(t.format() for t in (spatial, temporal, moving))
    _write_suite(out, "mms", text, checks)
    return all(checks.values())


def _suite_epsilon(out: Path) -> bool:
    cfg = presets.load_preset("generic")
    table = verify.epsilon_study(cfg.params, cfg.drive, cfg.initial, (0.1, 0.05, 0.025))
    _write_suite(out, "epsilon", table.format(), {"deviations non-increasing": table.passed})
    return table.passed


def _suite_alpha0(out: Path) -> bool:
    cfg = presets.load_preset("alpha0")
    report = verify.alpha_regression(cfg.params, cfg.drive, cfg.initial, cfg.params.T, N=cfg.run.N, dt=cfg.run.dt)
    _write_suite(out, "alpha0", report.format(), report.checks)
    return report.passed


def _suite_bounds(out: Path) -> bool:
    rows, checks = [], {}
    for name in presets.CONSTANT_B:
        cfg = presets.load_preset(name)
        result = run(cfg.params, cfg.drive, cfg.initial, cfg.run)
        cap = apriori_front_cap(cfg.params, cfg.drive, cfg.initial).M_front
        max_s = float(np.max(result.s_values))
        checks[f"{name}: max s <= M_front"] = result.status == COMPLETED and max_s <= cap
        rows.append(f"{name:>14} {max_s:14.8g} {cap:14.8g} {result.status}")
    text = "\n".join([f"{'preset':>14} {'max_s':>14} {'M_front':>14} status", *rows])
    _write_suite(out, "bounds", text, checks)
    return all(checks.values())


def _write_suite(out: Path, suite: str, text: str, checks: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    lines = [text, ""] + [f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in checks.items()]
    body = "\n".join(lines) + "\n"
    (out / f"{suite}.txt").write_text(body, encoding="utf-8")
    print(body, end="")


SUITE_RUNNERS = {"mms": _suite_mms, "epsilon": _suite_epsilon, "alpha0": _suite_alpha0, "bounds": _suite_bounds}


def cmd_verify(args) -> int:
    if args.suite not in SUITE_RUNNERS:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    out = output_dir(args.out)
    return EXIT_OK if SUITE_RUNNERS[args.suite](out) else EXIT_STUDY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rubberfront", description="Free boundary solver for diffusant penetration with breaking.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    def source_flags(p):
        p.add_argument("--config", metavar="PATH", help="INI configuration file")
        p.add_argument("--preset", metavar="NAME", help=f"built-in configuration ({', '.join(sorted(presets.PRESETS))})")
        p.add_argument("--out", metavar="DIR", help=f"output directory (overrides ${OUT_ENV} and [output] dir)")

    p_run = sub.add_parser("run", help="run one configuration")
    source_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the Cartesian product of the [sweep] axes")
    source_flags(p_sweep)
    p_sweep.add_argument("--parallel", metavar="N", type=int, default=1, help="worker processes (default 1)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run a verification study")
    p_verify.add_argument("suite", help=f"one of {', '.join(SUITES)}")
    p_verify.add_argument("--out", metavar="DIR", help="directory for study tables")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
