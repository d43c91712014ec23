"""Deterministic CSV/JSON artifacts."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .coupler import RunResult

TIMESERIES_VERSION = "rubberfront-timeseries/1"
INVARIANTS_VERSION = "rubberfront-invariants/1"

TIMESERIES_COLUMNS = (
    "t",
    "s",
    "s_t",
    "u_0",
    "u_1",
    "min_u",
    "max_u",
    "energy_E",
    "weak_residual_max",
    "u_star_bound",
    "M_front_bound",
)
INVARIANT_COLUMNS = (
    "t",
    "min_u",
    "max_u",
    "s",
    "u_star_bound",
    "M_front_bound",
    "nonneg_ok",
    "sup_ok",
    "cap_ok",
    "violations",
)


def fmt(x: float) -> str:
    """17 significant digits: lossless for binary64."""
    return format(float(x), ".17g")


def _writer(path: Path, version: str, header):
    fh = path.open("w", newline="", encoding="utf-8")
    fh.write(f"# {version}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    return fh, w


def write_timeseries(result: RunResult, path: Path) -> None:
    fh, w = _writer(path, TIMESERIES_VERSION, TIMESERIES_COLUMNS)
    with fh:
        for r in result.report:
            w.writerow(
                fmt(v)
                for v in (
                    r.t,
                    r.s,
                    r.s_t,
                    r.u_left,
                    r.u_right,
                    r.min_u,
                    r.max_u,
                    r.energy,
                    r.weak_residual_max,
                    r.u_star_bound,
                    r.M_front_bound,
                )
            )


def write_invariants(result: RunResult, path: Path) -> None:
    fh, w = _writer(path, INVARIANTS_VERSION, INVARIANT_COLUMNS)
    with fh:
        for r in result.report:
            w.writerow(
                [
                    fmt(r.t),
                    fmt(r.min_u),
                    fmt(r.max_u),
                    fmt(r.s),
                    fmt(r.u_star_bound),
                    fmt(r.M_front_bound),
                    int(r.nonneg_ok),
                    int(r.sup_ok),
                    int(r.cap_ok),
                    "; ".join(r.violations),
                ]
            )


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def summary(result: RunResult, exit_code: int) -> dict:
    return {
        "status": result.status,
        "exit_code": exit_code,
        "message": result.message,
        "steps": len(result.states) - 1,
        "final_t": float(result.states[-1].t),
        "final_s": float(result.states[-1].s),
        "max_s": float(max(result.s_values)),
        "max_u": result.max_u,
        "min_u": result.min_u,
        "M_front": result.bounds.M_front if result.bounds else math.inf,
        "picard_windows": len(result.windows),
    }


def write_json(data: dict, path: Path) -> None:
    path.write_text(json.dumps({k: _jsonable(v) for k, v in data.items()}, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
