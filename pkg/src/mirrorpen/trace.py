"""Deterministic trace emission: per-iteration CSV plus a JSON summary.

Floats are written as 17-significant-digit decimal text so traces round-trip
losslessly and rerunning a seeded configuration reproduces the files byte for
byte. Timing never enters these files.
"""

from __future__ import annotations

import json
import os
from typing import Mapping

import numpy as np

from .solver import RunReport


def fmt(v: float) -> str:
    return "%.17g" % float(v)


def _trace_lines(report: RunReport):
    n = report.rows[0].x.size
    header = ["k"] + [f"x{i + 1}" for i in range(n)] + [
        "f", "M", "P", "p", "gamma", "grad_norm"]
    yield ",".join(header)
    for row in report.rows:
        cells = [str(row.k)]
        cells += [fmt(c) for c in row.x]
        cells += [fmt(row.f), fmt(row.m), fmt(row.penalty),
                  fmt(row.p), fmt(row.gamma), fmt(row.grad_norm)]
        yield ",".join(cells)


def summary_dict(report: RunReport, experiment: str, case: str,
                 config_echo: Mapping) -> dict:
    s = report.summary
    return {
        "experiment": experiment,
        "case": case,
        "config": dict(config_echo),
        "seed": s.seed,
        "iterations": s.iterations,
        "final": {
            "x": [float(v) for v in s.final_x],
            "f": s.final_f,
            "M": s.final_m,
            "P": s.final_f + s.final_p * s.final_m,
            "p": s.final_p,
        },
        "min_objective": s.min_objective,
        "penalty_updates": {
            "count": s.n_penalty_updates,
            "multiplications": s.n_multiplications,
            "capped": s.n_capped_updates,
            "events": [
                {"k": e.k, "multiplications": e.multiplications,
                 "p_before": e.p_before, "p_after": e.p_after,
                 "capped": e.capped}
                for e in report.events
            ],
        },
        "sampled_gradient_in_update": s.sampled_gradient_in_update,
        "diverged": s.diverged,
    }


def emit_trace(report: RunReport, out_dir: str, *, experiment: str,
               case: str = "", config_echo: Mapping | None = None):
    """Write trace.csv and summary.json into ``out_dir``; returns their paths.

    On I/O failure the partially written files are removed before the error
    propagates.
    """
    os.makedirs(out_dir, exist_ok=True)
    trace_path = os.path.join(out_dir, "trace.csv")
    summary_path = os.path.join(out_dir, "summary.json")
    try:
        with open(trace_path, "w", newline="\n") as fh:
            for line in _trace_lines(report):
                fh.write(line + "\n")
        payload = summary_dict(report, experiment, case, config_echo or {})
        with open(summary_path, "w", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError:
        for path in (trace_path, summary_path):
            if os.path.exists(path):
                os.unlink(path)
        raise
    return trace_path, summary_path


def emit_penalty_curves(out_dir: str, grid: np.ndarray,
                        curves: Mapping[float, np.ndarray]) -> str:
    """Write the reshaping-penalty curves P_p(x) over a 1-D grid, one column per p."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "penalty_curves.csv")
    ps = list(curves)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(["x"] + [f"P@p={repr(p)}" for p in ps]) + "\n")
            for i, x in enumerate(grid):
                cells = [fmt(x)] + [fmt(curves[p][i]) for p in ps]
                fh.write(",".join(cells) + "\n")
    except OSError:
        if os.path.exists(path):
            os.unlink(path)
        raise
    return path
