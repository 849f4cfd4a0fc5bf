"""Experiment harness reproducing the five benchmark studies as trace files.

Each experiment writes per-run ``trace.csv``/``summary.json`` (byte-stable
for a fixed config and seed) into its output directory; multi-case
experiments aggregate their cases into a top-level ``summary.json``.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time

import numpy as np

from . import benchmarks as bm
from .penalty import PenaltyConfig
from .solver import DivergenceError, RunConfig, run
from .trace import emit_penalty_curves, emit_trace, summary_dict

EXPERIMENT_NAMES = ("trajectories", "rosenbrock", "penalty-demo-1d",
                    "beta-vs-l1", "regression")


class UnknownExperimentError(KeyError):
    pass


def _patch_penalty(config: RunConfig, overrides: dict) -> RunConfig:
    pen_kw = {}
    if overrides.get("beta") is not None:
        pen_kw["beta"] = float(overrides["beta"])
    if overrides.get("p0") is not None:
        pen_kw["p_init"] = float(overrides["p0"])
    if overrides.get("kappa") is not None:
        pen_kw["kappa"] = float(overrides["kappa"])
    if overrides.get("p_max") is not None:
        pen_kw["p_max"] = float(overrides["p_max"])
    if pen_kw:
        config = dataclasses.replace(
            config, penalty=dataclasses.replace(config.penalty, **pen_kw))
    return config


def _case_kwargs(overrides: dict, keys: tuple[str, ...]) -> dict:
    mapping = {"iterations": "iterations", "seed": "seed", "sigma": "sigma",
               "record_every": "record_every"}
    out = {}
    for key in keys:
        val = overrides.get(key)
        if val is not None:
            out[mapping[key]] = val
    return out


def _run_case(case: bm.BenchmarkCase, out_dir: str, experiment: str,
              config_echo: dict):
    """Run one case and emit its trace; on divergence the partial trace is
    still written before the error propagates."""
    try:
        report = run(case.bundle, case.config)
    except DivergenceError as err:
        if err.report is not None:
            emit_trace(err.report, out_dir, experiment=experiment,
                       case=case.name, config_echo=config_echo)
        raise
    emit_trace(report, out_dir, experiment=experiment, case=case.name,
               config_echo=config_echo)
    return report


def _echo(overrides: dict) -> dict:
    return {k: overrides.get(k) for k in sorted(overrides)}


def run_trajectories(overrides: dict, out_dir: str) -> dict:
    cases = overrides.get("cases") or ["a", "b", "c", "d"]
    agg = {"experiment": "trajectories", "cases": {}}
    for name in cases:
        kwargs = _case_kwargs(overrides, ("iterations", "seed", "sigma",
                                          "record_every"))
        if overrides.get("gamma0") is not None:
            kind = bm.TRAJECTORY_DEFAULTS[name]["schedule"][0]
            kwargs["schedule"] = (kind, float(overrides["gamma0"]))
        case = bm.trajectory_case(name, **kwargs)
        case = dataclasses.replace(case, config=_patch_penalty(case.config, overrides))
        report = _run_case(case, os.path.join(out_dir, name), "trajectories",
                           _echo(overrides))
        s = report.summary
        agg["cases"][name] = {
            "final_x": [float(v) for v in s.final_x],
            "final_f": s.final_f,
            "final_M": s.final_m,
            "final_composite_penalty": bm.eval_penalty_function(name, s.final_x),
            "final_p": s.final_p,
            "penalty_updates": s.n_penalty_updates,
        }
    _write_json(os.path.join(out_dir, "summary.json"), agg)
    return agg


def run_rosenbrock(overrides: dict, out_dir: str) -> dict:
    n = int(overrides.get("n") or 4)
    kwargs = _case_kwargs(overrides, ("iterations", "seed", "record_every"))
    if overrides.get("gamma0") is not None:
        kwargs["alpha0"] = float(overrides["gamma0"])  # base coefficient of the schedule
    case = bm.rosenbrock_case(n, **kwargs)
    config = _patch_penalty(case.config, overrides)
    if overrides.get("variant") is not None:
        config = dataclasses.replace(config, variant=overrides["variant"])
    case = dataclasses.replace(case, config=config)
    report = _run_case(case, out_dir, "rosenbrock", _echo(overrides))
    s = report.summary
    agg = {
        "experiment": "rosenbrock", "n": n,
        "f_start": report.rows[0].f,
        "min_objective": s.min_objective,
        "final_f": s.final_f, "final_M": s.final_m, "final_p": s.final_p,
        "penalty_updates": s.n_penalty_updates,
    }
    _write_json(os.path.join(out_dir, "rosenbrock.json"), agg)
    return agg


def run_penalty_demo(overrides: dict, out_dir: str) -> dict:
    kwargs = _case_kwargs(overrides, ("iterations", "seed", "record_every"))
    if overrides.get("gamma0") is not None:
        kwargs["gamma0"] = float(overrides["gamma0"])
    case = bm.penalty_demo_case(**kwargs)
    case = dataclasses.replace(case, config=_patch_penalty(case.config, overrides))
    report = _run_case(case, out_dir, "penalty-demo-1d", _echo(overrides))

    # Reshaping curves: P_p over a 1-D grid for every penalty value the run visited.
    from .problem import violation

    grid = np.linspace(-0.5, 2.0, 501)
    bundle = case.bundle
    beta = case.config.penalty.beta
    seen: list[float] = []
    for row in report.rows:
        if not seen or row.p != seen[-1]:
            seen.append(row.p)
    m_grid = np.array([violation(bundle.constraints, np.array([x]), beta)
                       for x in grid])
    f_grid = np.array([bundle.objective.value(np.array([x])) for x in grid])
    curves = {p: f_grid + p * m_grid for p in seen}
    emit_penalty_curves(out_dir, grid, curves)

    s = report.summary
    agg = {"experiment": "penalty-demo-1d",
           "final_x": [float(v) for v in s.final_x],
           "final_M": s.final_m, "final_p": s.final_p,
           "penalty_values_visited": seen,
           "penalty_updates": s.n_penalty_updates}
    _write_json(os.path.join(out_dir, "penalty_demo.json"), agg)
    return agg


def run_beta_vs_l1(overrides: dict, out_dir: str) -> dict:
    kwargs = {}
    for key in ("iterations", "seed", "kappa", "record_every"):
        if overrides.get(key) is not None:
            kwargs[key] = overrides[key]
    # Explicit p0/gamma0 overrides apply to both arms.
    if overrides.get("p0") is not None:
        kwargs["beta_p_init"] = kwargs["l1_p_init"] = float(overrides["p0"])
    if overrides.get("gamma0") is not None:
        kwargs["beta_gamma0"] = kwargs["l1_gamma0"] = float(overrides["gamma0"])
    beta_case, l1_case = bm.beta_vs_l1_cases(**kwargs)
    if overrides.get("beta") is not None:
        beta_case = dataclasses.replace(
            beta_case, config=dataclasses.replace(
                beta_case.config, penalty=dataclasses.replace(
                    beta_case.config.penalty, beta=float(overrides["beta"]))))
    agg = {"experiment": "beta-vs-l1", "arms": {}}
    for case, arm in ((beta_case, "beta"), (l1_case, "l1")):
        report = _run_case(case, os.path.join(out_dir, arm), "beta-vs-l1",
                           _echo(overrides))
        s = report.summary
        norms = report.column("grad_norm")[1:]
        agg["arms"][arm] = {
            "final_M": s.final_m,
            "final_p": s.final_p,
            "penalty_updates": s.n_penalty_updates,
            "min_grad_norm": float(norms.min()) if norms.size else 0.0,
        }
    _write_json(os.path.join(out_dir, "summary.json"), agg)
    return agg


def run_regression(overrides: dict, out_dir: str) -> dict:
    include_large = bool(overrides.get("include_large"))
    rows = [r for r in bm.REGRESSION_TABLE
            if include_large or r[0] != "large"]
    kwargs = {}
    for key in ("iterations", "seed", "record_every"):
        if overrides.get(key) is not None:
            kwargs[key] = overrides[key]
    if overrides.get("gamma0") is not None:
        kwargs["gamma0"] = float(overrides["gamma0"])
    report_rows = []
    agg = {"experiment": "regression", "rows": report_rows}
    for category, n_samples, p_features, table_mse in rows:
        case, dataset = bm.regression_case(n_samples, p_features, **kwargs)
        case = dataclasses.replace(case, config=_patch_penalty(case.config, overrides))
        t0 = time.perf_counter()
        report = _run_case(case, os.path.join(out_dir, f"{n_samples}x{p_features}"),
                           "regression", _echo(overrides))
        elapsed = time.perf_counter() - t0
        s = report.summary
        w_hat = s.final_x
        report_rows.append({
            "category": category,
            "n_samples": n_samples,
            "p_features": p_features,
            "final_objective": s.final_f,
            "final_objective_mean": s.final_f / dataset.X_train.shape[0],
            "test_mse": bm.test_mse(w_hat, dataset),
            "support_recovery_pct": 100.0 * bm.support_recovery(w_hat, dataset.w_star),
            "table_test_mse": table_mse,
            "final_M": s.final_m,
            "final_p": s.final_p,
            "timing_s": round(elapsed, 3),  # documented: not byte-deterministic
        })
    _write_json(os.path.join(out_dir, "regression_report.json"), agg)
    return agg


_RUNNERS = {
    "trajectories": run_trajectories,
    "rosenbrock": run_rosenbrock,
    "penalty-demo-1d": run_penalty_demo,
    "beta-vs-l1": run_beta_vs_l1,
    "regression": run_regression,
}


def experiment(name: str, overrides: dict | None = None,
               out_dir: str | None = None) -> dict:
    """Run the named experiment with optional config overrides; returns the
    aggregate summary that was written to disk."""
    if name not in _RUNNERS:
        raise UnknownExperimentError(
            f"unknown experiment {name!r}; choose from {EXPERIMENT_NAMES}")
    overrides = dict(overrides or {})
    out = out_dir or overrides.get("out") or os.path.join("runs", name)
    return _RUNNERS[name](overrides, out)


def _write_json(path: str, payload: dict):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
