"""Command-line experiment runner.

Usage: ``mirrorpen <experiment> [--config FILE] [--seed N] [--iters N]
[--beta X] [--p0 X] [--kappa X] [--gamma0 X] [--sigma X] [--out DIR]
[--dual-averaging] ...`` plus ``mirrorpen all`` for the CI-scale suite.

Config resolution: shipped defaults <- JSON config file <- command-line
flags (later wins). Unknown or out-of-range keys exit with code 2 naming the
offending key; a diverged run exits with code 3 after writing the partial
trace with a "diverged" marker.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .experiments import EXPERIMENT_NAMES, experiment
from .solver import DivergenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(message)


_COMMON_KEYS = ("iterations", "seed", "beta", "p0", "kappa", "p_max",
                "gamma0", "record_every", "out")
ALLOWED_KEYS = {
    "trajectories": _COMMON_KEYS + ("sigma", "cases"),
    "rosenbrock": _COMMON_KEYS + ("n", "variant"),
    "penalty-demo-1d": _COMMON_KEYS,
    "beta-vs-l1": _COMMON_KEYS,
    "regression": _COMMON_KEYS + ("include_large",),
}

_RANGES = {
    "beta": (lambda v: 1.0 < float(v) <= 100.0, "beta must lie in (1, 100]"),
    "kappa": (lambda v: 1.0 < float(v) <= 10.0, "kappa must lie in (1, 10]"),
    "iterations": (lambda v: int(v) >= 1, "iterations must be >= 1"),
    "seed": (lambda v: int(v) >= 0, "seed must be a nonnegative integer"),
    "p0": (lambda v: float(v) > 0.0, "p0 must be positive"),
    "p_max": (lambda v: float(v) > 0.0, "p_max must be positive"),
    "gamma0": (lambda v: float(v) > 0.0, "gamma0 must be positive"),
    "sigma": (lambda v: float(v) >= 0.0, "sigma must be nonnegative"),
    "record_every": (lambda v: int(v) >= 1, "record_every must be >= 1"),
    "n": (lambda v: int(v) >= 2, "n must be >= 2"),
}

_INT_KEYS = ("iterations", "seed", "record_every", "n")
_FLOAT_KEYS = ("beta", "p0", "kappa", "p_max", "gamma0", "sigma")


def validate_config(name: str, config: dict) -> dict:
    allowed = ALLOWED_KEYS[name]
    out: dict = {}
    for key, value in config.items():
        if key not in allowed:
            raise ConfigError(key, f"unknown key {key!r} for experiment {name!r}")
        if value is None:
            out[key] = None
            continue
        if key in _RANGES:
            ok, msg = _RANGES[key]
            try:
                valid = ok(value)
            except (TypeError, ValueError):
                valid = False
            if not valid:
                raise ConfigError(key, f"bad value for {key!r}: {msg}")
        if key in _INT_KEYS:
            value = int(value)
        elif key in _FLOAT_KEYS:
            value = float(value)
        elif key == "variant":
            if value not in ("plain", "dual_averaging"):
                raise ConfigError(key, "variant must be plain or dual_averaging")
        elif key == "cases":
            if (not isinstance(value, (list, tuple))
                    or not all(c in "abcd" for c in value)):
                raise ConfigError(key, "cases must be a list drawn from a, b, c, d")
            value = list(value)
        elif key == "include_large":
            value = bool(value)
        out[key] = value
    return out


def resolve_config(name: str, file_path: str | None = None,
                   flags: dict | None = None) -> dict:
    """defaults <- config file <- flags; returns the fully resolved mapping."""
    resolved = {key: None for key in ALLOWED_KEYS[name]}
    if file_path is not None:
        try:
            with open(file_path) as fh:
                loaded = json.load(fh)
        except OSError as err:
            raise ConfigError("config", f"cannot read config file: {err}")
        except json.JSONDecodeError as err:
            raise ConfigError("config", f"malformed config file: {err}")
        if not isinstance(loaded, dict):
            raise ConfigError("config", "config file must hold a JSON object")
        resolved.update(validate_config(name, loaded))
    if flags:
        resolved.update(validate_config(name, flags))
    return resolved


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirrorpen",
        description="Adaptive exact-penalty mirror-descent experiment runner")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENT_NAMES + ("all",):
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="FILE")
        p.add_argument("--seed", type=int)
        p.add_argument("--iters", type=int, dest="iterations")
        p.add_argument("--beta", type=float)
        p.add_argument("--p0", type=float)
        p.add_argument("--p-max", type=float, dest="p_max")
        p.add_argument("--kappa", type=float)
        p.add_argument("--gamma0", type=float)
        p.add_argument("--sigma", type=float)
        p.add_argument("--record-every", type=int, dest="record_every")
        p.add_argument("--out")
        p.add_argument("--dual-averaging", action="store_true", default=None,
                       dest="dual_averaging")
        if name == "rosenbrock":
            p.add_argument("--n", type=int)
        if name == "regression":
            p.add_argument("--include-large", action="store_true", default=None,
                           dest="include_large")
        if name == "trajectories":
            p.add_argument("--cases", nargs="+", choices=list("abcd"))
    return parser


_ALL_FLAG_KEYS = ("iterations", "seed", "beta", "p0", "kappa", "p_max",
                  "gamma0", "sigma", "record_every", "out", "n",
                  "include_large", "cases")


def _flags_from_args(name: str, args: argparse.Namespace,
                     lenient: bool = False) -> dict:
    flags = {}
    for key in _ALL_FLAG_KEYS:
        value = getattr(args, key, None)
        if value is None:
            continue
        if key not in ALLOWED_KEYS[name]:
            if lenient:
                continue
            raise ConfigError(key, f"flag {key!r} is not supported by {name!r}")
        flags[key] = value
    if getattr(args, "dual_averaging", None):
        if "variant" in ALLOWED_KEYS[name]:
            flags["variant"] = "dual_averaging"
        elif not lenient:
            raise ConfigError("variant",
                              f"--dual-averaging is not supported by {name!r}")
    return flags


def _run_one(name: str, args: argparse.Namespace, out_override: str | None = None,
             lenient: bool = False) -> int:
    config = resolve_config(name, args.config, _flags_from_args(name, args, lenient))
    out = out_override or config.get("out") or os.path.join("runs", name)
    config["out"] = out
    try:
        experiment(name, config, out_dir=out)
    except DivergenceError as err:
        print(f"mirrorpen: diverged: {err}", file=sys.stderr)
        return EXIT_DIVERGED
    print(f"mirrorpen: {name} done -> {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.experiment == "all":
            base = args.out or "runs"
            for name in EXPERIMENT_NAMES:
                code = _run_one(name, args, out_override=os.path.join(base, name),
                                lenient=True)
                if code != EXIT_OK:
                    return code
            return EXIT_OK
        return _run_one(args.experiment, args)
    except ConfigError as err:
        print(f"mirrorpen: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"mirrorpen: i/o error: {err}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
