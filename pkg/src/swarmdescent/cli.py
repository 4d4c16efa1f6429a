"""Command-line front end: single runs, experiment batches, basin sweeps.

Configuration is a flat declarative document (JSON) with one schema shared
by config files, shipped presets, and command-line flags.  Sources merge in
fixed precedence: built-in defaults, then ``--preset``, then ``--config``,
then explicit flags; the ``SWARM_DESCENT_SEED`` environment variable slots
between config files and the ``--seed`` flag.  The effective configuration
is echoed in every emitted report.

Exit codes: 0 success, 2 usage or configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

import numpy as np

from .baselines import BaselineMethod, BaselineParams
from .harness import (
    ExperimentConfig,
    basin_sweep,
    config_to_dict,
    report_to_dict,
    run_experiment,
    run_single,
    run_result_to_dict,
    solution_histogram,
    write_histogram_csv,
    write_report_csv,
)
from .linesearch import BacktrackParams
from .objectives import OBJECTIVE_NAMES, make_objective
from .swarm import SBGDParams

__all__ = ["main"]

SEED_ENV_VAR = "SWARM_DESCENT_SEED"

_METHOD_NAMES = ("sbgd", "gd", "gdbt", "adam")

# The one declarative schema shared by presets, config files, and flags.
_SCHEMA: dict[str, type] = {
    "objective": str,
    "d": int,
    "b": float,
    "c": float,
    "mu": float,
    "method": str,
    "n": int,
    "m": int,
    "seed": int,
    "init_box": list,
    "h": float,
    "p": float,
    "q": float,
    "lambda": float,
    "gamma": float,
    "h0": float,
    "tolm": float,
    "tolmerge": float,
    "tolres": float,
    "max_iters": int,
}

_DEFAULTS: dict = {
    "objective": None,
    "d": None,
    "b": 0.0,
    "c": 0.0,
    "mu": 1.0,
    "method": "sbgd",
    "n": 1,
    "m": 1,
    "seed": 0,
    "init_box": [-3.0, 3.0],
    "h": 0.1,
    "p": 1.0,
    "q": 1.0,
    "lambda": 0.2,
    "gamma": 0.9,
    "h0": 1.0,
    "tolm": 1e-4,
    "tolmerge": 1e-3,
    "tolres": 1e-4,
    "max_iters": 10000,
}


class ConfigError(ValueError):
    """A configuration document or flag set that fails validation."""


def _validate_document(doc: dict, source: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{source}: expected a JSON object, got {type(doc).__name__}")
    out = {}
    for key, value in doc.items():
        if key not in _SCHEMA:
            known = ", ".join(sorted(_SCHEMA))
            raise ConfigError(f"{source}: unknown key {key!r}; known keys: {known}")
        expected = _SCHEMA[key]
        if expected is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            value = float(value)
        elif expected is int and isinstance(value, int) and not isinstance(value, bool):
            value = int(value)
        elif not isinstance(value, expected) or isinstance(value, bool):
            raise ConfigError(
                f"{source}: key {key!r} must be {expected.__name__}, got {value!r}"
            )
        out[key] = value
    return out


def preset_names() -> list[str]:
    """Names of the presets shipped with the package."""
    root = resources.files(__package__) / "presets"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    """Load a shipped preset document by name."""
    path = resources.files(__package__) / "presets" / f"{name}.json"
    if not path.is_file():
        available = ", ".join(preset_names())
        raise ConfigError(f"unknown preset {name!r}; available presets: {available}")
    doc = json.loads(path.read_text())
    return _validate_document(doc, f"preset {name!r}")


def _parse_init_box(text: str) -> list:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numeric LO,HI, got {text!r}") from None


def _merge_config(args: argparse.Namespace) -> dict:
    doc = dict(_DEFAULTS)
    if getattr(args, "preset", None) is not None:
        doc.update(load_preset(args.preset))
    if getattr(args, "config", None) is not None:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {args.config!r} is not valid JSON: {exc}") from exc
        doc.update(_validate_document(loaded, f"config file {args.config!r}"))
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            doc["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}") from None
    flags = {
        key: value
        for key, value in vars(args).items()
        if key in _SCHEMA and value is not None
    }
    doc.update(_validate_document(flags, "command line"))
    if doc["objective"] is None:
        raise ConfigError("an objective is required (--objective or a preset/config file)")
    return doc


def _build_objective(doc: dict):
    return make_objective(
        doc["objective"], dimension=doc["d"], shift_b=doc["b"], shift_c=doc["c"], mu=doc["mu"]
    )


def _build_method(doc: dict) -> SBGDParams | BaselineParams:
    name = doc["method"].strip().lower()
    if name not in _METHOD_NAMES:
        raise ConfigError(f"unknown method {name!r}; expected one of: {', '.join(_METHOD_NAMES)}")
    if name == "sbgd":
        return SBGDParams(
            p=doc["p"],
            backtrack=BacktrackParams(
                lam=doc["lambda"], gamma=doc["gamma"], h0=doc["h0"], q=doc["q"]
            ),
            tolm=doc["tolm"],
            tolmerge=doc["tolmerge"],
            tolres=doc["tolres"],
            max_iters=doc["max_iters"],
        )
    if name == "gdbt":
        return BaselineParams(
            method=BaselineMethod.GD_BACKTRACK,
            backtrack=BacktrackParams(lam=doc["lambda"], gamma=doc["gamma"], h0=doc["h0"]),
            tolres=doc["tolres"],
            max_iters=doc["max_iters"],
        )
    method = BaselineMethod.GD_FIXED if name == "gd" else BaselineMethod.ADAM
    return BaselineParams(
        method=method, h=doc["h"], tolres=doc["tolres"], max_iters=doc["max_iters"]
    )


def _build_experiment(doc: dict) -> ExperimentConfig:
    box = doc["init_box"]
    if len(box) != 2:
        raise ConfigError(f"init_box must be [lo, hi], got {box!r}")
    try:
        return ExperimentConfig(
            objective=_build_objective(doc),
            method=_build_method(doc),
            n_agents=doc["n"],
            n_runs=doc["m"],
            seed=doc["seed"],
            init_lo=box[0],
            init_hi=box[1],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_run(args: argparse.Namespace) -> int:
    doc = _merge_config(args)
    doc["m"] = 1
    cfg = _build_experiment(doc)
    result = run_single(cfg, 0)
    payload = {"config": config_to_dict(cfg), "result": run_result_to_dict(result, cfg)}
    print(json.dumps(payload, indent=2))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    doc = _merge_config(args)
    cfg = _build_experiment(doc)
    report = run_experiment(cfg, jobs=args.jobs)
    if args.csv is not None:
        write_report_csv(report, args.csv)
    if args.hist is not None:
        histogram = solution_histogram(
            report.per_run, bin_width=args.hist_bin_width, coord=args.hist_coord
        )
        write_histogram_csv(histogram, args.hist)
    print(json.dumps(report_to_dict(report), indent=2))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    doc = _merge_config(args)
    if args.steps < 1:
        raise ConfigError(f"--steps must be at least 1, got {args.steps}")
    doc["n"] = 1
    obj = _build_objective(doc)
    method = _build_method(doc)
    grid = np.linspace(args.start, args.stop, args.steps)
    try:
        pairs = basin_sweep(obj, method, grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for x0, x_final in pairs:
        print(f"{x0!r},{x_final!r}")
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", help="name of a shipped preset to start from")
    parser.add_argument("--config", help="path to a JSON config file")
    parser.add_argument("--objective", help=f"one of: {', '.join(OBJECTIVE_NAMES)}")
    parser.add_argument("--d", type=int, help="ambient dimension (fixed-dimension objectives infer it)")
    parser.add_argument("--b", type=float, help="minimizer shift applied along the all-ones direction")
    parser.add_argument("--c", type=float, help="additive offset of the minimum value")
    parser.add_argument("--mu", type=float, help="curvature of the quadratic objective")
    parser.add_argument("--method", choices=_METHOD_NAMES, help="optimizer to run")
    parser.add_argument("--n", type=int, help="number of agents")
    parser.add_argument("--seed", type=int, help=f"base seed (overrides ${SEED_ENV_VAR})")
    parser.add_argument(
        "--init-box", dest="init_box", type=_parse_init_box, metavar="LO,HI",
        help="uniform initialization box, e.g. --init-box=-3,-1",
    )
    parser.add_argument("--h", type=float, help="step size for gd/adam")
    parser.add_argument("--p", type=float, help="mass-transition exponent")
    parser.add_argument("--q", type=float, help="relative-mass exponent in the step rule")
    parser.add_argument("--lambda", dest="lambda", type=float, help="descent parameter")
    parser.add_argument("--gamma", type=float, help="backtracking shrinkage factor")
    parser.add_argument("--h0", type=float, help="initial backtracking step")
    parser.add_argument("--tolm", type=float, help="mass elimination threshold")
    parser.add_argument("--tolmerge", type=float, help="agent merge distance")
    parser.add_argument("--tolres", type=float, help="residual stopping threshold")
    parser.add_argument("--max-iters", dest="max_iters", type=int, help="iteration cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmdescent",
        description="Swarm-based gradient descent: runs, benchmarks, basin sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one seeded run and print its JSON result")
    _add_config_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="run a seeded batch and print the JSON report")
    _add_config_flags(p_bench)
    p_bench.add_argument("--m", type=int, help="number of independent runs")
    p_bench.add_argument("--jobs", type=int, default=None,
                         help="parallel worker processes (default: all cores)")
    p_bench.add_argument("--csv", help="also write one CSV row per run to this path")
    p_bench.add_argument("--hist", help="also write a solution histogram CSV to this path")
    p_bench.add_argument("--hist-bin-width", dest="hist_bin_width", type=float, default=1e-4,
                         help="histogram bin width (default 1e-4)")
    p_bench.add_argument("--hist-coord", dest="hist_coord", type=int, default=None,
                         help="solution coordinate to histogram (default: the only one)")
    p_bench.set_defaults(func=cmd_bench)

    p_sweep = sub.add_parser("sweep", help="map a 1-D grid of starts to terminal points as CSV")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--from", dest="start", type=float, required=True,
                         help="first grid point")
    p_sweep.add_argument("--to", dest="stop", type=float, required=True,
                         help="last grid point")
    p_sweep.add_argument("--steps", type=int, required=True,
                         help="number of grid points")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
