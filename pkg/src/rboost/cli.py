"""Command-line surface: benchmark drivers, CSV fit/predict, result reporting.

Subcommands:
  simulate   oracle-selection comparison on the synthetic targets
  ucurve     test RMSE of the re-scaled booster across the u grid
  adaptive   validation-based selection of the re-scale factor vs the oracle
  fit        train on a CSV file and persist the model
  predict    load a persisted model and emit predictions for a CSV file
  realdata   half/half protocol on a tabular dataset (stumps by default)
  report     render stored result rows as an aligned table

Every file-writing run drops a manifest.json next to its outputs; rerunning
the same command yields byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .bench import SyntheticSpec, run_adaptive_eval, run_comparison, run_ucurve, selected_u_stats
from .core import TrainConfig
from .boosters import train
from .io import (
    CsvSchema,
    RunManifest,
    emit_delimited,
    fmt,
    format_aligned,
    load_csv,
    load_feature_matrix,
    load_model,
    read_delimited,
    save_model,
    write_manifest,
)
from .learners import NormalizedLearner, RegressionTree, TreeLearnerSpec
from .realdata import realdata_experiment
from .selection import u_grid

_ALGO_ALIASES = {"boost": "boosting", "rboost": "rboosting", "ddr": "ddrboosting"}


def _resolve_algorithms(name: str):
    if name == "all":
        return ("boosting", "rboosting", "ddrboosting")
    return (_ALGO_ALIASES[name],)


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be COUNT:LO:HI, got {text!r}")
    return u_grid(int(parts[0]), float(parts[1]), float(parts[2]))


def _parse_target_column(text):
    if text is None:
        return None
    try:
        return int(text)
    except ValueError:
        return text


def _schema_from_args(args) -> CsvSchema:
    return CsvSchema(
        has_header=not args.no_header,
        target_column=_parse_target_column(args.target_column),
        delimiter=args.delimiter,
    )


def _write_outputs(args, config: dict, files: dict):
    """Write result files plus the manifest into --out; files maps name -> (columns, rows)."""
    os.makedirs(args.out, exist_ok=True)
    for name, (columns, rows) in files.items():
        emit_delimited(os.path.join(args.out, name), columns, rows, manifest_name="manifest.json")
    manifest = RunManifest(
        command=tuple(args.command_echo),
        config=config,
        seed=args.seed,
        library_version=__version__,
        outputs=tuple(sorted(files)),
    )
    write_manifest(manifest, os.path.join(args.out, "manifest.json"))


def _add_schema_flags(p):
    p.add_argument("--target-column", default=None, help="target column name or 0-based index (default: last)")
    p.add_argument("--no-header", action="store_true", help="treat the first line as data")
    p.add_argument("--delimiter", default=",", help="field delimiter (default comma)")


def _add_bench_flags(p, j_default=4):
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--j", type=int, default=j_default, help="tree splits per weak learner")
    p.add_argument("--k-max", type=int, default=500, help="iteration budget per training run")
    p.add_argument("--grid", default="20:1:1e6", help="u grid as COUNT:LO:HI (log-spaced)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clip", type=float, default=None, metavar="M", help="clip predictions to [-M, M]")
    p.add_argument("--train-m", type=int, default=500)
    p.add_argument("--test-m", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    p.add_argument("--out", default=None, metavar="DIR", help="write result rows and manifest here")


def _spec_for(args, target: int, sigma: float) -> SyntheticSpec:
    return SyntheticSpec(
        target_id=target,
        noise_sigma=sigma,
        train_m=args.train_m,
        test_m=args.test_m,
        trials=args.trials,
        seed_base=args.seed,
    )


def _bench_config(args, **extra) -> dict:
    cfg = {
        "trials": args.trials,
        "j": args.j,
        "k_max": args.k_max,
        "grid": args.grid,
        "seed": args.seed,
        "clip": args.clip,
        "train_m": args.train_m,
        "test_m": args.test_m,
    }
    cfg.update(extra)
    return cfg


def _cmd_simulate(args) -> int:
    algorithms = _resolve_algorithms(args.algo)
    grid = _parse_grid(args.grid)
    learner = TreeLearnerSpec(args.j)
    row_cols = ["target", "sigma", "algorithm", "trial", "rmse", "selected_u", "selected_k"]
    rows, table = [], []
    for target in args.target:
        for sigma in args.sigma:
            report = run_comparison(
                _spec_for(args, target, sigma),
                algorithms=algorithms,
                k_max=args.k_max,
                grid=grid,
                learner_spec=learner,
                clip_bound=args.clip,
                workers=args.workers,
            )
            for algo in algorithms:
                s = report.algorithms[algo]
                for t, (r, sel) in enumerate(zip(s.rmse_per_trial, s.selected)):
                    rows.append([target, sigma, algo, t, r, sel.get("u", ""), sel.get("k", "")])
                rows.append([target, sigma, algo, "mean", s.rmse_mean, "", ""])
                rows.append([target, sigma, algo, "std", s.rmse_std, "", ""])
                table.append([target, sigma, algo, f"{s.rmse_mean:.4f}", f"{s.rmse_std:.4f}"])
    print(format_aligned(["target", "sigma", "algorithm", "mean_rmse", "std_rmse"], table), end="")
    if args.out:
        config = _bench_config(args, targets=list(args.target), sigmas=list(args.sigma), algo=args.algo)
        _write_outputs(args, config, {"results.csv": (row_cols, rows)})
    return 0


def _cmd_ucurve(args) -> int:
    grid = _parse_grid(args.grid)
    curve = run_ucurve(
        _spec_for(args, args.target, args.sigma),
        grid=grid,
        k_max=args.k_max,
        learner_spec=TreeLearnerSpec(args.j),
        clip_bound=args.clip,
        workers=args.workers,
    )
    rows = [[p.u, p.mean_rmse, p.std_rmse] for p in curve]
    table = [[p.u, f"{p.mean_rmse:.4f}", f"{p.std_rmse:.4f}"] for p in curve]
    print(format_aligned(["u", "mean_rmse", "std_rmse"], table), end="")
    if args.out:
        config = _bench_config(args, target=args.target, sigma=args.sigma)
        _write_outputs(args, config, {"ucurve.csv": (["u", "mean_rmse", "std_rmse"], rows)})
    return 0


def _cmd_adaptive(args) -> int:
    grid = _parse_grid(args.grid)
    report = run_adaptive_eval(
        _spec_for(args, args.target, args.sigma),
        grid=grid,
        k_max=args.k_max,
        learner_spec=TreeLearnerSpec(args.j),
        clip_bound=args.clip,
        workers=args.workers,
    )
    row_cols = ["target", "sigma", "algorithm", "trial", "rmse", "selected_u", "selected_k"]
    rows, table = [], []
    for name, s in report.algorithms.items():
        for t, (r, sel) in enumerate(zip(s.rmse_per_trial, s.selected)):
            rows.append([args.target, args.sigma, name, t, r, sel.get("u", ""), sel.get("k", "")])
        rows.append([args.target, args.sigma, name, "mean", s.rmse_mean, "", ""])
        rows.append([args.target, args.sigma, name, "std", s.rmse_std, "", ""])
        u_mean, u_std = selected_u_stats(s)
        table.append([name, f"{s.rmse_mean:.4f}", f"{s.rmse_std:.4f}", f"{u_mean:.1f}", f"{u_std:.1f}"])
    print(format_aligned(["algorithm", "mean_rmse", "std_rmse", "mean_u", "std_u"], table), end="")
    if args.out:
        config = _bench_config(args, target=args.target, sigma=args.sigma)
        _write_outputs(args, config, {"adaptive.csv": (row_cols, rows)})
    return 0


def _cmd_fit(args) -> int:
    if args.algo == "all":
        raise ValueError("fit needs a single algorithm, not 'all'")
    algorithm = _ALGO_ALIASES[args.algo]
    data = load_csv(args.data, _schema_from_args(args))
    config = TrainConfig(
        algorithm=algorithm,
        max_iterations=args.k_max,
        learner_spec=TreeLearnerSpec(args.j),
        u=args.u,
        clip_bound=args.clip,
        seed=args.seed,
    )
    model, trace = train(data, config)
    meta = {
        "algorithm": algorithm,
        "u": args.u,
        "n_splits": args.j,
        "k_max": args.k_max,
        "clip_bound": args.clip,
        "stages": len(model),
        "train_rows": data.m,
        "manifest": "manifest.json",
    }
    os.makedirs(args.out, exist_ok=True)
    model_path = os.path.join(args.out, "model.json")
    save_model(model, model_path, meta)
    manifest = RunManifest(
        command=tuple(args.command_echo),
        config={**meta, "data": os.path.basename(args.data), "seed": args.seed},
        seed=args.seed,
        library_version=__version__,
        outputs=("model.json",),
    )
    write_manifest(manifest, os.path.join(args.out, "manifest.json"))
    final_risk = float(trace.risk[-1]) if len(trace) else float(np.mean(data.targets**2))
    print(f"fit {algorithm}: {len(model)} stages, training rmse {np.sqrt(final_risk):.6g}, model at {model_path}")
    return 0


def _model_dimension(model):
    for st in model.stages:
        learner = st.learner
        base = learner.base if isinstance(learner, NormalizedLearner) else learner
        if isinstance(base, RegressionTree):
            return base.n_features
    return None


def _cmd_predict(args) -> int:
    model, meta = load_model(args.model)
    schema = _schema_from_args(args)
    matrix = load_feature_matrix(args.data, schema)
    d = _model_dimension(model)
    if d is not None and matrix.shape[1] == d + 1:
        matrix = load_csv(args.data, schema).features  # file carries a target column; drop it
    elif d is not None and matrix.shape[1] != d:
        raise ValueError(f"model expects {d} feature columns, file has {matrix.shape[1]}")
    clip_bound = args.clip if args.clip is not None else meta.get("clip_bound")
    preds = model.predict(matrix, clip_bound=clip_bound)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        emit_delimited(
            os.path.join(args.out, "predictions.csv"),
            ["prediction"],
            [[p] for p in preds],
            manifest_name="manifest.json",
        )
        manifest = RunManifest(
            command=tuple(args.command_echo),
            config={"model": os.path.basename(args.model), "data": os.path.basename(args.data)},
            seed=0,
            library_version=__version__,
            outputs=("predictions.csv",),
        )
        write_manifest(manifest, os.path.join(args.out, "manifest.json"))
    else:
        for p in preds:
            print(fmt(p))
    return 0


def _cmd_realdata(args) -> int:
    schema = _schema_from_args(args)
    grid = _parse_grid(args.grid)
    if args.pre_split and args.data:
        raise ValueError("pass a data CSV or --pre-split TRAIN TEST, not both")
    if args.pre_split:
        train_ds = load_csv(args.pre_split[0], schema)
        test_ds = load_csv(args.pre_split[1], schema)
        report = realdata_experiment(
            pre_split=(train_ds, test_ds), k_max=args.k_max, grid=grid,
            n_splits=args.j, seed=args.seed, clip_bound=args.clip,
        )
    else:
        if not args.data:
            raise ValueError("pass a data CSV or --pre-split TRAIN TEST")
        data = load_csv(args.data, schema)
        report = realdata_experiment(
            data=data, k_max=args.k_max, grid=grid,
            n_splits=args.j, seed=args.seed, clip_bound=args.clip,
        )
    cols = ["algorithm", "test_rmse", "selected_u", "selected_k", "train_m", "test_m"]
    rows = [
        [name, out.test_rmse, out.selected.get("u", ""), out.selected.get("k", ""), report.train_m, report.test_m]
        for name, out in report.methods.items()
    ]
    table = [[r[0], f"{r[1]:.4f}", r[2], r[3]] for r in rows]
    print(format_aligned(["algorithm", "test_rmse", "selected_u", "selected_k"], table), end="")
    if args.out:
        config = {
            "k_max": args.k_max, "grid": args.grid, "j": args.j, "seed": args.seed,
            "clip": args.clip,
            "data": os.path.basename(args.data) if args.data else None,
            "pre_split": [os.path.basename(p) for p in args.pre_split] if args.pre_split else None,
        }
        _write_outputs(args, config, {"realdata.csv": (cols, rows)})
    return 0


def _cmd_report(args) -> int:
    for path in args.rows:
        columns, rows = read_delimited(path)
        print(format_aligned(columns, rows), end="")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rboost", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rboost {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", help="oracle-selection comparison on synthetic targets")
    p.add_argument("--target", type=int, nargs="+", default=[3], choices=range(1, 10))
    p.add_argument("--sigma", type=float, nargs="+", default=[0.0])
    p.add_argument("--algo", choices=["boost", "rboost", "ddr", "all"], default="all")
    _add_bench_flags(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("ucurve", help="test RMSE across the u grid")
    p.add_argument("--target", type=int, default=4, choices=range(1, 10))
    p.add_argument("--sigma", type=float, default=0.5)
    _add_bench_flags(p)
    p.set_defaults(handler=_cmd_ucurve)

    p = sub.add_parser("adaptive", help="validation-based u selection vs the oracle")
    p.add_argument("--target", type=int, default=4, choices=range(1, 10))
    p.add_argument("--sigma", type=float, default=0.5)
    _add_bench_flags(p)
    p.set_defaults(handler=_cmd_adaptive)

    p = sub.add_parser("fit", help="train on a CSV file and persist the model")
    p.add_argument("data")
    p.add_argument("--algo", choices=["boost", "rboost", "ddr"], default="rboost")
    p.add_argument("--u", type=int, default=1)
    p.add_argument("--j", type=int, default=4)
    p.add_argument("--k-max", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clip", type=float, default=None, metavar="M")
    p.add_argument("--out", default=".", metavar="DIR")
    _add_schema_flags(p)
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("predict", help="emit predictions for a CSV file")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--clip", type=float, default=None, metavar="M")
    p.add_argument("--out", default=None, metavar="DIR")
    _add_schema_flags(p)
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("realdata", help="half/half protocol on a tabular dataset")
    p.add_argument("data", nargs="?", default=None)
    p.add_argument("--pre-split", nargs=2, metavar=("TRAIN", "TEST"), default=None)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--k-max", type=int, default=500)
    p.add_argument("--grid", default="20:1:1e6")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clip", type=float, default=None, metavar="M")
    p.add_argument("--out", default=None, metavar="DIR")
    _add_schema_flags(p)
    p.set_defaults(handler=_cmd_realdata)

    p = sub.add_parser("report", help="render stored result rows as aligned tables")
    p.add_argument("rows", nargs="+")
    p.set_defaults(handler=_cmd_report)

    return parser


def main(argv=None) -> int:
    """Entry point; returns the process exit status."""
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        code = exc.code
        return int(code) if code is not None else 0
    args.command_echo = ["rboost", *argv]
    try:
        return args.handler(args)
    except Exception as exc:
        print(f"rboost: error: {exc}", file=sys.stderr)
        return 1
