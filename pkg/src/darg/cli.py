"""Command-line interface: train, evaluate, benchmark, inspect-regions, search.

Every command is deterministic given its flags and seed: repeated runs
produce byte-identical stdout and output files. Errors are reported to
stderr as one JSON object with an ``error`` kind and exit with a distinct
code per failure family (3 parse, 4 fit, 5 I/O).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .boosting import (
    BETA_MODES,
    NEIGHBOR_SCOPES,
    DargConfig,
    DargEnsemble,
    fit_adaboost_baseline,
    fit_darg,
    fit_darg_with_reports,
    predict_ensemble,
)
from .data import DataFormatError, Dataset, SplitSpec, load_csv, load_keel, stratified_split
from .evaluation import SearchSpace, compute_metrics, random_search
from .sampling import scheduler_weights

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_FIT = 4
EXIT_IO = 5

_METRIC_COLUMNS = ("accuracy", "weighted_f1", "g_mean", "auc")


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2))
    sys.stdout.write("\n")


def _load_dataset(path: str, fmt: str, label_column: str) -> Dataset:
    if fmt == "keel":
        return load_keel(path)
    if label_column.lstrip("-").isdigit():
        return load_csv(path, int(label_column))
    return load_csv(path, label_column)


def _config_from_args(args) -> DargConfig:
    return DargConfig(
        n_estimators=args.n_estimators,
        k=args.k,
        density_threshold=args.density_threshold,
        max_depth=args.max_depth,
        seed=args.seed if hasattr(args, "seed") else 0,
        beta_mode=args.beta_mode,
        samme_correction=args.samme_correction,
        neighbor_scope=args.neighbor_scope,
    ).validate()


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=5, help="mutual nearest neighbor count")
    p.add_argument("--max-depth", type=int, default=10, help="max depth of the tree base learner")
    p.add_argument(
        "--density-threshold", type=float, default=0.5, help="dense-region density cutoff in (0,1)"
    )
    p.add_argument("--n-estimators", type=int, default=50, help="boosting epochs")
    p.add_argument("--beta-mode", choices=BETA_MODES, default="classic")
    p.add_argument("--samme-correction", action="store_true")
    p.add_argument("--neighbor-scope", choices=NEIGHBOR_SCOPES, default="within_class")


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="dataset file (directory for benchmark)")
    p.add_argument("--format", choices=("keel", "csv"), default="keel")
    p.add_argument(
        "--label-column",
        default="-1",
        help="CSV label column name or index (default: last column)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darg", description="Density-aware region-guided boosting benchmark harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit on an 80:20 split and persist the model")
    _add_data_flags(p_train)
    _add_model_flags(p_train)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--train-fraction", type=float, default=0.8)
    p_train.add_argument("--out", required=True, help="model output path (JSON)")

    p_eval = sub.add_parser("evaluate", help="score a saved model on a dataset")
    _add_data_flags(p_eval)
    p_eval.add_argument("--model", required=True, help="model file written by train")

    p_bench = sub.add_parser("benchmark", help="compare against the AdaBoost baseline")
    _add_data_flags(p_bench)
    _add_model_flags(p_bench)
    p_bench.add_argument("--seeds", type=int, nargs="+", default=[0])
    p_bench.add_argument("--train-fraction", type=float, default=0.8)
    p_bench.add_argument("--out", required=True, help="results CSV path")

    p_inspect = sub.add_parser(
        "inspect-regions", help="report per-epoch region partitions and sampling plan"
    )
    _add_data_flags(p_inspect)
    _add_model_flags(p_inspect)
    p_inspect.add_argument("--seed", type=int, default=0)
    p_inspect.add_argument("--train-fraction", type=float, default=0.8)
    p_inspect.add_argument("--out", help="optional JSON output path (default stdout)")

    p_search = sub.add_parser("search", help="random hyperparameter search with cross-validation")
    _add_data_flags(p_search)
    _add_model_flags(p_search)
    p_search.add_argument("--seed", type=int, default=0)
    p_search.add_argument("--train-fraction", type=float, default=0.8)
    p_search.add_argument("--iters", type=int, default=10)
    p_search.add_argument("--folds", type=int, default=5)

    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def run_train(args) -> None:
    ds = _load_dataset(args.data, args.format, args.label_column)
    train, test = stratified_split(ds, SplitSpec(args.train_fraction, args.seed))
    cfg = _config_from_args(args)
    model = fit_darg(train, cfg)
    model.save(args.out)
    pred, scores = predict_ensemble(model, test.features)
    _emit(compute_metrics(test.labels, pred, scores).to_dict())


def run_evaluate(args) -> None:
    model = DargEnsemble.load(args.model)
    ds = _load_dataset(args.data, args.format, args.label_column)
    if tuple(ds.class_names) != tuple(model.class_names):
        raise ValueError(
            f"dataset classes {ds.class_names} do not match model classes {model.class_names}"
        )
    pred, scores = predict_ensemble(model, ds.features)
    _emit(compute_metrics(ds.labels, pred, scores).to_dict())


def _benchmark_cell(task: tuple) -> dict:
    path, fmt, label_column, model_name, seed, cfg_dict, train_fraction = task
    ds = _load_dataset(path, fmt, label_column)
    train, test = stratified_split(ds, SplitSpec(train_fraction, seed))
    cfg = DargConfig(**{**cfg_dict, "seed": seed})
    fit = fit_darg if model_name == "darg" else fit_adaboost_baseline
    model = fit(train, cfg)
    pred, scores = predict_ensemble(model, test.features)
    report = compute_metrics(test.labels, pred, scores)
    return {
        "dataset": Path(path).stem,
        "model": model_name,
        "seed": seed,
        "accuracy": report.accuracy,
        "weighted_f1": report.weighted_f1,
        "g_mean": report.g_mean,
        "auc": report.auc,
    }


def _rank_pair(values: dict[str, float]) -> dict[str, float]:
    # two-model ranking: better metric -> rank 1, exact tie -> 1.5 each
    (m1, v1), (m2, v2) = sorted(values.items())
    if v1 == v2:
        return {m1: 1.5, m2: 1.5}
    return {m1: 1.0, m2: 2.0} if v1 > v2 else {m1: 2.0, m2: 1.0}


def run_benchmark(args) -> None:
    data_dir = Path(args.data)
    pattern = "*.dat" if args.format == "keel" else "*.csv"
    paths = sorted(data_dir.glob(pattern))
    if not paths:
        raise DataFormatError(f"no {pattern} files in {data_dir}")

    readable = []
    for path in paths:
        try:
            _load_dataset(str(path), args.format, args.label_column)
            readable.append(path)
        except Exception as exc:  # noqa: BLE001 - skip-and-continue per contract
            sys.stderr.write(f"warning: skipping {path}: {exc}\n")
    if not readable:
        raise DataFormatError("no readable datasets")

    cfg_dict = {
        "n_estimators": args.n_estimators,
        "k": args.k,
        "density_threshold": args.density_threshold,
        "max_depth": args.max_depth,
        "beta_mode": args.beta_mode,
        "samme_correction": args.samme_correction,
        "neighbor_scope": args.neighbor_scope,
    }
    tasks = [
        (str(path), args.format, args.label_column, model_name, seed, cfg_dict, args.train_fraction)
        for path in readable
        for model_name in ("adaboost", "darg")
        for seed in args.seeds
    ]
    workers = int(os.environ.get("DARG_MAX_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_benchmark_cell, tasks))
    else:
        rows = [_benchmark_cell(t) for t in tasks]
    rows.sort(key=lambda r: (r["dataset"], r["model"], r["seed"]))

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("dataset", "model", "seed") + _METRIC_COLUMNS)
        for row in rows:
            writer.writerow(
                [row["dataset"], row["model"], row["seed"]]
                + [f"{row[m]:.6f}" for m in _METRIC_COLUMNS]
            )

    # mean rank per metric across datasets (seeds averaged first)
    datasets = sorted({r["dataset"] for r in rows})
    models = ("adaboost", "darg")
    summary: dict[str, dict[str, list[float]]] = {m: {name: [] for name in models} for m in _METRIC_COLUMNS}
    for ds_name in datasets:
        for metric in _METRIC_COLUMNS:
            # sorted before averaging so equal score multisets tie exactly
            means = {
                name: float(
                    np.mean(sorted(r[metric] for r in rows if r["dataset"] == ds_name and r["model"] == name))
                )
                for name in models
            }
            for name, rank in _rank_pair(means).items():
                summary[metric][name].append(rank)
    _emit(
        {
            "datasets": datasets,
            "seeds": list(args.seeds),
            "mean_rank": {
                metric: {name: float(np.mean(ranks)) for name, ranks in by_model.items()}
                for metric, by_model in summary.items()
            },
            "rows_written": len(rows),
            "out": args.out,
        }
    )


def run_inspect_regions(args) -> None:
    ds = _load_dataset(args.data, args.format, args.label_column)
    train, _ = stratified_split(ds, SplitSpec(args.train_fraction, args.seed))
    cfg = _config_from_args(args)
    _, reports = fit_darg_with_reports(train, cfg)
    schedule = scheduler_weights(cfg.n_estimators)
    doc = {
        "scheduler_weights": [float(o) for o in schedule],
        "scheduler_sum": float(schedule.sum()),
        "epochs": [r.to_dict() for r in reports],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
        _emit({"out": args.out, "epochs": len(reports)})
    else:
        _emit(doc)


def run_search(args) -> None:
    ds = _load_dataset(args.data, args.format, args.label_column)
    train, _ = stratified_split(ds, SplitSpec(args.train_fraction, args.seed))
    base = _config_from_args(args)
    best, trials = random_search(
        train, base, SearchSpace(), iters=args.iters, seed=args.seed, folds=args.folds
    )
    _emit(
        {
            "best": {
                "k": best.k,
                "max_depth": best.max_depth,
                "density_threshold": best.density_threshold,
            },
            "trials": trials,
        }
    )


_COMMANDS = {
    "train": run_train,
    "evaluate": run_evaluate,
    "benchmark": run_benchmark,
    "inspect-regions": run_inspect_regions,
    "search": run_search,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except DataFormatError as exc:
        _fail("parse", exc)
        return EXIT_PARSE
    except OSError as exc:
        _fail("io", exc)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - uniform fit-error reporting
        _fail("fit", exc)
        return EXIT_FIT
    return EXIT_OK


def _fail(kind: str, exc: Exception) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}))
    sys.stderr.write("\n")


if __name__ == "__main__":
    sys.exit(main())
