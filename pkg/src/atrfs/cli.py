"""Command line entry point: ``rank``, ``bench`` and ``time`` subcommands."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from atrfs.bench import (
    RunConfig,
    emit_csv,
    prepare_split,
    rank_split,
    run_benchmark,
    time_ranking,
)
from atrfs.errors import ATRFSError, RankingTimeout

log = logging.getLogger("atrfs")

_HELP = {
    "datasets": "comma-separated ARFF paths, each optionally suffixed ':<n labels>' or ':name|name'",
    "methods": "comma-separated selector names",
    "n_max": "evaluate ranked prefixes of length 1..n_max",
    "tau": "minimum label-combination frequency kept by the pruned powerset",
    "bins": "bins per continuous feature",
    "strategy": "equal-width or equal-frequency",
    "knn_k": "ML-KNN neighbor count",
    "knn_s": "ML-KNN smoothing constant",
    "knn_metric": "euclidean or hamming",
    "seed": "seed for the random split when no train/test pair exists",
    "test_fraction": "test share of a random split",
    "time_budget_seconds": "wall-clock limit per ranking",
    "output_dir": "report directory (ATRFS_OUTPUT_DIR overrides)",
    "atr_sign_mode": "paper-literal or always-add",
}


def _add_config_flags(p, only=None):
    for key in RunConfig.keys():
        if only is not None and key not in only:
            continue
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        p.add_argument(*flags, dest=key, default=None, help=_HELP.get(key))


def _config(args):
    values = RunConfig.read_file(args.config) if getattr(args, "config", None) else {}
    for key in RunConfig.keys():
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig.from_mapping(values)


def build_parser():
    parser = argparse.ArgumentParser(prog="atrfs", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank the features of one dataset with one method")
    p.add_argument("--dataset", required=True, help="ARFF path, optionally ':<labels>'")
    p.add_argument("--method", default="ATR")
    p.add_argument("--output", help="write the ranking CSV here instead of stdout")
    _add_config_flags(p, only={"n_max", "tau", "bins", "strategy", "seed", "test_fraction",
                                "time_budget_seconds", "atr_sign_mode"})

    p = sub.add_parser("bench", help="run the full dataset x method grid")
    p.add_argument("--config", help="flat key = value file; flags override its entries")
    _add_config_flags(p)

    p = sub.add_parser("time", help="time full-feature-space rankings")
    p.add_argument("--config")
    p.add_argument("--repeats", type=int, default=3)
    _add_config_flags(p, only={"datasets", "methods", "tau", "bins", "strategy", "seed",
                                "test_fraction", "atr_sign_mode", "output_dir"})
    return parser


def _cmd_rank(args):
    cfg = _config(args)
    sp = prepare_split(args.dataset, cfg)
    try:
        result, seconds = rank_split(sp.train, args.method, cfg)
    except RankingTimeout as exc:
        log.warning("%s", exc)
        return 0
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["position", "feature_index", "feature_name", "score"])
        for pos, (f, s) in enumerate(zip(result.order, result.scores), 1):
            w.writerow([pos, f, sp.train.feature_names[f], format(s, ".10g")])
    finally:
        if args.output:
            out.close()
    log.info("ranked %d features in %.3fs", len(result.order), seconds)
    return 0


def _cmd_bench(args):
    cfg = _config(args)
    if not cfg.datasets:
        raise SystemExit("no datasets configured")
    reports = run_benchmark(cfg)
    out = cfg.resolved_output_dir()
    emit_csv(reports, out)
    for r in reports:
        hl = r.summary()["hamming_loss"][0]
        print(f"{r.dataset:>12} {r.method:>7} {r.status:>7} "
              f"hamming={'-' if hl is None else format(hl, '.4f')}")
    print(f"reports written to {out}")
    return 1 if any(r.status == "error" for r in reports) else 0


def _cmd_time(args):
    cfg = _config(args)
    out = cfg.resolved_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for entry in cfg.datasets:
        train = prepare_split(entry, cfg).train
        for method in cfg.methods:
            t = time_ranking(method, train, args.repeats, cfg.tau, cfg.atr_sign_mode)
            rows.append(t)
            print(f"{t.dataset:>12} {t.method:>7} total={t.mean_seconds:.4f}s "
                  f"cache={t.cache_seconds:.4f}s")
    with open(out / "timings_full.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "method", "mean_seconds", "cache_seconds", "repeats"])
        for t in rows:
            w.writerow([t.dataset, t.method, format(t.mean_seconds, ".6g"),
                        format(t.cache_seconds, ".6g"), len(t.runs)])
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"rank": _cmd_rank, "bench": _cmd_bench, "time": _cmd_time}[args.command]
    try:
        return handler(args)
    except (ATRFSError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
