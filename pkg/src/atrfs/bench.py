"""Benchmark orchestration: load, split, discretize, rank, evaluate prefixes, report.

Feature ranking only ever sees the training part of a split. Each ranked
prefix of length ``N = 1..n_max`` is then scored with ML-KNN trained on the
training part and evaluated on the test part.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from atrfs.dataset import discretize_split, load_arff, load_split, split
from atrfs.errors import ConfigurationError, RankingTimeout
from atrfs.infotheory import build_cache
from atrfs.metrics import METRICS, PredictionBatch, evaluate_all
from atrfs.mlknn import fit as mlknn_fit
from atrfs.mlknn import predict as mlknn_predict
from atrfs.selectors import (
    SIGN_MODES,
    SelectorConfig,
    SelectorContext,
    canonical_method,
    greedy_rank,
    needs_pairwise,
)
from atrfs.transform import DEFAULT_TAU

__all__ = [
    "RunConfig",
    "EvaluationReport",
    "TimingResult",
    "load_entry",
    "prepare_split",
    "rank_split",
    "evaluate_prefixes",
    "run_benchmark",
    "emit_csv",
    "time_ranking",
    "OUTPUT_DIR_ENV",
]

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "ATRFS_OUTPUT_DIR"
STATUSES = ("ok", "timeout", "error")


def _as_list(value):
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return list(value)


@dataclass
class RunConfig:
    datasets: list = field(default_factory=list)
    methods: list = field(default_factory=lambda: ["ATR"])
    n_max: int = 50
    tau: int = DEFAULT_TAU
    bins: int = 5
    strategy: str = "equal-width"
    knn_k: int = 10
    knn_s: float = 1.0
    knn_metric: str = "euclidean"
    seed: int = 0
    test_fraction: float = 0.4
    time_budget_seconds: float = 14400.0
    output_dir: str = "results"
    atr_sign_mode: str = "paper-literal"

    def __post_init__(self):
        self.datasets = _as_list(self.datasets)
        self.methods = [canonical_method(m) for m in _as_list(self.methods)]
        if not self.methods:
            raise ConfigurationError("at least one method is required")
        if self.n_max < 1:
            raise ConfigurationError("n_max must be at least 1")
        if not self.time_budget_seconds > 0:
            raise ConfigurationError("time_budget_seconds must be positive")
        if self.atr_sign_mode not in SIGN_MODES:
            raise ConfigurationError(f"atr_sign_mode must be one of {SIGN_MODES}")

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_mapping(cls, values):
        """Build from string values (config file or command line)."""
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in values.items():
            if key not in types:
                raise ConfigurationError(f"unknown config key {key!r}")
            kind = types[key]
            try:
                if kind == "int":
                    kwargs[key] = int(raw)
                elif kind == "float":
                    kwargs[key] = float(raw)
                else:
                    kwargs[key] = raw
            except ValueError as exc:
                raise ConfigurationError(f"bad value for {key}: {raw!r}") from exc
        return cls(**kwargs)

    @staticmethod
    def read_file(path):
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        values = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigurationError(f"{path}:{lineno}: expected key = value")
                values[key.strip()] = value.strip()
        return values

    def resolved_output_dir(self):
        return Path(os.environ.get(OUTPUT_DIR_ENV) or self.output_dir)


@dataclass
class EvaluationReport:
    dataset: str
    method: str
    status: str = "ok"
    order: list = field(default_factory=list)
    curves: list = field(default_factory=list)  # one {metric: value} dict per N
    ranking_seconds: float | None = None
    message: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")

    def summary(self):
        """Mean and population std over the evaluated prefix sizes, per metric."""
        out = {}
        for name in METRICS:
            vals = np.array([c[name] for c in self.curves], dtype=np.float64)
            vals = vals[~np.isnan(vals)]
            if self.status != "ok" or not len(vals):
                out[name] = (None, None)
            else:
                out[name] = (float(vals.mean()), float(vals.std(ddof=0)))
        return out


@dataclass
class TimingResult:
    method: str
    dataset: str
    mean_seconds: float
    cache_seconds: float
    runs: list


# ---------------------------------------------------------------------------
# Steps
# ---------------------------------------------------------------------------


def _parse_entry(entry):
    path, labels = entry, None
    head, sep, tail = entry.rpartition(":")
    if sep and head and "/" not in tail:
        path = head
        labels = int(tail) if tail.isdigit() else tail.split("|")
    return Path(path), labels


def _dataset_name(path):
    stem = path.stem
    for suffix in ("-train", "-test", "_train", "_test"):
        if stem.endswith(suffix):
            return stem[: -len(suffix)]
    return stem


def _companions(path):
    stem = _dataset_name(path)
    for a, b in (("-train", "-test"), ("_train", "_test")):
        tr = path.with_name(f"{stem}{a}{path.suffix}")
        te = path.with_name(f"{stem}{b}{path.suffix}")
        if tr.exists() and te.exists():
            return tr, te
    return None


def load_entry(entry, seed=0, test_fraction=0.4):
    """Raw split for one ``path[:labels]`` entry.

    A ``<name>-train``/``<name>-test`` pair next to ``path`` is used as
    given; otherwise the file is split at random with ``seed``.
    """
    path, labels = _parse_entry(entry)
    name = _dataset_name(path)
    pair = _companions(path)
    if pair is not None:
        return load_split(*pair, labels=labels, name=name)
    return split(load_arff(path, labels=labels, name=name), test_fraction, seed)


def prepare_split(entry, cfg):
    raw = load_entry(entry, cfg.seed, cfg.test_fraction)
    return discretize_split(raw, cfg.bins, cfg.strategy)


def rank_split(train, method, cfg, n_select=None):
    """Rank features of the training part. The budget covers cache construction."""
    start = time.perf_counter()
    deadline = start + cfg.time_budget_seconds
    config = SelectorConfig(method=method, tau=cfg.tau,
                            n_select=n_select or cfg.n_max, atr_sign_mode=cfg.atr_sign_mode)
    cache = build_cache(train, pairwise=needs_pairwise(config.method))
    if time.perf_counter() > deadline:
        raise RankingTimeout(time.perf_counter() - start, cfg.time_budget_seconds)
    result = greedy_rank(SelectorContext(train, config, cache=cache), deadline=deadline)
    return result, time.perf_counter() - start


def evaluate_prefixes(sp, order, cfg):
    """All metrics for ML-KNN on the first ``N`` ranked features, ``N = 1..n_max``."""
    curves = []
    for n in range(1, min(cfg.n_max, len(order)) + 1):
        prefix = order[:n]
        model = mlknn_fit(sp.train, prefix, cfg.knn_k, cfg.knn_s, cfg.knn_metric)
        pred, scores = mlknn_predict(model, sp.test, prefix)
        curves.append(evaluate_all(PredictionBatch(sp.test.labels, pred, scores)))
    return curves


def run_benchmark(cfg):
    """One :class:`EvaluationReport` per (dataset, method) cell."""
    reports = []
    for entry in cfg.datasets:
        name = _dataset_name(_parse_entry(entry)[0])
        try:
            sp = prepare_split(entry, cfg)
        except Exception as exc:  # a broken dataset aborts only its own cells
            log.error("dataset %s failed to load: %s", entry, exc)
            reports += [EvaluationReport(name, m, "error", message=str(exc)) for m in cfg.methods]
            continue
        for method in cfg.methods:
            reports.append(_run_cell(name, sp, method, cfg))
    return reports


def _run_cell(name, sp, method, cfg):
    log.info("ranking %s with %s", name, method)
    try:
        result, seconds = rank_split(sp.train, method, cfg)
    except RankingTimeout as exc:
        log.warning("%s on %s: %s", method, name, exc)
        return EvaluationReport(name, method, "timeout", message=str(exc))
    except Exception as exc:
        log.exception("%s on %s failed", method, name)
        return EvaluationReport(name, method, "error", message=str(exc))
    try:
        curves = evaluate_prefixes(sp, result.order, cfg)
    except Exception as exc:
        log.exception("evaluation of %s on %s failed", method, name)
        return EvaluationReport(name, method, "error", result.order, ranking_seconds=seconds,
                                message=str(exc))
    return EvaluationReport(name, method, "ok", result.order, curves, seconds)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def _fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(x, ".10g")


def emit_csv(reports, out_dir):
    """Write ``metrics.csv``, ``timings.csv`` and ``curves/<dataset>_<method>.csv``."""
    if not reports:
        raise ValueError("no reports to write")
    out = Path(out_dir)
    (out / "curves").mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "method", "metric", "mean", "std", "status"])
        for r in reports:
            for metric, (mean, std) in r.summary().items():
                w.writerow([r.dataset, r.method, metric, _fmt(mean), _fmt(std), r.status])
    with open(out / "timings.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "method", "ranking_seconds", "status"])
        for r in reports:
            secs = r.ranking_seconds if r.status == "ok" else None
            w.writerow([r.dataset, r.method, _fmt(secs), r.status])
    written = [out / "metrics.csv", out / "timings.csv"]
    for r in reports:
        path = out / "curves" / f"{r.dataset}_{r.method}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n_features", "feature_index", *METRICS])
            for n, row in enumerate(r.curves, 1):
                w.writerow([n, r.order[n - 1], *(_fmt(row[m]) for m in METRICS)])
        written.append(path)
    return written


def time_ranking(method, dataset, repeats=3, tau=DEFAULT_TAU, atr_sign_mode="paper-literal"):
    """Mean wall-clock of full rankings (``N = |F|``) over ``repeats`` runs.

    ``mean_seconds`` includes building the mutual-information cache;
    ``cache_seconds`` reports that part alone.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    config = SelectorConfig(method=method, tau=tau, n_select=dataset.n_features,
                            atr_sign_mode=atr_sign_mode)
    runs, cache_runs = [], []
    for _ in range(repeats):
        start = time.perf_counter()
        cache = build_cache(dataset, pairwise=needs_pairwise(config.method))
        cache_runs.append(time.perf_counter() - start)
        greedy_rank(SelectorContext(dataset, config, cache=cache))
        runs.append(time.perf_counter() - start)
    return TimingResult(config.method, dataset.name, float(np.mean(runs)),
                        float(np.mean(cache_runs)), runs)
