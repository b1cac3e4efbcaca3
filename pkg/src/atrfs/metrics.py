"""Example-based multi-label evaluation metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from atrfs.errors import UndefinedMetricError

__all__ = [
    "PredictionBatch",
    "hamming_loss",
    "ranking_loss",
    "coverage_error",
    "f1_example",
    "jaccard_example",
    "accuracy_example",
    "METRICS",
    "evaluate_all",
]


@dataclass(frozen=True, eq=False)
class PredictionBatch:
    truth: np.ndarray
    predicted: np.ndarray
    scores: np.ndarray | None = None

    def __post_init__(self):
        t = np.atleast_2d(np.asarray(self.truth))
        p = np.atleast_2d(np.asarray(self.predicted))
        if t.shape != p.shape:
            raise ValueError(f"truth {t.shape} and predicted {p.shape} differ in shape")
        for name, a in (("truth", t), ("predicted", p)):
            if not np.isin(a, (0, 1)).all():
                raise ValueError(f"{name} must be binary")
        object.__setattr__(self, "truth", t.astype(bool))
        object.__setattr__(self, "predicted", p.astype(bool))
        if self.scores is not None:
            s = np.atleast_2d(np.asarray(self.scores, dtype=np.float64))
            if s.shape != t.shape:
                raise ValueError(f"scores {s.shape} and truth {t.shape} differ in shape")
            object.__setattr__(self, "scores", s)

    def require_scores(self):
        if self.scores is None:
            raise ValueError("this metric needs a score matrix")
        return self.scores


def hamming_loss(b):
    return float(np.mean(b.truth != b.predicted))


def ranking_loss(b):
    """Fraction of (positive, negative) label pairs with score(pos) <= score(neg).

    Instances with no positive or no negative label are skipped.
    """
    S = b.require_scores()
    losses = []
    for y, s in zip(b.truth, S):
        pos, neg = s[y], s[~y]
        if len(pos) == 0 or len(neg) == 0:
            continue
        bad = np.count_nonzero(pos[:, None] <= neg[None, :])
        losses.append(bad / (len(pos) * len(neg)))
    if not losses:
        raise UndefinedMetricError("ranking loss needs an instance with both positive and negative labels")
    return float(np.mean(losses))


def coverage_error(b):
    """Worst rank of a true label minus one, with ties sharing the worst rank.

    Instances without positive labels contribute 0.
    """
    S = b.require_scores()
    out = np.zeros(len(S))
    for i, (y, s) in enumerate(zip(b.truth, S)):
        if y.any():
            worst = s[y].min()
            out[i] = np.count_nonzero(s >= worst) - 1
    return float(out.mean())


def _overlap(b):
    inter = np.count_nonzero(b.truth & b.predicted, axis=1)
    return inter, b.truth.sum(axis=1), b.predicted.sum(axis=1)


def f1_example(b):
    inter, ny, np_ = _overlap(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(np_ > 0, inter / np_, 0.0)
        recall = np.where(ny > 0, inter / ny, np.where(np_ == 0, 1.0, 0.0))
        # both sets empty: a perfect (vacuous) prediction
        precision = np.where((ny == 0) & (np_ == 0), 1.0, precision)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / denom, 0.0)
    return float(f1.mean())


def jaccard_example(b):
    inter = np.count_nonzero(b.truth & b.predicted, axis=1)
    union = np.count_nonzero(b.truth | b.predicted, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        j = np.where(union > 0, inter / union, 1.0)
    return float(j.mean())


def accuracy_example(b):
    """Instance-averaged |y & yhat| / |y | yhat|; numerically the Jaccard index."""
    return jaccard_example(b)


METRICS = {
    "hamming_loss": hamming_loss,
    "ranking_loss": ranking_loss,
    "coverage_error": coverage_error,
    "f1": f1_example,
    "jaccard": jaccard_example,
    "accuracy": accuracy_example,
}


def evaluate_all(b):
    """Every metric by name; an undefined metric yields NaN."""
    out = {}
    for name, fn in METRICS.items():
        try:
            out[name] = fn(b)
        except UndefinedMetricError:
            out[name] = float("nan")
    return out
