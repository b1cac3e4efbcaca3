"""ML-KNN: per-label Bayesian decisions from positive-neighbor counts.

Training counts, for every label and every ``c`` in ``0..k``, how many
training instances with and without the label have exactly ``c`` positive
neighbors among their ``k`` nearest (the instance itself excluded). A query
is then labeled by comparing the smoothed posteriors of both hypotheses
given its own neighbor count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, MultiOutputMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

__all__ = ["MLKNNModel", "MLkNN", "fit", "predict", "nearest_neighbors"]

METRICS = ("euclidean", "hamming")
_CHUNK = 512


def _as_points(X):
    X = np.asarray(X)
    if np.issubdtype(X.dtype, np.integer) or (np.isfinite(X).all() and np.all(X == np.round(X))):
        # integer codes keep the distance arithmetic exact, so ties are real ties
        return X.astype(np.int64)
    return X.astype(np.float64)


def _distances(Q, P, metric):
    if metric == "hamming":
        return (Q[:, None, :] != P[None, :, :]).sum(axis=2)
    return (Q * Q).sum(1)[:, None] + (P * P).sum(1)[None, :] - 2 * Q @ P.T


def nearest_neighbors(queries, points, k, metric="euclidean", exclude_self=False):
    """Indices of the ``k`` nearest ``points`` for each query row.

    Equal distances are broken by the lower point index. With
    ``exclude_self`` the queries are the points themselves and row ``i``
    never lists ``i``.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    Q, P = _as_points(queries), _as_points(points)
    if Q.dtype != P.dtype:
        Q, P = Q.astype(np.float64), P.astype(np.float64)
    out = np.empty((len(Q), k), dtype=np.int64)
    for start in range(0, len(Q), _CHUNK):
        D = _distances(Q[start:start + _CHUNK], P, metric).astype(np.float64)
        if exclude_self:
            rows = np.arange(len(D))
            D[rows, rows + start] = np.inf
        out[start:start + len(D)] = np.argsort(D, axis=1, kind="stable")[:, :k]
    return out


@dataclass(frozen=True, eq=False)
class MLKNNModel:
    k: int
    s: float
    priors: np.ndarray
    cond_pos: np.ndarray
    cond_neg: np.ndarray
    train_points: np.ndarray
    train_labels: np.ndarray
    feature_subset: tuple
    metric: str = "euclidean"


def _fit_arrays(X, Y, k, s, metric):
    X = _as_points(X)
    Y = np.asarray(Y, dtype=np.int64)
    m, nl = Y.shape
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k >= m:
        raise ValueError(f"k={k} needs more than {k} training instances, got {m}")
    if s < 0:
        raise ValueError("smoothing s must be non-negative")

    priors = (s + Y.sum(axis=0)) / (2 * s + m)
    nbrs = nearest_neighbors(X, X, k, metric, exclude_self=True)
    counts = Y[nbrs].sum(axis=1)  # (m, nl) positive neighbors per label
    pos = np.zeros((nl, k + 1))
    neg = np.zeros((nl, k + 1))
    for l in range(nl):
        has = Y[:, l] == 1
        pos[l] = np.bincount(counts[has, l], minlength=k + 1)
        neg[l] = np.bincount(counts[~has, l], minlength=k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond_pos = (s + pos) / (s * (k + 1) + pos.sum(axis=1, keepdims=True))
        cond_neg = (s + neg) / (s * (k + 1) + neg.sum(axis=1, keepdims=True))
    cond_pos = np.nan_to_num(cond_pos)
    cond_neg = np.nan_to_num(cond_neg)
    return X, Y, priors, cond_pos, cond_neg


def _posteriors(model, Q):
    nbrs = nearest_neighbors(Q, model.train_points, model.k, model.metric)
    counts = model.train_labels[nbrs].sum(axis=1)
    cols = np.arange(counts.shape[1])
    p1 = model.priors * model.cond_pos[cols, counts]
    p0 = (1.0 - model.priors) * model.cond_neg[cols, counts]
    total = p1 + p0
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.where(total > 0, p1 / total, 0.5)
    return (p1 > p0).astype(np.int64), scores


def fit(train, feature_subset, k=10, s=1.0, metric="euclidean"):
    """Fit on the columns ``feature_subset`` of a discretized dataset."""
    subset = tuple(int(j) for j in feature_subset)
    if not subset:
        raise ValueError("feature subset is empty")
    X, Y, priors, cp, cn = _fit_arrays(
        np.asarray(train.features)[:, list(subset)], train.labels, k, s, metric
    )
    return MLKNNModel(k, float(s), priors, cp, cn, X, Y, subset, metric)


def predict(model, test, feature_subset):
    """Return ``(predictions, scores)`` for every test instance and label."""
    subset = tuple(int(j) for j in feature_subset)
    if subset != model.feature_subset:
        raise ValueError("feature subset differs from the one the model was fitted on")
    Q = np.asarray(test.features)[:, list(subset)]
    if Q.shape[1] != model.train_points.shape[1]:
        raise ValueError("dimension mismatch between test and training points")
    return _posteriors(model, _as_points(Q))


class MLkNN(MultiOutputMixin, ClassifierMixin, BaseEstimator):
    """Multi-label k-nearest-neighbor classifier.

    Parameters
    ----------
    k : int, default=10
        Neighbors consulted per instance.
    s : float, default=1.0
        Laplace smoothing constant.
    metric : {"euclidean", "hamming"}, default="euclidean"
    """

    def __init__(self, k=10, s=1.0, metric="euclidean"):
        self.k = k
        self.s = s
        self.metric = metric

    def fit(self, X, Y):
        X, Y = check_X_y(X, Y, multi_output=True)
        if Y.ndim == 1:
            Y = Y[:, None]
        if not np.isin(Y, (0, 1)).all():
            raise ValueError("Y must be a binary indicator matrix")
        X, Y, priors, cp, cn = _fit_arrays(X, Y, self.k, self.s, self.metric)
        self.model_ = MLKNNModel(
            self.k, float(self.s), priors, cp, cn, X, Y, tuple(range(X.shape[1])), self.metric
        )
        self.n_features_in_ = X.shape[1]
        self.classes_ = [np.array([0, 1])] * Y.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return _as_points(X)

    def predict(self, X):
        X = self._check(X)
        return _posteriors(self.model_, X)[0]

    def predict_proba(self, X):
        """Normalized posterior of the positive hypothesis, shape ``(n, |L|)``."""
        X = self._check(X)
        return _posteriors(self.model_, X)[1]
