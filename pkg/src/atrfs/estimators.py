"""scikit-learn compatible wrappers around discretization and feature ranking."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from atrfs.dataset import MultiLabelDataset, apply_bin_edges, fit_bin_edges
from atrfs.selectors import SelectorConfig, SelectorContext, greedy_rank
from atrfs.transform import DEFAULT_TAU

__all__ = ["Discretizer", "MultiLabelFeatureSelector", "check_codes", "check_label_matrix"]


def check_codes(X):
    """Validate a matrix of non-negative integer category codes."""
    X = check_array(X, dtype=None)
    if not np.all(np.isfinite(X)) or not np.all(X == np.floor(X)) or (X < 0).any():
        raise ValueError("X must hold non-negative integer codes; set n_bins to discretize")
    return X.astype(np.int64)


def check_label_matrix(Y, n_rows=None):
    Y = np.asarray(Y)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2 or not np.isin(Y, (0, 1)).all():
        raise ValueError("Y must be a binary indicator matrix")
    if n_rows is not None and len(Y) != n_rows:
        raise ValueError(f"Y has {len(Y)} rows, X has {n_rows}")
    return Y.astype(np.int64)


def _wrap(X, arity):
    return MultiLabelDataset("X", X, np.zeros((len(X), 1), dtype=np.int64), arity=arity)


class Discretizer(TransformerMixin, BaseEstimator):
    """Bin every column into integer codes using edges learned in ``fit``.

    Parameters
    ----------
    n_bins : int, default=5
    strategy : {"equal-width", "equal-frequency"}, default="equal-width"
    """

    def __init__(self, n_bins=5, strategy="equal-width"):
        self.n_bins = n_bins
        self.strategy = strategy

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.edges_ = fit_bin_edges(_wrap(X, np.zeros(X.shape[1], dtype=np.int64)),
                                    self.n_bins, self.strategy)
        self.arity_ = np.array([len(e) + 1 for e in self.edges_])
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "edges_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        ds = apply_bin_edges(_wrap(X, np.zeros(X.shape[1], dtype=np.int64)), self.edges_)
        return np.asarray(ds.features)


class MultiLabelFeatureSelector(SelectorMixin, BaseEstimator):
    """Greedy forward ranking of features against a binary label matrix.

    Parameters
    ----------
    method : str, default="ATR"
        One of ``selectors.METHODS``.
    n_features_to_select : int, default=50
        Clamped to the number of features.
    tau : int, default=6
        Minimum label-combination frequency kept by the pruned powerset.
    atr_sign_mode : {"paper-literal", "always-add"}, default="paper-literal"
    n_bins : int or None, default=None
        Discretize ``X`` with :class:`Discretizer` first. ``None`` expects
        integer codes.
    strategy : {"equal-width", "equal-frequency"}, default="equal-width"

    Attributes
    ----------
    ranking_ : ndarray of int
        Selected feature indices in selection order.
    scores_ : ndarray of float
        Criterion value of each pick at the time it was selected.
    """

    def __init__(self, method="ATR", n_features_to_select=50, tau=DEFAULT_TAU,
                 atr_sign_mode="paper-literal", n_bins=None, strategy="equal-width"):
        self.method = method
        self.n_features_to_select = n_features_to_select
        self.tau = tau
        self.atr_sign_mode = atr_sign_mode
        self.n_bins = n_bins
        self.strategy = strategy

    def fit(self, X, Y):
        X, _ = check_X_y(X, np.zeros(len(X)), dtype=None)
        Y = check_label_matrix(Y, len(X))
        if self.n_bins is not None:
            self.discretizer_ = Discretizer(self.n_bins, self.strategy).fit(X)
            codes = self.discretizer_.transform(X)
        else:
            codes = check_codes(X)
        ds = MultiLabelDataset("fit", codes, Y, arity=codes.max(axis=0) + 1)
        config = SelectorConfig(method=self.method, tau=self.tau,
                                n_select=self.n_features_to_select,
                                atr_sign_mode=self.atr_sign_mode)
        result = greedy_rank(SelectorContext(ds, config))
        self.ranking_ = np.array(result.order, dtype=np.int64)
        self.scores_ = np.array(result.scores)
        self.n_features_in_ = X.shape[1]
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "ranking_")
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[self.ranking_] = True
        return mask
