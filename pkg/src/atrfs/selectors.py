"""Greedy forward feature ranking with pluggable information-theoretic criteria.

Every criterion scores a candidate feature ``f`` against the already selected
set ``S`` and the label set ``L``. ``greedy_rank`` repeatedly appends the
best-scoring candidate to ``S``.

Two evaluation routes exist for each criterion:

* ``score_<method>(f, ctx)`` evaluates one candidate from the cache and
  memoized scalar estimators. It is the readable reference.
* The vectorized scorers behind :func:`greedy_rank` evaluate every feature
  at once from column-wise joint entropies and incrementally maintained
  redundancy sums.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from atrfs.errors import EmptyAfterPruningError, RankingTimeout
from atrfs.infotheory import (
    MICache,
    build_cache,
    column_joint_entropies,
    conditional_mi,
    entropy,
    interaction_information_alternating,
    joint_codes,
    joint_entropy,
    mutual_information,
)
from atrfs.transform import DEFAULT_TAU, PowersetLabel, label_powerset, ppt

__all__ = [
    "METHODS",
    "canonical_method",
    "needs_pairwise",
    "SIGN_MODES",
    "SelectorConfig",
    "SelectorContext",
    "RankingResult",
    "greedy_rank",
    "rank_features",
    "score_all",
    "SCORE_FUNCTIONS",
    "score_atr",
    "score_ppt_mi",
    "score_igmf",
    "score_pmu",
    "score_d2f",
    "score_mdmr",
    "score_lrfs",
    "score_lsmfs",
    "score_mlsmfs",
    "score_scls",
]

METHODS = ("ATR", "PPT_MI", "IGMF", "PMU", "D2F", "MDMR", "LRFS", "LSMFS", "MLSMFS", "SCLS")
SIGN_MODES = ("paper-literal", "always-add")

# methods whose redundancy term reads the pairwise feature table
_PAIRWISE = {"ATR", "SCLS", "LRFS", "LSMFS", "MLSMFS"}
# methods whose redundancy term is a sum of feature-feature-label interactions
_TRIPLE = {"PMU", "D2F", "MDMR"}

# scores closer than this (relative) count as tied; the lowest index wins
TIE_TOL = 1e-12


def needs_pairwise(method):
    """Whether ``method`` reads the feature-feature mutual-information table."""
    return canonical_method(method) in _PAIRWISE


def canonical_method(name):
    key = str(name).strip().upper().replace("-", "_")
    if key not in METHODS:
        raise ValueError(f"unknown method {name!r}; expected one of {METHODS}")
    return key


@dataclass(frozen=True)
class SelectorConfig:
    method: str = "ATR"
    tau: int = DEFAULT_TAU
    n_select: int = 50
    atr_sign_mode: str = "paper-literal"
    tie_break: str = "lowest-index"

    def __post_init__(self):
        object.__setattr__(self, "method", canonical_method(self.method))
        if self.atr_sign_mode not in SIGN_MODES:
            raise ValueError(f"atr_sign_mode must be one of {SIGN_MODES}")
        if self.tie_break != "lowest-index":
            raise ValueError("only 'lowest-index' tie breaking is supported")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")


@dataclass
class RankingResult:
    order: list
    scores: list
    elapsed: float
    method: str
    mi_evaluations: int = 0

    def __post_init__(self):
        if len(self.order) != len(self.scores):
            raise ValueError("order and scores differ in length")
        if len(set(self.order)) != len(self.order):
            raise ValueError("ranking contains duplicates")


@dataclass
class SelectorContext:
    """State shared by the score functions during one ranking run."""

    train: object
    config: SelectorConfig = field(default_factory=SelectorConfig)
    cache: MICache | None = None
    selected: list = field(default_factory=list)

    def __post_init__(self):
        method = self.config.method
        if self.cache is None:
            self.cache = build_cache(self.train, pairwise=method in _PAIRWISE)
        self.X = np.asarray(self.train.features, dtype=np.int64)
        self.Y = np.asarray(self.train.labels, dtype=np.int64)
        self.mi_evaluations = self.cache.mi_evaluations
        self._ppt = None
        self._ppt_ready = False
        self._ppt_mi = {}
        self._memo = {}
        self._vectors = {}
        nf = self.X.shape[1]
        self.red_mi = np.zeros(nf)
        self.red_tri = np.zeros(nf)
        for f in list(self.selected):
            self._accumulate(f)

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def n_labels(self):
        return self.Y.shape[1]

    # -- PPT ---------------------------------------------------------------

    @property
    def ppt_label(self) -> PowersetLabel | None:
        if not self._ppt_ready:
            try:
                self._ppt = ppt(self.Y, self.config.tau)
            except EmptyAfterPruningError as exc:
                warnings.warn(f"{exc}; the PPT term is 0 for every feature", RuntimeWarning)
                self._ppt = None
            self._ppt_ready = True
        return self._ppt

    def ppt_mi(self, f):
        """``I(f; PPT(L, tau))`` over the retained rows, memoized per feature."""
        if f not in self._ppt_mi:
            p = self.ppt_label
            if p is None:
                self._ppt_mi[f] = 0.0
            else:
                self._ppt_mi[f] = mutual_information(p.restrict(self.X[:, f]), p.codes)
                self.mi_evaluations += 1
        return self._ppt_mi[f]

    @property
    def ppt_feature_mi(self):
        """``I(f; PPT(L, tau))`` for every feature."""
        if "ppt" not in self._vectors:
            p = self.ppt_label
            if p is None:
                v = np.zeros(self.n_features)
            else:
                Xr = self.X[p.retained]
                v = entropy(p.codes) + column_joint_entropies(Xr) - column_joint_entropies(Xr, p.codes)
                v = np.maximum(v, 0.0)
                self.mi_evaluations += self.n_features
            v.setflags(write=False)
            self._vectors["ppt"] = v
        return self._vectors["ppt"]

    # -- memoized scalar terms ----------------------------------------------

    def _cached(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
            self.mi_evaluations += 1
        return self._memo[key]

    def triple(self, f, g, k):
        """``I(f; g; l_k)`` for two feature indices and one label index."""
        a, b = (f, g) if f <= g else (g, f)
        return self._cached(
            ("ffl", a, b, k),
            lambda: interaction_information_alternating([self.X[:, a], self.X[:, b], self.Y[:, k]]),
        )

    def label_triple(self, f, i, j):
        """``I(f; l_i; l_j)``."""
        a, b = (i, j) if i <= j else (j, i)
        return self._cached(
            ("fll", f, a, b),
            lambda: interaction_information_alternating([self.X[:, f], self.Y[:, a], self.Y[:, b]]),
        )

    def label_cmi(self, f, i, j):
        """``I(f; l_i | l_j)``."""
        return self._cached(
            ("cmi", f, i, j), lambda: conditional_mi(self.X[:, f], self.Y[:, i], self.Y[:, j])
        )

    def pair_mi(self, f, g):
        if self.cache.has_pairwise:
            return float(self.cache.feature_feature[f, g])
        a, b = (f, g) if f <= g else (g, f)
        return self._cached(("ff", a, b), lambda: mutual_information(self.X[:, a], self.X[:, b]))

    def relevance(self, f):
        return float(self.cache.feature_label[f].sum())

    # -- selection -----------------------------------------------------------

    def _accumulate(self, f):
        method = self.config.method
        if method in _PAIRWISE:
            self.red_mi += self.cache.feature_feature[f]
        elif method in _TRIPLE:
            self.red_tri += _triple_block(self, f).sum(axis=1)

    def select(self, f):
        f = int(f)
        if f in self.selected or not 0 <= f < self.n_features:
            raise ValueError(f"cannot select feature {f}")
        self.selected.append(f)
        self._accumulate(f)


# ---------------------------------------------------------------------------
# Scalar criteria
# ---------------------------------------------------------------------------


def atr_sign(n_labels, mode):
    if mode == "always-add":
        return 1.0
    return float((-1) ** (n_labels + 1))


def score_atr(f, ctx):
    """Label-wise relevance plus the signed PPT term minus pairwise redundancy."""
    sign = atr_sign(ctx.n_labels, ctx.config.atr_sign_mode)
    red = sum(ctx.pair_mi(j, f) for j in ctx.selected)
    return ctx.relevance(f) + sign * ctx.ppt_mi(f) - red


def score_ppt_mi(f, ctx):
    return ctx.ppt_mi(f)


def score_igmf(f, ctx):
    lp = ctx._cached(("lp",), lambda: label_powerset(ctx.Y).codes)
    h_l = ctx._cached(("HL",), lambda: entropy(lp))
    h_f = float(ctx.cache.feature_entropy[f])
    denom = h_f + h_l
    if denom <= 0.0:
        return 0.0
    h_fl = ctx._cached(("HfL", f), lambda: joint_entropy([ctx.X[:, f], lp]))
    return 2.0 * (h_f + h_l - h_fl) / denom


def _triple_redundancy(f, ctx):
    return sum(ctx.triple(f, g, k) for g in ctx.selected for k in range(ctx.n_labels))


def score_pmu(f, ctx):
    nl = ctx.n_labels
    pairs = sum(ctx.label_triple(f, i, j) for i in range(nl) for j in range(i + 1, nl))
    return ctx.relevance(f) - _triple_redundancy(f, ctx) - pairs


def score_d2f(f, ctx):
    return ctx.relevance(f) - _triple_redundancy(f, ctx)


def score_mdmr(f, ctx):
    if not ctx.selected:
        return ctx.relevance(f)
    return len(ctx.selected) * ctx.relevance(f) - _triple_redundancy(f, ctx)


def score_lrfs(f, ctx):
    nl = ctx.n_labels
    rel = sum(ctx.label_cmi(f, j, i) for i in range(nl) for j in range(nl) if i != j)
    if not ctx.selected:
        return rel
    return rel - sum(ctx.pair_mi(f, g) for g in ctx.selected) / len(ctx.selected)


def score_lsmfs(f, ctx):
    nl = ctx.n_labels
    supp = sum(
        max(0.0, ctx.label_triple(f, i, j)) for i in range(nl) for j in range(nl) if i != j
    )
    return ctx.relevance(f) + supp - sum(ctx.pair_mi(f, g) for g in ctx.selected)


def score_mlsmfs(f, ctx):
    nl = ctx.n_labels
    supp = 0.0
    for i in range(nl):
        supp += max([0.0] + [ctx.label_cmi(f, i, j) for j in range(nl) if j != i])
    return ctx.relevance(f) + supp - sum(ctx.pair_mi(f, g) for g in ctx.selected)


def score_scls(f, ctx):
    h_f = float(ctx.cache.feature_entropy[f])
    if h_f <= 0.0:
        return 0.0
    rel = ctx.relevance(f)
    return rel - sum(ctx.pair_mi(f, g) / h_f * rel for g in ctx.selected)


SCORE_FUNCTIONS = {
    "ATR": score_atr,
    "PPT_MI": score_ppt_mi,
    "IGMF": score_igmf,
    "PMU": score_pmu,
    "D2F": score_d2f,
    "MDMR": score_mdmr,
    "LRFS": score_lrfs,
    "LSMFS": score_lsmfs,
    "MLSMFS": score_mlsmfs,
    "SCLS": score_scls,
}


# ---------------------------------------------------------------------------
# Vectorized criteria
# ---------------------------------------------------------------------------


def _triple_block(ctx, g):
    """``I(f; g; l_k)`` for every feature ``f`` and label ``k``: shape (|F|, |L|)."""
    X, Y = ctx.X, ctx.Y
    xg = X[:, g]
    h_g = entropy(xg)
    h_fg = column_joint_entropies(X, xg)
    out = np.empty((ctx.n_features, ctx.n_labels))
    for k in range(ctx.n_labels):
        lg = joint_codes([Y[:, k], xg])
        cmi = h_fg + entropy(lg) - h_g - column_joint_entropies(X, lg)
        out[:, k] = ctx.cache.feature_label[:, k] - cmi
    ctx.mi_evaluations += out.size
    return out


def _label_cmi_tensor(ctx):
    """``C[i, j, f] = I(f; l_i | l_j)`` for ordered label pairs ``i != j``."""
    if "cmi" not in ctx._vectors:
        X, Y = ctx.X, ctx.Y
        nl, nf = ctx.n_labels, ctx.n_features
        C = np.zeros((nl, nl, nf))
        for j in range(nl):
            h_j = entropy(Y[:, j])
            h_fj = column_joint_entropies(X, Y[:, j])
            for i in range(nl):
                if i == j:
                    continue
                ij = joint_codes([Y[:, i], Y[:, j]])
                C[i, j] = h_fj + entropy(ij) - h_j - column_joint_entropies(X, ij)
        ctx.mi_evaluations += nf * nl * (nl - 1)
        ctx._vectors["cmi"] = C
    return ctx._vectors["cmi"]


def _label_triples(ctx):
    """``T[i, j, f] = I(f; l_i; l_j) = I(f; l_i) - I(f; l_i | l_j)``."""
    if "triples" not in ctx._vectors:
        C = _label_cmi_tensor(ctx)
        T = ctx.cache.feature_label.T[:, None, :] - C
        nl = ctx.n_labels
        T[np.arange(nl), np.arange(nl)] = 0.0
        ctx._vectors["triples"] = T
    return ctx._vectors["triples"]


def _relevance_vec(ctx):
    return ctx.cache.feature_label.sum(axis=1)


def _vec_atr(ctx):
    sign = atr_sign(ctx.n_labels, ctx.config.atr_sign_mode)
    return _relevance_vec(ctx) + sign * ctx.ppt_feature_mi - ctx.red_mi


def _vec_ppt_mi(ctx):
    return ctx.ppt_feature_mi


def _vec_igmf(ctx):
    if "igmf" not in ctx._vectors:
        lp = label_powerset(ctx.Y).codes
        h_l = entropy(lp)
        h_f = ctx.cache.feature_entropy
        num = 2.0 * (h_f + h_l - column_joint_entropies(ctx.X, lp))
        denom = h_f + h_l
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(denom > 0, num / denom, 0.0)
        ctx.mi_evaluations += ctx.n_features
        ctx._vectors["igmf"] = v
    return ctx._vectors["igmf"]


def _vec_pmu(ctx):
    if "pmu_pairs" not in ctx._vectors:
        T = _label_triples(ctx)
        iu = np.triu_indices(ctx.n_labels, k=1)
        ctx._vectors["pmu_pairs"] = T[iu].sum(axis=0)
    return _relevance_vec(ctx) - ctx.red_tri - ctx._vectors["pmu_pairs"]


def _vec_d2f(ctx):
    return _relevance_vec(ctx) - ctx.red_tri


def _vec_mdmr(ctx):
    if not ctx.selected:
        return _relevance_vec(ctx)
    return len(ctx.selected) * _relevance_vec(ctx) - ctx.red_tri


def _vec_lrfs(ctx):
    rel = _label_cmi_tensor(ctx).sum(axis=(0, 1))
    if not ctx.selected:
        return rel
    return rel - ctx.red_mi / len(ctx.selected)


def _vec_lsmfs(ctx):
    if "lsmfs" not in ctx._vectors:
        ctx._vectors["lsmfs"] = np.maximum(_label_triples(ctx), 0.0).sum(axis=(0, 1))
    return _relevance_vec(ctx) + ctx._vectors["lsmfs"] - ctx.red_mi


def _vec_mlsmfs(ctx):
    if "mlsmfs" not in ctx._vectors:
        nl = ctx.n_labels
        C = _label_cmi_tensor(ctx).copy()
        C[np.arange(nl), np.arange(nl)] = -np.inf
        best = C.max(axis=1) if nl > 1 else np.zeros((1, ctx.n_features))
        ctx._vectors["mlsmfs"] = np.maximum(best, 0.0).sum(axis=0)
    return _relevance_vec(ctx) + ctx._vectors["mlsmfs"] - ctx.red_mi


def _vec_scls(ctx):
    h_f = ctx.cache.feature_entropy
    rel = _relevance_vec(ctx)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = rel - np.where(h_f > 0, ctx.red_mi / h_f, 0.0) * rel
    return np.where(h_f > 0, v, 0.0)


_VECTOR_SCORERS = {
    "ATR": _vec_atr,
    "PPT_MI": _vec_ppt_mi,
    "IGMF": _vec_igmf,
    "PMU": _vec_pmu,
    "D2F": _vec_d2f,
    "MDMR": _vec_mdmr,
    "LRFS": _vec_lrfs,
    "LSMFS": _vec_lsmfs,
    "MLSMFS": _vec_mlsmfs,
    "SCLS": _vec_scls,
}


def score_all(ctx):
    """Vectorized score of every feature under the context's method and ``S``."""
    return np.asarray(_VECTOR_SCORERS[ctx.config.method](ctx), dtype=np.float64)


def _argmax_lowest(scores, available):
    s = np.where(available, scores, -np.inf)
    best = s.max()
    tol = TIE_TOL * max(1.0, abs(best))
    return int(np.flatnonzero(s >= best - tol)[0])


def greedy_rank(ctx, deadline=None):
    """Rank ``n_select`` features by repeated argmax of the configured criterion.

    Parameters
    ----------
    ctx : SelectorContext
    deadline : float, optional
        Absolute ``time.perf_counter()`` value. Checked before every step;
        exceeding it raises :class:`RankingTimeout` and the partial ranking
        is discarded.
    """
    n_select = ctx.config.n_select
    if n_select <= 0:
        raise ValueError(f"n_select must be positive, got {n_select}")
    start = time.perf_counter()
    n = min(n_select, ctx.n_features - len(ctx.selected))
    available = np.ones(ctx.n_features, dtype=bool)
    available[ctx.selected] = False
    order, scores = [], []
    for _ in range(n):
        now = time.perf_counter()
        if deadline is not None and now > deadline:
            raise RankingTimeout(now - start, deadline - start)
        values = score_all(ctx)
        f = _argmax_lowest(values, available)
        order.append(f)
        scores.append(float(values[f]))
        available[f] = False
        ctx.select(f)
    if deadline is not None and time.perf_counter() > deadline:
        raise RankingTimeout(time.perf_counter() - start, deadline - start)
    return RankingResult(
        order=order,
        scores=scores,
        elapsed=time.perf_counter() - start,
        method=ctx.config.method,
        mi_evaluations=ctx.mi_evaluations,
    )


def rank_features(train, method="ATR", n_select=50, tau=DEFAULT_TAU,
                  atr_sign_mode="paper-literal", cache=None, deadline=None):
    """Build a context for ``train`` and run :func:`greedy_rank`."""
    config = SelectorConfig(method=method, tau=tau, n_select=n_select, atr_sign_mode=atr_sign_mode)
    return greedy_rank(SelectorContext(train, config, cache=cache), deadline=deadline)
