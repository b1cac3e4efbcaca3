"""Plug-in (empirical frequency) information measures over categorical columns.

All quantities are in bits. Joint distributions are estimated by counting the
distinct code tuples that actually occur, so joints over many label columns
stay tractable: no dense contingency tensor is ever allocated.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from atrfs.errors import InternalConsistencyError, StateError

__all__ = [
    "Variable",
    "MICache",
    "entropy",
    "joint_entropy",
    "conditional_entropy",
    "mutual_information",
    "conditional_mi",
    "interaction_information",
    "interaction_information_alternating",
    "set_mutual_information",
    "mutual_information_expansion",
    "joint_codes",
    "column_joint_entropies",
    "build_cache",
]

# negative MI within this distance of zero is rounding noise
CLAMP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Variable:
    codes: np.ndarray
    arity: int

    def __post_init__(self):
        codes = np.asarray(self.codes)
        if codes.ndim != 1:
            raise ValueError("a Variable holds a 1-D code vector")
        if codes.size and (codes.min() < 0 or codes.max() >= self.arity):
            raise ValueError(f"codes must lie in [0, {self.arity})")
        codes = codes.astype(np.int64, copy=True)
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_codes(cls, codes):
        codes = np.asarray(codes, dtype=np.int64)
        return cls(codes, int(codes.max()) + 1 if codes.size else 1)

    def __len__(self):
        return len(self.codes)


def _codes(v):
    if isinstance(v, Variable):
        return v.codes
    a = np.asarray(v)
    if a.ndim != 1:
        raise ValueError(f"expected a 1-D code vector, got shape {a.shape}")
    return a


def _check_lengths(cols):
    n = {len(c) for c in cols}
    if len(n) != 1:
        raise ValueError(f"variables differ in length: {sorted(n)}")
    if 0 in n:
        raise ValueError("empty variable")


def _entropy_from_counts(counts, total):
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def joint_codes(cols):
    """Compress the row-wise tuple of several code vectors into one code vector.

    Codes are dense ``0..k-1`` in order of the sorted tuples. Pairs are folded
    in one at a time and re-densified, so the combined code never overflows.
    """
    cols = [np.asarray(_codes(c)) for c in cols]
    _check_lengths(cols)
    _, acc = np.unique(cols[0], return_inverse=True)
    for c in cols[1:]:
        _, c = np.unique(c, return_inverse=True)
        _, acc = np.unique(acc.astype(np.int64) * (int(c.max()) + 1) + c, return_inverse=True)
    return acc.reshape(-1)


def entropy(x):
    """Shannon entropy ``-sum p log2 p`` with ``0 log 0 = 0``."""
    c = _codes(x)
    if len(c) == 0:
        raise ValueError("entropy of an empty variable")
    _, counts = np.unique(c, return_counts=True)
    return _entropy_from_counts(counts, len(c))


def joint_entropy(vars):
    if not len(vars):
        raise ValueError("joint_entropy needs at least one variable")
    if len(vars) == 1:
        return entropy(vars[0])
    return entropy(joint_codes(vars))


def conditional_entropy(x, given):
    """``H(X | given) = H(X, given) - H(given)``; ``given`` is a variable or list."""
    given = _as_list(given)
    if not given:
        return entropy(x)
    return joint_entropy([x, *given]) - joint_entropy(given)


def _as_list(v):
    if isinstance(v, Variable):
        return [v]
    if isinstance(v, (list, tuple)) and (not v or np.ndim(v[0]) > 0 or isinstance(v[0], Variable)):
        return list(v)
    a = np.asarray(v)
    return [a] if a.ndim == 1 else list(a)


def _clamp(value, what):
    if value < 0.0:
        if value < -CLAMP_TOL:
            raise InternalConsistencyError(f"{what} is negative: {value!r}")
        return 0.0
    return value


def mutual_information(x, y):
    """``I(X;Y) = H(X) + H(Y) - H(X,Y)``, symmetric and non-negative."""
    _check_lengths([_codes(x), _codes(y)])
    mi = entropy(x) + entropy(y) - joint_entropy([x, y])
    return _clamp(mi, "mutual information")


def conditional_mi(x, y, given):
    """``I(X;Y|Z) = H(X|Z) - H(X|Y,Z)``."""
    given = _as_list(given)
    _check_lengths([_codes(x), _codes(y), *(_codes(g) for g in given)])
    value = conditional_entropy(x, given) - conditional_entropy(x, [y, *given])
    return _clamp(value, "conditional mutual information")


def interaction_information(vars):
    """Interaction information by the conditioning recursion.

    ``I(X1..Xn) = I(X1..Xn-1) - E_z[ I(X1..Xn-1 | Xn = z) ]`` with the two-variable
    case equal to mutual information. The three-variable XOR triple gives -1 bit.
    """
    cols = [np.asarray(_codes(v)) for v in vars]
    if len(cols) < 2:
        raise ValueError("interaction information needs at least two variables")
    _check_lengths(cols)
    return _ii_recursive(cols)


def _ii_recursive(cols):
    if len(cols) == 2:
        return entropy(cols[0]) + entropy(cols[1]) - entropy(joint_codes(cols))
    head, last = cols[:-1], cols[-1]
    n = len(last)
    conditional = 0.0
    values, counts = np.unique(last, return_counts=True)
    for z, cnt in zip(values, counts):
        mask = last == z
        conditional += cnt / n * _ii_recursive([c[mask] for c in head])
    return _ii_recursive(head) - conditional


def interaction_information_alternating(vars):
    """Interaction information as ``-sum_{T subset V} (-1)^|T| H(T)``.

    Equal to :func:`interaction_information` but needs only ``2^n - 1`` joint
    entropies and no stratification.
    """
    cols = [np.asarray(_codes(v)) for v in vars]
    if len(cols) < 2:
        raise ValueError("interaction information needs at least two variables")
    _check_lengths(cols)
    total = 0.0
    for r in range(1, len(cols) + 1):
        sign = -((-1) ** r)
        for sub in combinations(cols, r):
            total += sign * joint_entropy(list(sub))
    return total


def set_mutual_information(S, T):
    """``I(S;T) = H(S) + H(T) - H(S,T)`` for two sets of variables."""
    S, T = _as_list(S), _as_list(T)
    return joint_entropy(S) + joint_entropy(T) - joint_entropy(S + T)


def mutual_information_expansion(S, T):
    """``I(S;T)`` as a signed sum of interaction informations over cross subsets.

    ``sum_{k=2}^{|S|+|T|} sum_{p=1}^{k-1} (-1)^k V_k(S'_{k-p} x T'_p)`` where
    ``V_k`` sums the interaction information of every variable group formed
    by one ``(k-p)``-subset of ``S`` and one ``p``-subset of ``T``. The cost is
    exponential in ``|S| + |T|``; intended for small sets.
    """
    S, T = _as_list(S), _as_list(T)
    total = 0.0
    for k in range(2, len(S) + len(T) + 1):
        for p in range(1, k):
            a = k - p
            if a > len(S) or p > len(T):
                continue
            v = 0.0
            for sa in combinations(range(len(S)), a):
                for tb in combinations(range(len(T)), p):
                    v += interaction_information_alternating(
                        [S[i] for i in sa] + [T[j] for j in tb]
                    )
            total += (-1) ** k * v
    return total


def column_joint_entropies(X, z=None):
    """``H(X[:, j], z)`` for every column ``j`` in one pass.

    ``X`` is an ``(M, n)`` matrix of non-negative integer codes and ``z`` an
    optional length-``M`` code vector. Without ``z`` this is ``H(X[:, j])``.
    """
    X = np.asarray(X, dtype=np.int64)
    m, n = X.shape
    if n == 0:
        return np.zeros(0)
    if z is None:
        z = np.zeros(m, dtype=np.int64)
    else:
        _, z = np.unique(np.asarray(z), return_inverse=True)
        z = z.reshape(-1)
    kz = int(z.max()) + 1
    ax = int(X.max()) + 1
    cells = ax * kz
    keys = (np.arange(n, dtype=np.int64) * cells)[None, :] + X * kz + z[:, None]
    counts = np.bincount(keys.ravel(), minlength=n * cells).reshape(n, cells)
    p = counts / m
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(counts > 0, p * np.log2(p), 0.0)
    return -terms.sum(axis=1)


@dataclass(frozen=True, eq=False)
class MICache:
    """Precomputed entropies and pairwise mutual informations.

    ``feature_feature`` may be ``None`` when built without pairwise terms;
    its diagonal holds ``H(f_i)`` (``I(f; f) = H(f)``).
    """

    feature_entropy: np.ndarray
    label_entropy: np.ndarray
    feature_label: np.ndarray
    feature_feature: np.ndarray | None
    mi_evaluations: int = 0

    def __post_init__(self):
        for name in ("feature_entropy", "label_entropy", "feature_label", "feature_feature"):
            a = getattr(self, name)
            if a is not None:
                a = np.array(a, dtype=np.float64)
                a.setflags(write=False)
                object.__setattr__(self, name, a)

    @property
    def has_pairwise(self):
        return self.feature_feature is not None


def _clamp_array(a, what):
    if (a < -CLAMP_TOL).any():
        raise InternalConsistencyError(f"{what} has negative entries down to {a.min()!r}")
    return np.maximum(a, 0.0)


def build_cache(ds, pairwise=True):
    """Fill the entropy and mutual-information tables for a discrete dataset.

    Parameters
    ----------
    ds : MultiLabelDataset
        Must be fully discretized.
    pairwise : bool
        Whether to fill the ``|F| x |F|`` feature-feature table. Selectors
        without a redundancy term skip it.
    """
    if not ds.is_discrete:
        raw = [ds.feature_names[j] for j in np.flatnonzero(ds.arity == 0)[:5]]
        raise StateError(f"dataset {ds.name!r} has non-discretized columns, e.g. {raw}")
    X = np.asarray(ds.features, dtype=np.int64)
    Y = np.asarray(ds.labels, dtype=np.int64)
    nf, nl = X.shape[1], Y.shape[1]
    hf = column_joint_entropies(X)
    hl = column_joint_entropies(Y)

    fl = np.empty((nf, nl))
    for k in range(nl):
        fl[:, k] = hf + hl[k] - column_joint_entropies(X, Y[:, k])
    fl = np.minimum(_clamp_array(fl, "feature-label MI"), np.minimum.outer(hf, hl))
    evaluations = nf * nl

    ff = None
    if pairwise:
        ff = np.empty((nf, nf))
        for i in range(nf):
            # only the upper triangle is new; the rest mirrors earlier rows
            ff[i, i:] = hf[i] + hf[i:] - column_joint_entropies(X[:, i:], X[:, i])
            ff[i:, i] = ff[i, i:]
            ff[i, i] = hf[i]
        ff = np.minimum(_clamp_array(ff, "feature-feature MI"), np.minimum.outer(hf, hf))
        evaluations += nf * (nf - 1) // 2
    return MICache(
        feature_entropy=hf,
        label_entropy=hl,
        feature_label=fl,
        feature_feature=ff,
        mi_evaluations=evaluations,
    )
