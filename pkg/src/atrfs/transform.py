"""Label powerset and pruned problem transformation of a binary label matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from atrfs.errors import EmptyAfterPruningError

__all__ = ["PowersetLabel", "label_powerset", "ppt", "DEFAULT_TAU"]

DEFAULT_TAU = 6


@dataclass(frozen=True, eq=False)
class PowersetLabel:
    """One categorical class per distinct label subset.

    ``combo_map`` maps a label subset, encoded as a Python int bitmask
    (bit ``k`` set when label ``k`` is present), to its class code.
    ``codes`` covers only the rows flagged in ``retained``.
    """

    codes: np.ndarray
    combo_map: dict
    retained: np.ndarray
    tau: int

    @property
    def arity(self):
        return len(self.combo_map)

    @property
    def n_retained(self):
        return int(self.retained.sum())

    def restrict(self, column):
        """Rows of ``column`` that survived pruning, aligned with ``codes``."""
        return np.asarray(column)[self.retained]


def _bitmask(row):
    return sum(1 << k for k in np.flatnonzero(row).tolist())


def _check_binary(labels):
    Y = np.asarray(labels)
    if Y.ndim != 2:
        raise ValueError("labels must be a 2-D binary matrix")
    if not np.isin(Y, (0, 1)).all():
        raise ValueError("labels must be binary")
    return Y.astype(np.int8)


def _encode(Y):
    """Per-row subset id (dense, first-occurrence order) and the bitmask per id."""
    uniq, first, inverse = np.unique(Y, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    masks = [_bitmask(uniq[i]) for i in order]
    return rank[inverse], masks


def _build(Y, keep, tau):
    ids, masks = _encode(Y)
    kept_ids = ids[keep]
    # re-code survivors in first-occurrence order among the retained rows
    _, first = np.unique(kept_ids, return_index=True)
    survivors = kept_ids[np.sort(first)]
    remap = {int(old): new for new, old in enumerate(survivors)}
    codes = np.fromiter((remap[int(i)] for i in kept_ids), dtype=np.int64, count=len(kept_ids))
    combo_map = {masks[int(old)]: new for old, new in remap.items()}
    codes.setflags(write=False)
    keep = np.array(keep, dtype=bool)
    keep.setflags(write=False)
    return PowersetLabel(codes=codes, combo_map=combo_map, retained=keep, tau=tau)


def label_powerset(labels):
    """Map every distinct label row to a class code in first-occurrence order."""
    Y = _check_binary(labels)
    return _build(Y, np.ones(len(Y), dtype=bool), 0)


def ppt(labels, tau=DEFAULT_TAU):
    """Drop rows whose label subset occurs fewer than ``tau`` times, then apply LP.

    Frequencies are counted once on the matrix passed in. Pruned rows are
    removed outright, never reintroduced with a reduced label subset.

    Raises
    ------
    EmptyAfterPruningError
        When no label subset reaches ``tau`` occurrences.
    """
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}")
    Y = _check_binary(labels)
    ids, _ = _encode(Y)
    freq = np.bincount(ids)
    keep = freq[ids] >= tau
    if not keep.any():
        raise EmptyAfterPruningError(
            f"no label combination occurs at least {tau} times among {len(Y)} rows"
        )
    return _build(Y, keep, int(tau))
