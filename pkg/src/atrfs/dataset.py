"""Multi-label dataset container, ARFF ingestion, discretization and splits.

Features are stored as an ``(M, |F|)`` array. A column whose ``arity`` is 0
still holds raw numeric values; any other column holds categorical codes in
``[0, arity)``. Labels are a binary ``(M, |L|)`` integer matrix.
"""

from __future__ import annotations

import csv
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from atrfs.errors import ArffParseError, ConfigurationError, DataError, StateError

__all__ = [
    "MultiLabelDataset",
    "DatasetSplit",
    "load_arff",
    "load_split",
    "discretize",
    "fit_bin_edges",
    "apply_bin_edges",
    "discretize_split",
    "split",
    "write_normalized",
    "read_normalized",
]

STRATEGIES = ("equal-width", "equal-frequency")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MultiLabelDataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = ()
    label_names: tuple = ()
    arity: np.ndarray = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.features)
        Y = np.asarray(self.labels)
        if X.ndim != 2 or Y.ndim != 2:
            raise DataError("features and labels must be 2-D")
        m, nf = X.shape
        if m < 1 or nf < 1 or Y.shape[1] < 1:
            raise DataError(f"empty dataset: features {X.shape}, labels {Y.shape}")
        if Y.shape[0] != m:
            raise DataError(f"row count mismatch: {m} feature rows, {Y.shape[0]} label rows")
        if not np.isin(Y, (0, 1)).all():
            raise DataError("labels must be binary (0/1)")

        arity = np.zeros(nf, dtype=np.int64) if self.arity is None else np.asarray(self.arity)
        if arity.shape != (nf,):
            raise DataError(f"arity has shape {arity.shape}, expected ({nf},)")
        cat = arity > 0
        if cat.any():
            Xc = X[:, cat]
            if not np.all(np.isfinite(Xc)) or not np.all(Xc == np.floor(Xc)):
                raise DataError("categorical columns must hold integer codes")
            if (Xc < 0).any() or (Xc >= arity[cat]).any():
                bad = np.flatnonzero(cat)[np.any((Xc < 0) | (Xc >= arity[cat]), axis=0)]
                raise DataError(f"feature codes out of [0, arity) in columns {bad.tolist()}")

        fnames = tuple(self.feature_names) or tuple(f"f{j}" for j in range(nf))
        lnames = tuple(self.label_names) or tuple(f"l{k}" for k in range(Y.shape[1]))
        if len(fnames) != nf or len(lnames) != Y.shape[1]:
            raise DataError("name lists do not match matrix widths")

        dtype = np.int64 if cat.all() else np.float64
        object.__setattr__(self, "features", _frozen(X, dtype))
        object.__setattr__(self, "labels", _frozen(Y, np.int64))
        object.__setattr__(self, "arity", _frozen(arity, np.int64))
        object.__setattr__(self, "feature_names", fnames)
        object.__setattr__(self, "label_names", lnames)

    @property
    def n_instances(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def n_labels(self):
        return self.labels.shape[1]

    @property
    def is_discrete(self):
        return bool((self.arity > 0).all())

    def take(self, rows, name=None):
        """Row subset, preserving the given order."""
        rows = np.asarray(rows)
        return MultiLabelDataset(
            name=name or self.name,
            features=self.features[rows],
            labels=self.labels[rows],
            feature_names=self.feature_names,
            label_names=self.label_names,
            arity=self.arity,
        )

    def __repr__(self):
        return (
            f"MultiLabelDataset(name={self.name!r}, M={self.n_instances}, "
            f"|F|={self.n_features}, |L|={self.n_labels}, discrete={self.is_discrete})"
        )


@dataclass(frozen=True)
class DatasetSplit:
    train: MultiLabelDataset
    test: MultiLabelDataset
    origin: str = "seeded-random"
    seed: int | None = None

    def __post_init__(self):
        if self.origin not in ("provided-split", "seeded-random"):
            raise ValueError(f"unknown split origin {self.origin!r}")
        a, b = self.train, self.test
        if (
            a.feature_names != b.feature_names
            or a.label_names != b.label_names
            or not np.array_equal(a.arity, b.arity)
        ):
            raise DataError("train and test disagree on feature/label names or arity")


# ---------------------------------------------------------------------------
# ARFF
# ---------------------------------------------------------------------------

_NUMERIC = {"numeric", "real", "integer"}


def _split_name(rest, lineno):
    rest = rest.strip()
    if not rest:
        raise ArffParseError("attribute declaration without a name", lineno)
    if rest[0] in "'\"":
        q = rest[0]
        end = rest.find(q, 1)
        if end < 0:
            raise ArffParseError("unterminated quoted attribute name", lineno)
        return rest[1:end], rest[end + 1 :].strip()
    parts = rest.split(None, 1)
    if len(parts) < 2:
        raise ArffParseError(f"attribute {parts[0]!r} has no type", lineno)
    return parts[0], parts[1].strip()


def _unquote(tok):
    tok = tok.strip()
    if len(tok) >= 2 and tok[0] == tok[-1] and tok[0] in "'\"":
        return tok[1:-1]
    return tok


def _parse_attribute(line, lineno):
    name, typ = _split_name(line[len("@attribute") :], lineno)
    if typ.startswith("{"):
        if not typ.endswith("}"):
            raise ArffParseError(f"unterminated nominal domain for {name!r}", lineno)
        body = typ[1:-1]
        values = [_unquote(v) for v in next(csv.reader([body], quotechar="'", skipinitialspace=True))]
        if not values or any(v == "" for v in values):
            raise ArffParseError(f"empty nominal value in domain of {name!r}", lineno)
        return name, values
    if typ.lower() in _NUMERIC:
        return name, None
    raise ArffParseError(f"unsupported attribute type {typ!r} for {name!r}", lineno)


def _read_xml_labels(path):
    root = ET.parse(path).getroot()
    return [el.attrib["name"] for el in root.iter() if el.tag.split("}")[-1] == "label"]


def _resolve_label_columns(names, relation, labels, path):
    n = len(names)
    if labels is None:
        m = re.search(r"-C\s+(-?\d+)", relation or "")
        if m:
            c = int(m.group(1))
            return list(range(c)) if c > 0 else list(range(n + c, n))
        xml = path.with_suffix(".xml")
        if xml.exists():
            labels = _read_xml_labels(xml)
        else:
            raise ConfigurationError(
                f"{path}: no label designation (pass a label count or names, add '-C n' "
                "to the relation, or provide a sidecar .xml)"
            )
    if isinstance(labels, (int, np.integer)):
        if not 1 <= labels < n:
            raise ConfigurationError(f"label count {labels} invalid for {n} attributes")
        return list(range(n - labels, n))
    index = {nm: j for j, nm in enumerate(names)}
    cols = []
    for nm in labels:
        if nm not in index:
            raise ConfigurationError(f"unknown label name {nm!r}")
        cols.append(index[nm])
    if not cols or len(cols) >= n:
        raise ConfigurationError("label designation must leave at least one feature")
    return cols


def load_arff(path, sparse=None, labels=None, name=None):
    """Read a dense or sparse ARFF file in the Mulan/MEKA layout.

    Parameters
    ----------
    path : path-like
    sparse : bool or None
        ``None`` detects the format per data line. ``True``/``False`` require
        every data line to be sparse/dense respectively.
    labels : int, sequence of str, or None
        An int designates the last ``labels`` attributes (Mulan convention).
        A sequence names the label attributes. ``None`` falls back to a MEKA
        ``-C n`` relation option, then to a sidecar ``<stem>.xml`` label list.
    name : str, optional
        Dataset name; defaults to the file stem.

    Returns
    -------
    MultiLabelDataset
        Nominal features are mapped to codes in declaration order; numeric
        features are left raw with arity 0.
    """
    path = Path(path)
    relation = ""
    attrs = []
    rows = []
    in_data = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if not in_data:
                low = line.lower()
                if low.startswith("@relation"):
                    relation = line[len("@relation") :].strip()
                elif low.startswith("@attribute"):
                    attrs.append(_parse_attribute(line, lineno))
                elif low.startswith("@data"):
                    if not attrs:
                        raise ArffParseError("@data before any @attribute", lineno)
                    in_data = True
                else:
                    raise ArffParseError(f"unexpected header line {line[:40]!r}", lineno)
                continue
            is_sparse = line.startswith("{")
            if sparse is not None and is_sparse != sparse:
                raise ArffParseError(
                    f"expected {'sparse' if sparse else 'dense'} data line", lineno
                )
            rows.append((lineno, line, is_sparse))
    if not in_data:
        raise ArffParseError("missing @data section")
    if not rows:
        raise DataError(f"{path}: no instances")

    names = [a[0] for a in attrs]
    domains = [a[1] for a in attrs]
    n_attr = len(attrs)
    label_cols = _resolve_label_columns(names, relation, labels, path)
    label_set = set(label_cols)
    feat_cols = [j for j in range(n_attr) if j not in label_set]

    values = np.zeros((len(rows), n_attr), dtype=np.float64)
    lookup = [None if d is None else {v: i for i, v in enumerate(d)} for d in domains]

    def convert(tok, j, lineno):
        tok = _unquote(tok)
        if tok == "?":
            raise DataError(f"{path}: line {lineno}: missing value in {names[j]!r}")
        if lookup[j] is not None:
            if j in label_set:
                if tok not in ("0", "1"):
                    raise DataError(
                        f"{path}: line {lineno}: label {names[j]!r} has non-binary value {tok!r}"
                    )
                return float(tok)
            try:
                return lookup[j][tok]
            except KeyError:
                raise DataError(
                    f"{path}: line {lineno}: value {tok!r} not in domain of {names[j]!r}"
                ) from None
        try:
            return float(tok)
        except ValueError:
            raise ArffParseError(f"non-numeric value {tok!r} for {names[j]!r}", lineno) from None

    for i, (lineno, line, is_sparse) in enumerate(rows):
        if is_sparse:
            if not line.endswith("}"):
                raise ArffParseError("unterminated sparse instance", lineno)
            body = line[1:-1].strip()
            if not body:
                continue
            for item in body.split(","):
                parts = item.strip().split(None, 1)
                if len(parts) != 2:
                    raise ArffParseError(f"bad sparse entry {item.strip()!r}", lineno)
                try:
                    j = int(parts[0])
                except ValueError:
                    raise ArffParseError(f"bad sparse index {parts[0]!r}", lineno) from None
                if not 0 <= j < n_attr:
                    raise ArffParseError(f"sparse index {j} out of range", lineno)
                values[i, j] = convert(parts[1], j, lineno)
        else:
            toks = next(csv.reader([line], quotechar="'", skipinitialspace=True))
            if len(toks) != n_attr:
                raise ArffParseError(f"expected {n_attr} values, found {len(toks)}", lineno)
            for j, tok in enumerate(toks):
                values[i, j] = convert(tok, j, lineno)

    Y = values[:, label_cols]
    if not np.isin(Y, (0.0, 1.0)).all():
        raise DataError(f"{path}: label columns must be binary")
    X = values[:, feat_cols]
    if not np.all(np.isfinite(X)):
        raise DataError(f"{path}: non-finite feature value")
    arity = np.array([0 if domains[j] is None else len(domains[j]) for j in feat_cols])
    return MultiLabelDataset(
        name=name or path.stem,
        features=X,
        labels=Y.astype(np.int64),
        feature_names=[names[j] for j in feat_cols],
        label_names=[names[j] for j in label_cols],
        arity=arity,
    )


def load_split(train_path, test_path, labels=None, sparse=None, name=None):
    """Load a provided train/test pair (e.g. Mulan ``*-train.arff``/``*-test.arff``)."""
    train = load_arff(train_path, sparse=sparse, labels=labels, name=name)
    test = load_arff(test_path, sparse=sparse, labels=labels, name=name or train.name)
    return DatasetSplit(train=train, test=test, origin="provided-split", seed=None)


# ---------------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------------


def fit_bin_edges(ds, bins=5, strategy="equal-width"):
    """Interior bin edges per raw column; ``None`` for categorical columns."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    X = ds.features
    edges = []
    for j in range(ds.n_features):
        if ds.arity[j] > 0:
            edges.append(None)
            continue
        col = X[:, j]
        if not np.all(np.isfinite(col)):
            raise DataError(f"non-finite value in feature {ds.feature_names[j]!r}")
        lo, hi = col.min(), col.max()
        if lo == hi:
            edges.append(np.empty(0))
        elif strategy == "equal-width":
            edges.append(np.linspace(lo, hi, bins + 1)[1:-1])
        else:
            q = np.unique(np.quantile(col, np.arange(1, bins) / bins))
            q = q[q > lo]
            if not len(q):
                # mass concentrated at the minimum: separate it from the rest
                q = np.unique(col)[1:2]
            edges.append(q)
    return edges


def apply_bin_edges(ds, edges):
    """Map raw columns to codes with the given edges. The last bin is closed."""
    if len(edges) != ds.n_features:
        raise ValueError("one edge entry per feature required")
    X = np.array(ds.features, dtype=np.float64)
    arity = ds.arity.copy()
    for j, e in enumerate(edges):
        if e is None:
            continue
        if not np.all(np.isfinite(X[:, j])):
            raise DataError(f"non-finite value in feature {ds.feature_names[j]!r}")
        X[:, j] = np.searchsorted(e, X[:, j], side="right")
        arity[j] = len(e) + 1
    return MultiLabelDataset(
        name=ds.name,
        features=X.astype(np.int64),
        labels=ds.labels,
        feature_names=ds.feature_names,
        label_names=ds.label_names,
        arity=arity,
    )


def discretize(ds, bins=5, strategy="equal-width"):
    """Discretize every raw numeric column of ``ds`` using its own range.

    Equal-width splits ``[min, max]`` into ``bins`` intervals, half-open on the
    right except the last. Constant columns become a single code 0.
    Categorical columns pass through unchanged.
    """
    return apply_bin_edges(ds, fit_bin_edges(ds, bins, strategy))


def discretize_split(sp, bins=5, strategy="equal-width"):
    """Fit bin edges on the training part only and apply them to both parts.

    Test values outside the training range fall into the first or last bin.
    """
    edges = fit_bin_edges(sp.train, bins, strategy)
    return DatasetSplit(
        train=apply_bin_edges(sp.train, edges),
        test=apply_bin_edges(sp.test, edges),
        origin=sp.origin,
        seed=sp.seed,
    )


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------


def split_indices(m, fraction_test, seed):
    if not 0.0 < fraction_test < 1.0:
        raise ValueError(f"fraction_test must lie in (0, 1), got {fraction_test}")
    n_test = int(np.floor(fraction_test * m + 0.5))
    if n_test < 1 or n_test > m - 1:
        raise ValueError(f"fraction {fraction_test} of {m} instances leaves an empty part")
    rng = np.random.default_rng(seed)
    test = np.sort(rng.choice(m, size=n_test, replace=False))
    train = np.setdiff1d(np.arange(m), test)
    return train, test


def split(ds, fraction_test=0.4, seed=0):
    """Seeded random train/test split; relative order is preserved in each part."""
    train, test = split_indices(ds.n_instances, fraction_test, seed)
    return DatasetSplit(
        train=ds.take(train), test=ds.take(test), origin="seeded-random", seed=int(seed)
    )


# ---------------------------------------------------------------------------
# Normalized text format
# ---------------------------------------------------------------------------


def write_normalized(ds, path):
    """Write ``M |F| |L|`` then one line of integer codes per instance."""
    if not ds.is_discrete:
        raise StateError("only discretized datasets can be written in normalized form")
    data = np.hstack([ds.features, ds.labels])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{ds.n_instances} {ds.n_features} {ds.n_labels}\n")
        np.savetxt(fh, data, fmt="%d", delimiter=" ")


def read_normalized(path, name=None, arity: Sequence[int] | None = None):
    """Inverse of :func:`write_normalized`. Arity defaults to ``max(code) + 1``."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ArffParseError("normalized header must be 'M |F| |L|'", 1)
        m, nf, nl = (int(v) for v in header)
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    if data.shape != (m, nf + nl):
        raise DataError(f"{path}: expected {(m, nf + nl)} values, found {data.shape}")
    X, Y = data[:, :nf], data[:, nf:]
    if arity is None:
        arity = X.max(axis=0) + 1
    return MultiLabelDataset(name=name or path.stem, features=X, labels=Y, arity=arity)
