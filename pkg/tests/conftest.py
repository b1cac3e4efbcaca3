import os
import sys
from pathlib import Path

import numpy as np
import pytest

from atrfs.dataset import MultiLabelDataset

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(os.environ.get("ATRFS_DATA_DIR", Path(__file__).parents[1] / "data"))


def make_ds(X, Y, name="toy"):
    """Discrete dataset from row-major integer features and labels."""
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    if X.ndim == 1:
        X = X[:, None]
    if Y.ndim == 1:
        Y = Y[:, None]
    return MultiLabelDataset(name, X, Y, arity=X.max(axis=0) + 1)


def random_ds(rng, m=None, nf=None, nl=None, arity=3):
    m = m or int(rng.integers(6, 17))
    nf = nf or int(rng.integers(1, 5))
    nl = nl or int(rng.integers(1, 4))
    X = rng.integers(0, arity, size=(m, nf))
    Y = rng.integers(0, 2, size=(m, nl))
    return make_ds(X, Y)


def write_arff(path, X, Y, relation="synthetic"):
    """Dense ARFF with numeric features followed by {0,1} labels."""
    X, Y = np.asarray(X), np.asarray(Y)
    lines = [f"@relation {relation}"]
    lines += [f"@attribute x{j} numeric" for j in range(X.shape[1])]
    lines += [f"@attribute y{k} {{0,1}}" for k in range(Y.shape[1])]
    lines.append("@data")
    for x, y in zip(X, Y):
        lines.append(",".join([*(repr(float(v)) for v in x), *(str(int(v)) for v in y)]))
    path.write_text("\n".join(lines) + "\n")
    return path


def synthetic_xy(seed, m=90, nf=6, nl=3):
    rng = np.random.default_rng(seed)
    Y = rng.integers(0, 2, (m, nl))
    X = rng.normal(size=(m, nf))
    for k in range(min(nl, nf)):
        X[:, k] += 2.5 * Y[:, k]
    return X.round(4), Y


@pytest.fixture
def synth_arff(tmp_path):
    return write_arff(tmp_path / "synth.arff", *synthetic_xy(0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, title): acceptance criterion id and title")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, title = marker.args
    _, ok = item.config._criteria.get(cid, (title, True))
    if report.when == "call" or report.outcome != "passed":
        ok = ok and report.outcome == "passed"
    item.config._criteria[cid] = (title, ok)


def pytest_terminal_summary(terminalreporter, config):
    table = getattr(config, "_criteria", {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(table, key=lambda c: int(c[1:])):
        title, ok = table[cid]
        terminalreporter.write_line(f"{cid} {'PASS' if ok else 'FAIL'}  {title}")
