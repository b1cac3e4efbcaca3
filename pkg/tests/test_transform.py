from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from atrfs.errors import EmptyAfterPruningError
from atrfs.infotheory import mutual_information
from atrfs.transform import label_powerset, ppt


def partition(codes):
    groups = {}
    for i, c in enumerate(codes):
        groups.setdefault(int(c), []).append(i)
    return sorted(groups.values())


class TestLabelPowerset:
    def test_two_subsets(self):
        p = label_powerset([[1, 0], [1, 0], [0, 1]])
        assert p.codes.tolist() == [0, 0, 1]
        assert p.tau == 0 and p.retained.all()
        assert p.combo_map == {0b01: 0, 0b10: 1}

    def test_identical_rows(self):
        p = label_powerset([[1, 1]] * 5)
        assert p.codes.tolist() == [0] * 5 and p.arity == 1

    def test_all_distinct(self):
        p = label_powerset([[0, 0], [1, 1], [0, 1], [1, 0]])
        assert p.codes.tolist() == [0, 1, 2, 3]

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            label_powerset([[0, 2]])


class TestPPT:
    def test_frequency_pruning(self):
        # A appears 5 times, B 7 times, C once
        Y = [[1, 0]] * 5 + [[0, 1]] * 7 + [[1, 1]]
        p = ppt(Y, 6)
        assert p.retained.tolist() == [False] * 5 + [True] * 7 + [False]
        assert p.codes.tolist() == [0] * 7
        assert p.n_retained == len(p.codes)

    def test_tau_zero_keeps_all(self, rng):
        Y = rng.integers(0, 2, (20, 3))
        assert ppt(Y, 0).retained.all()

    def test_everything_pruned(self):
        with pytest.raises(EmptyAfterPruningError):
            ppt([[0, 1], [1, 0]], 2 + 1)

    def test_negative_tau(self):
        with pytest.raises(ValueError):
            ppt([[0]], -1)

    def test_restrict_aligns(self):
        Y = [[1]] * 3 + [[0]]
        p = ppt(Y, 2)
        assert p.restrict(np.arange(4)).tolist() == [0, 1, 2]

    def test_emotions_training_labels(self, data_dir):
        from atrfs.dataset import load_arff, split

        path = data_dir / "emotions.arff"
        if not path.exists():
            pytest.skip("emotions.arff not present")
        train = split(load_arff(path, labels=6), 0.4, 0).train
        Y = np.asarray(train.labels)
        p = ppt(Y, 6)
        counts = Counter(map(tuple, Y.tolist()))
        expect = [counts[tuple(r)] >= 6 for r in Y.tolist()]
        assert p.retained.tolist() == expect
        assert p.n_retained < train.n_instances
        assert p.arity < label_powerset(Y).arity


label_mats = arrays(np.int8, st.tuples(st.integers(1, 40), st.integers(1, 4)), elements=st.integers(0, 1))


@settings(max_examples=100, deadline=None)
@given(label_mats, st.integers(0, 8), st.integers(0, 8))
def test_ppt_properties(Y, t1, t2):
    lo, hi = sorted((t1, t2))
    assert partition(ppt(Y, 0).codes) == partition(label_powerset(Y).codes)
    try:
        p_hi = ppt(Y, hi)
    except EmptyAfterPruningError:
        return
    p_lo = ppt(Y, lo)
    assert not (p_hi.retained & ~p_lo.retained).any()
    kept = Counter(map(tuple, Y[p_hi.retained].tolist()))
    assert all(c >= hi for c in kept.values())
    assert len(set(p_hi.combo_map.values())) == len(p_hi.combo_map)


def test_code_permutation_does_not_change_mi(rng):
    Y = rng.integers(0, 2, (60, 3))
    x = rng.integers(0, 4, 60)
    p = ppt(Y, 3)
    perm = rng.permutation(p.arity)
    a = mutual_information(p.restrict(x), p.codes)
    b = mutual_information(p.restrict(x), perm[p.codes])
    assert a == pytest.approx(b, abs=1e-12)
