import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atrfs.errors import InternalConsistencyError, StateError
from atrfs.infotheory import (
    Variable,
    build_cache,
    column_joint_entropies,
    conditional_entropy,
    conditional_mi,
    entropy,
    interaction_information,
    interaction_information_alternating,
    joint_codes,
    joint_entropy,
    mutual_information,
    mutual_information_expansion,
    set_mutual_information,
)
from atrfs.dataset import MultiLabelDataset

import oracles
from conftest import make_ds

X4 = [0, 0, 1, 1]
Y4 = [0, 1, 0, 1]
XOR = [0, 1, 1, 0]


class TestEntropy:
    def test_fair_bit(self):
        assert entropy([0, 1, 0, 1]) == pytest.approx(1.0)

    def test_constant(self):
        assert entropy([2, 2, 2]) == 0.0

    def test_skewed(self):
        assert entropy([0, 0, 0, 1]) == pytest.approx(0.8112781, abs=1e-7)

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            entropy([])

    def test_variable_wrapper(self):
        v = Variable.from_codes([0, 2, 2, 1])
        assert v.arity == 3
        assert entropy(v) == pytest.approx(1.5)
        with pytest.raises(ValueError):
            Variable([0, 3], arity=3)


class TestJointAndConditional:
    def test_single_variable_is_entropy(self):
        assert joint_entropy([X4]) == entropy(X4)

    def test_correlated_pair(self):
        assert joint_entropy([[0, 1], [0, 1]]) == pytest.approx(1.0)

    def test_four_cells(self):
        assert joint_entropy([X4, Y4]) == pytest.approx(2.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            joint_entropy([[0, 1], [0, 1, 1]])

    def test_self_conditioning(self):
        assert conditional_entropy(X4, X4) == pytest.approx(0.0)

    def test_independent_conditioning(self):
        assert conditional_entropy(X4, Y4) == pytest.approx(1.0)

    def test_partial(self):
        assert conditional_entropy([0, 1, 1, 1], [0, 0, 1, 1]) == pytest.approx(0.5)

    def test_joint_codes_dense(self):
        c = joint_codes([[5, 5, 7], [1, 2, 1]])
        assert sorted(set(c.tolist())) == [0, 1, 2]


class TestMutualInformation:
    def test_independent(self):
        assert mutual_information(X4, Y4) == 0.0

    def test_identity(self):
        assert mutual_information(X4, X4) == pytest.approx(entropy(X4))

    def test_hand_value(self):
        assert mutual_information([0, 0, 1, 1], [0, 1, 1, 1]) == pytest.approx(0.3112781, abs=1e-7)

    def test_conditional_on_self(self):
        assert conditional_mi(X4, Y4, X4) == pytest.approx(0.0)

    def test_conditional_on_constant(self):
        x, y = [0, 0, 1, 1, 0], [0, 1, 1, 1, 0]
        assert conditional_mi(x, y, [0] * 5) == pytest.approx(mutual_information(x, y))

    def test_xor_conditional(self):
        assert conditional_mi(X4, Y4, XOR) == pytest.approx(1.0)

    def test_clamp_raises_on_large_negative(self, monkeypatch):
        import atrfs.infotheory as it

        monkeypatch.setattr(it, "joint_entropy", lambda v: 5.0)
        with pytest.raises(InternalConsistencyError):
            it.mutual_information(X4, Y4)


class TestInteractionInformation:
    def test_two_variables_is_mi(self):
        x, y = [0, 0, 1, 1, 2], [0, 1, 1, 1, 2]
        assert interaction_information([x, y]) == pytest.approx(mutual_information(x, y))

    def test_xor_synergy(self):
        assert interaction_information([X4, Y4, XOR]) == pytest.approx(-1.0)
        assert interaction_information_alternating([X4, Y4, XOR]) == pytest.approx(-1.0)

    def test_constant_third(self):
        assert interaction_information([X4, Y4, [0] * 4]) == pytest.approx(0.0)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            interaction_information([X4])

    def test_four_way_matches_stratified_oracle(self, rng):
        for _ in range(20):
            cols = [rng.integers(0, 3, 12).tolist() for _ in range(4)]
            expect = oracles.stratified_ii(cols)
            assert interaction_information(cols) == pytest.approx(expect, abs=1e-9)
            assert interaction_information_alternating(cols) == pytest.approx(expect, abs=1e-9)


class TestExpansion:
    def test_matches_set_mi(self, rng):
        for _ in range(10):
            S = [rng.integers(0, 3, 16) for _ in range(2)]
            T = [rng.integers(0, 2, 16) for _ in range(2)]
            direct = oracles.setMI([s.tolist() for s in S], [t.tolist() for t in T])
            assert set_mutual_information(S, T) == pytest.approx(direct, abs=1e-9)
            assert mutual_information_expansion(S, T) == pytest.approx(direct, abs=1e-9)

    def test_uneven_sizes(self, rng):
        S = [rng.integers(0, 3, 20) for _ in range(3)]
        T = [rng.integers(0, 2, 20)]
        assert mutual_information_expansion(S, T) == pytest.approx(
            set_mutual_information(S, T), abs=1e-9
        )


codes = st.integers(min_value=1, max_value=64).flatmap(
    lambda m: st.tuples(
        *(st.lists(st.integers(0, 3), min_size=m, max_size=m) for _ in range(3))
    )
)


@settings(max_examples=200, deadline=None)
@given(codes)
def test_identities_property(cols):
    x, y, z = cols
    assert mutual_information(x, y) == pytest.approx(
        entropy(x) + entropy(y) - joint_entropy([x, y]), abs=1e-9
    )
    assert joint_entropy([x, y]) == pytest.approx(entropy(y) + conditional_entropy(x, y), abs=1e-9)
    assert conditional_entropy(x, y) <= entropy(x) + 1e-9
    assert conditional_mi(x, y, z) >= 0.0
    assert interaction_information([x, y, z]) == pytest.approx(oracles.II(x, y, z), abs=1e-9)


class TestColumnJointEntropies:
    def test_against_oracle(self, rng):
        X = rng.integers(0, 4, size=(30, 5))
        z = rng.integers(0, 3, size=30)
        got = column_joint_entropies(X, z)
        expect = [oracles.H(X[:, j].tolist(), z.tolist()) for j in range(5)]
        np.testing.assert_allclose(got, expect, atol=1e-12)
        np.testing.assert_allclose(
            column_joint_entropies(X), [oracles.H(X[:, j].tolist()) for j in range(5)], atol=1e-12
        )


class TestCache:
    def test_duplicate_columns(self):
        ds = make_ds([[0, 0, 1], [1, 1, 0], [1, 1, 1], [0, 0, 0]], [[0], [1], [1], [0]])
        c = build_cache(ds)
        assert c.feature_feature[0, 1] == pytest.approx(c.feature_entropy[0])

    def test_counts_and_symmetry(self, rng):
        X = rng.integers(0, 3, size=(40, 3))
        Y = rng.integers(0, 2, size=(40, 2))
        c = build_cache(make_ds(X, Y))
        assert c.feature_entropy.shape == (3,)
        assert c.feature_feature.shape == (3, 3)
        np.testing.assert_array_equal(c.feature_feature, c.feature_feature.T)
        assert c.mi_evaluations == 3 * 2 + 3
        for i in range(3):
            for k in range(2):
                assert c.feature_label[i, k] == pytest.approx(
                    oracles.MI(X[:, i].tolist(), Y[:, k].tolist()), abs=1e-12
                )
        bound = np.minimum.outer(c.feature_entropy, c.feature_entropy)
        assert (c.feature_feature <= bound + 1e-9).all()

    def test_without_pairwise(self, rng):
        c = build_cache(make_ds(rng.integers(0, 3, (10, 3)), rng.integers(0, 2, (10, 1))),
                        pairwise=False)
        assert not c.has_pairwise

    def test_raw_column_rejected(self):
        ds = MultiLabelDataset("raw", np.array([[0.5], [1.5]]), np.array([[0], [1]]))
        with pytest.raises(StateError):
            build_cache(ds)
