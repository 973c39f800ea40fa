import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistdisc.linalg import (
    DimensionMismatch,
    PureState,
    UnitaryMatrix,
    apply,
    gram,
    hs_inner,
    matrices_close,
    tensor,
)
from twistdisc.operators import build_clock, build_shift

from conftest import random_state, random_unitary

X2 = np.array([[0, 1], [1, 0]])
Z2 = np.array([[1, 0], [0, -1]])


class TestTensor:
    def test_identity(self):
        assert matrices_close(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_scalar_factor(self):
        assert matrices_close(tensor(X2, np.eye(1)), X2)

    def test_block_layout(self):
        # X (x) Z = [[0, Z], [Z, 0]], left factor slow
        expected = np.zeros((4, 4))
        expected[0:2, 2:4] = Z2
        expected[2:4, 0:2] = Z2
        assert matrices_close(tensor(X2, Z2), expected, atol=0)

    def test_index_formula(self, rng):
        a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        b = rng.standard_normal((4, 5))
        t = tensor(a, b)
        for i, j, k, l in [(1, 2, 3, 4), (0, 0, 0, 0), (1, 0, 2, 3)]:
            assert t[i * 4 + k, j * 5 + l] == a[i, j] * b[k, l]

    def test_unitary_factors_stay_unitary(self):
        out = tensor(build_shift(2), build_clock(3))
        assert isinstance(out, UnitaryMatrix) and out.verified

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_trace_multiplicative(self, n, m, seed):
        r = np.random.default_rng(seed)
        a = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
        b = r.standard_normal((m, m)) + 1j * r.standard_normal((m, m))
        assert abs(np.trace(tensor(a, b)) - np.trace(a) * np.trace(b)) < 1e-10


class TestHsInner:
    def test_identity(self):
        assert hs_inner(np.eye(2), np.eye(2)) == pytest.approx(1)

    def test_x_z_orthogonal(self):
        assert abs(hs_inner(X2, Z2)) < 1e-15

    def test_permutation_pair(self):
        u2 = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
        # Tr(U2) = 1, divided by d = 3
        assert hs_inner(np.eye(3), u2) == pytest.approx(1 / 3, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            hs_inner(np.eye(2), np.eye(3))

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_self_inner_is_one(self, rng, d):
        u = UnitaryMatrix.checked(random_unitary(rng, d))
        assert abs(hs_inner(u, u) - 1) < 1e-12

    def test_gram_matches_pairwise(self, rng):
        us = [random_unitary(rng, 3) for _ in range(4)]
        g = gram(us)
        for i in range(4):
            for j in range(4):
                assert abs(g[i, j] - hs_inner(us[i], us[j])) < 1e-14


class TestApply:
    def test_identity(self):
        out = apply(UnitaryMatrix.checked(np.eye(2)), PureState.basis(2, 0))
        assert np.allclose(out.amplitudes, [1, 0])

    def test_bit_flip(self):
        out = apply(build_shift(2), PureState.basis(2, 0))
        assert np.allclose(out.amplitudes, [0, 1], atol=0)

    def test_clock_on_uniform(self):
        w = np.exp(2j * np.pi / 3)
        out = apply(build_clock(3), PureState.normalized(np.ones(3)))
        assert np.allclose(out.amplitudes, np.array([1, w, w * w]) / np.sqrt(3), atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            apply(build_shift(3), PureState.basis(2, 0))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_norm_preserved(self, d, seed):
        r = np.random.default_rng(seed)
        u = UnitaryMatrix.checked(random_unitary(r, d))
        out = apply(u, PureState(random_state(r, d)))
        assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


class TestTypes:
    def test_unitary_check_rejects(self):
        with pytest.raises(ValueError):
            UnitaryMatrix.checked([[1, 1], [0, 1]])

    def test_non_square(self):
        with pytest.raises(DimensionMismatch):
            UnitaryMatrix(np.ones((2, 3)))

    def test_state_norm_enforced(self):
        with pytest.raises(ValueError):
            PureState([1, 1])

    def test_immutable(self):
        u = build_shift(3)
        with pytest.raises(ValueError):
            u.data[0, 0] = 5
