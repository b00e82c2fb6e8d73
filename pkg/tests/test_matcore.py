# -*- encoding: utf-8 -*-
"""
Tests for the dense complex-matrix kernels.
"""

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from matrix_weyl.errors import (
    IllConditionedError,
    InvalidInputError,
    NotPositiveDefiniteError,
    SpectralError,
)
from matrix_weyl.matcore import (
    as_cmatrix,
    batched_inverse,
    batched_operator_norm,
    checked_inverse,
    hermitian_eigh,
    hpd_inv_sqrt,
    hpd_sqrt,
    imag_part,
    min_eigenvalue,
    operator_norm,
    structure_check,
)


def _hpd(a: np.ndarray) -> np.ndarray:
    return a @ a.T + 0.5 * np.eye(a.shape[0])


def _complex_hpd(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    a = re + 1j * im
    return a @ a.conj().T + np.eye(a.shape[0])


entries = st.floats(-2.0, 2.0)
real3 = arrays(np.float64, (3, 3), elements=entries)


# ── Coercion ─────────────────────────────────────────────────────────


class TestAsCMatrix:

    def test_scalar_becomes_1x1(self):
        assert as_cmatrix(2.0).shape == (1, 1)

    def test_non_square_rejected(self):
        with pytest.raises(InvalidInputError):
            as_cmatrix(np.zeros((2, 3)))

    def test_nan_rejected(self):
        with pytest.raises(InvalidInputError):
            as_cmatrix([[np.nan]])

    def test_errors_share_base(self):
        with pytest.raises(SpectralError):
            as_cmatrix([[np.inf, 0], [0, 1]])
        with pytest.raises(ValueError):
            as_cmatrix([1.0, 2.0])


# ── Norms and structure ──────────────────────────────────────────────


class TestNorms:

    def test_operator_norm_diagonal(self):
        assert operator_norm(np.diag([1.0, -3.0, 2.0])) == pytest.approx(3.0)

    def test_batched_matches_single(self):
        rng = np.random.default_rng(1)
        stack = rng.normal(size=(5, 3, 3)) + 1j * rng.normal(size=(5, 3, 3))
        assert_allclose(
            batched_operator_norm(stack), [operator_norm(m) for m in stack], rtol=1e-12,
        )

    def test_batched_scalar_is_abs(self):
        stack = np.array([[[3 + 4j]], [[-1.0]]])
        assert_allclose(batched_operator_norm(stack), [5.0, 1.0])

    def test_matches_power_iteration(self):
        rng = np.random.default_rng(4)
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        gram = m.conj().T @ m
        x = np.ones(2, dtype=np.complex128)
        for _ in range(2000):
            x = gram @ x
            x /= np.linalg.norm(x)
        oracle = np.sqrt(np.real(x.conj() @ gram @ x))
        assert operator_norm(m) == pytest.approx(oracle, abs=1e-10)

    @seed(21)
    @settings(max_examples=40, deadline=None)
    @given(real3, real3, real3, real3)
    def test_submultiplicative_and_triangle(self, ar, ai, br, bi):
        a, b = ar + 1j * ai, br + 1j * bi
        na, nb = operator_norm(a), operator_norm(b)
        assert operator_norm(a @ b) <= na * nb + 1e-10 * (1 + na * nb)
        assert operator_norm(a + b) <= na + nb + 1e-10 * (1 + na + nb)


class TestStructure:

    def test_real_symmetric(self):
        report = structure_check([[1.0, 2.0], [2.0, -1.0]])
        assert report.is_real_symmetric
        assert report.is_hermitian
        assert report.is_complex_symmetric

    def test_complex_symmetric_not_hermitian(self):
        report = structure_check([[1j, 2.0], [2.0, 1.0]])
        assert report.is_complex_symmetric
        assert not report.is_hermitian
        assert not report.is_real_symmetric

    def test_to_dict_keys(self):
        data = structure_check(np.eye(2)).to_dict()
        assert data["max_asymmetry"] == 0.0
        assert data["is_hermitian"] is True

    def test_upper_shift_asymmetry(self):
        report = structure_check([[0.0, 1.0], [0.0, 0.0]])
        assert not report.is_real_symmetric
        assert not report.is_complex_symmetric
        assert report.max_asymmetry == pytest.approx(1.0)

    def test_imaginary_identity(self):
        report = structure_check(1j * np.eye(2))
        assert report.is_complex_symmetric
        assert not report.is_hermitian

    def test_imag_part_of_complex_symmetric(self):
        m = np.array([[1 + 2j, 3 - 1j], [3 - 1j, 4j]])
        assert_allclose(imag_part(m), m.imag, atol=1e-15)


# ── Eigen-decomposition and square roots ─────────────────────────────


class TestHermitianEigh:

    def test_ascending(self):
        w, _ = hermitian_eigh(np.diag([3.0, 1.0, 2.0]))
        assert_allclose(w, [1.0, 2.0, 3.0])

    def test_phase_normalized(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        _, v = hermitian_eigh(a + a.conj().T)
        for k in range(4):
            col = v[:, k]
            pivot = int(np.argmax(np.abs(col) > np.abs(col).max() * (1 - 1e-12)))
            assert abs(col[pivot].imag) < 1e-12
            assert col[pivot].real > 0

    def test_deterministic_on_ties(self):
        m = np.eye(3)
        w1, v1 = hermitian_eigh(m)
        w2, v2 = hermitian_eigh(m.copy())
        assert_allclose(v1, v2)
        assert_allclose(w1, w2)

    def test_min_eigenvalue(self):
        assert min_eigenvalue(np.diag([2.0, -0.5])) == pytest.approx(-0.5)


class TestSquareRoots:

    @seed(7)
    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (3, 3), elements=st.floats(-2.0, 2.0)))
    def test_sqrt_squares_back(self, a):
        y = _hpd(a)
        s = hpd_sqrt(y)
        assert_allclose(s @ s, y, atol=1e-10 * (1 + np.abs(y).max()))
        assert_allclose(s, s.conj().T, atol=1e-12 * (1 + np.abs(s).max()))

    @seed(8)
    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (2, 2), elements=st.floats(-2.0, 2.0)))
    def test_inv_sqrt(self, a):
        y = _hpd(a)
        r = hpd_inv_sqrt(y)
        assert_allclose(r @ y @ r, np.eye(2), atol=1e-9)

    def test_diagonal(self):
        assert_allclose(hpd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)

    @seed(9)
    @settings(max_examples=40, deadline=None)
    @given(real3, real3)
    def test_sqrt_commutes(self, re, im):
        y = _complex_hpd(re, im)
        s = hpd_sqrt(y)
        assert_allclose(s @ y, y @ s, atol=1e-10 * (1 + operator_norm(y)) ** 1.5)

    @seed(10)
    @settings(max_examples=40, deadline=None)
    @given(real3, real3)
    def test_inverse_of_sqrt_is_sqrt_of_inverse(self, re, im):
        y = _complex_hpd(re, im)
        lhs = checked_inverse(hpd_sqrt(y))
        rhs = hpd_sqrt(checked_inverse(y))
        assert_allclose(lhs, rhs, atol=1e-8)
        assert_allclose(lhs, hpd_inv_sqrt(y), atol=1e-8)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefiniteError) as exc:
            hpd_sqrt(np.diag([1.0, -1.0]))
        assert exc.value.eigenvalue == pytest.approx(-1.0)


# ── Inverses ─────────────────────────────────────────────────────────


class TestInverses:

    def test_checked_inverse(self):
        m = np.array([[2.0, 1.0], [1.0, 3.0]])
        assert_allclose(checked_inverse(m) @ m, np.eye(2), atol=1e-14)

    def test_closed_form_2x2(self):
        assert_allclose(
            checked_inverse([[1.0, 2.0], [3.0, 4.0]]), [[-2.0, 1.0], [1.5, -0.5]], atol=1e-14,
        )

    def test_zero_matrix_raises(self):
        with pytest.raises(IllConditionedError):
            checked_inverse(np.zeros((2, 2)))

    def test_singular_raises(self):
        with pytest.raises(IllConditionedError) as exc:
            checked_inverse(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert exc.value.estimate > 1e12

    def test_batched_inverse(self):
        stack = np.array([np.eye(2) * 2, [[1.0, 2.0], [0.0, 1.0]]], dtype=np.complex128)
        inv = batched_inverse(stack)
        assert_allclose(inv @ stack, np.broadcast_to(np.eye(2), (2, 2, 2)), atol=1e-14)

    def test_batched_scalar_zero_raises_with_site(self):
        with pytest.raises(IllConditionedError) as exc:
            batched_inverse(np.zeros((3, 1, 1), dtype=np.complex128), site=17)
        assert exc.value.site == 17
