# -*- encoding: utf-8 -*-
"""
Tests for Siegel upper half-space geometry.
"""

import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from matrix_weyl.catalog import free
from matrix_weyl.errors import (
    DegenerateConfigurationError,
    InvalidInputError,
    InvalidMapError,
    NotPositiveDefiniteError,
)
from matrix_weyl.lattice import Side, symplectic_form, transfer
from matrix_weyl.siegel import (
    SiegelPoint,
    SymplecticMap,
    compress,
    contraction_ratio,
    cross_ratio_eigenvalues,
    finsler_norm,
    finsler_path_length,
    hyperbolic_distance,
    mobius,
    mobius_matrix,
    pseudo_hyperbolic,
    random_real_symplectic,
    random_siegel_point,
    siegel_distance,
    symplectic_check,
)

upper = st.builds(
    complex,
    st.floats(-3.0, 3.0),
    st.floats(0.05, 3.0),
)


# ── Points ───────────────────────────────────────────────────────────


class TestSiegelPoint:

    def test_parts(self):
        p = SiegelPoint(np.array([[1 + 2j, 0.5], [0.5, 3j]]))
        assert_allclose(p.x, [[1, 0.5], [0.5, 0]])
        assert_allclose(p.y, [[2, 0], [0, 3]])
        assert p.dim == 2

    def test_not_symmetric(self):
        with pytest.raises(InvalidInputError):
            SiegelPoint(np.array([[1j, 1.0], [0.0, 1j]]))

    def test_imag_not_positive(self):
        with pytest.raises(NotPositiveDefiniteError):
            SiegelPoint(np.diag([1j, -1j]))

    def test_dict_round_trip(self):
        p = random_siegel_point(3, np.random.default_rng(0))
        assert_allclose(SiegelPoint.from_dict(p.to_dict()).z, p.z)


# ── Distances ────────────────────────────────────────────────────────


class TestDistance:

    def test_log_two(self):
        z1 = SiegelPoint(1j * np.eye(2))
        z2 = SiegelPoint(1j * np.diag([1.0, 2.0]))
        assert siegel_distance(z1, z2) == pytest.approx(math.log(2.0), abs=1e-12)

    def test_zero_on_diagonal(self):
        p = random_siegel_point(3, np.random.default_rng(1))
        assert siegel_distance(p, p) == pytest.approx(0.0, abs=1e-7)

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        a, b = random_siegel_point(2, rng), random_siegel_point(2, rng)
        assert siegel_distance(a, b) == pytest.approx(siegel_distance(b, a), rel=1e-10)

    @seed(11)
    @settings(max_examples=200, deadline=None)
    @given(upper, upper)
    def test_scalar_case_matches_arccosh(self, z, w):
        expected = math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))
        got = siegel_distance(SiegelPoint([[z]]), SiegelPoint([[w]]))
        assert got == pytest.approx(expected, abs=1e-10 * (1 + expected))

    def test_hyperbolic_gamma_relation(self):
        z, w = 0.3 + 0.7j, -1.1 + 2.2j
        rho = hyperbolic_distance(z, w)
        assert pseudo_hyperbolic(z, w) == pytest.approx(2 * math.sinh(rho / 2), rel=1e-12)
        assert rho == pytest.approx(
            math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag)), rel=1e-12,
        )

    @seed(12)
    @settings(max_examples=200, deadline=None)
    @given(upper, upper)
    def test_gamma_is_two_sinh_half_rho(self, z, w):
        rho = hyperbolic_distance(z, w)
        gamma = pseudo_hyperbolic(z, w)
        assert gamma == pytest.approx(2 * math.sinh(rho / 2), rel=1e-9, abs=1e-12)

    def test_hyperbolic_distance_rejects_lower(self):
        with pytest.raises(InvalidInputError):
            hyperbolic_distance(1j, -0.5j)

    def test_pseudo_hyperbolic_rejects_lower(self):
        with pytest.raises(InvalidInputError):
            pseudo_hyperbolic(1j, -1j)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(3)
        for k in range(100):
            d = 1 + k % 3
            a, b, c = (random_siegel_point(d, rng) for _ in range(3))
            assert siegel_distance(a, c) <= siegel_distance(a, b) + siegel_distance(b, c) + 1e-9

    def test_cross_ratio_eigenvalues_in_unit_interval(self):
        rng = np.random.default_rng(4)
        vals = cross_ratio_eigenvalues(random_siegel_point(3, rng), random_siegel_point(3, rng))
        assert np.all(vals > -1e-12)
        assert np.all(vals < 1)

    def test_saturation_is_finite(self):
        far = siegel_distance(SiegelPoint([[1e-9j]]), SiegelPoint([[1e9j]]))
        assert math.isfinite(far)
        assert far > 30

    def test_boundary_point_rejected(self):
        with pytest.raises(NotPositiveDefiniteError):
            siegel_distance(np.array([[1j]]), np.array([[0.0]]))

    def test_finsler_norm_scalar(self):
        assert finsler_norm(SiegelPoint([[2j]]), np.array([[1.0]])) == pytest.approx(0.5)

    def test_path_length_bounds_distance(self):
        rng = np.random.default_rng(5)
        for d in (1, 2, 3):
            a, b = random_siegel_point(d, rng), random_siegel_point(d, rng)
            assert finsler_path_length(a, b) >= siegel_distance(a, b) - 1e-9


# ── Maps ─────────────────────────────────────────────────────────────


class TestMobius:

    def test_standard_inverts(self):
        p = random_siegel_point(2, np.random.default_rng(6))
        out = mobius(SymplecticMap.standard(2), p)
        assert_allclose(out.z, -np.linalg.inv(p.z), atol=1e-12)

    def test_identity(self):
        p = random_siegel_point(3, np.random.default_rng(7))
        assert_allclose(mobius(SymplecticMap.identity(3), p).z, p.z)

    def test_real_symplectic_invariance(self):
        rng = np.random.default_rng(8)
        for k in range(50):
            d = 1 + k % 3
            s = random_real_symplectic(d, rng)
            assert symplectic_check(s) < 1e-10
            a, b = random_siegel_point(d, rng), random_siegel_point(d, rng)
            before = siegel_distance(a, b)
            after = siegel_distance(mobius(s, a), mobius(s, b))
            assert after == pytest.approx(before, abs=1e-8 * (1 + before))

    def test_minus_transfer_is_valid(self):
        t = transfer(free(2), 1, 0.3 + 0.5j, Side.MINUS)
        s = SymplecticMap.from_transfer(t)
        assert s.condition_min_eigenvalue() >= -1e-12
        p = random_siegel_point(2, np.random.default_rng(9))
        expected = (0.3 + 0.5j) * np.eye(2) - np.linalg.inv(p.z)
        assert_allclose(mobius(s, p).z, expected, atol=1e-12)

    def test_plus_transfer_is_rejected(self):
        t = transfer(free(1), 1, 0.3 + 0.5j, Side.PLUS)
        with pytest.raises(InvalidMapError) as exc:
            mobius(SymplecticMap.from_transfer(t), SiegelPoint([[1j]]))
        assert exc.value.min_eigenvalue < 0

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            mobius(SymplecticMap.identity(2), SiegelPoint([[1j]]))

    def test_singular_denominator(self):
        # (0, 1; 1, 0) at Z = 0 has CZ + D = 0
        s = SymplecticMap(np.array([[0.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(DegenerateConfigurationError):
            mobius_matrix(s, np.zeros((1, 1)))

    def test_compose(self):
        a = SymplecticMap.standard(1)
        assert_allclose(a.compose(a).s, -np.eye(2))
        assert_allclose(symplectic_form(1), [[0, 1], [-1, 0]])


class TestCompress:

    def test_scalar_herglotz(self):
        p = random_siegel_point(3, np.random.default_rng(10))
        c = np.array([0.6, 0.0, 0.8])
        assert compress(c, p).imag > 0

    def test_norm_above_one(self):
        with pytest.raises(InvalidInputError):
            compress([1.0, 1.0], SiegelPoint(1j * np.eye(2)))

    def test_boundary_matrix(self):
        m = np.array([[1.0 + 0.5j, 0.2], [0.2, -0.3 + 0.0j]])
        assert compress([1.0, 0.0], m) == pytest.approx(1.0 + 0.5j)

    def test_boundary_matrix_with_negative_imag(self):
        with pytest.raises(InvalidInputError):
            compress([1.0], np.array([[1.0 - 0.5j]]))


class TestContraction:

    def test_strict_contraction(self):
        rng = np.random.default_rng(12)
        for k in range(100):
            d = 1 + k % 3
            a, b = random_siegel_point(d, rng), random_siegel_point(d, rng)
            bm = rng.normal(size=(d, d))
            z = complex(rng.normal(), rng.uniform(0.2, 2.0))
            sample = contraction_ratio(a, b, z, bm + bm.T)
            assert sample.ratio < 1.0

    def test_sample_dict_has_bounds(self):
        sample = contraction_ratio(SiegelPoint([[1j]]), SiegelPoint([[3j]]), 1j)
        data = sample.to_dict()
        assert data["bound_quadratic"] == pytest.approx(0.5)
        assert data["bound_linear"] == pytest.approx(0.5)
        assert 0 < data["ratio"] < 1
