# -*- encoding: utf-8 -*-
"""
Tests for harmonic measure, interval unions and value-distribution quadrature.
"""

import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from matrix_weyl.errors import InvalidInputError
from matrix_weyl.harmonic import (
    IntervalUnion,
    QuadratureGrid,
    boundary_omega,
    harmonic_measure,
    lipschitz_gap,
    vd_from_integrand,
    vd_integral,
)

upper = st.builds(complex, st.floats(-5.0, 5.0), st.floats(0.01, 5.0))


@pytest.fixture
def unit():
    return IntervalUnion.of([(-1.0, 1.0)])


# ── Interval unions ──────────────────────────────────────────────────


class TestIntervalUnion:

    def test_of_sorts_and_merges(self):
        s = IntervalUnion.of([(3, 4), (0, 1), (0.5, 2)])
        assert s.intervals == ((0.0, 2.0), (3.0, 4.0))
        assert s.measure() == pytest.approx(3.0)

    def test_infinite_ends(self):
        s = IntervalUnion.of([(0, "inf")])
        assert not s.is_bounded
        assert s.to_list() == [[0.0, "inf"]]
        assert IntervalUnion.from_list(s.to_list()) == s

    def test_raw_constructor_validates(self):
        with pytest.raises(InvalidInputError):
            IntervalUnion(((0.0, 2.0), (1.0, 3.0)))
        with pytest.raises(InvalidInputError):
            IntervalUnion.of([(2.0, 1.0)])

    def test_indicator_halves_endpoints(self, unit):
        assert unit.indicator(0.0) == 1.0
        assert unit.indicator(1.0) == 0.5
        assert unit.indicator(1.5) == 0.0

    def test_reflect_and_intersect(self):
        s = IntervalUnion.of([(0.0, 1.0), (2.0, 5.0)])
        assert s.reflect().intervals == ((-5.0, -2.0), (-1.0, 0.0))
        assert s.intersect(IntervalUnion.of([(0.5, 3.0)])).intervals == ((0.5, 1.0), (2.0, 3.0))

    def test_from_points(self):
        pts = [0.0, 0.1, 0.2, 1.0, 1.1]
        s = IntervalUnion.from_points(pts)
        assert len(s.intervals) == 2
        assert s.intervals[0][0] == pytest.approx(-0.05)
        assert s.intervals[1][1] == pytest.approx(1.15)
        assert IntervalUnion.from_points([]).is_empty


# ── Harmonic measure ─────────────────────────────────────────────────


class TestHarmonicMeasure:

    def test_real_line_is_one(self):
        assert harmonic_measure(0.3 + 0.01j, IntervalUnion.real_line()) == pytest.approx(1.0)

    def test_symmetric_interval(self, unit):
        assert harmonic_measure(1j, unit) == pytest.approx(0.5)

    def test_matches_poisson_integral(self, unit):
        z = 0.4 + 0.3j
        value, _ = scipy.integrate.quad(
            lambda t: (z.imag / math.pi) / ((t - z.real) ** 2 + z.imag ** 2), -1.0, 1.0,
        )
        assert harmonic_measure(z, unit) == pytest.approx(value, abs=1e-10)

    @seed(21)
    @settings(max_examples=40, deadline=None)
    @given(upper)
    def test_reflection(self, z):
        s = IntervalUnion.of([(-2.0, 0.5), (1.0, 3.0)])
        assert harmonic_measure(-z.conjugate(), s.reflect()) == pytest.approx(
            harmonic_measure(z, s), abs=1e-12,
        )

    @seed(22)
    @settings(max_examples=40, deadline=None)
    @given(upper, upper)
    def test_lipschitz_in_gamma(self, z, w):
        gap, gamma = lipschitz_gap(z, w, IntervalUnion.of([(-1.0, 2.0), (4.0, "inf")]))
        assert gap <= gamma + 1e-12

    @seed(23)
    @settings(max_examples=40, deadline=None)
    @given(upper)
    def test_additive_over_disjoint_unions(self, z):
        left = IntervalUnion.of([(-2.0, -0.5)])
        right = IntervalUnion.of([(0.3, 1.7), (3.0, "inf")])
        union = IntervalUnion.of([(-2.0, -0.5), (0.3, 1.7), (3.0, "inf")])
        assert harmonic_measure(z, union) == pytest.approx(
            harmonic_measure(z, left) + harmonic_measure(z, right), abs=1e-12,
        )

    def test_lipschitz_gap_on_many_pairs(self):
        rng = np.random.default_rng(2024)
        s = IntervalUnion.of([(-3.0, -1.0), (0.0, 0.5), (2.0, "inf")])
        worst = -math.inf
        for _ in range(1000):
            z = complex(rng.uniform(-4.0, 4.0), 10.0 ** rng.uniform(-3.0, 1.0))
            w = complex(rng.uniform(-4.0, 4.0), 10.0 ** rng.uniform(-3.0, 1.0))
            gap, gamma = lipschitz_gap(z, w, s)
            worst = max(worst, gap - gamma)
        assert worst <= 1e-12

    def test_rejects_lower_half_plane(self, unit):
        with pytest.raises(InvalidInputError):
            harmonic_measure(0.5 - 1j, unit)


class TestBoundaryOmega:

    def test_real_values_use_indicator(self, unit):
        assert boundary_omega(0.2, unit) == 1.0
        assert boundary_omega(-1.0, unit) == 0.5
        assert boundary_omega(3.0, unit) == 0.0

    def test_upper_values_use_measure(self, unit):
        assert boundary_omega(1j, unit) == pytest.approx(0.5)

    @pytest.mark.parametrize("t,limit", [(0.2, 1.0), (-0.7, 1.0), (1.8, 0.0), (-2.5, 0.0)])
    def test_converges_monotonically(self, unit, t, limit):
        values = [boundary_omega(complex(t, eps), unit) for eps in (1e-1, 1e-2, 1e-3, 1e-4, 1e-6)]
        gaps = [abs(v - limit) for v in values]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-5
        assert boundary_omega(t, unit) == limit

    def test_below_axis(self, unit):
        with pytest.raises(InvalidInputError):
            boundary_omega(0.2 - 1e-6j, unit)


# ── Quadrature ───────────────────────────────────────────────────────


class TestQuadrature:

    def test_midpoint_grid(self):
        grid = QuadratureGrid.midpoint(IntervalUnion.of([(0.0, 1.0), (2.0, 2.5)]), 10)
        assert grid.size == 16
        assert grid.measure() == pytest.approx(1.5)
        assert grid.nodes[0] == pytest.approx(0.05)

    def test_unbounded_rejected(self):
        with pytest.raises(InvalidInputError):
            QuadratureGrid.midpoint(IntervalUnion.of([(0, "inf")]))

    def test_zero_measure_rejected(self):
        with pytest.raises(InvalidInputError):
            QuadratureGrid.midpoint(IntervalUnion(((1.0, 1.0),)))

    def test_constant_sample(self, unit):
        grid = QuadratureGrid.midpoint(IntervalUnion.of([(0.0, 2.0)]), 64)
        result = vd_integral(lambda ts: [1j * np.eye(1)] * len(ts), [1.0], unit, grid)
        assert result.value == pytest.approx(1.0)
        assert result.error_estimate <= 1e-12
        assert result.nodes == 128

    def test_mapping_samples(self, unit):
        grid = QuadratureGrid.midpoint(IntervalUnion.of([(0.0, 1.0)]), 4)
        samples = {float(t): np.array([[t + 0j]]) for t in grid.nodes}
        # real boundary values: omega reduces to the indicator of [-1, 1]
        assert vd_integral(samples, [1.0], unit, grid).value == pytest.approx(1.0)
        samples.pop(float(grid.nodes[0]))
        with pytest.raises(InvalidInputError):
            vd_integral(samples, [1.0], unit, grid)

    def test_sequence_length_checked(self, unit):
        grid = QuadratureGrid.midpoint(IntervalUnion.of([(0.0, 1.0)]), 4)
        with pytest.raises(InvalidInputError):
            vd_integral([np.eye(1)] * 3, [1.0], unit, grid)

    def test_error_estimate_halves_with_step(self):
        s = IntervalUnion.of([(0.0, "inf")])
        a = IntervalUnion.of([(0.0, 1.0)])
        # omega_{t+i}([0, inf)) = 1/2 + arctan(t)/pi
        exact = 0.5 + (math.pi / 4 - math.log(2) / 2) / math.pi
        estimates = []
        for points in (8, 16, 32, 64):
            grid = QuadratureGrid.midpoint(a, points)
            result = vd_integral(lambda ts: [np.array([[t + 1j]]) for t in ts], [1.0], s, grid)
            assert result.value == pytest.approx(exact, abs=1e-3)
            estimates.append(result.error_estimate)
        for coarse, fine in zip(estimates, estimates[1:]):
            assert 0.4 * coarse < fine < 0.6 * coarse

    def test_error_estimate_tracks_jumps(self):
        grid = QuadratureGrid.midpoint(IntervalUnion.of([(0.0, 1.0)]), 8)
        f = (grid.nodes > 0.5).astype(float)
        result = vd_from_integrand(f, grid)
        assert result.value == pytest.approx(0.5)
        assert result.error_estimate >= 0.0
