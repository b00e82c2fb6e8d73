# -*- encoding: utf-8 -*-
"""
Tests for half-line m-functions: fixed points, the resolvent oracle,
Herglotz structure, boundary values and analyticity.
"""

import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from matrix_weyl.catalog import anderson, build_potential, dimer, eventually_periodic, free
from matrix_weyl.errors import InvalidInputError
from matrix_weyl.lattice import Side, recurrence_residual
from matrix_weyl.siegel import random_siegel_point
from matrix_weyl.weyl import (
    SeedMode,
    WeylOptions,
    ac_density,
    boundary_value,
    cauchy_riemann_residual,
    energy_residual,
    m_minus,
    m_plus,
    m_plus_grid,
    m_tilde_minus,
    m_tilde_minus_halfline,
    rank_classify,
    resolvent_oracle,
    tail_fixed_point,
    weyl_solution,
)

SQRT2 = math.sqrt(2.0)
FAST = WeylOptions(n_max=2 ** 12)

# d in {1, 2, 3} with sup norm at most 2
RANDOM_SPECS = [anderson(1 + k % 3, seed=k, amplitude=2.0 / (1 + k % 3)) for k in range(20)]


def free_m(z: complex) -> complex:
    """Herglotz root of m^2 + z m + 1 = 0."""
    r = (-z + np.sqrt(z * z - 4 + 0j)) / 2
    return r if r.imag > 0 else (-z - np.sqrt(z * z - 4 + 0j)) / 2


@pytest.fixture
def disordered():
    return anderson(2, seed=3, amplitude=1.0)


# ── Free fixed points ────────────────────────────────────────────────


class TestFreeFixedPoints:

    @pytest.mark.parametrize("mode", list(SeedMode))
    def test_m_plus(self, mode):
        ev = m_plus(free(1), 2j, WeylOptions(seed_mode=mode))
        assert ev.converged
        assert ev.value[0, 0] == pytest.approx(1j * (SQRT2 - 1), abs=1e-10)

    @pytest.mark.parametrize("mode", list(SeedMode))
    def test_m_tilde_minus(self, mode):
        ev = m_tilde_minus(free(1), 2j, WeylOptions(seed_mode=mode))
        assert ev.converged
        assert ev.value[0, 0] == pytest.approx(1j * (1 + SQRT2), abs=1e-10)

    def test_m_minus(self):
        ev = m_minus(free(1), 2j)
        assert ev.side == Side.MINUS
        assert ev.value[0, 0] == pytest.approx(1j * (SQRT2 - 1), abs=1e-10)

    def test_matrix_case_is_scalar_times_identity(self):
        ev = m_plus(free(2), 2j)
        assert_allclose(ev.value, 1j * (SQRT2 - 1) * np.eye(2), atol=1e-10)

    def test_lower_half_plane_is_conjugate(self, disordered):
        z = 0.4 + 0.7j
        up = m_plus(disordered, z, FAST).value
        down = m_plus(disordered, z.conjugate(), FAST).value
        assert_allclose(down, up.conj(), atol=1e-9)

    def test_real_z_rejected(self):
        with pytest.raises(InvalidInputError):
            m_plus(free(1), 0.5)


# ── Oracle and structure ─────────────────────────────────────────────


class TestOracle:

    def test_free_oracle(self):
        top = resolvent_oracle(free(1), 2j, 200)
        assert top[0, 0] == pytest.approx(1j * (SQRT2 - 1), abs=1e-8)

    @pytest.mark.parametrize("z", [0.3 + 1.0j, -1.2 + 0.6j, 2.5 + 0.5j])
    def test_matches_m_plus(self, disordered, z):
        ev = m_plus(disordered, z, FAST)
        assert ev.converged
        assert_allclose(ev.value, resolvent_oracle(disordered, z, 200), atol=1e-8)

    @pytest.mark.parametrize("z", [1j, 1 + 1j, -1 + 2j])
    def test_random_specs_match_truncation(self, z):
        for spec in RANDOM_SPECS:
            ev = m_plus(spec, z)
            assert_allclose(ev.value, resolvent_oracle(spec, z, 400), atol=1e-6)

    def test_oracle_rejects_real_z(self):
        with pytest.raises(InvalidInputError):
            resolvent_oracle(free(1), 1.0, 20)


class TestHerglotz:

    @pytest.mark.parametrize("name", ["free-2", "split-channels", "dimer", "anderson"])
    def test_catalog_values_are_herglotz(self, name):
        spec = build_potential(name)
        for z in (0.1 + 0.5j, -1.7 + 0.2j, 3.0 + 1.0j):
            for ev in (m_plus(spec, z, FAST), m_tilde_minus(spec, z, FAST)):
                assert ev.is_herglotz()

    def test_random_specs_on_grid(self):
        xs, ys = np.linspace(-3.0, 3.0, 5), np.linspace(0.1, 2.0, 5)
        zs = (xs[:, None] + 1j * ys[None, :]).ravel()
        for spec in RANDOM_SPECS:
            up = m_plus_grid(spec, zs)
            down = m_plus_grid(spec, zs.conj())
            for a, b in zip(up, down):
                m = a.value
                assert np.linalg.eigvalsh((m - m.conj().T) / 2j).min() > -1e-10
                assert np.linalg.norm(m - m.T, 2) <= 1e-8
                assert_allclose(b.value, m.conj(), atol=1e-9)

    def test_to_dict(self):
        data = m_plus(free(1), 2j).to_dict()
        assert data["side"] == "+"
        assert data["value_im"][0][0] == pytest.approx(SQRT2 - 1, abs=1e-10)
        assert data["converged"] is True

    def test_split_channels_decouple(self):
        z = 0.5 + 0.3j
        ev = m_plus(build_potential("split-channels"), z)
        assert ev.value[0, 0] == pytest.approx(free_m(z), abs=1e-9)
        assert ev.value[1, 1] == pytest.approx(free_m(z - 10), abs=1e-9)
        assert abs(ev.value[0, 1]) < 1e-12


# ── Seeds and iteration controls ─────────────────────────────────────


class TestSeeds:

    @pytest.mark.parametrize("spec", [
        dimer(1.0, -1.0),
        dimer([[0.0, 1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, -1.0]]),
        eventually_periodic([0.5, -0.3], [1.0, -1.0], tail_start=5),
    ])
    def test_tail_and_siegel_seeds_agree(self, spec):
        z = 0.3 + 0.5j
        tail = m_plus(spec, z, WeylOptions(seed_mode=SeedMode.TAIL))
        siegel = m_plus(spec, z, WeylOptions(seed_mode=SeedMode.SIEGEL))
        assert_allclose(tail.value, siegel.value, atol=1e-9)

    def test_tail_fixed_point_is_periodic_m_function(self):
        spec = dimer(1.0, -1.0)
        z = 0.2 + 0.05j
        exact = tail_fixed_point(spec.right_tail(), 0, [z], Side.PLUS)[0]
        assert_allclose(m_plus(spec, z, FAST).value, exact, atol=1e-9)

    def test_options_validation(self):
        with pytest.raises(InvalidInputError):
            WeylOptions(n_start=1)
        with pytest.raises(InvalidInputError):
            WeylOptions(n_start=64, n_max=32)
        with pytest.raises(InvalidInputError):
            WeylOptions(tol=0.0)
        with pytest.raises(InvalidInputError):
            WeylOptions(seed_scale=-1.0)

    def test_options_dict(self):
        opts = WeylOptions(seed_mode=SeedMode.SIEGEL, tol=1e-9)
        assert WeylOptions.from_dict(opts.to_dict()) == opts

    def test_non_convergence_is_flagged(self, disordered, caplog):
        opts = WeylOptions(n_start=4, n_max=8, seed_mode=SeedMode.SIEGEL)
        with caplog.at_level(logging.WARNING, logger="matrix_weyl.weyl"):
            ev = m_plus(disordered, 0.1 + 1e-6j, opts)
        assert not ev.converged
        assert ev.depth == 8
        assert "not converged" in caplog.text

    def test_certify(self):
        ev = m_plus(free(1), 2j, WeylOptions(certify=True))
        assert ev.converged
        assert ev.certify_gap is not None
        assert ev.certify_gap < 1e-10

    def test_grid_is_chunk_independent(self, disordered):
        zs = np.linspace(-2, 2, 8) + 0.4j
        serial = m_plus_grid(disordered, zs, opts=FAST, jobs=1)
        threaded = m_plus_grid(disordered, zs, opts=FAST, jobs=2)
        for a, b in zip(serial, threaded):
            assert a.z == b.z
            assert_allclose(a.value, b.value, atol=1e-14)


class TestHalfLine:

    def test_dirichlet_start(self):
        z = 0.5 + 1.0j
        assert m_tilde_minus_halfline(free(1), 1, z).value[0, 0] == pytest.approx(z)
        assert m_tilde_minus_halfline(free(1), 2, z).value[0, 0] == pytest.approx(z - 1 / z)

    def test_seeded_start(self):
        w = np.array([[0.3 + 2j]])
        ev = m_tilde_minus_halfline(free(1), 1, 1j, seed=w)
        assert_allclose(ev.value, w)

    def test_approaches_whole_line_fixed_point(self):
        ev = m_tilde_minus_halfline(free(1), 200, 2j)
        assert ev.value[0, 0] == pytest.approx(1j * (1 + SQRT2), abs=1e-10)

    @pytest.mark.parametrize("n", [64, 128])
    @pytest.mark.parametrize("spec", [
        anderson(2, seed=3, amplitude=1.0),
        dimer(1.0, -1.0),
    ])
    def test_start_is_forgotten(self, spec, n):
        rng = np.random.default_rng(n)
        for z in (1j, 0.7 + 1.2j, -1.5 + 1.0j):
            dirichlet = m_tilde_minus_halfline(spec, n, z).value
            for w in (1j * np.eye(spec.dim), random_siegel_point(spec.dim, rng).z):
                seeded = m_tilde_minus_halfline(spec, n, z, seed=w).value
                assert_allclose(seeded, dirichlet, atol=1e-6)

    def test_bad_site(self):
        with pytest.raises(InvalidInputError):
            m_tilde_minus_halfline(free(1), 0, 1j)


# ── Boundary values ──────────────────────────────────────────────────


class TestBoundary:

    def test_interior_point_converges_linearly(self):
        ev = boundary_value(free(1), 0.5)
        assert ev.value[0, 0] == pytest.approx(free_m(0.5 + 1e-5j), abs=1e-9)
        assert ev.diagnostic.observed_order == pytest.approx(1.0, abs=0.1)
        assert not ev.diagnostic.slow

    def test_band_edge_is_slow(self):
        ev = boundary_value(free(1), 2.0)
        assert ev.diagnostic.observed_order == pytest.approx(0.5, abs=0.1)
        assert ev.diagnostic.slow

    def test_schedule_must_decrease(self):
        with pytest.raises(InvalidInputError):
            boundary_value(free(1), 0.0, eps_schedule=(1e-3, 1e-2))

    def test_ac_density_free(self):
        t = 0.5
        assert ac_density(free(1), t)[0, 0].real == pytest.approx(
            math.sqrt(4 - t * t) / (2 * math.pi), abs=1e-5,
        )

    def test_rank_classification(self):
        ranks = rank_classify(build_potential("split-channels"), [-3.0, 0.5, 5.0, 10.0])
        assert ranks.ranks == [0, 1, 0, 1]
        assert ranks.full_set == []
        full = rank_classify(free(2), [0.5, 3.0])
        assert full.ranks == [2, 0]
        assert full.as_map()[0.5] == 2


# ── Solutions and analyticity ────────────────────────────────────────


class TestAnalyticity:

    def test_weyl_solution_solves_recurrence(self, disordered):
        z = 0.4 + 0.5j
        f = weyl_solution(disordered, z, 40, FAST)
        assert_allclose(f[0], -np.eye(2))
        assert_allclose(f[1], m_plus(disordered, z, FAST).value, atol=1e-9)
        assert recurrence_residual(disordered, f, z) < 1e-9

    def test_energy_identity(self, disordered):
        assert energy_residual(disordered, 0.4 + 0.5j, FAST) < 1e-7

    @pytest.mark.parametrize("side", list(Side))
    def test_cauchy_riemann(self, disordered, side):
        assert cauchy_riemann_residual(disordered, 0.3 + 0.8j, opts=FAST, side=side) < 1e-5

    def test_step_reaching_axis(self):
        with pytest.raises(InvalidInputError):
            cauchy_riemann_residual(free(1), 0.3 + 1e-5j, h=1e-4)
