# -*- encoding: utf-8 -*-
"""
Tests for run configuration: parsing, file loading, overrides and validation.
"""

import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from matrix_weyl.config import (
    ConfigError,
    MSide,
    RunConfig,
    Subcommand,
    format_complex,
    parse_complex,
    parse_interval,
    parse_matrix,
)
from matrix_weyl.errors import InvalidInputError
from matrix_weyl.weyl import SeedMode


@pytest.fixture
def bp_data():
    return {
        "subcommand": "bp-defect",
        "potential": "free-2",
        "n_list": [4, 16],
        "a": [[-1, 1]],
        "s": [[0, "inf"]],
        "eps": [1e-4],
    }


# ── Value parsers ────────────────────────────────────────────────────


class TestParsers:

    @pytest.mark.parametrize("text,expected", [
        ("0+2i", 2j),
        ("1-0.5j", 1 - 0.5j),
        (" 3 + 1i ", 3 + 1j),
        ([0.5, 2.0], 0.5 + 2j),
        (1.5, 1.5 + 0j),
    ])
    def test_complex(self, text, expected):
        assert parse_complex(text) == expected

    def test_complex_garbage(self):
        with pytest.raises(ConfigError):
            parse_complex("two i")

    def test_format_complex(self):
        assert format_complex(1 - 0.5j) == "1.0-0.5i"
        assert parse_complex(format_complex(0.25 + 3j)) == 0.25 + 3j

    def test_interval(self):
        assert parse_interval("-1:1") == (-1.0, 1.0)
        assert parse_interval("0:inf") == (0.0, math.inf)
        assert parse_interval([2, 3]) == (2.0, 3.0)
        with pytest.raises(ConfigError):
            parse_interval("1")

    def test_matrix_forms(self, tmp_path):
        data = {"value_re": [[0.0, 1.0], [1.0, 0.0]], "value_im": [[1.0, 0.0], [0.0, 1.0]]}
        expected = np.array([[1j, 1.0], [1.0, 1j]])
        assert_allclose(parse_matrix(data), expected)
        assert_allclose(parse_matrix(json.dumps(data)), expected)
        path = tmp_path / "z.json"
        path.write_text(json.dumps(data))
        assert_allclose(parse_matrix(str(path)), expected)
        assert_allclose(parse_matrix([[2.0]]), [[2.0]])

    def test_matrix_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_matrix(str(tmp_path / "missing.json"))


# ── RunConfig construction ───────────────────────────────────────────


class TestFromDict:

    def test_defaults(self):
        cfg = RunConfig.from_dict({"subcommand": "selftest"})
        assert cfg.subcommand == Subcommand.SELFTEST
        assert cfg.eps == [1e-4]
        assert cfg.n_list == [4, 16, 64, 256]
        assert cfg.jobs >= 1
        assert cfg.s.intervals == ((0.0, math.inf),)

    def test_full_bp_config(self, bp_data):
        cfg = RunConfig.from_dict(bp_data)
        assert cfg.spec.dim == 2
        assert cfg.a.intervals == ((-1.0, 1.0),)
        assert cfg.s.intervals == ((0.0, math.inf),)
        assert cfg.n_list == [4, 16]

    def test_flat_interval_and_string_lists(self):
        cfg = RunConfig.from_dict({
            "subcommand": "reflectionless", "potential": "free", "a": [-1, 1], "eps": "1e-3,1e-4",
        })
        assert cfg.a.intervals == ((-1.0, 1.0),)
        assert cfg.eps == [1e-3, 1e-4]

    def test_weyl_options(self):
        cfg = RunConfig.from_dict({
            "subcommand": "mfunction", "potential": "free", "z": ["0+2i"],
            "n_max": 1024, "seed_mode": "siegel", "certify": True,
        })
        assert cfg.weyl.n_max == 1024
        assert cfg.weyl.seed_mode == SeedMode.SIEGEL
        assert cfg.weyl.certify
        assert cfg.z_grid == [2j]

    def test_inline_spec(self):
        spec_json = json.dumps({"dim": 1, "bound": 1.0, "kind": "zero"})
        cfg = RunConfig.from_dict({"subcommand": "omega", "spec": spec_json})
        assert cfg.spec.dim == 1

    def test_side(self):
        cfg = RunConfig.from_dict({"subcommand": "mfunction", "side": "tilde-minus"})
        assert cfg.side == MSide.TILDE_MINUS

    @pytest.mark.parametrize("data", [
        {"subcommand": "selftest", "colour": "red"},
        {"potential": "free"},
        {"subcommand": "dance"},
        {"subcommand": "omega", "potential": "nope"},
        {"subcommand": "omega", "potential": "free", "spec": "{}"},
        {"subcommand": "bp-defect", "n_list": ["x"]},
        {"subcommand": "mfunction", "side": "sideways"},
        {"subcommand": "mfunction", "n_start": 1},
    ])
    def test_rejected(self, data):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(data)

    def test_config_error_is_input_error(self):
        assert issubclass(ConfigError, InvalidInputError)


class TestLoad:

    def test_file_then_overrides(self, tmp_path, bp_data):
        path = tmp_path / "run.json"
        path.write_text(json.dumps(bp_data))
        cfg = RunConfig.load(str(path), {"n_list": [8], "jobs": None})
        assert cfg.n_list == [8]
        assert cfg.spec.dim == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig.load(str(tmp_path / "none.json"))

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            RunConfig.load(str(path))

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        with pytest.raises(ConfigError):
            RunConfig.load(str(path))


# ── Validation and hashing ───────────────────────────────────────────


class TestValidate:

    def test_default_c_is_first_basis_vector(self, bp_data):
        cfg = RunConfig.from_dict(bp_data).validate()
        assert cfg.c == [1.0 + 0j, 0j]

    def test_c_outside_unit_ball(self, bp_data):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({**bp_data, "c": [1.0, 1.0]}).validate()

    def test_c_wrong_length(self, bp_data):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({**bp_data, "c": [1.0]}).validate()

    def test_missing_potential(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"subcommand": "omega"}).validate()

    def test_mfunction_needs_offaxis_z(self):
        base = {"subcommand": "mfunction", "potential": "free"}
        with pytest.raises(ConfigError):
            RunConfig.from_dict(base).validate()
        with pytest.raises(ConfigError):
            RunConfig.from_dict({**base, "z": ["0.5"]}).validate()

    def test_eps_positive(self, bp_data):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({**bp_data, "eps": [1e-4, -1.0]}).validate()

    def test_unbounded_a(self, bp_data):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({**bp_data, "a": [[0, "inf"]]}).validate()

    def test_jobs(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"subcommand": "selftest", "jobs": 0}).validate()

    def test_siegel_dist_needs_both(self):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"subcommand": "siegel-dist", "z1": [[1j]]}).validate()


class TestHash:

    def test_ignores_runtime_settings(self, bp_data):
        a = RunConfig.from_dict({**bp_data, "jobs": 1, "verbosity": 0})
        b = RunConfig.from_dict({**bp_data, "jobs": 8, "verbosity": 2, "output": "elsewhere"})
        assert a.config_hash() == b.config_hash()

    def test_tracks_numerics(self, bp_data):
        a = RunConfig.from_dict(bp_data)
        b = RunConfig.from_dict({**bp_data, "eps": [1e-5]})
        assert a.config_hash() != b.config_hash()

    def test_with_overrides(self, bp_data):
        cfg = RunConfig.from_dict(bp_data).with_overrides(n_list=[2])
        assert cfg.n_list == [2]

    def test_to_dict_has_no_runtime_keys(self, bp_data):
        data = RunConfig.from_dict(bp_data).to_dict()
        assert "jobs" not in data and "output" not in data
        assert data["weyl"]["seed_mode"] == "tail"
