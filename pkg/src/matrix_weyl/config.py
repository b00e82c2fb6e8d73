# -*- encoding: utf-8 -*-
"""
Run configuration for the command-line front end.

A RunConfig is built from an optional JSON config file and then overridden
by command-line flags; there is no environment-variable layer. Everything
is validated before dispatch, so numerical code never sees a malformed
grid, a non-positive eps or a compression vector outside the unit ball.

Config file example:
    {
        "subcommand": "bp-defect",
        "potential": "free",
        "n_list": [4, 16, 64, 256],
        "a": [[-1, 1]],
        "s": [[0, "inf"]],
        "c": [1.0],
        "eps": [1e-4]
    }

Complex numbers are written "x+yi" (or "x+yj"); matrices as
{"value_re": [[...]], "value_im": [[...]]}.
"""

import json
import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from matrix_weyl.catalog import build_potential
from matrix_weyl.errors import InvalidInputError
from matrix_weyl.harmonic import IntervalUnion
from matrix_weyl.potentials import PotentialSpec
from matrix_weyl.reports import digest
from matrix_weyl.weyl import SeedMode, WeylOptions


class ConfigError(InvalidInputError):
    """Malformed or inconsistent run configuration."""


class Subcommand(Enum):
    MFUNCTION = "mfunction"
    REFLECTIONLESS = "reflectionless"
    BP_DEFECT = "bp-defect"
    OMEGA = "omega"
    SIEGEL_DIST = "siegel-dist"
    SELFTEST = "selftest"


class MSide(Enum):
    PLUS = "plus"
    MINUS = "minus"
    TILDE_MINUS = "tilde-minus"


def parse_complex(value: Any) -> complex:
    """Parse 2j, "0+2i", "1-0.5j", [re, im]."""
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex)):
        return complex(value)
    text = str(value).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {value!r}") from None


def format_complex(z: complex) -> str:
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def parse_interval(value: Any) -> tuple[float, float]:
    """Parse "a:b" or [a, b]; "inf"/"-inf" allowed."""
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 2:
            raise ConfigError(f"interval must look like a:b, got {value!r}")
        value = parts
    try:
        lo, hi = (float(x) for x in value)
    except (TypeError, ValueError):
        raise ConfigError(f"cannot parse interval {value!r}") from None
    return lo, hi


def parse_matrix(value: Any) -> np.ndarray:
    """{"value_re": ..., "value_im": ...}, a nested list, or a path to such JSON."""
    if isinstance(value, str):
        text = value
        if not value.lstrip().startswith(("{", "[")):
            try:
                text = Path(value).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read matrix file {value}: {exc}") from None
        try:
            value = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"matrix is not valid JSON: {exc}") from None
    if isinstance(value, Mapping):
        re_part = np.asarray(value["value_re"], dtype=float)
        im_part = np.asarray(value.get("value_im", np.zeros_like(re_part)), dtype=float)
        return np.atleast_2d(re_part + 1j * im_part)
    return np.atleast_2d(np.asarray(value, dtype=np.complex128))


@dataclass
class RunConfig:
    """
    Everything one CLI invocation needs.

    Attributes:
        subcommand: which driver to run
        spec: the potential (inline JSON, a file, or a catalog name)
        z_grid: spectral parameters for mfunction
        eps: eps schedule (decreasing)
        n_list: sites N for bp-defect
        a, s: interval unions
        c: compression vector
        grid_step / points_per_unit: grid resolutions
        weyl: iteration options
        side: which m-function mfunction evaluates
        site: site n for mfunction
        omega_n_max / cluster_tol: omega-limit parameters
        z1, z2: matrices for siegel-dist
        output: output file (mfunction) or directory (experiments)
        jobs: worker threads (default: available cores)
        verbosity: 0 warnings, 1 info, 2 debug
    """
    subcommand: Subcommand
    spec: Optional[PotentialSpec] = None
    z_grid: list[complex] = field(default_factory=list)
    eps: list[float] = field(default_factory=lambda: [1e-4])
    n_list: list[int] = field(default_factory=lambda: [4, 16, 64, 256])
    a: IntervalUnion = field(default_factory=lambda: IntervalUnion.of([(-1.0, 1.0)]))
    s: IntervalUnion = field(default_factory=lambda: IntervalUnion.of([(0.0, math.inf)]))
    c: list[complex] = field(default_factory=list)
    grid_step: float = 1e-3
    points_per_unit: int = 2048
    weyl: WeylOptions = field(default_factory=WeylOptions)
    side: MSide = MSide.PLUS
    site: int = 0
    omega_n_max: int = 4096
    cluster_tol: float = 1e-6
    z1: Optional[np.ndarray] = None
    z2: Optional[np.ndarray] = None
    output: Optional[str] = None
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)
    verbosity: int = 0

    # ── Construction ─────────────────────────────────────────────────

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        """
        Build from a plain mapping (config file contents merged with flags).

        Raises:
            ConfigError: unknown keys, unparseable values
        """
        data = {k: v for k, v in data.items() if v is not None}
        known = {
            "subcommand", "spec", "potential", "z", "eps", "n_list", "a", "s", "c",
            "grid_step", "points_per_unit", "n_start", "n_max", "tol", "seed_mode",
            "seed_scale", "certify", "side", "site", "omega_n_max", "cluster_tol",
            "z1", "z2", "output", "jobs", "verbosity",
        }
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "subcommand" not in data:
            raise ConfigError("config has no subcommand")
        try:
            sub = Subcommand(data["subcommand"])
            spec = _load_spec(data.get("spec"), data.get("potential"))
            weyl_keys = ("n_start", "n_max", "tol", "seed_mode", "seed_scale", "certify")
            weyl_args = {k: data[k] for k in weyl_keys if k in data}
            if "seed_mode" in weyl_args:
                weyl_args["seed_mode"] = SeedMode(weyl_args["seed_mode"])
            cfg = cls(subcommand=sub, spec=spec, weyl=WeylOptions(**weyl_args))
            if "z" in data:
                cfg.z_grid = [parse_complex(z) for z in _as_list(data["z"])]
            if "eps" in data:
                cfg.eps = [float(e) for e in _as_list(data["eps"])]
            if "n_list" in data:
                cfg.n_list = [int(n) for n in _as_list(data["n_list"])]
            if "a" in data:
                items = _as_list(data["a"], nested=True)
                cfg.a = IntervalUnion.of(parse_interval(x) for x in items)
            if "s" in data:
                items = _as_list(data["s"], nested=True)
                cfg.s = IntervalUnion.of(parse_interval(x) for x in items)
            if "c" in data:
                cfg.c = [parse_complex(x) for x in _as_list(data["c"])]
            for key, conv in (
                ("grid_step", float), ("points_per_unit", int), ("site", int),
                ("omega_n_max", int), ("cluster_tol", float), ("jobs", int),
                ("verbosity", int), ("output", str),
            ):
                if key in data:
                    setattr(cfg, key, conv(data[key]))
            if "side" in data:
                cfg.side = MSide(data["side"])
            if "z1" in data:
                cfg.z1 = parse_matrix(data["z1"])
            if "z2" in data:
                cfg.z2 = parse_matrix(data["z2"])
        except ConfigError:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc
        return cfg

    @classmethod
    def load(cls, path: str, overrides: Optional[Mapping[str, Any]] = None) -> "RunConfig":
        """Config file first, then non-None overrides."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        merged = dict(data)
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(merged)

    def with_overrides(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    # ── Validation ───────────────────────────────────────────────────

    def validate(self) -> "RunConfig":
        """
        Raises:
            ConfigError: empty grids, eps <= 0, ||c|| > 1, missing inputs
        """
        sub = self.subcommand
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        needs_spec = sub in (
            Subcommand.MFUNCTION, Subcommand.REFLECTIONLESS, Subcommand.BP_DEFECT, Subcommand.OMEGA,
        )
        if needs_spec and self.spec is None:
            raise ConfigError(f"{sub.value} needs a potential (--spec or --potential)")
        if any(not e > 0 for e in self.eps) or not self.eps:
            raise ConfigError(f"eps values must be positive, got {self.eps}")
        if sub == Subcommand.MFUNCTION:
            if not self.z_grid:
                raise ConfigError("mfunction needs at least one --z")
            if any(z.imag == 0 for z in self.z_grid):
                raise ConfigError("spectral parameters must have Im z != 0")
        if sub in (Subcommand.REFLECTIONLESS, Subcommand.BP_DEFECT):
            if self.a.is_empty or not self.a.is_bounded:
                raise ConfigError("A must be a non-empty bounded interval union")
            if not self.grid_step > 0 or self.points_per_unit < 2:
                raise ConfigError("grid resolution must be positive")
        if sub == Subcommand.BP_DEFECT:
            if not self.n_list or any(n < 1 for n in self.n_list):
                raise ConfigError("N values must be >= 1")
            c = self.c or [1.0] + [0.0] * (self.spec.dim - 1)
            if len(c) != self.spec.dim:
                raise ConfigError(f"c has length {len(c)}, expected {self.spec.dim}")
            if np.linalg.norm(np.asarray(c)) > 1.0 + 1e-12:
                raise ConfigError("c must have norm <= 1")
            self.c = [complex(x) for x in c]
        if sub == Subcommand.SIEGEL_DIST and (self.z1 is None or self.z2 is None):
            raise ConfigError("siegel-dist needs --z1 and --z2")
        return self

    # ── Serialization ────────────────────────────────────────────────

    def to_dict(self) -> dict:
        """Numerical content only; jobs, verbosity and output are not part of it."""
        out: dict[str, Any] = {
            "subcommand": self.subcommand.value,
            "spec": None if self.spec is None else self.spec.to_dict(),
            "z": [[z.real, z.imag] for z in self.z_grid],
            "eps": self.eps,
            "n_list": self.n_list,
            "a": self.a.to_list(),
            "s": self.s.to_list(),
            "c": [[x.real, x.imag] for x in self.c],
            "grid_step": self.grid_step,
            "points_per_unit": self.points_per_unit,
            "weyl": self.weyl.to_dict(),
            "side": self.side.value,
            "site": self.site,
            "omega_n_max": self.omega_n_max,
            "cluster_tol": self.cluster_tol,
        }
        for key in ("z1", "z2"):
            m = getattr(self, key)
            if m is not None:
                out[key] = {"value_re": m.real.tolist(), "value_im": m.imag.tolist()}
        return out

    def config_hash(self) -> str:
        return digest(self.to_dict())


def _as_list(value: Any, nested: bool = False) -> list:
    if isinstance(value, str):
        return [v for v in value.split(",") if v] if not nested else [value]
    if nested and isinstance(value, (list, tuple)) and value and not isinstance(
        value[0], (list, tuple, str),
    ):
        return [value]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _load_spec(spec: Any, potential: Optional[str]) -> Optional[PotentialSpec]:
    if spec is not None and potential is not None:
        raise ConfigError("give either a spec or a catalog potential, not both")
    if potential is not None:
        try:
            return build_potential(potential)
        except KeyError as exc:
            raise ConfigError(str(exc.args[0])) from None
    if spec is None:
        return None
    if isinstance(spec, Mapping):
        return PotentialSpec.from_dict(spec)
    text = str(spec)
    if not text.lstrip().startswith("{"):
        try:
            text = Path(text).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read spec file {spec}: {exc}") from None
    try:
        return PotentialSpec.from_json(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"spec is not valid JSON: {exc}") from None
