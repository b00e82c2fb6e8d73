# -*- encoding: utf-8 -*-
"""
Validation batteries run by ``matrix-weyl selftest`` and the test suite.

sign_convention_battery pins the recursion conventions to the free-case
fixed points at z = 2i:

    M_+  = i(sqrt 2 - 1)     (also the top block of the truncated resolvent)
    M~_- = i(1 + sqrt 2)     (fixed point of W = zI - W^{-1})
    M_-  = i(sqrt 2 - 1)

siegel_battery certifies the closed-form Siegel distance against the
scalar hyperbolic distance, the triangle inequality, invariance under real
symplectic maps, the straight-path length bound, and strict contraction of
W -> (zI - B) - W^{-1}.

Usage:
    for result in run_selftest():
        print(result.name, result.passed)
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from matrix_weyl.catalog import free
from matrix_weyl.errors import SpectralError
from matrix_weyl.matcore import checked_inverse, operator_norm
from matrix_weyl.siegel import (
    ContractionSample,
    SiegelPoint,
    contraction_ratio,
    finsler_path_length,
    mobius,
    random_real_symplectic,
    random_siegel_point,
    siegel_distance,
)
from matrix_weyl.weyl import (
    SeedMode,
    WeylOptions,
    m_minus,
    m_plus,
    m_tilde_minus,
    resolvent_oracle,
)

logger = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-10
ORACLE_TOL = 1e-8
ORACLE_SIZE = 200
HYPERBOLIC_TOL = 1e-10
TRIANGLE_SLACK = 1e-9
INVARIANCE_TOL = 1e-8
N_MAPS = 200
N_CONTRACTION = 500
N_PATHS = 25


@dataclass
class CheckFailure:
    """One failed check inside a battery."""
    check: str
    message: str
    value: float = float("nan")
    tolerance: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "message": self.message,
            "value": self.value,
            "tolerance": self.tolerance,
        }


@dataclass
class BatteryResult:
    """Outcome of one battery: how many checks ran, which failed, and summary numbers."""
    name: str
    checks_run: int = 0
    failures: list[CheckFailure] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def expect(
        self, check: str, value: float, tolerance: float, message: Optional[str] = None,
    ) -> bool:
        """Record one check of ``value <= tolerance``."""
        self.checks_run += 1
        if value <= tolerance and not math.isnan(value):
            return True
        self.failures.append(
            CheckFailure(
                check, message or f"{check}: {value:.3e} > {tolerance:.1e}", value, tolerance,
            )
        )
        return False

    def fail(self, check: str, message: str) -> None:
        self.checks_run += 1
        self.failures.append(CheckFailure(check, message))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks_run": self.checks_run,
            "failures": [f.to_dict() for f in self.failures],
            "details": self.details,
        }


# ── Sign conventions ─────────────────────────────────────────────────


def sign_convention_battery() -> BatteryResult:
    """Free-case fixed points at z = 2i under both seed modes, plus the resolvent oracle."""
    result = BatteryResult("sign-conventions")
    z = 2j
    plus_expected = 1j * (math.sqrt(2.0) - 1.0)
    tilde_expected = 1j * (1.0 + math.sqrt(2.0))
    spec = free(1)

    for mode in SeedMode:
        opts = WeylOptions(seed_mode=mode)
        try:
            mp = m_plus(spec, z, opts)
            mt = m_tilde_minus(spec, z, opts)
            mm = m_minus(spec, z, opts)
        except SpectralError as exc:
            result.fail(f"evaluate[{mode.value}]", str(exc))
            continue
        result.expect(f"m_plus[{mode.value}]", abs(mp.value[0, 0] - plus_expected), FIXED_POINT_TOL)
        result.expect(
            f"m_tilde_minus[{mode.value}]", abs(mt.value[0, 0] - tilde_expected), FIXED_POINT_TOL,
        )
        result.expect(
            f"m_minus[{mode.value}]", abs(mm.value[0, 0] - plus_expected), FIXED_POINT_TOL,
        )
        # W = zI - W^{-1}
        w = mt.value
        result.expect(
            f"forward_fixed_point[{mode.value}]",
            operator_norm(w - (z * np.eye(1) - checked_inverse(w))),
            FIXED_POINT_TOL,
        )
        if not (mp.converged and mt.converged):
            result.fail(f"converged[{mode.value}]", "free-case iteration did not converge")
        result.details[f"m_plus_2i[{mode.value}]"] = [mp.value[0, 0].real, mp.value[0, 0].imag]

    try:
        oracle = resolvent_oracle(spec, z, ORACLE_SIZE)
        result.expect("resolvent_oracle", abs(oracle[0, 0] - plus_expected), ORACLE_TOL)
    except SpectralError as exc:
        result.fail("resolvent_oracle", str(exc))

    logger.info(
        "sign conventions: %d checks, %d failures", result.checks_run, len(result.failures),
    )
    return result


# ── Siegel distance ──────────────────────────────────────────────────


def contraction_profile(samples: list[ContractionSample]) -> dict:
    """
    Distribution of observed contraction ratios against the candidate
    factors 1/(1+y^2) and 1/(1+y).

    Per bound: the fraction of samples at or under it, and quantiles of
    ratio / bound (values above 1 mean the bound was exceeded).
    """
    kept = [s for s in samples if s.before > 0]
    if not kept:
        return {"samples": 0}
    ratios = np.array([s.ratio for s in kept])
    ys = np.array([s.y for s in kept])
    qs = (0.0, 0.5, 0.9, 1.0)
    profile = {
        "samples": len(kept),
        "ratio_quantiles": {f"q{int(q * 100)}": float(np.quantile(ratios, q)) for q in qs},
    }
    for name, bound in (
        ("bound_quadratic", 1.0 / (1.0 + ys * ys)),
        ("bound_linear", 1.0 / (1.0 + ys)),
    ):
        rel = ratios / bound
        profile[name] = {
            "within_fraction": float(np.mean(ratios <= bound)),
            "relative_quantiles": {
                f"q{int(q * 100)}": float(np.quantile(rel, q)) for q in qs
            },
        }
    return profile


def _scalar_distance(z: complex, w: complex) -> float:
    return math.acosh(1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


def siegel_battery(seed: int = 0, n_pairs: int = 1000) -> BatteryResult:
    """
    Certify siegel_distance.

    Args:
        seed: generator seed; identical seeds give identical batteries
        n_pairs: random pairs for the d = 1 agreement and triples for the
            triangle inequality
    """
    rng = np.random.default_rng(seed)
    result = BatteryResult("siegel-distance")

    worst = 0.0
    for _ in range(n_pairs):
        z = complex(rng.normal(), rng.uniform(0.1, 3.0))
        w = complex(rng.normal(), rng.uniform(0.1, 3.0))
        rho = _scalar_distance(z, w)
        err = abs(siegel_distance(SiegelPoint([[z]]), SiegelPoint([[w]])) - rho)
        worst = max(worst, err / (1.0 + rho))
    result.expect("scalar_agreement", worst, HYPERBOLIC_TOL)
    result.details["scalar_agreement_max"] = worst

    slack = 0.0
    for k in range(n_pairs):
        d = 1 + k % 3
        a, b, c = (random_siegel_point(d, rng) for _ in range(3))
        excess = siegel_distance(a, c) - siegel_distance(a, b) - siegel_distance(b, c)
        slack = max(slack, excess)
    result.expect("triangle_inequality", slack, TRIANGLE_SLACK)
    result.details["triangle_max_excess"] = slack

    drift = 0.0
    for k in range(N_MAPS):
        d = 1 + k % 3
        s = random_real_symplectic(d, rng)
        w1, w2 = random_siegel_point(d, rng), random_siegel_point(d, rng)
        before = siegel_distance(w1, w2)
        after = siegel_distance(mobius(s, w1), mobius(s, w2))
        drift = max(drift, abs(after - before) / (1.0 + before))
    result.expect("symplectic_invariance", drift, INVARIANCE_TOL)
    result.details["invariance_max_drift"] = drift

    shortfall = 0.0
    for k in range(N_PATHS):
        d = 1 + k % 3
        w1, w2 = random_siegel_point(d, rng), random_siegel_point(d, rng)
        shortfall = max(shortfall, siegel_distance(w1, w2) - finsler_path_length(w1, w2))
    result.expect("path_upper_bound", shortfall, TRIANGLE_SLACK)

    worst_ratio = 0.0
    worst_sample = None
    samples = []
    for k in range(N_CONTRACTION):
        d = 1 + k % 3
        w1, w2 = random_siegel_point(d, rng), random_siegel_point(d, rng)
        b = rng.normal(size=(d, d))
        z = complex(rng.normal(), rng.uniform(0.05, 2.0))
        sample = contraction_ratio(w1, w2, z, (b + b.T) / 2)
        samples.append(sample)
        if sample.before > 0 and sample.ratio >= worst_ratio:
            worst_ratio = sample.ratio
            worst_sample = sample
    result.expect("strict_contraction", worst_ratio, 1.0 - 1e-15)
    if worst_sample is not None:
        info = worst_sample.to_dict()
        result.details["contraction_worst"] = info
        logger.info(
            "contraction: worst ratio %.6f at y=%.3f (1/(1+y^2)=%.6f, 1/(1+y)=%.6f)",
            info["ratio"], info["y"], info["bound_quadratic"], info["bound_linear"],
        )
    profile = contraction_profile(samples)
    result.details["contraction_profile"] = profile
    if profile["samples"]:
        logger.info(
            "contraction: median ratio %.4f; within 1/(1+y^2) %.1f%%, within 1/(1+y) %.1f%%",
            profile["ratio_quantiles"]["q50"],
            100.0 * profile["bound_quadratic"]["within_fraction"],
            100.0 * profile["bound_linear"]["within_fraction"],
        )

    logger.info("siegel battery: %d checks, %d failures", result.checks_run, len(result.failures))
    return result


def run_selftest(seed: int = 0, n_pairs: int = 1000) -> list[BatteryResult]:
    return [sign_convention_battery(), siegel_battery(seed=seed, n_pairs=n_pairs)]
