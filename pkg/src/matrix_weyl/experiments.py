# -*- encoding: utf-8 -*-
"""
Composite drivers: reflectionless residuals, the value-distribution defect
between the two half-line m-functions, and the full omega-limit pipeline.

    reflectionless_residual   ||M_+(0, t+ie) + conj M~_-(0, t+ie)|| over a grid of A
    bp_defect                 int_A omega_{c*M~_-(N)c}(-S) - int_A omega_{c*M~_+(N)c}(S)
    remling_check             omega_limit -> rank estimate of the full a.c. set
                              -> reflectionless residual of every representative
    vd_convergence_check      value distribution of M_+ of S^n B against the
                              nearest omega-limit representative

Boundary values are only ever reached through eps-regularization; the
residual is reported at every eps of the schedule together with the
observed decay order in eps.

Usage:
    a = IntervalUnion.of([(-1.9, 1.9)])
    report = reflectionless_residual(zero_spec, a, eps=(1e-4, 1e-5))
    report.max_residual, report.decay_order
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from matrix_weyl.dynamics import OmegaLimitApprox, omega_limit, potential_metric, shift
from matrix_weyl.errors import IdentityViolationError, InvalidInputError
from matrix_weyl.harmonic import (
    IntervalUnion,
    QuadratureGrid,
    VDResult,
    integrand_values,
    vd_from_integrand,
)
from matrix_weyl.lattice import potential_at
from matrix_weyl.matcore import CMatrix, checked_inverse, identity, operator_norm
from matrix_weyl.potentials import PotentialSpec, Support
from matrix_weyl.weyl import (
    RankClassification,
    WeylOptions,
    m_plus_grid,
    m_tilde_minus_grid,
    m_tilde_minus_halfline_grid,
    rank_classify,
)

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-4
DEFAULT_GRID_STEP = 1e-3
IDENTITY_TOL = 1e-8
IDENTITY_STRIDE = 16
RANK_STRIDE = 16
# loose options for screening passes whose output is a rank or a quadrature
SCREENING_OPTS = WeylOptions(tol=1e-7, n_max=2 ** 13)


def decay_order(eps: Sequence[float], values: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(value) against log(eps); None without two positive points."""
    pts = [(math.log(e), math.log(v)) for e, v in zip(eps, values) if e > 0 and v > 0]
    if len(pts) < 2:
        return None
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.ptp(x) == 0:
        return None
    return float(np.polyfit(x, y, 1)[0])


def grid_points(a: IntervalUnion, step: float) -> np.ndarray:
    """Uniform grid of step ``step`` over every interval of A, endpoints included."""
    if not step > 0:
        raise InvalidInputError(f"grid step must be positive, got {step}")
    if not a.is_bounded or a.is_empty:
        raise InvalidInputError("grid needs a non-empty bounded set")
    parts = []
    for lo, hi in a.intervals:
        n = int(math.floor((hi - lo) / step + 1e-9))
        parts.append(lo + step * np.arange(n + 1))
    return np.concatenate(parts)


def _eps_tuple(eps: Union[float, Sequence[float]]) -> tuple[float, ...]:
    values = (float(eps),) if np.isscalar(eps) else tuple(float(e) for e in eps)
    if not values or any(not e > 0 for e in values):
        raise InvalidInputError(f"eps must be positive, got {values}")
    return values


# ── Reflectionless residual ──────────────────────────────────────────


@dataclass
class ReflectionlessReport:
    """
    Residual ||M_+(t + ie) + conj M~_-(t + ie)|| on a grid of A.

    Attributes:
        ts: grid points
        eps_schedule: evaluated eps values (decreasing order)
        residuals: one list per eps, aligned with ts
        converged: per eps, whether every grid value converged
        decay_order: slope of log(max residual) against log(eps)
    """
    ts: list[float]
    eps_schedule: tuple[float, ...]
    residuals: list[list[float]]
    converged: list[bool] = field(default_factory=list)
    decay_order: Optional[float] = None

    @property
    def eps(self) -> float:
        return self.eps_schedule[-1]

    def max_residual_at(self, i: int) -> float:
        return float(max(self.residuals[i])) if self.ts else 0.0

    @property
    def max_residual(self) -> float:
        return self.max_residual_at(-1)

    @property
    def mean_residual(self) -> float:
        return float(np.mean(self.residuals[-1])) if self.ts else 0.0

    def columns(self) -> list[str]:
        return ["t"] + [f"residual_eps_{e:.0e}" for e in self.eps_schedule]

    def rows(self) -> list[list[float]]:
        return [[t] + [r[i] for r in self.residuals] for i, t in enumerate(self.ts)]

    def to_dict(self) -> dict:
        return {
            "eps_schedule": list(self.eps_schedule),
            "points": len(self.ts),
            "max_residual": [self.max_residual_at(i) for i in range(len(self.eps_schedule))],
            "mean_residual": self.mean_residual,
            "decay_order": self.decay_order,
            "converged": self.converged,
        }


def reflectionless_residual(
    spec: PotentialSpec,
    a: IntervalUnion,
    eps: Union[float, Sequence[float]] = DEFAULT_EPS,
    grid_step: float = DEFAULT_GRID_STEP,
    opts: Optional[WeylOptions] = None,
    jobs: int = 1,
) -> ReflectionlessReport:
    """
    Residual of M_+(t) = -conj M~_-(t) on A along an eps schedule.

    M_+ is the right half-line function at site 0 and M~_- = F_-(1) F_-(0)^{-1}
    the left one; for the free operator they cancel on (-2, 2).
    """
    schedule = tuple(sorted(_eps_tuple(eps), reverse=True))
    ts = grid_points(a, grid_step) if not a.is_empty else np.zeros(0)
    residuals, converged = [], []
    for e in schedule:
        if ts.size == 0:
            residuals.append([])
            converged.append(True)
            continue
        zs = ts + 1j * e
        plus = m_plus_grid(spec, zs, opts=opts, jobs=jobs)
        minus = m_tilde_minus_grid(spec, zs, opts=opts, jobs=jobs)
        residuals.append([
            operator_norm(p.value + np.conj(m.value)) for p, m in zip(plus, minus)
        ])
        converged.append(all(p.converged and m.converged for p, m in zip(plus, minus)))
        logger.info("reflectionless residual at eps=%.1e: max %.3e", e, max(residuals[-1]))
    report = ReflectionlessReport([float(t) for t in ts], schedule, residuals, converged)
    if len(schedule) >= 2 and ts.size:
        report.decay_order = decay_order(
            schedule, [report.max_residual_at(i) for i in range(len(schedule))],
        )
    return report


# ── Periodicity identities ───────────────────────────────────────────


def reflection_identity_residual(spec: PotentialSpec, n: int, t: float, m: CMatrix) -> float:
    """
    Relative residual of -conj(P_+(n, t) M) = P_-(n, t)(-T_+(1, t) conj M) at real t.

    Both sides are evaluated as successive fractional actions: T_+(k) acts as
    W -> -(tI - B(k)) - W^{-1} and T_-(k) as W -> (tI - B(k)) - W^{-1}.
    """
    d = spec.dim
    eye = identity(d)
    x = np.asarray(m, dtype=np.complex128)
    for k in range(1, n + 1):
        x = -(t * eye - potential_at(spec, k)) - checked_inverse(x)
    lhs = -np.conj(x)

    y = np.conj(np.asarray(m, dtype=np.complex128))
    y = -(-(t * eye - potential_at(spec, 1)) - checked_inverse(y))
    for k in range(2, n + 1):
        y = (t * eye - potential_at(spec, k)) - checked_inverse(y)
    return operator_norm(lhs - y) / (1.0 + operator_norm(lhs))


# ── Value-distribution defect ────────────────────────────────────────


@dataclass
class BPDefectReport:
    """
    Per-N value-distribution defect between the two half-line m-functions.

    Attributes:
        n_values: sites N
        defects: minus integral - plus integral, per N
        minus, plus: the two integrals per N
        c, a, s, eps: experiment parameters
        full_ac: A lies in the estimated full-multiplicity a.c. set
        identity_checks / identity_max: periodicity-identity audit
        converged: every M_+ boundary value met the stopping rule
    """
    n_values: list[int]
    defects: list[float]
    minus: list[VDResult]
    plus: list[VDResult]
    c: list[complex]
    a: IntervalUnion
    s: IntervalUnion
    eps: float
    full_ac: bool = True
    rank_counts: dict[int, int] = field(default_factory=dict)
    identity_checks: int = 0
    identity_max: float = 0.0
    converged: bool = True

    @property
    def quadrature_floor(self) -> float:
        return max(
            (r.error_estimate for r in self.minus + self.plus), default=0.0,
        )

    def columns(self) -> list[str]:
        return ["N", "defect", "minus_integral", "plus_integral", "error_estimate"]

    def rows(self) -> list[list[float]]:
        return [
            [n, d, mi.value, pl.value, max(mi.error_estimate, pl.error_estimate)]
            for n, d, mi, pl in zip(self.n_values, self.defects, self.minus, self.plus)
        ]

    def to_dict(self) -> dict:
        return {
            "n_values": self.n_values,
            "defects": self.defects,
            "quadrature_floor": self.quadrature_floor,
            "c_re": [float(np.real(x)) for x in self.c],
            "c_im": [float(np.imag(x)) for x in self.c],
            "a": self.a.to_list(),
            "s": self.s.to_list(),
            "eps": self.eps,
            "full_ac": self.full_ac,
            "rank_counts": {str(k): v for k, v in self.rank_counts.items()},
            "identity_checks": self.identity_checks,
            "identity_max": self.identity_max,
            "converged": self.converged,
        }


def _check_c(c, dim: int) -> np.ndarray:
    vec = np.asarray(c, dtype=np.complex128).reshape(-1)
    if vec.size != dim:
        raise InvalidInputError(f"compression vector has length {vec.size}, expected {dim}")
    if np.linalg.norm(vec) > 1.0 + 1e-12:
        raise InvalidInputError("compression vector must have norm <= 1")
    return vec


def bp_defect(
    spec: PotentialSpec,
    n_list: Sequence[int],
    a: IntervalUnion,
    s: IntervalUnion,
    c,
    eps: float = DEFAULT_EPS,
    points_per_unit: int = 2048,
    opts: Optional[WeylOptions] = None,
    check_identity: bool = True,
    jobs: int = 1,
) -> BPDefectReport:
    """
    Defect int_A omega_{c*M~_-(N,t)c}(-S) dt - int_A omega_{c*M~_+(N,t)c}(S) dt.

    M~_+(N) = M_+(N) comes from the backward iteration from deep sites;
    M~_-(N) from the forward iteration with F_-(0) = 0. Boundary values are
    taken at t + i eps. A is screened against the estimated full a.c. set
    and a mismatch is logged, not raised.

    Raises:
        IdentityViolationError: the periodicity identity fails at an audited node
    """
    if spec.support != Support.HALF_LINE:
        raise InvalidInputError("bp_defect expects a half-line potential")
    if not eps > 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    ns = [int(n) for n in n_list]
    if not ns or any(n < 1 for n in ns):
        raise InvalidInputError("N values must be >= 1")
    vec = _check_c(c, spec.dim)
    grid = QuadratureGrid.midpoint(a, points_per_unit)
    zs = grid.nodes + 1j * eps
    minus_s = s.reflect()

    ranks = rank_classify(
        spec, grid.nodes[::RANK_STRIDE], opts=SCREENING_OPTS, jobs=jobs,
    )
    counts: dict[int, int] = {}
    for r in ranks.ranks:
        counts[r] = counts.get(r, 0) + 1
    full_ac = len(ranks.full_set) == len(ranks.ts)
    if not full_ac:
        logger.warning(
            "A is not inside the estimated full a.c. set (ranks %s); the defect need not decay",
            counts,
        )

    report = BPDefectReport(
        n_values=ns, defects=[], minus=[], plus=[], c=list(vec), a=a, s=s, eps=eps,
        full_ac=full_ac, rank_counts=counts,
    )
    for n in ns:
        plus_evals = m_plus_grid(spec, zs, site=n, opts=opts, jobs=jobs)
        report.converged = report.converged and all(ev.converged for ev in plus_evals)
        plus_vals = [ev.value for ev in plus_evals]
        minus_vals = [ev.value for ev in m_tilde_minus_halfline_grid(spec, n, zs)]
        if check_identity:
            for i in range(0, grid.size, IDENTITY_STRIDE):
                r = reflection_identity_residual(spec, n, float(grid.nodes[i]), plus_vals[i])
                report.identity_checks += 1
                report.identity_max = max(report.identity_max, r)
                if r > IDENTITY_TOL:
                    raise IdentityViolationError(
                        f"periodicity identity residual {r:.3e} at N={n}, t={grid.nodes[i]:.6f}",
                        residual=r,
                    )
        vd_minus = vd_from_integrand(integrand_values(minus_vals, vec, minus_s, grid), grid)
        vd_plus = vd_from_integrand(integrand_values(plus_vals, vec, s, grid), grid)
        report.minus.append(vd_minus)
        report.plus.append(vd_plus)
        report.defects.append(vd_minus.value - vd_plus.value)
        logger.info(
            "defect N=%d: %.6e (quadrature estimate %.1e)",
            n, report.defects[-1], max(vd_minus.error_estimate, vd_plus.error_estimate),
        )
    return report


# ── Omega-limit pipeline ─────────────────────────────────────────────


@dataclass
class RepresentativeSummary:
    index: int
    spec: PotentialSpec
    report: Optional[ReflectionlessReport]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "spec": self.spec.to_dict(),
            "reflectionless": None if self.report is None else self.report.to_dict(),
        }


@dataclass
class RemlingReport:
    """
    omega-limit representatives checked for reflectionlessness on A intersected
    with the estimated full-multiplicity a.c. set of B.
    """
    omega: OmegaLimitApprox
    ranks: RankClassification
    a: IntervalUnion
    effective: IntervalUnion
    summaries: list[RepresentativeSummary]

    @property
    def vacuous(self) -> bool:
        return self.effective.is_empty

    def to_dict(self) -> dict:
        return {
            "omega": self.omega.to_dict(),
            "a": self.a.to_list(),
            "full_ac_estimate": self.effective.to_list(),
            "vacuous": self.vacuous,
            "representatives": [s.to_dict() for s in self.summaries],
        }


def remling_check(
    spec: PotentialSpec,
    a: IntervalUnion,
    eps: Union[float, Sequence[float]] = DEFAULT_EPS,
    grid_step: float = DEFAULT_GRID_STEP,
    rank_step: Optional[float] = None,
    omega_n_max: int = 4096,
    opts: Optional[WeylOptions] = None,
    jobs: int = 1,
) -> RemlingReport:
    """
    omega_limit(B), then the rank-d part of A, then the reflectionless residual
    of every representative on that part.

    The full-multiplicity set is estimated by rank_classify on a grid of step
    ``rank_step`` (default 10 grid steps); when it misses A the report is
    vacuous and no residuals are computed.
    """
    if spec.support != Support.HALF_LINE:
        raise InvalidInputError("remling_check expects a half-line potential")
    omega = omega_limit(spec, n_max=omega_n_max)
    step = rank_step or 10 * grid_step
    ranks = rank_classify(spec, grid_points(a, step), opts=SCREENING_OPTS, jobs=jobs)
    effective = IntervalUnion.from_points(ranks.full_set).intersect(a)
    if effective.is_empty:
        logger.warning("no full-multiplicity a.c. spectrum found on A; the check is vacuous")
    summaries = []
    for i, rep in enumerate(omega.representatives):
        report = None
        if not effective.is_empty:
            report = reflectionless_residual(rep, effective, eps, grid_step, opts=opts, jobs=jobs)
        summaries.append(RepresentativeSummary(i, rep, report))
    return RemlingReport(omega, ranks, a, effective, summaries)


# ── Value-distribution convergence ───────────────────────────────────


@dataclass
class VDConvergenceRow:
    n: int
    c_index: int
    shifted: float
    limit: float
    error_estimate: float
    converged: bool

    @property
    def difference(self) -> float:
        return abs(self.shifted - self.limit)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "c_index": self.c_index,
            "shifted": self.shifted,
            "limit": self.limit,
            "difference": self.difference,
            "error_estimate": self.error_estimate,
            "converged": self.converged,
        }


def vd_convergence_check(
    spec: PotentialSpec,
    n_list: Sequence[int],
    a: IntervalUnion,
    s: IntervalUnion,
    c_list: Sequence,
    eps: float = DEFAULT_EPS,
    points_per_unit: int = 512,
    omega: Optional[OmegaLimitApprox] = None,
    opts: Optional[WeylOptions] = None,
    jobs: int = 1,
) -> list[VDConvergenceRow]:
    """
    Compare int_A omega_{c*M_+(S^n B)(t)c}(S) dt with the same integral for
    the omega-limit representative nearest to S^n B, for each n and c.
    """
    ns = [int(n) for n in n_list]
    if any(b <= x for x, b in zip(ns, ns[1:])):
        raise InvalidInputError("n values must be strictly increasing")
    vecs = [_check_c(c, spec.dim) for c in c_list]
    omega = omega or omega_limit(spec)
    opts = opts or SCREENING_OPTS
    grid = QuadratureGrid.midpoint(a, points_per_unit)
    zs = grid.nodes + 1j * eps
    limit_cache: dict[int, list] = {}
    rows = []
    for n in ns:
        shifted = shift(spec, n)
        nearest = min(
            range(len(omega.representatives)),
            key=lambda i: potential_metric(shifted, omega.representatives[i], omega.window).value,
        )
        if nearest not in limit_cache:
            limit_cache[nearest] = m_plus_grid(
                omega.representatives[nearest], zs, opts=opts, jobs=jobs,
            )
        limit_evals = limit_cache[nearest]
        shifted_evals = m_plus_grid(shifted, zs, opts=opts, jobs=jobs)
        converged = all(ev.converged for ev in shifted_evals)
        for k, vec in enumerate(vecs):
            left = vd_from_integrand(
                integrand_values([ev.value for ev in shifted_evals], vec, s, grid), grid,
            )
            right = vd_from_integrand(
                integrand_values([ev.value for ev in limit_evals], vec, s, grid), grid,
            )
            rows.append(VDConvergenceRow(
                n, k, left.value, right.value,
                max(left.error_estimate, right.error_estimate), converged,
            ))
    return rows
