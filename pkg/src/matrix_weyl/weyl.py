# -*- encoding: utf-8 -*-
"""
Half-line Weyl m-functions by contraction iteration.

Conventions (pinned by the free-case fixed points at z = 2i):

    M_+(n-1) = -[(zI - B(n)) + M_+(n)]^{-1}        m_+ = i(sqrt 2 - 1)
    M~_-(k)  = (zI - B(k)) - M~_-(k-1)^{-1}        m~_- = i(1 + sqrt 2)
    M_-(n)   = B(n) - zI + M~_-(n)                 m_- = i(sqrt 2 - 1)

M_+(n) = -F_+(n+1) F_+(n)^{-1} for the solution F_+ square summable at
+inf, M~_-(n) = F_-(n+1) F_-(n)^{-1} for the one square summable at -inf.

Depth is adaptive: the iteration runs from N sites away with N = 32, 64,
... up to ``n_max``, and a point is converged once two successive doublings
each move the value by less than tol = 1e-11 (1 + |z|) in operator norm.
Every point of a grid is frozen on its own, so results do not depend on
how a grid is chunked across workers.

Seeds:
    tail    exact fixed point of the period map of the asymptotic tail
            (decaying eigenvectors of the period transfer product); falls
            back to the Siegel seed for potentials without a tail
    siegel  seed_scale * iI (or -iI in the lower half plane)

Usage:
    ev = m_plus(spec, 2j)
    ev.value, ev.converged, ev.depth
    grid = m_plus_grid(spec, ts + 1e-5j, jobs=4)
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from matrix_weyl.errors import IllConditionedError, InvalidInputError, SpectralError
from matrix_weyl.lattice import SampledSequence, Side, truncated_operator
from matrix_weyl.matcore import (
    CMatrix,
    batched_inverse,
    batched_operator_norm,
    hermitian_eigh,
    identity,
    imag_part,
    min_eigenvalue,
    operator_norm,
)
from matrix_weyl.potentials import PeriodicTail, PotentialSpec
from matrix_weyl.siegel import siegel_distance

logger = logging.getLogger(__name__)

HERGLOTZ_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-4
DEFAULT_BOUNDARY_EPS = 1e-5
DEFAULT_EPS_SCHEDULE = (1e-2, 1e-3, 1e-4, 1e-5)
# an analytic boundary value moves O(eps); a square-root edge O(sqrt eps)
SLOW_ORDER = 0.75
SLOW_RATIO = 10.0


class SeedMode(Enum):
    TAIL = "tail"
    SIEGEL = "siegel"


@dataclass(frozen=True)
class WeylOptions:
    """
    Iteration controls.

    Attributes:
        n_start: first truncation depth
        n_max: largest depth before giving up (converged=False)
        tol: operator-norm tolerance; None means 1e-11 (1 + |z|)
        seed_mode: tail or siegel seeding
        seed_scale: s in the Siegel seed s*iI
        certify: rerun the final depth from 2iI and require agreement within tol
    """
    n_start: int = 32
    n_max: int = 2 ** 20
    tol: Optional[float] = None
    seed_mode: SeedMode = SeedMode.TAIL
    seed_scale: float = 1.0
    certify: bool = False

    def __post_init__(self):
        if self.n_start < 2:
            raise InvalidInputError(f"n_start must be >= 2, got {self.n_start}")
        if self.n_max < self.n_start:
            raise InvalidInputError(f"n_max {self.n_max} is below n_start {self.n_start}")
        if self.tol is not None and not self.tol > 0:
            raise InvalidInputError(f"tol must be positive, got {self.tol}")
        if not self.seed_scale > 0:
            raise InvalidInputError(f"seed_scale must be positive, got {self.seed_scale}")

    def tol_for(self, z: complex) -> float:
        return self.tol if self.tol is not None else 1e-11 * (1.0 + abs(z))

    def to_dict(self) -> dict:
        data = asdict(self)
        data["seed_mode"] = self.seed_mode.value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "WeylOptions":
        data = dict(data)
        if "seed_mode" in data:
            data["seed_mode"] = SeedMode(data["seed_mode"])
        return cls(**data)


@dataclass
class BoundaryDiagnostic:
    """
    Convergence quality of M(t + i eps) as eps decreases.

    Attributes:
        eps_schedule: the evaluated eps values
        cauchy_diff: ||M(t + i eps_last) - M(t + i eps_prev)||
        observed_order: log-ratio order of the last two Cauchy differences
            (1 for an analytic limit, 1/2 at a square-root edge); None with
            fewer than three eps values
        slow: convergence looks slower than linear in eps
    """
    eps_schedule: tuple[float, ...]
    cauchy_diff: float
    observed_order: Optional[float]
    slow: bool

    def to_dict(self) -> dict:
        return {
            "eps_schedule": list(self.eps_schedule),
            "cauchy_diff": self.cauchy_diff,
            "observed_order": self.observed_order,
            "slow": self.slow,
        }


@dataclass
class WeylEvaluation:
    """
    One m-function value with its provenance.

    Attributes:
        value: M as a d x d complex matrix
        side: PLUS for M_+, MINUS for M~_- / M_-
        site: n
        z: spectral parameter
        depth: truncation depth N that produced the value
        converged: adaptive stopping rule met (and certification passed)
        last_step: Siegel distance between the last two depths (nan when
            the values are not in the Siegel space)
        certify_gap: ||M(seed iI) - M(seed 2iI)|| when certified
        diagnostic: boundary-value convergence diagnostic
    """
    value: CMatrix
    side: Side
    site: int
    z: complex
    depth: int
    converged: bool
    last_step: float = 0.0
    certify_gap: Optional[float] = None
    diagnostic: Optional[BoundaryDiagnostic] = None

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def asymmetry(self) -> float:
        return operator_norm(self.value - self.value.T)

    def min_imag_eigenvalue(self) -> float:
        return min_eigenvalue(imag_part(self.value))

    def is_herglotz(self, tol: float = HERGLOTZ_TOL) -> bool:
        """Complex symmetric with positive definite imaginary part (within tol)."""
        return self.asymmetry() <= tol and self.min_imag_eigenvalue() > -tol

    def to_dict(self) -> dict:
        out = {
            "z_re": float(np.real(self.z)),
            "z_im": float(np.imag(self.z)),
            "side": self.side.value,
            "site": self.site,
            "value_re": self.value.real.tolist(),
            "value_im": self.value.imag.tolist(),
            "depth": self.depth,
            "converged": self.converged,
            "last_step": self.last_step,
        }
        if self.certify_gap is not None:
            out["certify_gap"] = self.certify_gap
        if self.diagnostic is not None:
            out["diagnostic"] = self.diagnostic.to_dict()
        return out


# ── Batched kernels ──────────────────────────────────────────────────


def _check_z(zs: np.ndarray) -> np.ndarray:
    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    if zs.ndim != 1 or zs.size == 0:
        raise InvalidInputError("spectral parameter grid must be a non-empty 1-d array")
    if not np.all(np.isfinite(zs)):
        raise InvalidInputError("spectral parameters must be finite")
    if np.any(zs.imag == 0):
        raise InvalidInputError("spectral parameters must have Im z != 0")
    return zs


def _z_stack(zs: np.ndarray, d: int) -> np.ndarray:
    return zs[:, None, None] * identity(d)[None]


def tail_fixed_point(tail: PeriodicTail, site: int, zs, side: Side) -> np.ndarray:
    """
    Exact m-function of a periodic tail at ``site``, for a grid of z.

    The period product Phi = T(site+p)...T(site+1), T(m) = (zI - B(m), -I; I, 0),
    maps (F(site+1); F(site)) to (F(site+p+1); F(site+p)). Its d smallest
    eigenvalues (in modulus) span the solutions decaying to the right, the d
    largest those decaying to the left. With columns (V1; V2) spanning the
    chosen subspace, M_+(site) = -V1 V2^{-1} and M~_-(site) = V1 V2^{-1}.

    Returns:
        stack of shape (len(zs), d, d)
    """
    zs = _check_z(zs)
    d = len(tail.pattern[0])
    k = zs.size
    eye = identity(d)
    phi = np.broadcast_to(identity(2 * d), (k, 2 * d, 2 * d)).copy()
    for j in range(1, tail.period + 1):
        t = np.zeros((k, 2 * d, 2 * d), dtype=np.complex128)
        t[:, :d, :d] = _z_stack(zs, d) - tail.at(site + j)
        t[:, :d, d:] = -eye
        t[:, d:, :d] = eye
        phi = t @ phi
    lam, vec = np.linalg.eig(phi)
    order = np.argsort(np.abs(lam), axis=-1, kind="stable")
    idx = order[:, :d] if side == Side.PLUS else order[:, d:]
    sel = np.take_along_axis(vec, idx[:, None, :], axis=-1)
    w = sel[:, :d, :] @ batched_inverse(sel[:, d:, :], site=site)
    w = 0.5 * (w + np.swapaxes(w, -1, -2))
    return -w if side == Side.PLUS else w


def _seed(
    spec: PotentialSpec, zs: np.ndarray, site: int, side: Side, opts: WeylOptions,
    scale: Optional[float] = None,
) -> np.ndarray:
    d = spec.dim
    if scale is None and opts.seed_mode == SeedMode.TAIL:
        tail = spec.right_tail() if side == Side.PLUS else spec.left_tail()
        if tail is not None:
            return tail_fixed_point(tail, site, zs, side)
    s = opts.seed_scale if scale is None else scale
    sign = np.sign(zs.imag)
    return (1j * s * sign)[:, None, None] * identity(d)[None]


def _plus_at_depth(
    spec: PotentialSpec, zs: np.ndarray, site: int, depth: int, seed: np.ndarray,
) -> np.ndarray:
    """M_+(site) from M_+(site + depth) = seed by the backward map."""
    d = spec.dim
    b = spec.window(site + 1, site + depth + 1)
    zi = _z_stack(zs, d)
    m = seed
    for j in range(depth - 1, -1, -1):
        m = -batched_inverse(zi - b[j] + m, site=site + j + 1)
    return m


def _tilde_minus_at_depth(
    spec: PotentialSpec, zs: np.ndarray, site: int, depth: int, seed: np.ndarray,
) -> np.ndarray:
    """M~_-(site) from M~_-(site - depth) = seed by the forward map."""
    d = spec.dim
    b = spec.window(site - depth + 1, site + 1)
    zi = _z_stack(zs, d)
    m = seed
    for j in range(depth):
        m = zi - b[j] - batched_inverse(m, site=site - depth + j)
    return m


def _last_step(a: np.ndarray, b: np.ndarray, z: complex) -> float:
    if z.imag < 0:
        a, b = np.conj(a), np.conj(b)
    try:
        return siegel_distance(0.5 * (a + a.T), 0.5 * (b + b.T))
    except SpectralError:
        return float("nan")


def _adaptive(
    spec: PotentialSpec,
    zs: np.ndarray,
    site: int,
    side: Side,
    opts: WeylOptions,
) -> list[WeylEvaluation]:
    if side == Side.PLUS:
        kernel = _plus_at_depth

        def seed_site(n):
            return site + n
    else:
        kernel = _tilde_minus_at_depth

        def seed_site(n):
            return site - n

    k = zs.size
    d = spec.dim
    tols = np.array([opts.tol_for(z) for z in zs])
    value = np.zeros((k, d, d), dtype=np.complex128)
    previous = np.zeros((k, d, d), dtype=np.complex128)
    last_diff = np.full(k, np.inf)
    depth = np.zeros(k, dtype=int)
    done = np.zeros(k, dtype=bool)
    have_value = np.zeros(k, dtype=bool)

    n = opts.n_start
    while True:
        active = np.flatnonzero(~done)
        za = zs[active]
        vals = kernel(spec, za, site, n, _seed(spec, za, seed_site(n), side, opts))
        diff = np.where(
            have_value[active],
            batched_operator_norm(vals - value[active]),
            np.inf,
        )
        finished = (diff < tols[active]) & (last_diff[active] < tols[active])
        previous[active] = value[active]
        value[active] = vals
        last_diff[active] = diff
        depth[active] = n
        have_value[active] = True
        done[active[finished]] = True
        logger.debug(
            "side %s site %d depth %d: %d/%d points converged",
            side.value, site, n, int(done.sum()), k,
        )
        if done.all() or 2 * n > opts.n_max:
            break
        n *= 2

    results = []
    for i, z in enumerate(zs):
        v = 0.5 * (value[i] + value[i].T)
        ev = WeylEvaluation(
            value=v,
            side=side,
            site=site,
            z=complex(z),
            depth=int(depth[i]),
            converged=bool(done[i]),
            last_step=_last_step(previous[i], value[i], complex(z)),
        )
        results.append(ev)
    missed = [ev for ev in results if not ev.converged]
    if missed:
        logger.warning(
            "m-function (side %s, site %d): %d of %d points not converged within depth %d "
            "(first z=%s)",
            side.value, site, len(missed), k, max(ev.depth for ev in missed), missed[0].z,
        )

    if opts.certify:
        _certify(spec, zs, site, side, results, kernel, seed_site, tols)
    return results


def _certify(spec, zs, site, side, results, kernel, seed_site, tols) -> None:
    depths = sorted({ev.depth for ev in results})
    for n in depths:
        idx = np.array([i for i, ev in enumerate(results) if ev.depth == n])
        seed = _seed(spec, zs[idx], seed_site(n), side, WeylOptions(), scale=2.0)
        alt = kernel(spec, zs[idx], site, n, seed)
        for j, i in enumerate(idx):
            ev = results[i]
            gap = operator_norm(0.5 * (alt[j] + alt[j].T) - ev.value)
            ev.certify_gap = gap
            if gap >= tols[i]:
                logger.warning("certification failed at z=%s: seed gap %.3e", ev.z, gap)
                ev.converged = False


def _run_chunked(
    fn: Callable[[np.ndarray], list[WeylEvaluation]], zs: np.ndarray, jobs: int,
) -> list[WeylEvaluation]:
    if jobs <= 1 or zs.size < 2 * jobs:
        return fn(zs)
    chunks = [c for c in np.array_split(zs, jobs) if c.size]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(fn, chunks))
    return [ev for part in parts for ev in part]


# ── Public operations ────────────────────────────────────────────────


def m_plus_grid(
    spec: PotentialSpec,
    zs: Sequence[complex],
    site: int = 0,
    opts: Optional[WeylOptions] = None,
    jobs: int = 1,
) -> list[WeylEvaluation]:
    """M_+(site, z) for every z of a grid, in grid order."""
    opts = opts or WeylOptions()
    zs = _check_z(zs)
    return _run_chunked(lambda c: _adaptive(spec, c, site, Side.PLUS, opts), zs, jobs)


def m_tilde_minus_grid(
    spec: PotentialSpec,
    zs: Sequence[complex],
    site: int = 0,
    opts: Optional[WeylOptions] = None,
    jobs: int = 1,
) -> list[WeylEvaluation]:
    """M~_-(site, z) for every z of a grid, in grid order."""
    opts = opts or WeylOptions()
    zs = _check_z(zs)
    return _run_chunked(lambda c: _adaptive(spec, c, site, Side.MINUS, opts), zs, jobs)


def m_plus(
    spec: PotentialSpec, z: complex, opts: Optional[WeylOptions] = None, site: int = 0,
) -> WeylEvaluation:
    """
    M_+(site, z) by the backward recursion M(n-1) = -[(zI - B(n)) + M(n)]^{-1}.

    Im z < 0 is accepted and gives the conjugate branch.

    Raises:
        InvalidInputError: Im z == 0
        IllConditionedError: singular inverse during the iteration
    """
    return m_plus_grid(spec, [z], site=site, opts=opts)[0]


def m_tilde_minus(
    spec: PotentialSpec, z: complex, opts: Optional[WeylOptions] = None, site: int = 0,
) -> WeylEvaluation:
    """M~_-(site, z) by the forward recursion M~(k) = (zI - B(k)) - M~(k-1)^{-1}."""
    return m_tilde_minus_grid(spec, [z], site=site, opts=opts)[0]


def m_minus(
    spec: PotentialSpec, z: complex, opts: Optional[WeylOptions] = None, site: int = 0,
) -> WeylEvaluation:
    """M_-(site, z) = B(site) - zI + M~_-(site, z)."""
    tilde = m_tilde_minus(spec, z, opts=opts, site=site)
    value = spec.at(site) - z * identity(spec.dim) + tilde.value
    return WeylEvaluation(
        value=value,
        side=Side.MINUS,
        site=site,
        z=tilde.z,
        depth=tilde.depth,
        converged=tilde.converged,
        last_step=tilde.last_step,
        certify_gap=tilde.certify_gap,
    )


def m_tilde_minus_halfline_grid(
    spec: PotentialSpec,
    n: int,
    zs: Sequence[complex],
    seed: Optional[CMatrix] = None,
) -> list[WeylEvaluation]:
    """
    M~_-(n, z) of the half-line problem on sites >= 1, for a grid of z.

    Without ``seed`` the Dirichlet condition F(0) = 0 gives M~_-(1) = zI - B(1);
    with a seed W (a point of the Siegel space) M~_-(1) = W. Both continue
    with M~_-(k) = (zI - B(k)) - M~_-(k-1)^{-1} for k = 2..n, that is, the
    action of P_-(n) on M~_-(1).
    """
    zs = _check_z(zs)
    if n < 1:
        raise InvalidInputError(f"half-line site must be >= 1, got {n}")
    d = spec.dim
    if seed is None:
        start = _z_stack(zs, d) - spec.at(1)
    else:
        w = np.asarray(seed, dtype=np.complex128)
        start = np.broadcast_to(w, (zs.size, d, d)).copy()
    values = _tilde_minus_at_depth(spec, zs, n, n - 1, start) if n > 1 else start
    values = 0.5 * (values + np.swapaxes(values, -1, -2))
    return [
        WeylEvaluation(
            value=v, side=Side.MINUS, site=n, z=complex(z), depth=n - 1, converged=True,
        )
        for z, v in zip(zs, values)
    ]


def m_tilde_minus_halfline(
    spec: PotentialSpec,
    n: int,
    z: complex,
    seed: Optional[CMatrix] = None,
) -> WeylEvaluation:
    """Single-point m_tilde_minus_halfline_grid."""
    return m_tilde_minus_halfline_grid(spec, n, [z], seed=seed)[0]


def resolvent_oracle(spec: PotentialSpec, z: complex, size: int) -> CMatrix:
    """
    Top d x d block of (J_N - z)^{-1} for the truncation to sites 1..N.

    Independent of the contraction iteration; agrees with m_plus up to the
    truncation error.

    Raises:
        InvalidInputError: Im z == 0 or N < 2
        IllConditionedError: (J_N - z) numerically singular
    """
    z = complex(z)
    if z.imag == 0:
        raise InvalidInputError("resolvent oracle needs Im z != 0")
    d = spec.dim
    j = truncated_operator(spec, size).astype(np.complex128)
    j[np.diag_indices_from(j)] -= z
    rhs = np.zeros((size * d, d), dtype=np.complex128)
    rhs[:d, :d] = np.eye(d)
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            x = scipy.linalg.solve(j, rhs, assume_a="sym")
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
            raise IllConditionedError(
                f"truncated resolvent is singular at z={z}: {exc}", float("inf"),
            ) from exc
    return x[:d, :d]


# ── Boundary values ──────────────────────────────────────────────────


def boundary_value(
    spec: PotentialSpec,
    t: float,
    eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
    side: Side = Side.PLUS,
    site: int = 0,
    opts: Optional[WeylOptions] = None,
) -> WeylEvaluation:
    """
    M(t + i eps) along a strictly decreasing eps schedule.

    Returns the value at the smallest eps, with a BoundaryDiagnostic built
    from the last evaluations. ``side`` picks M_+ (PLUS) or M~_- (MINUS).
    No extrapolation is applied.
    """
    eps = tuple(float(e) for e in eps_schedule)
    if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise InvalidInputError(f"eps schedule must be positive and strictly decreasing: {eps}")
    zs = np.array([t + 1j * e for e in eps])
    grid = m_plus_grid if side == Side.PLUS else m_tilde_minus_grid
    evals = grid(spec, zs, site=site, opts=opts)
    final = evals[-1]
    final.diagnostic = _boundary_diagnostic(eps, [ev.value for ev in evals])
    final.converged = all(ev.converged for ev in evals)
    return final


def _boundary_diagnostic(eps: tuple[float, ...], values: list[CMatrix]) -> BoundaryDiagnostic:
    if len(values) < 2:
        return BoundaryDiagnostic(eps, 0.0, None, False)
    diffs = [operator_norm(b - a) for a, b in zip(values, values[1:])]
    steps = [a - b for a, b in zip(eps, eps[1:])]
    order = None
    if len(diffs) >= 2 and diffs[-1] > 0 and diffs[-2] > 0:
        order = math.log(diffs[-1] / diffs[-2]) / math.log(steps[-1] / steps[-2])
    if order is not None:
        slow = order < SLOW_ORDER
    else:
        slow = diffs[-1] / steps[-1] > SLOW_RATIO
    return BoundaryDiagnostic(eps, diffs[-1], order, slow)


def ac_density(
    spec: PotentialSpec,
    t: float,
    eps: float = DEFAULT_BOUNDARY_EPS,
    opts: Optional[WeylOptions] = None,
) -> CMatrix:
    """pi^{-1} Im M_+(t + i eps), Hermitian positive semidefinite."""
    if not eps > 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    return imag_part(m_plus(spec, t + 1j * eps, opts=opts).value) / math.pi


def ac_density_grid(
    spec: PotentialSpec,
    ts: Sequence[float],
    eps: float = DEFAULT_BOUNDARY_EPS,
    opts: Optional[WeylOptions] = None,
    jobs: int = 1,
) -> np.ndarray:
    """ac_density on a grid, shape (len(ts), d, d)."""
    zs = np.asarray(ts, dtype=float) + 1j * eps
    evals = m_plus_grid(spec, zs, opts=opts, jobs=jobs)
    return np.array([imag_part(ev.value) for ev in evals]) / math.pi


@dataclass
class RankClassification:
    """
    Rank of Im M(t + i eps) on a grid.

    Attributes:
        ts: grid points
        ranks: eigenvalue count above rank_tol per point
        dim: d
        full_set: grid points with rank == d (estimate of the full-multiplicity set)
    """
    ts: list[float]
    ranks: list[int]
    dim: int
    eps: float
    rank_tol: float
    full_set: list[float] = field(default_factory=list)

    def as_map(self) -> dict[float, int]:
        return dict(zip(self.ts, self.ranks))

    def to_dict(self) -> dict:
        return {
            "ts": self.ts,
            "ranks": self.ranks,
            "dim": self.dim,
            "eps": self.eps,
            "rank_tol": self.rank_tol,
            "full_set": self.full_set,
        }


def rank_classify(
    spec: PotentialSpec,
    t_grid: Sequence[float],
    eps: float = DEFAULT_BOUNDARY_EPS,
    rank_tol: float = DEFAULT_RANK_TOL,
    opts: Optional[WeylOptions] = None,
    jobs: int = 1,
) -> RankClassification:
    """Count eigenvalues of Im M_+(t + i eps) above rank_tol at every grid point."""
    ts = [float(t) for t in t_grid]
    if not ts:
        raise InvalidInputError("rank classification needs a non-empty grid")
    evals = m_plus_grid(spec, np.array(ts) + 1j * eps, opts=opts, jobs=jobs)
    ranks = [int(np.sum(hermitian_eigh(imag_part(ev.value))[0] > rank_tol)) for ev in evals]
    full = [t for t, r in zip(ts, ranks) if r == spec.dim]
    return RankClassification(ts, ranks, spec.dim, eps, rank_tol, full)


# ── Solutions and analyticity ────────────────────────────────────────


def weyl_solution(
    spec: PotentialSpec,
    z: complex,
    length: int,
    opts: Optional[WeylOptions] = None,
) -> SampledSequence:
    """
    F(j) = U(j) + M V(j) for j = 0..length, with F(0) = -I, F(1) = M_+(0).

    Built by the stable product F(j+1) = -M_+(j) F(j); the values M_+(j)
    come from one backward sweep seeded by the converged M_+(length).
    """
    if length < 1:
        raise InvalidInputError(f"solution length must be >= 1, got {length}")
    opts = opts or WeylOptions()
    zs = _check_z([z])
    far = m_plus_grid(spec, zs, site=length, opts=opts)[0]
    d = spec.dim
    b = spec.window(1, length + 1)
    ms = np.zeros((length + 1, d, d), dtype=np.complex128)
    ms[length] = far.value
    zi = complex(z) * identity(d)
    for j in range(length, 0, -1):
        ms[j - 1] = -batched_inverse(zi - b[j - 1] + ms[j], site=j)
    f = np.zeros((length + 1, d, d), dtype=np.complex128)
    f[0] = -identity(d)
    for j in range(length):
        f[j + 1] = -ms[j] @ f[j]
    return SampledSequence(0, f)


def energy_residual(
    spec: PotentialSpec,
    z: complex,
    opts: Optional[WeylOptions] = None,
    length: Optional[int] = None,
) -> float:
    """
    ||Im z sum_{j=1}^{K} F(j)^* F(j) - Im M_+(z)||, K defaulting to the m_plus depth.
    """
    ev = m_plus(spec, z, opts=opts)
    k = length or ev.depth
    f = weyl_solution(spec, z, k, opts=opts)
    total = sum(f[j].conj().T @ f[j] for j in range(1, k + 1))
    return operator_norm(complex(z).imag * total - imag_part(f[1]))


def cauchy_riemann_residual(
    spec: PotentialSpec,
    z: complex,
    h: float = 1e-4,
    opts: Optional[WeylOptions] = None,
    side: Side = Side.PLUS,
) -> float:
    """
    ||dM/dy - i dM/dx|| by central differences of step h around z.

    Zero for an analytic function up to O(h^2) truncation and O(tol / h) noise.
    """
    z = complex(z)
    if abs(z.imag) <= h:
        raise InvalidInputError(f"step {h} reaches the real axis from z={z}")
    zs = np.array([z + h, z - h, z + 1j * h, z - 1j * h])
    grid = m_plus_grid if side == Side.PLUS else m_tilde_minus_grid
    v = [ev.value for ev in grid(spec, zs, opts=opts)]
    dx = (v[0] - v[1]) / (2 * h)
    dy = (v[2] - v[3]) / (2 * h)
    return operator_norm(dy - 1j * dx)
