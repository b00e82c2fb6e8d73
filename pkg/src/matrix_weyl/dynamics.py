# -*- encoding: utf-8 -*-
"""
Shift dynamics on the space of bounded potentials.

The metric d(A, B) = sum_n 2^{-|n|} ||A(n) - B(n)|| makes the set of
whole-line potentials bounded by C compact, and the shift (S^k B)(n) = B(n + k)
acts on it by homeomorphisms. Half-line potentials enter extended by zero.

omega_limit collects the limit points of S^n B as n -> inf:
    exact-periodic       declared periodic (or eventually periodic) tails give
                         their p phases; decaying potentials give zero
    numeric-clustering   every other kind: greedy leader clustering of the
                         windows S^n B |_{|j| <= 64}, n in [n_max/2, n_max]

Usage:
    omega = omega_limit(spec)
    omega.representatives
    dist_to_omega(spec, omega, [8, 16, 32])
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional, Sequence

import numpy as np

from matrix_weyl.errors import InvalidInputError
from matrix_weyl.matcore import batched_operator_norm
from matrix_weyl.potentials import (
    PeriodicTail,
    PotentialKind,
    PotentialSpec,
    Support,
    freeze_matrix,
)

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 64
DEFAULT_N_MAX = 4096
DEFAULT_CLUSTER_TOL = 1e-6
MAX_REPRESENTATIVES = 256


class OmegaMethod(Enum):
    EXACT = "exact-periodic"
    NUMERIC = "numeric-clustering"


class MetricValue(NamedTuple):
    """Partial sum over |n| <= n_max; the true distance lies in [value, value + tail_bound]."""
    value: float
    tail_bound: float

    @property
    def upper(self) -> float:
        return self.value + self.tail_bound


def _weights(window: int) -> np.ndarray:
    return 2.0 ** (-np.abs(np.arange(-window, window + 1)))


def potential_metric(
    a: PotentialSpec, b: PotentialSpec, n_max: int = DEFAULT_WINDOW,
) -> MetricValue:
    """
    d(A, B) truncated to |n| <= n_max, with the tail bound 4 max(C_A, C_B) 2^{-n_max}.

    Raises:
        InvalidInputError: channel dimensions differ, or n_max < 0
    """
    if a.dim != b.dim:
        raise InvalidInputError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if n_max < 0:
        raise InvalidInputError(f"n_max must be >= 0, got {n_max}")
    diff = a.window(-n_max, n_max + 1) - b.window(-n_max, n_max + 1)
    value = float(np.dot(_weights(n_max), batched_operator_norm(diff)))
    return MetricValue(value, 4.0 * max(a.bound, b.bound) * 2.0 ** (-n_max))


def shift(spec: PotentialSpec, k: int) -> PotentialSpec:
    """S^k B, so that shift(B, k).at(n) == B.at(n + k)."""
    return spec.shifted(k)


@dataclass
class OmegaLimitApprox:
    """
    Finite approximation of the omega-limit set.

    Attributes:
        representatives: whole-line potentials, pairwise farther apart than cluster_tol
        method: exact-periodic or numeric-clustering
        convergence_trace: (n, distance from S^n B to the nearest representative)
        stable: numeric clustering found no new cluster in its last quarter
        cluster_tol: clustering tolerance
        window: metric truncation used for clustering and the trace
    """
    representatives: list[PotentialSpec]
    method: OmegaMethod
    convergence_trace: list[tuple[int, float]] = field(default_factory=list)
    stable: bool = True
    cluster_tol: float = DEFAULT_CLUSTER_TOL
    window: int = DEFAULT_WINDOW

    @property
    def tail_bound(self) -> float:
        c = max((r.bound for r in self.representatives), default=0.0)
        return 4.0 * c * 2.0 ** (-self.window)

    def contains_zero(self, tol: Optional[float] = None) -> bool:
        tol = self.cluster_tol if tol is None else tol
        return any(
            potential_metric(r, _zero_like(r), self.window).value <= tol
            for r in self.representatives
        )

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "stable": self.stable,
            "cluster_tol": self.cluster_tol,
            "window": self.window,
            "representatives": [r.to_dict() for r in self.representatives],
            "convergence_trace": [[n, d] for n, d in self.convergence_trace],
        }


def _zero_like(spec: PotentialSpec) -> PotentialSpec:
    return PotentialSpec(dim=spec.dim, bound=spec.bound, support=Support.WHOLE_LINE)


def _phase_representatives(spec: PotentialSpec, tail: PeriodicTail) -> list[PotentialSpec]:
    p = tail.period
    reps: list[PotentialSpec] = []
    seen = set()
    for j in range(p):
        rotated = tail.pattern[j:] + tail.pattern[:j]
        if rotated in seen:
            continue
        seen.add(rotated)
        if tail.is_zero():
            reps.append(_zero_like(spec))
        elif len(set(rotated)) == 1:
            reps.append(PotentialSpec(
                dim=spec.dim, bound=spec.bound, support=Support.WHOLE_LINE,
                kind=PotentialKind.CONSTANT, matrices=(rotated[0],),
            ))
        else:
            reps.append(PotentialSpec(
                dim=spec.dim, bound=spec.bound, support=Support.WHOLE_LINE,
                kind=PotentialKind.PERIODIC, matrices=rotated,
            ))
    return reps


def _window_spec(spec: PotentialSpec, values: np.ndarray, window: int) -> PotentialSpec:
    table = tuple(
        (j - window, freeze_matrix(values[j], spec.dim))
        for j in range(values.shape[0])
        if np.any(values[j] != 0.0)
    )
    if not table:
        return _zero_like(spec)
    return PotentialSpec(
        dim=spec.dim, bound=spec.bound, support=Support.WHOLE_LINE,
        kind=PotentialKind.EXPLICIT, table=table,
    )


def _cluster(
    spec: PotentialSpec, n_max: int, cluster_tol: float, window: int, max_reps: int,
) -> tuple[list[PotentialSpec], bool]:
    lo = n_max // 2
    values = spec.window(lo - window, n_max + window + 1)
    weights = _weights(window)
    span = 2 * window + 1
    leaders: list[np.ndarray] = []
    last_new = -1
    count = n_max - lo + 1
    for i in range(count):
        cand = values[i:i + span]
        if leaders:
            stack = np.stack(leaders)
            dists = batched_operator_norm(stack - cand[None]) @ weights
            if np.min(dists) <= cluster_tol:
                continue
        if len(leaders) >= max_reps:
            logger.warning(
                "omega-limit clustering hit %d representatives; result is partial", max_reps,
            )
            return [_window_spec(spec, w, window) for w in leaders], False
        leaders.append(cand.copy())
        last_new = i
    stable = last_new < (3 * count) // 4
    if not stable:
        logger.warning(
            "omega-limit clustering still finds new clusters near n = %d; result is partial",
            lo + last_new,
        )
    return [_window_spec(spec, w, window) for w in leaders], stable


def omega_limit(
    spec: PotentialSpec,
    n_max: int = DEFAULT_N_MAX,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    window: int = DEFAULT_WINDOW,
    max_representatives: int = MAX_REPRESENTATIVES,
) -> OmegaLimitApprox:
    """
    Approximate omega(B) for a half-line potential.

    Declared periodic tails (periodic, constant, zero, explicit with tail)
    give one representative per distinct phase; decaying potentials give the
    zero potential; sparse and random potentials go through numeric
    clustering, which reports ``stable=False`` when it does not settle.

    Raises:
        InvalidInputError: whole-line spec, or n_max too small for the window
    """
    if spec.support != Support.HALF_LINE:
        raise InvalidInputError("omega_limit expects a half-line potential")
    if n_max < 4:
        raise InvalidInputError(f"n_max must be >= 4, got {n_max}")
    tail = spec.right_tail()
    if spec.kind == PotentialKind.DECAYING:
        reps, method, stable = [_zero_like(spec)], OmegaMethod.EXACT, True
    elif tail is not None and tail.exact:
        reps, method, stable = _phase_representatives(spec, tail), OmegaMethod.EXACT, True
    else:
        reps, stable = _cluster(spec, n_max, cluster_tol, window, max_representatives)
        method = OmegaMethod.NUMERIC
    omega = OmegaLimitApprox(reps, method, stable=stable, cluster_tol=cluster_tol, window=window)
    trace_n = [2 ** k for k in range(3, n_max.bit_length()) if 2 ** k <= n_max]
    omega.convergence_trace = list(zip(trace_n, dist_to_omega(spec, omega, trace_n)))
    logger.info(
        "omega-limit (%s): %d representative(s), stable=%s",
        method.value, len(reps), stable,
    )
    return omega


def dist_to_omega(
    spec: PotentialSpec, omega: OmegaLimitApprox, n_list: Sequence[int],
) -> list[float]:
    """min over representatives of d(S^n B, rep), for each n."""
    if not omega.representatives:
        raise InvalidInputError("omega-limit approximation is empty")
    out = []
    for n in n_list:
        shifted = shift(spec, int(n))
        out.append(min(
            potential_metric(shifted, rep, omega.window).value for rep in omega.representatives
        ))
    return out
