# -*- encoding: utf-8 -*-
"""
Harmonic measure of the upper half plane and value-distribution integrals.

    omega_z(S) = (1/pi) sum_i [arctan((b_i - x)/y) - arctan((a_i - x)/y)]

for z = x + iy and S a finite union of closed intervals [a_i, b_i]. This is
the Poisson integral (y/pi) int_S dt / ((t - x)^2 + y^2), normalized so that
omega_z(R) = 1. For real boundary values g the measure degenerates to the
indicator of S, with endpoints of S weighted 1/2.

Value-distribution integrals int_A omega_{c^* M(t) c}(S) dt use a composite
midpoint rule (default 2048 nodes per unit length of A).

Usage:
    s = IntervalUnion.of([(-1.0, 1.0)])
    harmonic_measure(1j, s)                          # 0.5
    grid = QuadratureGrid.midpoint(IntervalUnion.of([(0.0, 1.0)]))
    vd_integral(lambda ts: [1j * np.eye(1)] * len(ts), [1.0], s, grid)
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from matrix_weyl.errors import InvalidInputError
from matrix_weyl.siegel import compress, pseudo_hyperbolic

DEFAULT_POINTS_PER_UNIT = 2048
# Im g at or below this magnitude counts as a real boundary value
REAL_AXIS_TOL = 1e-14


def _parse_bound(x) -> float:
    if isinstance(x, str):
        low = x.strip().lower()
        if low in ("inf", "+inf", "infinity"):
            return math.inf
        if low in ("-inf", "-infinity"):
            return -math.inf
    return float(x)


def _dump_bound(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class IntervalUnion:
    """
    Finite union of disjoint closed intervals, sorted; ends may be +-inf.

    Build with IntervalUnion.of(...), which sorts and merges overlaps; the
    raw constructor only validates.
    """
    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev_end = -math.inf
        for i, (a, b) in enumerate(self.intervals):
            if math.isnan(a) or math.isnan(b) or a > b:
                raise InvalidInputError(f"invalid interval [{a}, {b}]")
            if i and a <= prev_end:
                raise InvalidInputError("intervals must be sorted and disjoint")
            prev_end = b

    @classmethod
    def of(cls, pairs: Iterable[Sequence]) -> "IntervalUnion":
        items = sorted((_parse_bound(a), _parse_bound(b)) for a, b in pairs)
        merged: list[tuple[float, float]] = []
        for a, b in items:
            if a > b:
                raise InvalidInputError(f"invalid interval [{a}, {b}]")
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return cls(tuple(merged))

    @classmethod
    def real_line(cls) -> "IntervalUnion":
        return cls(((-math.inf, math.inf),))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_bounded(self) -> bool:
        return all(math.isfinite(a) and math.isfinite(b) for a, b in self.intervals)

    def measure(self) -> float:
        """Lebesgue measure; inf when a sentinel is present."""
        return float(sum(b - a for a, b in self.intervals))

    def indicator(self, t: float) -> float:
        """1 inside, 1/2 on an endpoint, 0 outside (a degenerate [a, a] counts 1/2 at a)."""
        for a, b in self.intervals:
            if t == a or t == b:
                return 0.5
            if a < t < b:
                return 1.0
        return 0.0

    def reflect(self) -> "IntervalUnion":
        """-S."""
        return IntervalUnion.of((-b, -a) for a, b in self.intervals)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return IntervalUnion.of(out)

    def to_list(self) -> list:
        return [[_dump_bound(a), _dump_bound(b)] for a, b in self.intervals]

    @classmethod
    def from_list(cls, data: Sequence[Sequence]) -> "IntervalUnion":
        return cls.of(data)

    @classmethod
    def from_points(cls, ts: Sequence[float]) -> "IntervalUnion":
        """Union of maximal runs of a uniform grid, each widened by half a step."""
        pts = np.sort(np.asarray(ts, dtype=float))
        if pts.size == 0:
            return cls()
        if pts.size == 1:
            return cls(((float(pts[0]), float(pts[0])),))
        step = float(np.min(np.diff(pts)))
        breaks = np.flatnonzero(np.diff(pts) > 1.5 * step)
        starts = np.concatenate([[0], breaks + 1])
        stops = np.concatenate([breaks, [pts.size - 1]])
        return cls.of(
            (pts[i] - step / 2, pts[j] + step / 2) for i, j in zip(starts, stops)
        )


def _check_upper(z: complex) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)) or z.imag <= 0:
        raise InvalidInputError(f"harmonic measure needs Im z > 0, got {z}")
    return z


def harmonic_measure(z: complex, s: IntervalUnion) -> float:
    """
    omega_z(S) in [0, 1].

    Raises:
        InvalidInputError: Im z <= 0
    """
    z = _check_upper(z)
    x, y = z.real, z.imag
    total = 0.0
    for a, b in s.intervals:
        total += math.atan((b - x) / y) - math.atan((a - x) / y)
    return min(max(total / math.pi, 0.0), 1.0)


def boundary_omega(g: complex, s: IntervalUnion) -> float:
    """
    omega_g(S) for Im g >= 0: harmonic measure above the axis, the
    endpoint-halved indicator on it.

    Raises:
        InvalidInputError: Im g clearly negative (below -1e-14)
    """
    g = complex(g)
    if g.imag > REAL_AXIS_TOL:
        return harmonic_measure(g, s)
    if g.imag < -REAL_AXIS_TOL:
        raise InvalidInputError(f"boundary value {g} lies below the real axis")
    return s.indicator(g.real)


def lipschitz_gap(z: complex, w: complex, s: IntervalUnion) -> tuple[float, float]:
    """(|omega_w(S) - omega_z(S)|, gamma(w, z)); the first never exceeds the second."""
    return abs(harmonic_measure(w, s) - harmonic_measure(z, s)), pseudo_hyperbolic(z, w)


@dataclass(frozen=True)
class QuadratureGrid:
    """Composite midpoint nodes and weights over a bounded IntervalUnion."""
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def midpoint(
        cls, a: IntervalUnion, points_per_unit: int = DEFAULT_POINTS_PER_UNIT,
    ) -> "QuadratureGrid":
        if not a.is_bounded:
            raise InvalidInputError("quadrature needs a bounded set")
        nodes, weights = [], []
        for lo, hi in a.intervals:
            length = hi - lo
            if length <= 0:
                continue
            # even node counts keep the even/odd error estimate balanced
            n = max(2, int(math.ceil(length * points_per_unit)))
            n += n % 2
            h = length / n
            nodes.append(lo + h * (np.arange(n) + 0.5))
            weights.append(np.full(n, h))
        if not nodes:
            raise InvalidInputError("quadrature set has zero measure")
        return cls(np.concatenate(nodes), np.concatenate(weights))

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def measure(self) -> float:
        return float(self.weights.sum())


@dataclass
class VDResult:
    """Value-distribution integral with its quadrature error estimate."""
    value: float
    error_estimate: float
    measure: float
    nodes: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "measure": self.measure,
            "nodes": self.nodes,
        }


Samples = Union[Callable[[np.ndarray], Sequence], Mapping[float, np.ndarray], Sequence]


def _sample_values(samples: Samples, grid: QuadratureGrid) -> Sequence:
    if callable(samples):
        return samples(grid.nodes)
    if isinstance(samples, Mapping):
        try:
            return [samples[float(t)] for t in grid.nodes]
        except KeyError as exc:
            raise InvalidInputError(f"no sample at quadrature node {exc}") from None
    if len(samples) != grid.size:
        raise InvalidInputError(f"{len(samples)} samples for {grid.size} quadrature nodes")
    return samples


def integrand_values(samples: Samples, c, s: IntervalUnion, grid: QuadratureGrid) -> np.ndarray:
    """omega_{c^* M(t) c}(S) at every quadrature node."""
    values = _sample_values(samples, grid)
    return np.array([boundary_omega(compress(c, m), s) for m in values])


def vd_integral(samples: Samples, c, s: IntervalUnion, grid: QuadratureGrid) -> VDResult:
    """
    int_A omega_{c^* M(t) c}(S) dt by the composite midpoint rule.

    Args:
        samples: M at the quadrature nodes, as a callable on the node array,
            a mapping t -> M, or a sequence aligned with grid.nodes
        c: compression vector, ||c|| <= 1
        s: target set S
        grid: midpoint grid over A

    Returns:
        VDResult; the error estimate is half the gap between the two
        interleaved half-resolution sums, a conservative O(h) bound
    """
    if grid.size == 0:
        raise InvalidInputError("empty quadrature grid")
    f = integrand_values(samples, c, s, grid)
    return vd_from_integrand(f, grid)


def vd_from_integrand(f: np.ndarray, grid: QuadratureGrid) -> VDResult:
    """Quadrature of precomputed integrand values on ``grid``."""
    value = float(np.dot(f, grid.weights))
    even = float(np.dot(f[0::2], 2.0 * grid.weights[0::2]))
    odd = float(np.dot(f[1::2], 2.0 * grid.weights[1::2]))
    floor = 1e-13 * grid.measure()
    return VDResult(
        value=value,
        error_estimate=max(abs(even - odd) / 2.0, floor),
        measure=grid.measure(),
        nodes=grid.size,
    )
