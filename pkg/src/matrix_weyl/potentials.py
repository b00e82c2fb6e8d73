# -*- encoding: utf-8 -*-
"""
Potential specifications - data model for matrix-valued potentials B(n).

A PotentialSpec is an immutable, lazily evaluated generator of a real
symmetric d x d sequence B(n) bounded by C, on the half line {1, 2, ...}
or on the whole line. Half-line specs are extended by zero to every
n <= 0, so every spec answers whole-line queries.

Kinds:
    zero        B(n) = 0
    constant    B(n) = B0
    periodic    B(n) = P[n mod p]                (anchored at site 0)
    decaying    B(n) = B0 * n^(-alpha)          (whole line: |n|, B(0) = B0)
    sparse      B(n) = B0 at bump sites, 0 elsewhere (whole line: mirrored)
    random      per-site PCG64 stream keyed by (seed, site)
    explicit    site -> matrix table, default zero, optional periodic tail
                B(n) = tail[(n - tail_start) mod p] for n >= tail_start

Shifts (S^k B)(n) = B(n + k) are carried by ``offset``; the half-line
extension by zero applies to the unshifted site n + offset.

JSON form:
    {
        "dim": 2,
        "bound": 2.0,
        "support": "half-line",
        "kind": "periodic",
        "offset": 0,
        "parameters": {"matrices": [[[0, 1], [1, 0]], [[1, 0], [0, -1]]]}
    }

Explicit tables are lists of ``[site, [row-major entries]]``.
"""

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from matrix_weyl.errors import InvalidInputError, SpecViolationError
from matrix_weyl.matcore import MAX_DIM

Matrix = tuple[tuple[float, ...], ...]

_SYMMETRY_TOL = 1e-12
_SITE_MASK = (1 << 64) - 1


class Support(Enum):
    """Where the potential is defined before extension by zero."""
    HALF_LINE = "half-line"
    WHOLE_LINE = "whole-line"


class PotentialKind(Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    PERIODIC = "periodic"
    DECAYING = "decaying"
    SPARSE = "sparse"
    RANDOM = "random"
    EXPLICIT = "explicit"


def freeze_matrix(m, dim: Optional[int] = None) -> Matrix:
    """
    Convert a matrix-like value to a hashable nested tuple of floats.

    Accepts scalars (d = 1), nested lists, flat row-major lists and arrays.
    """
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        side = dim if dim is not None else int(round(np.sqrt(arr.size)))
        if side * side != arr.size:
            raise InvalidInputError(f"cannot reshape {arr.size} entries into a square matrix")
        arr = arr.reshape(side, side)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"potential matrix must be square, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InvalidInputError(f"expected a {dim}x{dim} matrix, got {arr.shape[0]}x{arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("potential matrix has non-finite entries")
    return tuple(tuple(float(x) for x in row) for row in arr)


def thaw_matrix(m: Matrix) -> np.ndarray:
    return np.array(m, dtype=float)


@dataclass(frozen=True)
class PeriodicTail:
    """
    Periodic pattern a potential follows (exactly or asymptotically) far out.

    Attributes:
        pattern: period matrices, B(n) = pattern[(n - anchor) mod p]
        anchor: site where pattern[0] sits
        exact: True when the potential coincides with the pattern in the tail,
            False when it only converges to it (decaying, sparse)
    """
    pattern: tuple[Matrix, ...]
    anchor: int = 0
    exact: bool = True

    @property
    def period(self) -> int:
        return len(self.pattern)

    def at(self, n: int) -> np.ndarray:
        return thaw_matrix(self.pattern[(n - self.anchor) % self.period])

    def window(self, start: int, stop: int) -> np.ndarray:
        mats = np.array([thaw_matrix(m) for m in self.pattern])
        idx = (np.arange(start, stop) - self.anchor) % self.period
        return mats[idx]

    def is_zero(self) -> bool:
        return all(x == 0.0 for m in self.pattern for row in m for x in row)


@dataclass(frozen=True)
class PotentialSpec:
    """
    Immutable generator for a real symmetric matrix sequence B(n).

    Attributes:
        dim: channel dimension d (1..16)
        bound: C, every generated B(n) satisfies ||B(n)|| <= C
        support: half-line (sites >= 1) or whole-line
        kind: generator family
        matrices: B0 for constant/decaying/sparse, the period for periodic,
            the tail pattern for explicit
        alpha: decay exponent for decaying
        gaps: sparse bump gaps; bump sites are cumulative sums of gaps
        growth: sparse gap multiplier once ``gaps`` is exhausted
        seed: random PRNG seed
        amplitude: random entry amplitude
        table: explicit (site, matrix) entries
        tail_start: first site of the explicit periodic tail
        offset: shift k of (S^k B)(n) = B(n + k)
    """
    dim: int
    bound: float
    support: Support = Support.HALF_LINE
    kind: PotentialKind = PotentialKind.ZERO
    matrices: tuple[Matrix, ...] = ()
    alpha: float = 1.0
    gaps: tuple[int, ...] = (1,)
    growth: int = 2
    seed: int = 0
    amplitude: float = 0.0
    table: tuple[tuple[int, Matrix], ...] = ()
    tail_start: Optional[int] = None
    offset: int = 0
    _table_index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not 1 <= self.dim <= MAX_DIM:
            raise InvalidInputError(f"dim must be in 1..{MAX_DIM}, got {self.dim}")
        if not self.bound > 0:
            raise InvalidInputError(f"bound must be positive, got {self.bound}")
        for m in self.matrices:
            if len(m) != self.dim:
                raise InvalidInputError("matrix dimension does not match dim")
        for _, m in self.table:
            if len(m) != self.dim:
                raise InvalidInputError("table matrix dimension does not match dim")
        needs_matrices = {
            PotentialKind.CONSTANT: 1,
            PotentialKind.DECAYING: 1,
            PotentialKind.SPARSE: 1,
            PotentialKind.PERIODIC: None,
        }
        if self.kind in needs_matrices:
            expected = needs_matrices[self.kind]
            if not self.matrices or (expected is not None and len(self.matrices) != expected):
                raise InvalidInputError(f"{self.kind.value} potential needs matrices")
        if self.kind == PotentialKind.DECAYING and not self.alpha > 0:
            raise InvalidInputError(f"decay exponent must be positive, got {self.alpha}")
        if self.kind == PotentialKind.SPARSE:
            if not self.gaps or any(g < 1 for g in self.gaps) or self.growth < 1:
                raise InvalidInputError("sparse gaps and growth must be positive")
        if self.kind == PotentialKind.RANDOM and self.amplitude < 0:
            raise InvalidInputError("random amplitude must be non-negative")
        if self.kind == PotentialKind.EXPLICIT and self.matrices and self.tail_start is None:
            raise InvalidInputError("explicit tail needs tail_start")
        object.__setattr__(
            self, "_table_index", {site: m for site, m in self.table},
        )

    # ── Evaluation ───────────────────────────────────────────────────

    def raw_at(self, m: int) -> np.ndarray:
        """B at the unshifted site m, without bound checks."""
        d = self.dim
        if self.support == Support.HALF_LINE and m <= 0:
            return np.zeros((d, d))
        kind = self.kind
        if kind == PotentialKind.ZERO:
            return np.zeros((d, d))
        if kind == PotentialKind.CONSTANT:
            return thaw_matrix(self.matrices[0])
        if kind == PotentialKind.PERIODIC:
            return thaw_matrix(self.matrices[m % len(self.matrices)])
        if kind == PotentialKind.DECAYING:
            if m == 0:
                return thaw_matrix(self.matrices[0])
            return thaw_matrix(self.matrices[0]) * float(abs(m)) ** (-self.alpha)
        if kind == PotentialKind.SPARSE:
            if self.is_bump_site(abs(m)):
                return thaw_matrix(self.matrices[0])
            return np.zeros((d, d))
        if kind == PotentialKind.RANDOM:
            return self._random_at(m)
        entry = self._table_index.get(m)
        if entry is not None:
            return thaw_matrix(entry)
        if self.matrices and m >= self.tail_start:
            return thaw_matrix(self.matrices[(m - self.tail_start) % len(self.matrices)])
        return np.zeros((d, d))

    def _random_at(self, m: int) -> np.ndarray:
        rng = np.random.default_rng([self.seed & _SITE_MASK, m & _SITE_MASK])
        a = rng.uniform(-self.amplitude, self.amplitude, size=(self.dim, self.dim))
        a = 0.5 * (a + a.T)
        norm = float(np.linalg.norm(a, ord=2))
        if norm > self.bound:
            a *= self.bound / norm
        return a

    def is_bump_site(self, m: int) -> bool:
        """Whether m is one of the sparse bump sites (cumulative gap sums)."""
        if m <= 0:
            return False
        site = 0
        gap = 0
        k = 0
        while site < m:
            if k < len(self.gaps):
                gap = self.gaps[k]
            else:
                gap = gap * self.growth
            site += gap
            k += 1
        return site == m

    def at(self, n: int) -> np.ndarray:
        """
        B(n), with symmetry and bound verified.

        Raises:
            SpecViolationError: B(n) not symmetric, or ||B(n)|| > C
        """
        b = self.raw_at(n + self.offset)
        if np.max(np.abs(b - b.T), initial=0.0) > _SYMMETRY_TOL:
            raise SpecViolationError(f"B({n}) is not symmetric", site=n)
        norm = float(np.linalg.norm(b, ord=2)) if self.dim > 1 else abs(float(b[0, 0]))
        if norm > self.bound * (1 + 1e-12):
            raise SpecViolationError(
                f"||B({n})|| = {norm:.6g} exceeds bound {self.bound:.6g}", site=n,
            )
        return b

    def window(self, start: int, stop: int) -> np.ndarray:
        """Stack of B(n) for start <= n < stop, shape (stop - start, d, d)."""
        if stop <= start:
            return np.zeros((0, self.dim, self.dim))
        sites = np.arange(start, stop) + self.offset
        d = self.dim
        kind = self.kind
        if kind == PotentialKind.ZERO:
            return np.zeros((stop - start, d, d))
        if kind in (PotentialKind.CONSTANT, PotentialKind.PERIODIC, PotentialKind.DECAYING):
            if kind == PotentialKind.CONSTANT:
                out = np.broadcast_to(thaw_matrix(self.matrices[0]), (len(sites), d, d)).copy()
            elif kind == PotentialKind.PERIODIC:
                mats = np.array([thaw_matrix(m) for m in self.matrices])
                out = mats[sites % len(self.matrices)]
            else:
                with np.errstate(divide="ignore"):
                    scale = np.where(
                        sites == 0, 1.0, np.abs(sites).astype(float) ** (-self.alpha),
                    )
                out = scale[:, None, None] * thaw_matrix(self.matrices[0])[None]
            self._check_bound_once(start)
            if self.support == Support.HALF_LINE:
                out[sites <= 0] = 0.0
            return out
        return np.array([self.at(n) for n in range(start, stop)])

    def _check_bound_once(self, site: int) -> None:
        for m in self.matrices:
            b = thaw_matrix(m)
            if np.max(np.abs(b - b.T), initial=0.0) > _SYMMETRY_TOL:
                raise SpecViolationError("potential matrix is not symmetric", site=site)
            if float(np.linalg.norm(b, ord=2)) > self.bound * (1 + 1e-12):
                raise SpecViolationError("potential matrix exceeds bound", site=site)

    # ── Structure ────────────────────────────────────────────────────

    def shifted(self, k: int) -> "PotentialSpec":
        return replace(self, offset=self.offset + k)

    def right_tail(self) -> Optional[PeriodicTail]:
        """Periodic pattern B(n) follows as n -> +inf, in shifted coordinates."""
        raw = self._raw_right_tail()
        return None if raw is None else replace(raw, anchor=raw.anchor - self.offset)

    def left_tail(self) -> Optional[PeriodicTail]:
        """Periodic pattern B(n) follows as n -> -inf, in shifted coordinates."""
        if self.support == Support.HALF_LINE:
            raw = self._zero_tail(exact=True)
        elif self.kind == PotentialKind.EXPLICIT:
            raw = self._zero_tail(exact=True)
        else:
            raw = self._raw_right_tail()
        return None if raw is None else replace(raw, anchor=raw.anchor - self.offset)

    def _zero_tail(self, exact: bool) -> PeriodicTail:
        return PeriodicTail(pattern=(freeze_matrix(np.zeros((self.dim, self.dim))),), exact=exact)

    def _raw_right_tail(self) -> Optional[PeriodicTail]:
        kind = self.kind
        if kind == PotentialKind.ZERO:
            return self._zero_tail(exact=True)
        if kind in (PotentialKind.CONSTANT, PotentialKind.PERIODIC):
            return PeriodicTail(pattern=self.matrices, anchor=0, exact=True)
        if kind in (PotentialKind.DECAYING, PotentialKind.SPARSE):
            return self._zero_tail(exact=False)
        if kind == PotentialKind.EXPLICIT:
            if self.matrices:
                return PeriodicTail(pattern=self.matrices, anchor=self.tail_start, exact=True)
            return self._zero_tail(exact=True)
        return None

    # ── Serialization ────────────────────────────────────────────────

    def to_dict(self) -> dict:
        params: dict = {}
        kind = self.kind
        if kind in (PotentialKind.CONSTANT, PotentialKind.DECAYING, PotentialKind.SPARSE):
            params["B0"] = [list(row) for row in self.matrices[0]]
        if kind == PotentialKind.PERIODIC:
            params["matrices"] = [[list(row) for row in m] for m in self.matrices]
        if kind == PotentialKind.DECAYING:
            params["alpha"] = self.alpha
        if kind == PotentialKind.SPARSE:
            params["gaps"] = list(self.gaps)
            params["growth"] = self.growth
        if kind == PotentialKind.RANDOM:
            params["seed"] = self.seed
            params["amplitude"] = self.amplitude
        if kind == PotentialKind.EXPLICIT:
            params["table"] = [
                [site, [x for row in m for x in row]] for site, m in self.table
            ]
            if self.matrices:
                params["tail"] = [[list(row) for row in m] for m in self.matrices]
                params["tail_start"] = self.tail_start
        result = {
            "dim": self.dim,
            "bound": self.bound,
            "support": self.support.value,
            "kind": kind.value,
            "parameters": params,
        }
        if self.offset:
            result["offset"] = self.offset
        return result

    @classmethod
    def from_dict(cls, data: dict) -> "PotentialSpec":
        """
        Parse the JSON form.

        Raises:
            InvalidInputError: missing or malformed fields
        """
        if not isinstance(data, dict):
            raise InvalidInputError("potential spec must be a JSON object")
        try:
            dim = int(data["dim"])
            bound = float(data["bound"])
            kind = PotentialKind(data.get("kind", "zero"))
            support = Support(data.get("support", "half-line"))
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidInputError(f"invalid potential spec: {exc}") from exc
        params = data.get("parameters", {}) or {}
        kwargs: dict = {}
        try:
            if kind in (PotentialKind.CONSTANT, PotentialKind.DECAYING, PotentialKind.SPARSE):
                kwargs["matrices"] = (freeze_matrix(params["B0"], dim),)
            if kind == PotentialKind.PERIODIC:
                kwargs["matrices"] = tuple(freeze_matrix(m, dim) for m in params["matrices"])
            if kind == PotentialKind.DECAYING:
                kwargs["alpha"] = float(params.get("alpha", 1.0))
            if kind == PotentialKind.SPARSE:
                kwargs["gaps"] = tuple(int(g) for g in params.get("gaps", [1]))
                kwargs["growth"] = int(params.get("growth", 2))
            if kind == PotentialKind.RANDOM:
                kwargs["seed"] = int(params["seed"])
                kwargs["amplitude"] = float(params["amplitude"])
            if kind == PotentialKind.EXPLICIT:
                kwargs["table"] = tuple(
                    (int(site), freeze_matrix(entries, dim))
                    for site, entries in params.get("table", [])
                )
                if params.get("tail"):
                    kwargs["matrices"] = tuple(freeze_matrix(m, dim) for m in params["tail"])
                    kwargs["tail_start"] = int(params["tail_start"])
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidInputError(f"invalid {kind.value} parameters: {exc}") from exc
        return cls(
            dim=dim,
            bound=bound,
            support=support,
            kind=kind,
            offset=int(data.get("offset", 0)),
            **kwargs,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PotentialSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"potential spec is not valid JSON: {exc}") from exc
