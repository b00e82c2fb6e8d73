# -*- encoding: utf-8 -*-
"""
Difference operator machinery for y(n+1) + y(n-1) + B(n) y(n) = z y(n).

Provides:
- potential_at: evaluated potential values with bound/symmetry checks
- iterate_solutions: matrix solutions U, V with U(n0) = -I, V(n0) = 0,
  U(n0+1) = 0, V(n0+1) = I
- wronskian / greens_residual: W_n(F, G) = F(n+1)^T G(n) - F(n)^T G(n+1)
  (plain transpose) and the summed Green's identity
- transfer / transfer_product: T_{+-}(n, z) = (zI - B(n), +-I; -+I, 0)
  and the ordered products P_+(n) = T_+(n)...T_+(1), P_-(n) = T_-(n)...T_-(2)
- truncated_operator: the N*d x N*d block tridiagonal restriction of J to
  sites 1..N with Dirichlet condition at 0

The symplectic form is K = (0, I; -I, 0); T^T K T = K for real z.

Usage:
    sol = iterate_solutions(spec, 2j, base_site=0, start=0, stop=50)
    w = wronskian(sol.u, sol.v, 10)       # == I for every n
    p = transfer_product(spec, 20, 0.5, Side.PLUS)
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Union

import numpy as np

from matrix_weyl.errors import GrowthError, InvalidInputError, SiteRangeError
from matrix_weyl.matcore import CMatrix, identity, operator_norm
from matrix_weyl.potentials import PotentialSpec

logger = logging.getLogger(__name__)

OVERFLOW_LIMIT = 1e300


class Side(Enum):
    """Half line a solution or m-function belongs to (sign of the transfer matrix)."""
    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self == Side.PLUS else -1


def symplectic_form(d: int) -> CMatrix:
    """K = (0, I; -I, 0)."""
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[zero, eye], [-eye, zero]]).astype(np.complex128)


def reflection(d: int) -> CMatrix:
    """diag(I, -I), the intertwiner T_- diag(I, -I) = diag(I, -I) T_+."""
    return np.diag(np.concatenate([np.ones(d), -np.ones(d)])).astype(np.complex128)


# ── Sampled sequences ────────────────────────────────────────────────


@dataclass
class SampledSequence:
    """
    Matrix sequence sampled on consecutive sites start..start+len-1.

    Indexing with a site outside the sampled range raises SiteRangeError.
    """
    start: int
    values: np.ndarray

    @property
    def stop(self) -> int:
        return self.start + len(self.values)

    def __contains__(self, n: int) -> bool:
        return self.start <= n < self.stop

    def __getitem__(self, n: int) -> CMatrix:
        if n not in self:
            raise SiteRangeError(f"no sample at site {n}", site=n)
        return self.values[n - self.start]

    def sites(self) -> range:
        return range(self.start, self.stop)


MatrixSequence = Union[SampledSequence, Mapping[int, np.ndarray]]


def _sample(seq: MatrixSequence, n: int) -> np.ndarray:
    if isinstance(seq, SampledSequence):
        return seq[n]
    try:
        return np.asarray(seq[n], dtype=np.complex128)
    except KeyError:
        raise SiteRangeError(f"no sample at site {n}", site=n) from None


@dataclass
class MatrixSolution:
    """
    Matrix solutions U, V (and optionally F = U + M V) of the recurrence.

    Attributes:
        z: spectral parameter
        base_site: n0 with U(n0) = -I, V(n0) = 0, U(n0+1) = 0, V(n0+1) = I
        u, v: sampled solutions
        f: optional Weyl combination
        side: half line the solution is attached to
    """
    z: complex
    base_site: int
    u: SampledSequence
    v: SampledSequence
    f: Optional[SampledSequence] = None
    side: Side = Side.PLUS
    max_entry: float = field(default=0.0)

    def to_dict(self) -> dict:
        return {
            "z_re": float(np.real(self.z)),
            "z_im": float(np.imag(self.z)),
            "base_site": self.base_site,
            "start": self.u.start,
            "stop": self.u.stop,
            "side": self.side.value,
            "max_entry": self.max_entry,
        }


def potential_at(spec: PotentialSpec, n: int) -> CMatrix:
    """
    B(n) as a complex matrix.

    Raises:
        SpecViolationError: the generated matrix breaks symmetry or the bound C
    """
    return spec.at(n).astype(np.complex128)


def iterate_solutions(
    spec: PotentialSpec,
    z: complex,
    base_site: int = 0,
    start: Optional[int] = None,
    stop: Optional[int] = None,
) -> MatrixSolution:
    """
    Solve y(n+1) = (zI - B(n)) y(n) - y(n-1) on sites start..stop (inclusive).

    Args:
        spec: potential
        z: spectral parameter
        base_site: n0 carrying the initial conditions
        start: first site (default n0)
        stop: last site (default n0 + 1)

    Raises:
        InvalidInputError: range does not contain n0 and n0 + 1
        GrowthError: an entry exceeds 1e300
    """
    start = base_site if start is None else start
    stop = base_site + 1 if stop is None else stop
    if not start <= base_site < stop:
        raise InvalidInputError(
            f"range {start}..{stop} must contain sites {base_site} and {base_site + 1}"
        )
    d = spec.dim
    count = stop - start + 1
    u = np.zeros((count, d, d), dtype=np.complex128)
    v = np.zeros((count, d, d), dtype=np.complex128)
    i0 = base_site - start
    u[i0] = -identity(d)
    v[i0 + 1] = identity(d)
    eye = identity(d)

    for n in range(base_site + 1, stop):
        i = n - start
        a = z * eye - potential_at(spec, n)
        u[i + 1] = a @ u[i] - u[i - 1]
        v[i + 1] = a @ v[i] - v[i - 1]
        if max(np.abs(u[i + 1]).max(), np.abs(v[i + 1]).max()) > OVERFLOW_LIMIT:
            raise GrowthError(f"solution overflow beyond site {n}", last_stable_site=n)

    for n in range(base_site, start, -1):
        i = n - start
        a = z * eye - potential_at(spec, n)
        u[i - 1] = a @ u[i] - u[i + 1]
        v[i - 1] = a @ v[i] - v[i + 1]
        if max(np.abs(u[i - 1]).max(), np.abs(v[i - 1]).max()) > OVERFLOW_LIMIT:
            raise GrowthError(f"solution overflow beyond site {n}", last_stable_site=n)

    return MatrixSolution(
        z=z,
        base_site=base_site,
        u=SampledSequence(start, u),
        v=SampledSequence(start, v),
        max_entry=float(max(np.abs(u).max(), np.abs(v).max())),
    )


def recurrence_residual(spec: PotentialSpec, seq: SampledSequence, z: complex) -> float:
    """max_n ||y(n+1) + y(n-1) + B(n) y(n) - z y(n)|| over interior sites."""
    worst = 0.0
    for n in range(seq.start + 1, seq.stop - 1):
        r = seq[n + 1] + seq[n - 1] + potential_at(spec, n) @ seq[n] - z * seq[n]
        worst = max(worst, operator_norm(r))
    return worst


def wronskian(f: MatrixSequence, g: MatrixSequence, n: int) -> CMatrix:
    """
    W_n(F, G) = F(n+1)^T G(n) - F(n)^T G(n+1).

    Plain transpose, not conjugate transpose.

    Raises:
        SiteRangeError: F or G not sampled at n and n + 1
    """
    return _sample(f, n + 1).T @ _sample(g, n) - _sample(f, n).T @ _sample(g, n + 1)


def apply_tau(
    potential: Union[PotentialSpec, np.ndarray],
    seq: MatrixSequence,
    j: int,
) -> CMatrix:
    """(tau y)(j) = y(j+1) + y(j-1) + B(j) y(j)."""
    b = _potential_value(potential, j)
    return _sample(seq, j + 1) + _sample(seq, j - 1) + b @ _sample(seq, j)


def _potential_value(potential: Union[PotentialSpec, np.ndarray], j: int) -> np.ndarray:
    # raw arrays hold B(1), B(2), ... and are used as-is, without symmetry checks
    if isinstance(potential, PotentialSpec):
        return potential_at(potential, j)
    arr = np.asarray(potential, dtype=np.complex128)
    if not 1 <= j <= len(arr):
        raise SiteRangeError(f"no potential value at site {j}", site=j)
    return arr[j - 1]


def greens_residual(
    potential: Union[PotentialSpec, np.ndarray],
    f: MatrixSequence,
    g: MatrixSequence,
    n: int,
    z_f: Optional[complex] = None,
    z_g: Optional[complex] = None,
) -> CMatrix:
    """
    Residual of the summed Green's identity

        sum_{j=1}^{n} [F(j)^* (tau G)(j) - (tau F)(j)^* G(j)]
            = W_0(conj F, G) - W_n(conj F, G).

    With z_f and z_g given, tau F and tau G are replaced by z_f F and z_g G,
    which is the same identity restricted to solutions.

    Args:
        potential: a PotentialSpec, or a raw array of B(1..n) (may be
            non-symmetric, in which case the residual is generally nonzero)
        f, g: sequences sampled on 0..n+1

    Returns:
        left side minus right side
    """
    lhs = None
    for j in range(1, n + 1):
        fj = _sample(f, j)
        gj = _sample(g, j)
        tg = z_g * gj if z_g is not None else apply_tau(potential, g, j)
        tf = z_f * fj if z_f is not None else apply_tau(potential, f, j)
        term = fj.conj().T @ tg - tf.conj().T @ gj
        lhs = term if lhs is None else lhs + term
    conj_f = {k: np.conj(_sample(f, k)) for k in (0, 1, n, n + 1)}
    rhs = wronskian(conj_f, g, 0) - wronskian(conj_f, g, n)
    if lhs is None:
        lhs = np.zeros_like(rhs)
    return lhs - rhs


# ── Transfer matrices ────────────────────────────────────────────────


@dataclass
class TransferMatrix:
    """
    T_{+-}(n, z) = (A, B; C, D) = (zI - B(n), +-I; -+I, 0), or a product of them.

    For products, ``site`` is the latest (leftmost) factor and ``first_site``
    the earliest.
    """
    a: CMatrix
    b: CMatrix
    c: CMatrix
    d: CMatrix
    side: Side
    site: int
    z: complex
    first_site: Optional[int] = None

    @property
    def matrix(self) -> CMatrix:
        return np.block([[self.a, self.b], [self.c, self.d]])

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @classmethod
    def from_matrix(
        cls, m: np.ndarray, side: Side, site: int, z: complex, first_site: Optional[int] = None,
    ) -> "TransferMatrix":
        d = m.shape[0] // 2
        return cls(
            a=m[:d, :d], b=m[:d, d:], c=m[d:, :d], d=m[d:, d:],
            side=side, site=site, z=z, first_site=first_site,
        )

    def symplectic_residual(self) -> float:
        """||T^T K T - K||."""
        k = symplectic_form(self.dim)
        m = self.matrix
        return operator_norm(m.T @ k @ m - k)


def transfer(spec: PotentialSpec, n: int, z: complex, side: Side) -> TransferMatrix:
    """T_{+-}(n, z) = (zI - B(n), +-I; -+I, 0)."""
    d = spec.dim
    eye = identity(d)
    s = side.sign
    return TransferMatrix(
        a=z * eye - potential_at(spec, n),
        b=s * eye,
        c=-s * eye,
        d=np.zeros((d, d), dtype=np.complex128),
        side=side,
        site=n,
        z=z,
        first_site=n,
    )


def transfer_product(
    spec: PotentialSpec,
    n: int,
    z: complex,
    side: Side,
    first: Optional[int] = None,
) -> TransferMatrix:
    """
    Ordered product T(n) T(n-1) ... T(first), latest factor leftmost.

    Defaults follow P_+(n) = T_+(n)...T_+(1) and P_-(n) = T_-(n)...T_-(2);
    an empty range yields the identity.

    Raises:
        GrowthError: an entry of the running product exceeds 1e300
    """
    if first is None:
        first = 1 if side == Side.PLUS else 2
    d = spec.dim
    prod = identity(2 * d)
    for k in range(first, n + 1):
        prod = transfer(spec, k, z, side).matrix @ prod
        if np.abs(prod).max() > OVERFLOW_LIMIT:
            raise GrowthError(f"transfer product overflow at site {k}", last_stable_site=k - 1)
    return TransferMatrix.from_matrix(prod, side=side, site=n, z=z, first_site=first)


def intertwining_residual(spec: PotentialSpec, n: int, z: complex) -> float:
    """||diag(I,-I) P_+(n) - P_-(n) diag(I,-I) T_+(1)||."""
    d = spec.dim
    r = reflection(d)
    p_plus = transfer_product(spec, n, z, Side.PLUS).matrix
    p_minus = transfer_product(spec, n, z, Side.MINUS).matrix
    t1 = transfer(spec, 1, z, Side.PLUS).matrix
    return operator_norm(r @ p_plus - p_minus @ r @ t1)


def truncated_operator(spec: PotentialSpec, size: int) -> np.ndarray:
    """
    Block tridiagonal real symmetric restriction of J to sites 1..size.

    Diagonal blocks B(1)..B(size), identity off-diagonal blocks, Dirichlet
    condition at site 0.
    """
    if size < 2:
        raise InvalidInputError(f"truncation size must be >= 2, got {size}")
    d = spec.dim
    blocks = spec.window(1, size + 1)
    out = np.zeros((size * d, size * d))
    eye = np.eye(d)
    for k in range(size):
        out[k * d:(k + 1) * d, k * d:(k + 1) * d] = blocks[k]
        if k + 1 < size:
            out[k * d:(k + 1) * d, (k + 1) * d:(k + 2) * d] = eye
            out[(k + 1) * d:(k + 2) * d, k * d:(k + 1) * d] = eye
    return out
