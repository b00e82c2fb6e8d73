# -*- encoding: utf-8 -*-
"""
Siegel upper half-space S_d = {Z = X + iY : X, Y real symmetric, Y > 0}.

Geometry used by the m-function contraction arguments:

- finsler_norm: F_Z(W) = ||Y^{-1/2} W Y^{-1/2}||
- siegel_distance: the Finsler distance d_inf, evaluated in closed form from
  the eigenvalues r_k of the cross-ratio matrix
  R = (Z1 - Z2)(Z1 - conj Z2)^{-1}(conj Z1 - conj Z2)(conj Z1 - Z2)^{-1}
  as max_k log((1 + sqrt r_k) / (1 - sqrt r_k))
- hyperbolic_distance / pseudo_hyperbolic: the d = 1 scalar versions,
  related by gamma = 2 sinh(rho / 2)
- mobius: S(Z) = (AZ + B)(CZ + D)^{-1}, defined on S_d when
  i(S^* K S - K) is positive semidefinite, K = (0, I; -I, 0)
- compress: c^* Z c, a scalar Herglotz value for ||c|| <= 1

Distances beyond about 32 saturate (r_k is clipped to 1 - 1e-14).

Usage:
    z1 = SiegelPoint(1j * np.eye(2))
    z2 = SiegelPoint(1j * np.diag([1.0, 2.0]))
    siegel_distance(z1, z2)            # log 2
    mobius(SymplecticMap.standard(2), z1)
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from matrix_weyl.errors import (
    DegenerateConfigurationError,
    IllConditionedError,
    InvalidInputError,
    InvalidMapError,
    NotPositiveDefiniteError,
)
from matrix_weyl.lattice import TransferMatrix, symplectic_form
from matrix_weyl.matcore import (
    CMatrix,
    as_cmatrix,
    checked_inverse,
    hpd_inv_sqrt,
    identity,
    imag_part,
    min_eigenvalue,
    operator_norm,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
MIN_IMAG_EIGENVALUE = 1e-12
MAP_CONDITION_TOL = 1e-10
R_CLIP = 1.0 - 1e-14
R_DEGENERATE = 1.0 + 1e-9
PATH_SEGMENTS = 64


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """
    A point Z = X + iY of S_d.

    Raises:
        InvalidInputError: Z not square, not finite, or not symmetric
        NotPositiveDefiniteError: Im Z not positive definite
    """
    z: CMatrix
    x: CMatrix = field(init=False, repr=False, compare=False)
    y: CMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = as_cmatrix(self.z, "Siegel point")
        asym = operator_norm(arr - arr.T)
        scale = max(1.0, operator_norm(arr))
        if asym > SYMMETRY_TOL * scale:
            raise InvalidInputError(f"Siegel point is not symmetric (||Z - Z^T|| = {asym:.3e})")
        sym = 0.5 * (arr + arr.T)
        lam = min_eigenvalue(sym.imag)
        if lam <= MIN_IMAG_EIGENVALUE:
            raise NotPositiveDefiniteError(
                f"Im Z is not positive definite (min eigenvalue {lam:.3e})", eigenvalue=lam,
            )
        object.__setattr__(self, "z", sym)
        object.__setattr__(self, "x", sym.real.astype(np.complex128))
        object.__setattr__(self, "y", sym.imag.astype(np.complex128))

    @property
    def dim(self) -> int:
        return self.z.shape[0]

    def conj(self) -> CMatrix:
        return np.conj(self.z)

    def to_dict(self) -> dict:
        return {
            "value_re": self.z.real.tolist(),
            "value_im": self.z.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SiegelPoint":
        re = np.asarray(data["value_re"], dtype=float)
        im = np.asarray(data.get("value_im", np.zeros_like(re)), dtype=float)
        return cls(re + 1j * im)


PointLike = Union[SiegelPoint, np.ndarray]


def _point(z: PointLike) -> SiegelPoint:
    return z if isinstance(z, SiegelPoint) else SiegelPoint(np.asarray(z, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """2d x 2d matrix S = (A, B; C, D) acting by Z -> (AZ + B)(CZ + D)^{-1}."""
    s: CMatrix

    def __post_init__(self):
        arr = np.asarray(self.s, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise InvalidInputError(f"symplectic map must be 2d x 2d, got shape {arr.shape}")
        object.__setattr__(self, "s", arr)

    @property
    def dim(self) -> int:
        return self.s.shape[0] // 2

    @property
    def blocks(self) -> tuple[CMatrix, CMatrix, CMatrix, CMatrix]:
        d = self.dim
        return self.s[:d, :d], self.s[:d, d:], self.s[d:, :d], self.s[d:, d:]

    @classmethod
    def identity(cls, d: int) -> "SymplecticMap":
        return cls(identity(2 * d))

    @classmethod
    def standard(cls, d: int) -> "SymplecticMap":
        """(0, -I; I, 0), acting as Z -> -Z^{-1}."""
        return cls(-symplectic_form(d))

    @classmethod
    def from_transfer(cls, t: TransferMatrix) -> "SymplecticMap":
        return cls(t.matrix)

    def compose(self, other: "SymplecticMap") -> "SymplecticMap":
        """self after other."""
        return SymplecticMap(self.s @ other.s)

    def condition_min_eigenvalue(self) -> float:
        """Smallest eigenvalue of i(S^* K S - K)."""
        k = symplectic_form(self.dim)
        return min_eigenvalue(1j * (self.s.conj().T @ k @ self.s - k))


# ── Norms and distances ──────────────────────────────────────────────


def finsler_norm(z: PointLike, w) -> float:
    """F_Z(W) = ||Y^{-1/2} W Y^{-1/2}||."""
    p = _point(z)
    r = hpd_inv_sqrt(p.y)
    return operator_norm(r @ as_cmatrix(w, "tangent vector") @ r)


def cross_ratio_eigenvalues(z1: PointLike, z2: PointLike) -> np.ndarray:
    """
    Eigenvalues r_k of the cross-ratio matrix, ascending, as reals.

    Raises:
        DegenerateConfigurationError: a factor is singular or some r_k >= 1
    """
    a = _point(z1).z
    b = _point(z2).z
    try:
        r = (
            (a - b)
            @ checked_inverse(a - b.conj())
            @ (a.conj() - b.conj())
            @ checked_inverse(a.conj() - b)
        )
    except IllConditionedError as exc:
        raise DegenerateConfigurationError(f"cross-ratio factor is singular: {exc}") from exc
    vals = np.sort(np.linalg.eigvals(r).real)
    if vals[-1] > R_DEGENERATE:
        raise DegenerateConfigurationError(
            f"cross-ratio eigenvalue {vals[-1]:.6e} is not below 1"
        )
    return vals


def siegel_distance(z1: PointLike, z2: PointLike) -> float:
    """
    d_inf(Z1, Z2) = max_k log((1 + sqrt r_k) / (1 - sqrt r_k)).

    Symmetric, nonnegative and zero on the diagonal. Values whose r_k hits
    the clip 1 - 1e-14 are saturated and logged at WARNING.
    """
    vals = cross_ratio_eigenvalues(z1, z2)
    top = float(vals[-1])
    if top > R_CLIP:
        logger.warning("siegel distance saturated (max cross-ratio eigenvalue %.3e)", top)
    top = min(max(top, 0.0), R_CLIP)
    s = math.sqrt(top)
    return 2.0 * math.atanh(s)


def _upper(z: complex, name: str) -> complex:
    z = complex(z)
    if not math.isfinite(z.real) or not math.isfinite(z.imag) or z.imag <= 0:
        raise InvalidInputError(f"{name} must lie in the open upper half-plane, got {z}")
    return z


def pseudo_hyperbolic(z: complex, w: complex) -> float:
    """gamma(w, z) = |w - z| / sqrt(Im w Im z)."""
    z = _upper(z, "z")
    w = _upper(w, "w")
    return abs(w - z) / math.sqrt(w.imag * z.imag)


def hyperbolic_distance(z: complex, w: complex) -> float:
    """rho(z, w) = arccosh(1 + |z - w|^2 / (2 Im z Im w))."""
    z = _upper(z, "z")
    w = _upper(w, "w")
    x = abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    # arccosh(1 + x) written with log1p so nearby points keep relative accuracy
    return math.log1p(x + math.sqrt(x * (x + 2.0)))


# ── Maps ─────────────────────────────────────────────────────────────


def mobius_matrix(s: SymplecticMap, z) -> CMatrix:
    """
    Raw action (AZ + B)(CZ + D)^{-1} on any matrix Z, without membership checks.

    Raises:
        DegenerateConfigurationError: CZ + D singular
    """
    a, b, c, d = s.blocks
    zz = z.z if isinstance(z, SiegelPoint) else as_cmatrix(z)
    try:
        inv = checked_inverse(c @ zz + d)
    except IllConditionedError as exc:
        raise DegenerateConfigurationError(f"CZ + D is singular: {exc}") from exc
    return (a @ zz + b) @ inv


def mobius(s: SymplecticMap, z: PointLike, check: bool = True) -> SiegelPoint:
    """
    S(Z) for Z in S_d.

    Args:
        s: the map
        z: point of S_d
        check: verify i(S^* K S - K) >= 0 first

    Raises:
        InvalidMapError: the well-definedness condition fails
        DegenerateConfigurationError: CZ + D singular
    """
    p = _point(z)
    if s.dim != p.dim:
        raise InvalidInputError(f"map dimension {s.dim} does not match point dimension {p.dim}")
    if check:
        lam = s.condition_min_eigenvalue()
        if lam < -MAP_CONDITION_TOL:
            raise InvalidMapError(
                f"i(S*KS - K) is not positive semidefinite (min eigenvalue {lam:.3e})",
                min_eigenvalue=lam,
            )
    out = mobius_matrix(s, p)
    return SiegelPoint(0.5 * (out + out.T))


def symplectic_check(s) -> float:
    """||S^T K S - K||; <= 1e-10 certifies a (complex) symplectic matrix."""
    arr = s.s if isinstance(s, SymplecticMap) else np.asarray(s, dtype=np.complex128)
    k = symplectic_form(arr.shape[0] // 2)
    return operator_norm(arr.T @ k @ arr - k)


def compress(c, z) -> complex:
    """
    c^* Z c for ||c|| <= 1.

    Z may be a SiegelPoint or any matrix with positive semidefinite
    imaginary part (a boundary value); the result then has Im >= 0.

    Raises:
        InvalidInputError: ||c|| > 1, or Im Z has a negative eigenvalue
    """
    vec = np.asarray(c, dtype=np.complex128).reshape(-1)
    if np.linalg.norm(vec) > 1.0 + 1e-12:
        raise InvalidInputError(f"compression vector has norm {np.linalg.norm(vec):.6f} > 1")
    zz = z.z if isinstance(z, SiegelPoint) else as_cmatrix(z)
    if zz.shape[0] != vec.size:
        raise InvalidInputError(f"vector of length {vec.size} does not match {zz.shape}")
    if not isinstance(z, SiegelPoint) and min_eigenvalue(imag_part(zz)) < -1e-10:
        raise InvalidInputError("compress needs a matrix with positive semidefinite Im")
    return complex(vec.conj() @ zz @ vec)


# ── Validation helpers ───────────────────────────────────────────────


def finsler_path_length(z1: PointLike, z2: PointLike, segments: int = PATH_SEGMENTS) -> float:
    """
    Finsler length of the straight segment from Z1 to Z2.

    Trapezoid rule over ``segments`` pieces; the integrand is convex along
    straight segments, so the estimate sits above the exact length, which in
    turn bounds siegel_distance from above.
    """
    a = _point(z1).z
    b = _point(z2).z
    w = b - a
    s = np.linspace(0.0, 1.0, segments + 1)
    vals = np.array([finsler_norm(SiegelPoint(a + t * w), w) for t in s])
    return float(np.sum(0.5 * (vals[1:] + vals[:-1])) / segments)


def random_siegel_point(
    d: int, rng: np.random.Generator, scale: float = 1.0, y_floor: float = 0.1,
) -> SiegelPoint:
    """X symmetric Gaussian, Y = A A^T + y_floor I."""
    x = rng.normal(scale=scale, size=(d, d))
    a = rng.normal(scale=scale, size=(d, d))
    return SiegelPoint((x + x.T) / 2 + 1j * (a @ a.T + y_floor * np.eye(d)))


def random_real_symplectic(d: int, rng: np.random.Generator, scale: float = 0.5) -> SymplecticMap:
    """
    Random real symplectic map from the generators
    (I, S; 0, I), (A, 0; 0, A^{-T}) and (0, -I; I, 0).
    """
    eye = np.eye(d)
    zero = np.zeros((d, d))
    sym = rng.normal(scale=scale, size=(d, d))
    sym = (sym + sym.T) / 2
    shear = np.block([[eye, sym], [zero, eye]])
    a = eye + rng.normal(scale=scale, size=(d, d))
    while abs(np.linalg.det(a)) < 1e-2:
        a = eye + rng.normal(scale=scale, size=(d, d))
    linear = np.block([[a, zero], [zero, np.linalg.inv(a).T]])
    sym2 = rng.normal(scale=scale, size=(d, d))
    sym2 = (sym2 + sym2.T) / 2
    shear2 = np.block([[eye, sym2], [zero, eye]])
    turn = np.block([[zero, -eye], [eye, zero]])
    return SymplecticMap((shear2 @ turn @ linear @ shear).astype(np.complex128))


@dataclass
class ContractionSample:
    """Empirical contraction of W -> (zI - B) - W^{-1} on one pair."""
    y: float
    before: float
    after: float

    @property
    def ratio(self) -> float:
        return self.after / self.before if self.before > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "y": self.y,
            "before": self.before,
            "after": self.after,
            "ratio": self.ratio,
            "bound_quadratic": 1.0 / (1.0 + self.y * self.y),
            "bound_linear": 1.0 / (1.0 + self.y),
        }


def contraction_ratio(
    w1: PointLike,
    w2: PointLike,
    z: complex,
    b: Optional[np.ndarray] = None,
) -> ContractionSample:
    """
    Measure d(T W1, T W2) / d(W1, W2) for the left transfer action
    T W = (zI - B) - W^{-1} with Im z > 0.
    """
    p1 = _point(w1)
    p2 = _point(w2)
    d = p1.dim
    bm = np.zeros((d, d)) if b is None else np.asarray(b, dtype=float)
    shift = complex(z) * np.eye(d) - bm
    t1 = SiegelPoint(shift - checked_inverse(p1.z))
    t2 = SiegelPoint(shift - checked_inverse(p2.z))
    return ContractionSample(
        y=float(np.imag(z)),
        before=siegel_distance(p1, p2),
        after=siegel_distance(t1, t2),
    )
