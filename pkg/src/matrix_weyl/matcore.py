# -*- encoding: utf-8 -*-
"""
Dense complex-matrix kernels shared by every other module.

All d x d objects of the toolkit (potential values B(n), matrix solutions
U, V, F, m-function values M, their imaginary parts, Siegel points and
Finsler tangent vectors) are plain ``numpy`` arrays of dtype complex128 and
shape (d, d). Batched variants accept stacks of shape (..., d, d).

Default tolerances:
    STRUCTURE_TOL   1e-9    symmetry / hermiticity checks
    PD_TOL          1e-12   positive-definiteness floor
    COND_LIMIT      1e12    largest accepted condition estimate
    MAX_DIM         16      largest supported channel dimension d

Usage:
    from matrix_weyl.matcore import operator_norm, hpd_sqrt, checked_inverse

    s = hpd_sqrt(y)            # y Hermitian positive definite
    inv = checked_inverse(m)   # raises IllConditionedError when singular
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from matrix_weyl.errors import (
    IllConditionedError,
    InvalidInputError,
    NotPositiveDefiniteError,
)

CMatrix = np.ndarray

STRUCTURE_TOL = 1e-9
PD_TOL = 1e-12
COND_LIMIT = 1e12
MAX_DIM = 16

# eigenvalues closer than this (relative to the spectral scale) count as ties
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class StructureReport:
    """
    Structural classification of a square matrix.

    Attributes:
        is_real_symmetric: M real and M = M^T within tol
        is_hermitian: M = M^* within tol
        is_complex_symmetric: M = M^T within tol (entries may be complex)
        max_asymmetry: ||M - M^T|| in operator norm
        hermitian_defect: ||M - M^*|| in operator norm
        imag_norm: ||Im M|| in operator norm
    """
    is_real_symmetric: bool
    is_hermitian: bool
    is_complex_symmetric: bool
    max_asymmetry: float
    hermitian_defect: float = 0.0
    imag_norm: float = 0.0

    def to_dict(self) -> dict:
        return {
            "is_real_symmetric": self.is_real_symmetric,
            "is_hermitian": self.is_hermitian,
            "is_complex_symmetric": self.is_complex_symmetric,
            "max_asymmetry": self.max_asymmetry,
            "hermitian_defect": self.hermitian_defect,
            "imag_norm": self.imag_norm,
        }


def as_cmatrix(m, name: str = "matrix") -> CMatrix:
    """
    Coerce input to a finite square complex128 array.

    Raises:
        InvalidInputError: not square, or contains NaN/Inf
    """
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def identity(d: int) -> CMatrix:
    return np.eye(d, dtype=np.complex128)


def operator_norm(m) -> float:
    """
    Largest singular value of M.

    Raises:
        InvalidInputError: non-finite entries
    """
    arr = as_cmatrix(m)
    if arr.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(arr)[0])


def batched_operator_norm(stack: np.ndarray) -> np.ndarray:
    """Operator norms of a stack of shape (..., d, d); d = 1 is an abs()."""
    stack = np.asarray(stack)
    if stack.shape[-1] == 1:
        return np.abs(stack[..., 0, 0])
    return np.linalg.norm(stack, ord=2, axis=(-2, -1))


def structure_check(m, tol: float = STRUCTURE_TOL) -> StructureReport:
    """Classify M as real symmetric / Hermitian / complex symmetric."""
    arr = as_cmatrix(m)
    asym = operator_norm(arr - arr.T)
    herm = operator_norm(arr - arr.conj().T)
    imag = operator_norm(arr.imag)
    return StructureReport(
        is_real_symmetric=asym <= tol and imag <= tol,
        is_hermitian=herm <= tol,
        is_complex_symmetric=asym <= tol,
        max_asymmetry=asym,
        hermitian_defect=herm,
        imag_norm=imag,
    )


def hermitian_part(m) -> CMatrix:
    arr = np.asarray(m, dtype=np.complex128)
    return 0.5 * (arr + np.swapaxes(arr.conj(), -1, -2))


def imag_part(m) -> CMatrix:
    """(M - M^*)/(2i); equals the entrywise imaginary part for complex symmetric M."""
    arr = np.asarray(m, dtype=np.complex128)
    return (arr - np.swapaxes(arr.conj(), -1, -2)) / 2j


def hermitian_eigh(m) -> tuple[np.ndarray, CMatrix]:
    """
    Deterministic eigendecomposition of a Hermitian matrix.

    Eigenvalues ascend. Every eigenvector is phase-normalized so its first
    entry of largest modulus is real positive. Within a cluster of tied
    eigenvalues the vectors are ordered lexicographically on
    (Re v_0, Im v_0, Re v_1, ...), descending.

    Returns:
        (eigenvalues, eigenvectors as columns)
    """
    arr = hermitian_part(as_cmatrix(m))
    w, v = scipy.linalg.eigh(arr)
    for k in range(v.shape[1]):
        col = v[:, k]
        pivot = int(np.argmax(np.abs(col) > np.abs(col).max() * (1 - 1e-12)))
        phase = col[pivot] / abs(col[pivot])
        v[:, k] = col / phase
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    order = list(range(len(w)))
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and w[stop] - w[start] <= _TIE_TOL * scale:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            block.sort(
                key=lambda k: tuple(
                    x for entry in v[:, k] for x in (entry.real, entry.imag)
                ),
                reverse=True,
            )
            order[start:stop] = block
        start = stop
    return w[order], v[:, order]


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of the Hermitian part of M."""
    return float(scipy.linalg.eigh(hermitian_part(as_cmatrix(m)), eigvals_only=True)[0])


def hpd_sqrt(y, tol: float = PD_TOL) -> CMatrix:
    """
    Positive definite square root of a Hermitian positive definite matrix.

    Args:
        y: Hermitian matrix with smallest eigenvalue > tol
        tol: positive-definiteness floor

    Returns:
        Hermitian S with S @ S = Y

    Raises:
        NotPositiveDefiniteError: smallest eigenvalue <= tol
    """
    w, v = hermitian_eigh(y)
    if w[0] <= tol:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})",
            eigenvalue=float(w[0]),
        )
    return (v * np.sqrt(w)) @ v.conj().T


def hpd_inv_sqrt(y, tol: float = PD_TOL) -> CMatrix:
    """Y^{-1/2} from the same eigendecomposition as hpd_sqrt."""
    w, v = hermitian_eigh(y)
    if w[0] <= tol:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})",
            eigenvalue=float(w[0]),
        )
    return (v / np.sqrt(w)) @ v.conj().T


def checked_inverse(m, cond_limit: float = COND_LIMIT) -> CMatrix:
    """
    Inverse with a 2-norm condition check.

    Raises:
        IllConditionedError: singular, or condition estimate above cond_limit
    """
    arr = as_cmatrix(m)
    sv = scipy.linalg.svdvals(arr)
    estimate = float("inf") if sv[-1] == 0.0 else float(sv[0] / sv[-1])
    if not estimate <= cond_limit:
        raise IllConditionedError(
            f"matrix is ill-conditioned (condition estimate {estimate:.3e})",
            estimate=estimate,
        )
    return scipy.linalg.inv(arr)


def batched_inverse(stack: np.ndarray, site: int | None = None) -> np.ndarray:
    """
    Inverse of every matrix in a stack (..., d, d).

    Used inside contraction iterations where the operands have positive
    definite imaginary part; failure shows up as a singular solve or
    non-finite output.

    Raises:
        IllConditionedError: a matrix in the stack is numerically singular
    """
    if stack.shape[-1] == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1.0 / stack
    else:
        try:
            out = np.linalg.inv(stack)
        except np.linalg.LinAlgError as exc:
            raise IllConditionedError(
                f"singular matrix in iteration at site {site}", float("inf"), site,
            ) from exc
    if not np.all(np.isfinite(out)):
        raise IllConditionedError(
            f"singular matrix in iteration at site {site}", float("inf"), site,
        )
    return out


def dagger(stack: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.swapaxes(np.conj(stack), -1, -2)


def transpose(stack: np.ndarray) -> np.ndarray:
    return np.swapaxes(stack, -1, -2)
