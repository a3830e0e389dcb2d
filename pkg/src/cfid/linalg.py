"""Dense symmetric linear algebra used by every Frechet formula.

Matrices are plain ``float64`` numpy arrays. Functions that take a symmetric
matrix symmetrize it on entry, so callers may pass arrays that are symmetric
only up to rounding.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DataError, NotPSDError, NumericalError

CLAMP_TOL = 1e-10
PINV_EPS = 1e-10


class EigDecomp(NamedTuple):
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, orthonormal


def as_sym(m) -> np.ndarray:
    """Return ``m`` as a finite, exactly symmetric float64 matrix."""
    a = np.array(m, dtype=np.float64, copy=True)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DataError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError("matrix has non-finite entries")
    return 0.5 * (a + a.T)


def as_rect(m, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    a = np.array(m, dtype=np.float64, copy=True)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {a.shape}")
    if (rows is not None and a.shape[0] != rows) or (cols is not None and a.shape[1] != cols):
        raise DataError(f"expected shape ({rows}, {cols}), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError("matrix has non-finite entries")
    return a


def sym_eig(m) -> EigDecomp:
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted descending."""
    a = as_sym(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"symmetric eigensolver did not converge for a {a.shape[0]}x{a.shape[0]} matrix"
        ) from exc
    return EigDecomp(w[::-1].copy(), v[:, ::-1].copy())


def _clamped(m, clamp_tol: float) -> EigDecomp:
    w, v = sym_eig(m)
    lam_max = w[0]
    threshold = clamp_tol * max(1.0, lam_max)
    if w[-1] < -threshold:
        raise NotPSDError(w[-1], threshold, len(w))
    return EigDecomp(np.maximum(w, 0.0), v)


def check_psd(m, clamp_tol: float = CLAMP_TOL) -> None:
    """Raise :class:`NotPSDError` if ``m`` has an eigenvalue below the clamp floor."""
    a = as_sym(m)
    try:
        w = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"symmetric eigensolver did not converge for a {a.shape[0]}x{a.shape[0]} matrix"
        ) from exc
    threshold = clamp_tol * max(1.0, w[-1])
    if w[0] < -threshold:
        raise NotPSDError(w[0], threshold, len(w))


def sqrt_psd(m, clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-clamp_tol * max(1, lambda_max), 0)`` are treated as zero;
    anything more negative raises :class:`NotPSDError`.
    """
    w, v = _clamped(m, clamp_tol)
    r = (v * np.sqrt(w)) @ v.T
    return 0.5 * (r + r.T)


def trace_sqrt_product(a, b, clamp_tol: float = CLAMP_TOL) -> float:
    """``Tr((A^1/2 B A^1/2)^1/2)`` for PSD ``a`` and ``b`` of equal size."""
    a = as_sym(a)
    b = as_sym(b)
    if a.shape != b.shape:
        raise DataError(f"dimension mismatch: {a.shape} vs {b.shape}")
    check_psd(b, clamp_tol)
    if not np.any(b):
        return 0.0
    ra = sqrt_psd(a, clamp_tol)
    inner = ra @ b @ ra
    w, _ = _clamped(0.5 * (inner + inner.T), clamp_tol)
    # eigenvalues at rounding level would contribute sqrt(noise) each
    w[w <= 10.0 * len(w) * np.finfo(np.float64).eps * w[0]] = 0.0
    return float(np.sum(np.sqrt(w)))


def pinv_psd(m, eps: float = PINV_EPS) -> np.ndarray:
    """Pseudo-inverse of a PSD matrix: eigenvalues above ``eps * lambda_max`` are inverted, the rest zeroed."""
    w, v = sym_eig(m)
    lam_max = w[0]
    if lam_max <= 0.0:
        return np.zeros_like(v)
    keep = w > eps * lam_max
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    r = (v * inv) @ v.T
    return 0.5 * (r + r.T)
