"""Dense linear-algebra primitives with explicit accuracy contracts.

The SVD is delegated to LAPACK via numpy; at the matrix sizes this package
produces (a few hundred rows, a few dozen columns) its factors satisfy the
contracts below with orders of magnitude to spare:

* reconstruction error ||A - U S V^T||_F <= 1e-10 * max(1, ||A||_F)
* ||U^T U - I||_max <= 1e-10 and ||V^T V - I||_max <= 1e-10
* singular values non-increasing, non-negative
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, NonOrthonormalBasis, ShapeMismatch

ORTHONORMALITY_TOL = 1e-8


@dataclass(frozen=True)
class SvdResult:
    left_vectors: np.ndarray      # (m, r), column-orthonormal
    singular_values: np.ndarray   # (r,), non-increasing
    right_vectors: np.ndarray     # (n, r), column-orthonormal


def svd(a: np.ndarray) -> SvdResult:
    """Thin singular value decomposition of a finite dense matrix."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ShapeMismatch("matrix contains NaN or Inf")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return SvdResult(u, s, vt.T)


def numerical_rank(singular_values: np.ndarray, rows: int, cols: int) -> int:
    """Count singular values above the standard eps * s1 * max(rows, cols) cutoff."""
    s = np.asarray(singular_values, dtype=np.float64)
    if s.size == 0 or s[0] == 0.0:
        return 0
    cutoff = np.finfo(np.float64).eps * s[0] * max(rows, cols)
    return int(np.sum(s > cutoff))


def _check_basis(basis: np.ndarray, length: int) -> np.ndarray:
    basis = np.asarray(basis, dtype=np.float64)
    if basis.ndim != 2 or basis.shape[0] != length:
        raise ShapeMismatch(
            f"basis shape {basis.shape} incompatible with vector of length {length}"
        )
    gram = basis.T @ basis
    err = np.abs(gram - np.eye(basis.shape[1])).max()
    if err > ORTHONORMALITY_TOL:
        raise NonOrthonormalBasis(f"||B^T B - I||_max = {err:.3e}")
    return basis


def project_residual(x: np.ndarray, basis: np.ndarray) -> float:
    """Squared distance from x to the column span of an orthonormal basis."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    basis = _check_basis(basis, x.size)
    r = x - basis @ (basis.T @ x)
    return float(r @ r)
