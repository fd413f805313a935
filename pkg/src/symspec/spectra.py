"""Dense eigendecomposition and per-eigenvalue nonorthogonality.

For a complex symmetric J the left eigenvector belonging to z is the complex
conjugate of the right one, so the diagonal overlap reduces to
``1/|v^T v|**2`` for a unit right eigenvector v and ``t = 1/|v^T v|**2 - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import DomainError

__all__ = [
    "OVERFLOW",
    "OVERFLOW_FLOOR",
    "RESIDUAL_TOL",
    "NEAR_DEFECTIVE_T",
    "SolverError",
    "EigenSystem",
    "SpectralRecord",
    "eig_right",
    "overlap_from_vector",
    "spectral_records",
    "left_right_check",
    "residuals",
]

# t reported for isotropic vectors (v^T v = 0)
OVERFLOW = math.inf
OVERFLOW_FLOOR = 1e-120
RESIDUAL_TOL = 1e-10
# beyond this t the pair is numerically indistinguishable from a Jordan block
NEAR_DEFECTIVE_T = 1e12


class SolverError(RuntimeError):
    def __init__(self, message: str, matrix_index: int | None = None):
        if matrix_index is not None:
            message = f"matrix {matrix_index}: {message}"
        super().__init__(message)
        self.matrix_index = matrix_index


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    # columns are unit right eigenvectors
    right_vectors: np.ndarray


@dataclass(frozen=True)
class SpectralRecord:
    z: complex
    t: float
    residual: float
    matrix_index: int
    defective: bool

    @property
    def r(self) -> float:
        return abs(self.z)


def _check_finite(j: np.ndarray) -> np.ndarray:
    j = np.asarray(j)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise DomainError("expected a square matrix")
    if not np.all(np.isfinite(j)):
        raise DomainError("matrix has non-finite entries")
    return j.astype(complex, copy=False)


def eig_right(j, matrix_index: int | None = None) -> EigenSystem:
    """Eigenvalues and unit right eigenvectors of a general complex matrix.

    LAPACK zgeev: Hessenberg reduction, shifted QR to Schur form and
    back-substitution for the vectors.
    """
    j = _check_finite(j)
    try:
        w, v = np.linalg.eig(j)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"eigensolver did not converge ({exc})", matrix_index) from exc
    v = v / np.linalg.norm(v, axis=0)
    return EigenSystem(eigenvalues=w, right_vectors=v)


def residuals(j, sys: EigenSystem) -> np.ndarray:
    """||J v - z v||_2 / ||J||_F for every pair."""
    j = np.asarray(j, dtype=complex)
    fro = np.linalg.norm(j)
    res = np.linalg.norm(j @ sys.right_vectors - sys.right_vectors * sys.eigenvalues, axis=0)
    return res / fro if fro > 0 else res


def _overlap_t(v: np.ndarray) -> np.ndarray:
    # v has unit columns; |v^T v|**2 per column
    q = np.abs(np.sum(v * v, axis=0)) ** 2
    with np.errstate(divide="ignore"):
        t = np.where(q < OVERFLOW_FLOOR, OVERFLOW, 1.0 / np.maximum(q, OVERFLOW_FLOOR) - 1.0)
    return np.maximum(t, 0.0)


def overlap_from_vector(v) -> float:
    """t = 1/|v^T v|**2 - 1 for a unit vector; ``OVERFLOW`` if v^T v ~ 0."""
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise DomainError("vector must have unit norm")
    return float(_overlap_t(v[:, None])[0])


def spectral_records(j, matrix_index: int = 0) -> list[SpectralRecord]:
    """One record per eigenvalue, flagging overflow and bad residuals."""
    j = _check_finite(j)
    sys = eig_right(j, matrix_index)
    t = _overlap_t(sys.right_vectors)
    res = residuals(j, sys)
    bad = (t >= NEAR_DEFECTIVE_T) | (res > RESIDUAL_TOL) | ~np.isfinite(t)
    return [
        SpectralRecord(complex(z), float(tk), float(rk), matrix_index, bool(b))
        for z, tk, rk, b in zip(sys.eigenvalues, t, res, bad)
    ]


def left_right_check(j, sys: EigenSystem) -> float:
    """max_i ||v_i^T J - z_i v_i^T||_2 / ||J||_F.

    Vanishes when J = J^T because v^T J = (J v)^T; any asymmetry of J shows
    up directly.
    """
    j = np.asarray(j, dtype=complex)
    fro = np.linalg.norm(j)
    v = sys.right_vectors
    dev = np.linalg.norm(v.T @ j - sys.eigenvalues[:, None] * v.T, axis=1)
    return float(np.max(dev) / fro) if fro > 0 else float(np.max(dev))
