"""Small dense complex-matrix kernel.

Matrices are plain 2-D numpy arrays.  ``det`` and ``inverse`` go through an
LU factorisation with partial pivoting (LAPACK ``getrf`` via scipy) so that
tiny pivots can be reported as singularity instead of producing garbage.
"""
from __future__ import annotations

import warnings

import numpy as np
from scipy import linalg as sla

PIVOT_TOL = 1e-14
DET_TOL = 1e-30


class SingularMatrixError(ValueError):
    pass


def _square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def conj_transpose(A) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    return A.conj().T


def is_hermitian(A, rtol: float = 1e-12) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = max(float(np.max(np.abs(A), initial=0.0)), 1.0)
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) <= rtol * scale)


def _lu(A: np.ndarray):
    with warnings.catch_warnings():
        # exactly singular input is reported through the pivots below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=True)
    pivots = np.diag(lu)
    sign = (-1) ** int(np.count_nonzero(piv != np.arange(len(piv))))
    return lu, piv, pivots, sign


def det(A) -> complex:
    """Determinant from the LU pivots."""
    A = _square(A)
    if A.shape[0] == 0:
        return 1.0 + 0j
    _, _, pivots, sign = _lu(A)
    return complex(sign * np.prod(pivots))


def log_abs_det(A) -> float:
    """``ln|det A|`` summed over pivots, safe against overflow."""
    A = _square(A)
    _, _, pivots, _ = _lu(A)
    if np.min(np.abs(pivots)) < PIVOT_TOL:
        raise SingularMatrixError("matrix is singular to working precision")
    return float(np.sum(np.log(np.abs(pivots))))


def inverse(A) -> np.ndarray:
    A = _square(A)
    lu, piv, pivots, sign = _lu(A)
    if np.min(np.abs(pivots)) < PIVOT_TOL:
        raise SingularMatrixError(f"pivot {np.min(np.abs(pivots)):.3e} below {PIVOT_TOL}")
    if np.sum(np.log(np.abs(pivots))) < np.log(DET_TOL):
        raise SingularMatrixError(f"|det| below {DET_TOL}")
    return sla.lu_solve((lu, piv), np.eye(A.shape[0], dtype=complex))


def quad_form(y, A) -> complex:
    """``y^H A y``."""
    A = _square(A)
    y = np.asarray(y, dtype=complex).reshape(-1)
    if y.shape[0] != A.shape[0]:
        raise ValueError(f"vector length {y.shape[0]} does not match matrix size {A.shape[0]}")
    return complex(np.vdot(y, A @ y))
