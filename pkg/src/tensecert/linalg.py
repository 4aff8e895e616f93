"""Small dense linear-algebra helpers shared by every module.

All rank decisions go through :func:`numeric_rank` so that the relative
threshold is applied the same way everywhere.
"""

from __future__ import annotations

import numpy as np

RANK_TOL = 1e-9


def numeric_rank(M: np.ndarray, tol_rel: float = RANK_TOL) -> int:
    """Number of singular values above ``tol_rel * sigma_max``."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol_rel * s[0]))


def nullspace(A: np.ndarray, tol_rel: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the right nullspace of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    ncols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > tol_rel * s[0])) if s.size and s[0] > 0 else 0
    return vt[rank:].T.copy()


def range_basis(A: np.ndarray, tol_rel: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.zeros((A.shape[0], 0))
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = int(np.sum(s > tol_rel * s[0])) if s[0] > 0 else 0
    return u[:, :rank].copy()


def complement_basis(A: np.ndarray, tol_rel: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column space of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m = A.shape[0]
    if A.size == 0:
        return np.eye(m)
    u, s, _ = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > tol_rel * s[0])) if s[0] > 0 else 0
    return u[:, rank:].copy()


def is_psd(eigenvalues: np.ndarray, tol_rel: float = RANK_TOL) -> bool:
    """PSD test on a spectrum: ``min >= -tol_rel * max``."""
    ev = np.asarray(eigenvalues, dtype=float)
    if ev.size == 0:
        return True
    return bool(ev.min() >= -tol_rel * ev.max())


def psd_rank(M: np.ndarray, tol_rel: float = RANK_TOL) -> int | None:
    """Rank of a symmetric matrix if it is PSD, otherwise ``None``."""
    ev = np.linalg.eigvalsh(M)
    if not is_psd(ev, tol_rel):
        return None
    return numeric_rank(M, tol_rel)


def sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)
