"""Real matrix embeddings of complex and quaternionic matrices.

A complex ``n x m`` matrix is an ordinary complex ndarray.  A quaternionic
``n x m`` matrix is a real ndarray of shape ``(n, m, 4)`` holding the
coefficients of ``1, i, j, k``.

``complex_embed`` replaces each entry ``a+bi`` by ``[[a,-b],[b,a]]`` and
``quaternion_embed`` replaces ``a+bi+cj+dk`` by the 4x4 block below; both
are ring homomorphisms sending conjugate transposes to transposes.
"""

from __future__ import annotations

import numpy as np

from .groups import quaternion_product

# H(1), H(i), H(j), H(k)
H_UNITS = np.array([
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]],
    [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]],
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]],
], dtype=float)

C_UNITS = np.array([[[1, 0], [0, 1]], [[0, -1], [1, 0]]], dtype=float)


def complex_embed(Z) -> np.ndarray:
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    n, m = Z.shape
    out = np.empty((2 * n, 2 * m))
    out[0::2, 0::2] = Z.real
    out[0::2, 1::2] = -Z.imag
    out[1::2, 0::2] = Z.imag
    out[1::2, 1::2] = Z.real
    return out


def quaternion_embed(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, None, :]
    n, m, _ = X.shape
    # (n, m, 4, 4) blocks, then interleave
    blocks = np.einsum("nmu,uab->nmab", X, H_UNITS)
    return blocks.transpose(0, 2, 1, 3).reshape(4 * n, 4 * m)


def complex_unembed(A: np.ndarray) -> np.ndarray:
    """Inverse of :func:`complex_embed` after projecting onto the pattern."""
    a = 0.5 * (A[0::2, 0::2] + A[1::2, 1::2])
    b = 0.5 * (A[1::2, 0::2] - A[0::2, 1::2])
    return a + 1j * b


def quaternion_unembed(A: np.ndarray) -> np.ndarray:
    """Inverse of :func:`quaternion_embed` after projecting onto the pattern."""
    n, m = A.shape[0] // 4, A.shape[1] // 4
    blocks = A.reshape(n, 4, m, 4).transpose(0, 2, 1, 3)
    # H units are orthogonal with squared norm 4
    return np.einsum("nmab,uab->nmu", blocks, H_UNITS) / 4.0


def complex_pattern_residual(A: np.ndarray) -> float:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    if A.shape[0] % 2 or A.shape[1] % 2:
        return float("inf")
    return float(np.max(np.abs(A - complex_embed(complex_unembed(A)))))


def quaternion_pattern_residual(A: np.ndarray) -> float:
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    if A.shape[0] % 4 or A.shape[1] % 4:
        return float("inf")
    return float(np.max(np.abs(A - quaternion_embed(quaternion_unembed(A)))))


def quaternion_matmul(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Product of quaternionic matrices of shapes (n, k, 4) and (k, m, 4)."""
    return quaternion_product(X[:, :, None, :], Y[None, :, :, :]).sum(axis=1)


def quaternion_conj_transpose(X: np.ndarray) -> np.ndarray:
    out = X.transpose(1, 0, 2).copy()
    out[..., 1:] *= -1
    return out


def field_layout_perm(degree: int, fdim: int, nhat: int) -> np.ndarray:
    """Permutation taking block layout (l, a, v) to entrywise layout (l, v, a).

    Blocks produced by the symmetry-adapted transform index rows by the
    irrep coordinate (l, a) first and the quotient vertex v last, whereas the
    C/H embeddings of a ``(degree/fdim) x nhat`` matrix put the field
    coordinate a innermost.  ``A[perm][:, perm]`` converts the former into
    the latter.
    """
    nl = degree // fdim
    idx = np.arange(degree * nhat).reshape(nl, fdim, nhat)
    return idx.transpose(0, 2, 1).reshape(-1)
