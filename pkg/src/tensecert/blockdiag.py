"""Symmetry-adapted block diagonalization of Laplacians and Gram matrices.

``psi_transform`` conjugates an ``n x n`` matrix by ``frame (x) I_n_hat``.  For a
group-symmetric input the result is block diagonal with one block per
(irrep, copy); inside a block rows are ordered (irrep coordinate, quotient
vertex), the irrep coordinate being (l, a) with the field unit a innermost.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import complex_pattern_residual, field_layout_perm, quaternion_pattern_residual
from .embeddings import H_UNITS
from .gain_graph import SignedGainGraph
from .irreps import FieldType, IrrepSet, RealIrrep, aligning_change, frame_residual, multiplicities

EXTRACT_TOL = 1e-8


class BlockError(ValueError):
    pass


class ConeKind(str, enum.Enum):
    LAPLACIAN_PSD = "laplacian_psd"
    PSD = "psd"
    C_PSD = "c_psd"
    H_PSD = "h_psd"


@dataclass(frozen=True, eq=False)
class BlockDescriptor:
    index: int
    irrep: RealIrrep
    copies: int
    side: int
    cone: ConeKind
    offset: int  # first row of copy 0 in the transformed coordinates

    @property
    def field(self) -> FieldType:
        return self.irrep.field

    @property
    def name(self) -> str:
        return self.irrep.name

    def rows(self, t: int = 0) -> slice:
        start = self.offset + t * self.side
        return slice(start, start + self.side)


@dataclass(frozen=True, eq=False)
class BlockStructure:
    irreps: IrrepSet
    n_hat: int
    frame: np.ndarray
    blocks: tuple[BlockDescriptor, ...]

    @property
    def n(self) -> int:
        return self.irreps.group.order * self.n_hat

    def to_json(self) -> list[dict]:
        return [
            {"irrep": b.name, "degree": b.irrep.degree, "type": b.field.value, "copies": b.copies,
             "side": b.side, "cone": b.cone.value}
            for b in self.blocks
        ]


def block_structure(irreps: IrrepSet, n_hat: int, frame: np.ndarray | None = None) -> BlockStructure:
    from .irreps import symmetry_adapted_basis

    if frame is None:
        frame = symmetry_adapted_basis(irreps.group, irreps)
    blocks = []
    offset = 0
    for i, r in enumerate(irreps):
        if r.is_trivial:
            cone = ConeKind.LAPLACIAN_PSD
        else:
            cone = {FieldType.REAL: ConeKind.PSD, FieldType.COMPLEX: ConeKind.C_PSD,
                    FieldType.QUATERNIONIC: ConeKind.H_PSD}[r.field]
        side = r.degree * n_hat
        blocks.append(BlockDescriptor(i, r, r.copies, side, cone, offset))
        offset += r.copies * side
    if offset != irreps.group.order * n_hat:
        raise BlockError("block sizes do not add up to n")
    return BlockStructure(irreps, n_hat, frame, tuple(blocks))


def psi_transform(X: np.ndarray, frame: np.ndarray, n_hat: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    n = frame.shape[0] * n_hat
    if X.shape != (n, n):
        raise BlockError(f"matrix is {X.shape}, expected {(n, n)} for |G| = {frame.shape[0]}, n_hat = {n_hat}")
    K = np.kron(frame, np.eye(n_hat))
    return K.T @ X @ K


def psi_vectors(V: np.ndarray, frame: np.ndarray, n_hat: int) -> np.ndarray:
    """Transform column vectors: (frame (x) I)^T V."""
    return np.kron(frame, np.eye(n_hat)).T @ V


def to_field_layout(block: np.ndarray, desc: BlockDescriptor, n_hat: int) -> np.ndarray:
    perm = field_layout_perm(desc.irrep.degree, desc.irrep.fdim, n_hat)
    return block[np.ix_(perm, perm)]


def block_pattern_residual(block: np.ndarray, desc: BlockDescriptor, n_hat: int) -> float:
    if desc.field is FieldType.REAL:
        return 0.0
    A = to_field_layout(block, desc, n_hat)
    if desc.field is FieldType.COMPLEX:
        return complex_pattern_residual(A)
    return quaternion_pattern_residual(A)


@dataclass(frozen=True)
class ExtractionResidual:
    off_block: float
    copies: float
    pattern: float
    symmetry: float

    @property
    def worst(self) -> float:
        return max(self.off_block, self.copies, self.pattern, self.symmetry)


def extract_blocks(M: np.ndarray, S: BlockStructure, check: bool = False,
                   tol: float = EXTRACT_TOL) -> tuple[list[np.ndarray], ExtractionResidual]:
    """One representative block per irrep from a transformed matrix."""
    M = np.asarray(M, dtype=float)
    mask = np.ones(M.shape, dtype=bool)
    blocks, copy_res, pat_res = [], 0.0, 0.0
    for b in S.blocks:
        rep = M[b.rows(0), b.rows(0)]
        for t in range(b.copies):
            r = b.rows(t)
            mask[r, r] = False
            copy_res = max(copy_res, float(np.abs(M[r, r] - rep).max()) if rep.size else 0.0)
        pat_res = max(pat_res, block_pattern_residual(rep, b, S.n_hat))
        blocks.append(rep.copy())
    off = float(np.abs(M[mask]).max()) if mask.any() else 0.0
    symm = float(np.abs(M - M.T).max()) if M.size else 0.0
    res = ExtractionResidual(off, copy_res, pat_res, symm)
    if check and res.worst > tol * max(1.0, float(np.abs(M).max())):
        raise BlockError(f"input not group-symmetric: extraction residual {res.worst:.2e}")
    return blocks, res


def assemble_blocks(blocks: Sequence[np.ndarray], S: BlockStructure) -> np.ndarray:
    """Inverse of extract_blocks: full transformed matrix with every copy filled in."""
    out = np.zeros((S.n, S.n))
    for b, X in zip(S.blocks, blocks):
        for t in range(b.copies):
            out[b.rows(t), b.rows(t)] = X
    return out


def orbit_edge_blocks(graph: SignedGainGraph, S: BlockStructure, k: int) -> list[np.ndarray]:
    """Closed-form blocks of the (literal-sum) orbit edge matrix of quotient edge k.

    For edge (u, v, g): I (x) (E_uu + E_vv) - rho(g) (x) E_uv - rho(g)^T (x) E_vu.
    """
    e = graph.edges[k]
    nh = graph.n_hat
    Euu = np.zeros((nh, nh))
    Evv = np.zeros((nh, nh))
    Euv = np.zeros((nh, nh))
    Euu[e.u, e.u] = 1.0
    Evv[e.v, e.v] = 1.0
    Euv[e.u, e.v] = 1.0
    out = []
    for b in S.blocks:
        rho = b.irrep.matrices[e.gain]
        d = b.irrep.degree
        out.append(np.kron(np.eye(d), Euu + Evv) - np.kron(rho, Euv) - np.kron(rho.T, Euv.T))
    return out


# ----------------------------------------------------------- Gram blocks


def index_set(irreps: IrrepSet, mults: Sequence[int]) -> list[tuple[int, int, int, int]]:
    """Ordered (irrep, copy t, l, a) labels of the aligned coordinates of R^d."""
    out = []
    for i, (r, m) in enumerate(zip(irreps, mults)):
        for t in range(m):
            for l in range(r.degree // r.fdim):
                for a in range(r.fdim):
                    out.append((i, t, l, a))
    return out


# signs on the unit coefficients inside H(.) for the quaternionic closed form
QUATERNION_COEFF_SIGNS = np.array([1.0, 1.0, -1.0, 1.0])


def _quaternionic_factor(x: np.ndarray) -> np.ndarray:
    """x: (degree/4, 4, n_hat) aligned coordinates -> (degree*n_hat, 4) factor.

    Row (l, a, v), column c holds H(q_lv)[a, c] where
    q_lv = x[l,0] + i x[l,1] - j x[l,2] + k x[l,3].
    """
    nl, _, nh = x.shape
    coeff = x * QUATERNION_COEFF_SIGNS[None, :, None]
    W = np.einsum("lbv,bac->lavc", coeff, H_UNITS)
    return W.reshape(nl * 4 * nh, 4)


def gram_factors(reps: np.ndarray, points: np.ndarray, irreps: IrrepSet, action: np.ndarray,
                 align: np.ndarray | None = None, mults: Sequence[int] | None = None) -> list[list[np.ndarray]]:
    """Per irrep, the list over copies t of factors W_t with block = sum W_t W_t^T.

    ``reps`` are representative rows (n_hat, d); ``points`` the full lifted
    configuration (used only for its centroid).
    """
    G = irreps.group
    action = np.asarray(action, dtype=float)
    if mults is None:
        mults = multiplicities(action, irreps)
    if align is None:
        align = aligning_change(action, irreps, mults)
    err, g = frame_residual(action, align.T, irreps, mults)
    if err > 1e-10:
        raise BlockError(f"aligning change fails at {G.elements[g]!r}: residual {err:.2e}")
    c = np.asarray(points, dtype=float).mean(axis=0)
    Pt = (np.asarray(reps, dtype=float) - c).T  # d x n_hat
    AP = align @ Pt  # row s is the aligned coordinate s over representatives
    out = []
    row = 0
    for r, m in zip(irreps, mults):
        d, f = r.degree, r.fdim
        scale = np.sqrt(G.order / d)
        facs = []
        for _ in range(m):
            x = AP[row:row + d]  # (d, n_hat) in (l, a) order
            row += d
            if f == 1:
                W = x.reshape(-1, 1)
            elif f == 2:
                x = x.reshape(d // 2, 2, -1)
                top = np.stack([x[:, 0], -x[:, 1]], axis=-1)
                bot = np.stack([x[:, 1], x[:, 0]], axis=-1)
                W = np.stack([top, bot], axis=1).reshape(-1, 2)
            else:
                W = _quaternionic_factor(x.reshape(d // 4, 4, -1))
            facs.append(scale * W)
        out.append(facs)
    return out


def gram_blocks_explicit(reps: np.ndarray, points: np.ndarray, irreps: IrrepSet, action: np.ndarray,
                         align: np.ndarray | None = None, n_hat: int | None = None) -> list[np.ndarray]:
    """Blocks of the transformed centered Gram matrix from the closed-form factors."""
    n_hat = np.asarray(reps).shape[0] if n_hat is None else n_hat
    factors = gram_factors(reps, points, irreps, action, align)
    out = []
    for r, facs in zip(irreps, factors):
        X = np.zeros((r.degree * n_hat, r.degree * n_hat))
        for W in facs:
            X += W @ W.T
        out.append(X)
    return out


# ----------------------------------------------------------- rank budget


@dataclass(frozen=True)
class BlockRank:
    name: str
    copies: int
    rank: int
    target: int

    @property
    def ok(self) -> bool:
        return self.rank == self.target


@dataclass(frozen=True)
class RankBudget:
    entries: tuple[BlockRank, ...]
    total: int
    expected: int
    target_total: int

    @property
    def ok(self) -> bool:
        return self.total == self.expected and all(e.ok for e in self.entries)


def block_rank_targets(S: BlockStructure, mults: Sequence[int]) -> list[int]:
    out = []
    for b, m in zip(S.blocks, mults):
        if b.irrep.is_trivial:
            out.append(S.n_hat - m - 1)
        else:
            out.append(b.irrep.degree * S.n_hat - b.irrep.fdim * m)
    return out


def rank_budget(S: BlockStructure, block_ranks: Sequence[int], d: int, mults: Sequence[int]) -> RankBudget:
    targets = block_rank_targets(S, mults)
    entries = tuple(BlockRank(b.name, b.copies, int(r), int(t)) for b, r, t in zip(S.blocks, block_ranks, targets))
    total = sum(e.copies * e.rank for e in entries)
    target_total = sum(e.copies * e.target for e in entries)
    return RankBudget(entries, total, S.n - d - 1, target_total)


def block_ranks(blocks: Sequence[np.ndarray], tol_rel: float = 1e-9) -> list[int]:
    # relative to the largest block so that a vanishing block reads as rank 0
    scale = max((float(np.abs(B).max()) for B in blocks if B.size), default=0.0)
    out = []
    for B in blocks:
        if B.size == 0 or scale == 0.0:
            out.append(0)
            continue
        s = np.linalg.svd(B, compute_uv=False)
        out.append(int(np.sum(s > tol_rel * max(s[0], scale))))
    return out


__all__ = [
    "ConeKind", "BlockDescriptor", "BlockStructure", "BlockError", "ExtractionResidual",
    "block_structure", "psi_transform", "psi_vectors", "extract_blocks", "assemble_blocks",
    "orbit_edge_blocks", "gram_factors", "gram_blocks_explicit", "rank_budget", "RankBudget",
    "block_rank_targets", "block_ranks", "index_set",
]
