"""Real orthogonal irreducible representations of finite groups.

Each irrep is typed by the dimension of its commutant and rotated into the
standard complex or quaternionic block pattern.  The orthogonal intertwiner
frames built here block-diagonalize the regular representation (``frame``) and
any point group (``align``).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import (
    C_UNITS,
    H_UNITS,
    complex_embed,
    complex_pattern_residual,
    quaternion_embed,
    quaternion_pattern_residual,
)
from .groups import QUATERNION_UNITS, FiniteGroup
from .linalg import nullspace

VALIDATION_TOL = 1e-12
CONSTRUCTION_TOL = 1e-10
COMMUTANT_TOL = 1e-9


class IrrepError(ValueError):
    """A representation or irrep set fails validation."""


class FieldType(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    QUATERNIONIC = "quaternionic"

    @property
    def dim(self) -> int:
        return {"real": 1, "complex": 2, "quaternionic": 4}[self.value]

    @classmethod
    def from_dim(cls, k: int) -> "FieldType":
        try:
            return {1: cls.REAL, 2: cls.COMPLEX, 4: cls.QUATERNIONIC}[k]
        except KeyError:
            raise IrrepError(f"commutant dimension {k} is not 1, 2 or 4: representation is not irreducible") from None


@dataclass(frozen=True, eq=False)
class RealIrrep:
    group: FiniteGroup
    matrices: np.ndarray  # (|G|, d, d)
    field: FieldType
    name: str = ""

    @property
    def degree(self) -> int:
        return self.matrices.shape[1]

    @property
    def fdim(self) -> int:
        return self.field.dim

    @property
    def copies(self) -> int:
        """Multiplicity in the regular representation."""
        return self.degree // self.fdim

    @property
    def is_trivial(self) -> bool:
        return self.degree == 1 and bool(np.all(self.matrices == 1.0))

    def character(self) -> np.ndarray:
        return np.trace(self.matrices, axis1=1, axis2=2)


def validate_representation(group: FiniteGroup, mats: np.ndarray, tol: float = VALIDATION_TOL) -> None:
    """Raise IrrepError unless ``mats`` is an orthogonal homomorphism of ``group``."""
    mats = np.asarray(mats, dtype=float)
    if mats.ndim != 3 or mats.shape[0] != group.order or mats.shape[1] != mats.shape[2]:
        raise IrrepError(f"expected {group.order} square matrices, got shape {mats.shape}")
    d = mats.shape[1]
    eye = np.eye(d)
    orth = np.abs(np.einsum("gji,gjk->gik", mats, mats) - eye).max(axis=(1, 2))
    if orth.max() > tol:
        g = int(np.argmax(orth))
        raise IrrepError(f"matrix of {group.elements[g]!r} is not orthogonal (deviation {orth.max():.2e})")
    prod = np.einsum("gij,hjk->ghik", mats, mats)
    err = np.abs(prod - mats[group.table]).max(axis=(2, 3))
    if err.max() > tol:
        g, h = np.unravel_index(int(np.argmax(err)), err.shape)
        raise IrrepError(
            f"not a homomorphism at ({group.elements[g]}, {group.elements[h]}): deviation {err.max():.2e}"
        )


def _commutation_system(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Stacked rows of vec(A X - X B) = 0 over the group (row-major vec)."""
    da, db = A.shape[1], B.shape[1]
    rows = [np.kron(a, np.eye(db)) - np.kron(np.eye(da), b.T) for a, b in zip(A, B)]
    return np.vstack(rows)


def commutant_basis(mats: np.ndarray, tol: float = COMMUTANT_TOL) -> np.ndarray:
    """Basis of {X : X rho(g) = rho(g) X}, shape (k, d, d)."""
    d = mats.shape[1]
    N = nullspace(_commutation_system(mats, mats), tol)
    return N.T.reshape(-1, d, d)


def commutant_dimension(rep: RealIrrep | np.ndarray) -> int:
    mats = rep.matrices if isinstance(rep, RealIrrep) else np.asarray(rep, dtype=float)
    k = commutant_basis(mats).shape[0]
    FieldType.from_dim(k)
    return k


def classify_type(rep: RealIrrep | np.ndarray) -> FieldType:
    return FieldType.from_dim(commutant_dimension(rep))


def intertwiner_dimension(A: np.ndarray, B: np.ndarray) -> int:
    """Dimension of {X : A(g) X = X B(g)}."""
    return nullspace(_commutation_system(A, B), COMMUTANT_TOL).shape[1]


def pattern_residual(mats: np.ndarray, field: FieldType) -> float:
    if field is FieldType.REAL:
        return 0.0
    fn = complex_pattern_residual if field is FieldType.COMPLEX else quaternion_pattern_residual
    return max(fn(m) for m in mats)


def _unit_skew(M: np.ndarray) -> np.ndarray:
    """Scale a skew commutant element so that it squares to -I."""
    d = M.shape[0]
    c2 = -np.trace(M @ M) / d
    if c2 <= 0:
        raise IrrepError("type misclassification: no commutant element squares to -I")
    J = M / np.sqrt(c2)
    if np.abs(J @ J + np.eye(d)).max() > 1e-8:
        raise IrrepError("type misclassification: no commutant element squares to -I")
    return J


def _skew_commutant(mats: np.ndarray) -> list[np.ndarray]:
    """Orthonormal (trace form) basis of the skew part of the commutant."""
    d = mats.shape[1]
    out: list[np.ndarray] = []
    for C in commutant_basis(mats):
        S = 0.5 * (C - C.T)
        for T in out:
            S = S - np.trace(T.T @ S) / d * T
        if np.linalg.norm(S) > 1e-6:
            out.append(_unit_skew(S))
    return out


def _right_units() -> tuple[np.ndarray, np.ndarray]:
    """Two anticommuting signed-permutation matrices commuting with every H unit."""
    found = []
    for perm in itertools.permutations(range(4)):
        for signs in itertools.product((1.0, -1.0), repeat=4):
            R = np.zeros((4, 4))
            R[list(perm), range(4)] = signs
            if np.allclose(R, -R.T) and all(np.allclose(R @ H, H @ R) for H in H_UNITS):
                found.append(R)
    R1 = found[0]
    R2 = next(R for R in found if np.allclose(R1 @ R + R @ R1, 0))
    return R1, R2


_R1, _R2 = _right_units()


def canonicalize_basis(rep: RealIrrep, return_transform: bool = False):
    """Change basis so complex/quaternionic irreps sit in the C/H block pattern.

    Returns the new irrep (and optionally the orthogonal ``T`` with
    ``new(g) = T.T @ old(g) @ T``).  Real-type irreps are returned unchanged.
    """
    mats = rep.matrices
    d = rep.degree
    if rep.field is FieldType.REAL:
        return (rep, np.eye(d)) if return_transform else rep
    skews = _skew_commutant(mats)
    need = 1 if rep.field is FieldType.COMPLEX else 3
    if len(skews) < need:
        raise IrrepError("type misclassification: commutant has too few skew elements")
    cols: list[np.ndarray] = []
    eye = np.eye(d)
    for i in range(d):
        if len(cols) == d:
            break
        v = eye[:, i].copy()
        for c in cols:
            v -= (c @ v) * c
        if np.linalg.norm(v) < 1e-6:
            continue
        v /= np.linalg.norm(v)
        if rep.field is FieldType.COMPLEX:
            cols.extend([v, skews[0] @ v])
        else:
            J1, J2 = skews[0], skews[1]
            J3 = J1 @ J2
            block = [None] * 4
            block[0] = v
            for J, R in ((J1, _R1), (J2, _R2), (J3, _R1 @ _R2)):
                p = int(np.argmax(np.abs(R[:, 0])))
                block[p] = R[p, 0] * (J @ v)
            cols.extend(block)
    T = np.column_stack(cols)
    if np.abs(T.T @ T - eye).max() > 1e-8:
        raise IrrepError("type misclassification: canonical basis is not orthonormal")
    new = np.einsum("ji,gjk,kl->gil", T, mats, T)
    if pattern_residual(new, rep.field) > CONSTRUCTION_TOL:
        raise IrrepError("type misclassification: canonical basis does not produce the block pattern")
    out = RealIrrep(rep.group, new, rep.field, rep.name)
    return (out, T) if return_transform else out


def make_irrep(group: FiniteGroup, mats, name: str = "", field: FieldType | str | None = None,
               canonicalize: bool = True) -> RealIrrep:
    """Validate matrices, classify (or check a declared type), then canonicalize."""
    mats = np.asarray(mats, dtype=float)
    validate_representation(group, mats)
    found = classify_type(mats)
    if field not in (None, "auto"):
        declared = FieldType(field)
        if declared is not found:
            raise IrrepError(f"irrep {name!r} declared {declared.value} but its commutant says {found.value}")
    rep = RealIrrep(group, mats, found, name)
    if canonicalize and pattern_residual(mats, found) > CONSTRUCTION_TOL:
        rep = canonicalize_basis(rep)
    return rep


# ------------------------------------------------------------ field bases


def field_basis(rep: RealIrrep) -> list[tuple[tuple[int, int, int], np.ndarray]]:
    """Standard basis of the matrix algebra the irrep lives in, labelled (l, m, unit)."""
    f = rep.fdim
    k = rep.degree // f
    out = []
    for l, m in itertools.product(range(k), range(k)):
        if f == 1:
            E = np.zeros((k, k))
            E[l, m] = 1.0
            out.append(((l, m, 0), E))
            continue
        units = C_UNITS if f == 2 else H_UNITS
        for u in range(f):
            E = np.zeros((k * f, k * f))
            E[l * f:(l + 1) * f, m * f:(m + 1) * f] = units[u]
            out.append(((l, m, u), E))
    return out


def coordinate_vector(rep: RealIrrep, B: np.ndarray) -> np.ndarray:
    """g -> <rho(g), B> / dim F for B in the irrep's standard basis."""
    B = np.asarray(B, dtype=float)
    if not any(B.shape == E.shape and np.array_equal(B, E) for _, E in field_basis(rep)):
        raise IrrepError("basis element is not in the irrep's standard basis")
    return np.einsum("gij,ij->g", rep.matrices, B) / rep.fdim


@dataclass(frozen=True)
class OrthogonalityReport:
    ok: bool
    count: int
    expected: int
    max_deviation: float


# ------------------------------------------------------------ irrep sets

_ORDER = {FieldType.REAL: 1, FieldType.COMPLEX: 2, FieldType.QUATERNIONIC: 3}


class IrrepSet:
    """Complete list of pairwise inequivalent irreps, in block order.

    Order is trivial first, then the other real-type irreps, then complex,
    then quaternionic, each keeping the order in which it was supplied.
    """

    def __init__(self, group: FiniteGroup, irreps: Sequence[RealIrrep]):
        irreps = list(irreps)
        triv = [r for r in irreps if r.is_trivial]
        if len(triv) != 1:
            raise IrrepError("irrep set must contain the trivial representation exactly once")
        rest = [r for r in irreps if not r.is_trivial]
        rest.sort(key=lambda r: _ORDER[r.field])
        self.group = group
        self.irreps: tuple[RealIrrep, ...] = tuple(triv + rest)
        total = sum(r.degree ** 2 // r.fdim for r in self.irreps)
        for r in self.irreps:
            if r.degree % r.fdim:
                raise IrrepError(f"irrep {r.name!r}: degree {r.degree} not divisible by dim F = {r.fdim}")
        if total != group.order:
            raise IrrepError(
                f"irrep set incomplete: sum of d^2/dim F is {total}, group order is {group.order}"
            )
        for a, b in itertools.combinations(self.irreps, 2):
            if a.degree == b.degree and intertwiner_dimension(a.matrices, b.matrices) != 0:
                raise IrrepError(f"irreps {a.name!r} and {b.name!r} are equivalent")

    def __iter__(self):
        return iter(self.irreps)

    def __len__(self):
        return len(self.irreps)

    def __getitem__(self, i):
        return self.irreps[i]

    def names(self) -> list[str]:
        return [r.name for r in self.irreps]


def degree_identity(irreps: IrrepSet) -> tuple[int, int]:
    """(sum over irreps of d^2 / dim F, |G|), both integers."""
    return sum(r.degree ** 2 // r.fdim for r in irreps), irreps.group.order


def verify_orthogonality_basis(irreps: IrrepSet, tol: float = CONSTRUCTION_TOL) -> OrthogonalityReport:
    G = irreps.group
    vecs = []
    for r in irreps:
        scale = np.sqrt(r.degree / G.order)
        for _, B in field_basis(r):
            vecs.append(scale * coordinate_vector(r, B))
    V = np.array(vecs)
    dev = float(np.abs(V @ V.T - np.eye(len(vecs))).max()) if vecs else 0.0
    if len(vecs) != G.order:
        raise IrrepError(f"incomplete irrep set: {len(vecs)} coordinate vectors for |G| = {G.order}")
    return OrthogonalityReport(dev < tol, len(vecs), G.order, dev)


def multiplicities(action: np.ndarray, irreps: IrrepSet, tol: float = 1e-8) -> list[int]:
    """Multiplicity of each irrep in the representation ``action`` (|G|, d, d)."""
    action = np.asarray(action, dtype=float)
    G = irreps.group
    chi = np.trace(action, axis1=1, axis2=2)
    out = []
    for r in irreps:
        raw = float(chi @ r.character()) / (G.order * r.fdim)
        m = int(round(raw))
        if abs(raw - m) > tol or m < 0:
            raise IrrepError(f"non-integer multiplicity {raw:.6g} for {r.name!r}: not a representation or irreps incomplete")
        out.append(m)
    if sum(r.degree * m for r, m in zip(irreps, out)) != action.shape[1]:
        raise IrrepError("multiplicities do not add up to the dimension: irreps incomplete")
    return out


def isotypic_frame(mats: np.ndarray, irreps: IrrepSet, mults: Sequence[int],
                   tol: float = CONSTRUCTION_TOL) -> np.ndarray:
    """Orthogonal W with W.T @ mats[g] @ W = direct sum of I_m (x) rho(g).

    Each copy is obtained by projecting a seed matrix e_i e_j^T onto the
    intertwiners, removing earlier copies of the same irrep, and
    normalizing; columns come out irrep-major, then copy, then irrep
    coordinate.
    """
    mats = np.asarray(mats, dtype=float)
    order, dim = mats.shape[0], mats.shape[1]
    blocks = []
    for rep, m in zip(irreps, mults):
        d = rep.degree
        frames: list[np.ndarray] = []
        for i, j in itertools.product(range(dim), range(d)):
            if len(frames) == m:
                break
            X = (d / order) * np.einsum("ga,gb->ab", mats[:, :, i], rep.matrices[:, :, j])
            for _ in range(2):
                for F in frames:
                    X = X - F @ (F.T @ X)
            gram = X.T @ X
            c = np.trace(gram) / d
            if c < 1e-8:
                continue
            # orthonormalize inside the commutant: X (X^T X)^(-1/2)
            w, U = np.linalg.eigh(gram)
            if w.min() < 1e-8 * w.max():
                continue
            X = X @ (U / np.sqrt(w)) @ U.T
            frames.append(X)
        if len(frames) != m:
            raise IrrepError(f"basis construction failed: found {len(frames)} copies of {rep.name!r}, expected {m}")
        blocks.extend(frames)
    W = np.hstack(blocks) if blocks else np.zeros((dim, 0))
    if np.abs(W.T @ W - np.eye(dim)).max() > tol:
        raise IrrepError("basis construction failed: frame is not orthogonal")
    return W


def block_sum(irreps: IrrepSet, mults: Sequence[int], g: int) -> np.ndarray:
    """Direct sum over irreps of I_m (x) rho(g)."""
    parts = [np.kron(np.eye(m), r.matrices[g]) for r, m in zip(irreps, mults) if m]
    size = sum(p.shape[0] for p in parts)
    out = np.zeros((size, size))
    o = 0
    for p in parts:
        k = p.shape[0]
        out[o:o + k, o:o + k] = p
        o += k
    return out


def frame_residual(mats: np.ndarray, W: np.ndarray, irreps: IrrepSet, mults: Sequence[int]) -> tuple[float, int]:
    """Worst entrywise deviation of W.T mats[g] W from the block sum, and the worst g."""
    errs = [np.abs(W.T @ mats[g] @ W - block_sum(irreps, mults, g)).max() for g in range(len(mats))]
    g = int(np.argmax(errs))
    return float(errs[g]), g


def symmetry_adapted_basis(group: FiniteGroup, irreps: IrrepSet) -> np.ndarray:
    """Orthogonal frame block-diagonalizing the right regular representation."""
    R = group.regular_matrices()
    copies = [r.copies for r in irreps]
    frame = isotypic_frame(R, irreps, copies)
    if frame[0, 0] < 0:
        frame[:, 0] *= -1
    err, g = frame_residual(R, frame, irreps, copies)
    if err > CONSTRUCTION_TOL:
        raise IrrepError(f"basis construction failed: residual {err:.2e} at {group.elements[g]!r}")
    return frame


def aligning_change(action: np.ndarray, irreps: IrrepSet, mults: Sequence[int] | None = None) -> np.ndarray:
    """Orthogonal change of basis A with A action(g) A^T equal to the direct sum of I_m (x) rho(g)."""
    if mults is None:
        mults = multiplicities(action, irreps)
    W = isotypic_frame(action, irreps, mults)
    err, g = frame_residual(action, W, irreps, mults)
    if err > CONSTRUCTION_TOL:
        raise IrrepError(f"point-group alignment failed: residual {err:.2e} at {irreps.group.elements[g]!r}")
    return W.T


# ------------------------------------------------------------ catalogue


def _rot(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]])


def _helmert(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of the sum-zero subspace of R^n."""
    U = np.zeros((n, n - 1))
    for k in range(1, n):
        U[:k, k - 1] = 1.0
        U[k, k - 1] = -k
        U[:, k - 1] /= np.sqrt(k * (k + 1))
    return U


def _perm_matrix(p: Sequence[int]) -> np.ndarray:
    n = len(p)
    M = np.zeros((n, n))
    M[list(p), range(n)] = 1.0
    return M


def _sign(p: Sequence[int]) -> int:
    p = list(p)
    s = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def catalogue_irreps(group: FiniteGroup) -> IrrepSet:
    """Closed-form irreps for catalogue groups, already in canonical pattern."""
    kind = group.kind
    order = group.order
    reps: list[tuple[str, np.ndarray, FieldType]] = [("tri", np.ones((order, 1, 1)), FieldType.REAL)]
    if kind[0] == "cyclic":
        n = kind[1]
        a = np.arange(n)
        if n % 2 == 0:
            reps.append(("sgn", ((-1.0) ** a)[:, None, None], FieldType.REAL))
        for k in range(1, (n - 1) // 2 + 1):
            reps.append((f"E{k}", np.stack([_rot(2 * np.pi * k * x / n) for x in a]), FieldType.COMPLEX))
    elif kind[0] == "dihedral":
        n = kind[1]
        ab = [(i // n, i % n) for i in range(2 * n)]
        reps.append(("A2", np.array([(-1.0) ** b for b, _ in ab])[:, None, None], FieldType.REAL))
        if n % 2 == 0:
            reps.append(("B1", np.array([(-1.0) ** a for _, a in ab])[:, None, None], FieldType.REAL))
            reps.append(("B2", np.array([(-1.0) ** (a + b) for b, a in ab])[:, None, None], FieldType.REAL))
        S = np.diag([1.0, -1.0])
        for k in range(1, (n - 1) // 2 + 1):
            mats = [np.linalg.matrix_power(S, b) @ _rot(2 * np.pi * k * a / n) for b, a in ab]
            reps.append((f"E{k}", np.stack(mats), FieldType.REAL))
    elif kind[0] == "quaternion":
        U = QUATERNION_UNITS
        for name, axis in (("Ai", 1), ("Aj", 2), ("Ak", 3)):
            # kernel is {+-1, +-axis}
            vals = np.array([1.0 if (u[0] != 0 or u[axis] != 0) else -1.0 for u in U])
            reps.append((name, vals[:, None, None], FieldType.REAL))
        reps.append(("H", np.stack([quaternion_embed(u) for u in U]), FieldType.QUATERNIONIC))
    elif kind[0] == "symmetric":
        n, perms = kind[1], kind[2]
        if n >= 2:
            reps.append(("sgn", np.array([float(_sign(p)) for p in perms])[:, None, None], FieldType.REAL))
        if n >= 3:
            U = _helmert(n)
            std = np.stack([U.T @ _perm_matrix(p) @ U for p in perms])
            reps.append(("std", std, FieldType.REAL))
        if n == 4:
            sg = np.array([float(_sign(p)) for p in perms])
            reps.append(("std_sgn", std * sg[:, None, None], FieldType.REAL))
            pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]
            keyed = [frozenset(frozenset(pq) for pq in x) for x in pairings]
            U3 = _helmert(3)
            mats = []
            for p in perms:
                img = [keyed.index(frozenset(frozenset(p[i] for i in pq) for pq in x)) for x in pairings]
                mats.append(U3.T @ _perm_matrix(img) @ U3)
            reps.append(("E", np.stack(mats), FieldType.REAL))
    else:
        raise IrrepError(f"group {group.name!r} is not from the catalogue; supply irreps explicitly")
    out = []
    for name, mats, field in reps:
        validate_representation(group, mats)
        out.append(RealIrrep(group, mats, field, name))
    return IrrepSet(group, out)


__all__ = [
    "FieldType", "RealIrrep", "IrrepSet", "IrrepError", "OrthogonalityReport",
    "validate_representation", "commutant_basis", "commutant_dimension", "classify_type",
    "canonicalize_basis", "make_irrep", "field_basis", "coordinate_vector",
    "verify_orthogonality_basis", "multiplicities", "isotypic_frame", "symmetry_adapted_basis",
    "aligning_change", "catalogue_irreps", "degree_identity", "complex_embed", "quaternion_embed",
    "pattern_residual", "block_sum", "frame_residual", "intertwiner_dimension",
]
