"""Symmetric tensegrities with their weighted Laplacians and equilibrium stresses.

Points are stored as an ``(n, d)`` array (one row per lifted vertex); the
``d x n`` configuration matrix is its transpose.  Stresses are plain arrays,
either one weight per lifted member or one per quotient edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gain_graph import LiftedGraph, SignedGainGraph
from .groups import FiniteGroup
from .irreps import IrrepError, validate_representation
from .linalg import RANK_TOL, nullspace, numeric_rank

COMPAT_TOL = 1e-10
STRICT_REL = 1e-9


class TensegrityError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PointGroup:
    group: FiniteGroup
    matrices: np.ndarray  # (|G|, d, d)

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        try:
            validate_representation(self.group, mats)
        except IrrepError as exc:
            raise TensegrityError(f"point group: {exc}") from None
        object.__setattr__(self, "matrices", mats)

    @property
    def d(self) -> int:
        return self.matrices.shape[1]

    @classmethod
    def trivial(cls, group: FiniteGroup, d: int) -> "PointGroup":
        return cls(group, np.broadcast_to(np.eye(d), (group.order, d, d)).copy())


def edge_matrix(i: int, j: int, n: int) -> np.ndarray:
    if i == j:
        raise TensegrityError("edge matrix needs two distinct vertices")
    if not (0 <= i < n and 0 <= j < n):
        raise TensegrityError("vertex index out of range")
    F = np.zeros((n, n))
    F[i, i] = F[j, j] = 1.0
    F[i, j] = F[j, i] = -1.0
    return F


def weighted_laplacian(n: int, members: Sequence[tuple[int, int]], weights) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(members),):
        raise TensegrityError(f"need {len(members)} weights, got shape {weights.shape}")
    L = np.zeros((n, n))
    if not members:
        return L
    I = np.array([m[0] for m in members])
    J = np.array([m[1] for m in members])
    np.add.at(L, (I, I), weights)
    np.add.at(L, (J, J), weights)
    np.add.at(L, (I, J), -weights)
    np.add.at(L, (J, I), -weights)
    return L


def orbit_edge_matrix(graph: SignedGainGraph, k: int) -> np.ndarray:
    """Sum over every group element a of F_{(a,u),(a g,v)}.

    This is the literal sum, so a self-paired orbit (loop with an
    involutive gain) is counted twice.
    """
    e = graph.edges[k]
    G = graph.group
    F = np.zeros((graph.n, graph.n))
    for a in range(G.order):
        F += edge_matrix(graph.vertex_index(a, e.u), graph.vertex_index(G.multiply(a, e.gain), e.v), graph.n)
    return F


def center(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    return points - points.mean(axis=0)


def gram_centered(points: np.ndarray) -> np.ndarray:
    """Gram matrix of the centered configuration, n x n."""
    Q = center(points)
    return Q @ Q.T


def affine_rank(points: np.ndarray, tol_rel: float = RANK_TOL) -> int:
    points = np.asarray(points, dtype=float)
    if len(points) <= 1:
        return 0
    return numeric_rank(points[1:] - points[0], tol_rel)


def equilibrium_matrix(n: int, members: Sequence[tuple[int, int]], points: np.ndarray) -> np.ndarray:
    """The (d n) x |E| matrix whose nullspace is the equilibrium stress space."""
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    A = np.zeros((n, d, len(members)))
    for k, (i, j) in enumerate(members):
        diff = points[i] - points[j]
        A[i, :, k] += diff
        A[j, :, k] -= diff
    return A.reshape(n * d, len(members))


def equilibrium_stress_space(n: int, members: Sequence[tuple[int, int]], points: np.ndarray,
                             tol_rel: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns, one row per member) of equilibrium stresses."""
    if not members:
        return np.zeros((0, 0))
    return nullspace(equilibrium_matrix(n, members, points), tol_rel)


def properness(signs, weights, strict: bool = False, tol_strict: float | None = None) -> bool:
    """Sign compatibility of a stress with cable/bar/strut labels.

    ``tol_strict`` is an absolute floor; by default it is 1e-9 times the
    largest weight magnitude.
    """
    signs = np.asarray(signs)
    weights = np.asarray(weights, dtype=float)
    prod = signs * weights
    active = signs != 0
    if not strict:
        return bool(np.all(prod[active] >= 0))
    if tol_strict is None:
        tol_strict = STRICT_REL * (np.abs(weights).max() if weights.size else 0.0)
    return bool(np.all(prod[active] > tol_strict))


def equilibrium_residual(points: np.ndarray, L: np.ndarray) -> float:
    """Relative residual of P L = 0."""
    P = center(points).T
    num = np.linalg.norm(P @ L)
    den = np.linalg.norm(P) * np.linalg.norm(L)
    return float(num / den) if den > 0 else 0.0


@dataclass(frozen=True, eq=False)
class SymmetricTensegrity:
    """Lifted signed graph with a configuration compatible with a point group.

    The non-symmetric case uses the trivial group.
    """

    graph: SignedGainGraph
    point_group: PointGroup
    points: np.ndarray  # (n, d), lifted vertex order
    lifted: LiftedGraph

    @property
    def group(self) -> FiniteGroup:
        return self.graph.group

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def n_hat(self) -> int:
        return self.graph.n_hat

    @property
    def d(self) -> int:
        return self.point_group.d

    @property
    def representatives(self) -> np.ndarray:
        """(n_hat, d) rows for the identity-coset vertices."""
        e = self.group.identity
        return self.points[[self.graph.vertex_index(e, v) for v in range(self.n_hat)]]

    @classmethod
    def from_representatives(cls, graph: SignedGainGraph, point_group: PointGroup,
                             reps: np.ndarray) -> "SymmetricTensegrity":
        reps = np.asarray(reps, dtype=float)
        if reps.shape != (graph.n_hat, point_group.d):
            raise TensegrityError(f"representatives must have shape {(graph.n_hat, point_group.d)}, got {reps.shape}")
        if point_group.group is not graph.group and point_group.group.order != graph.group.order:
            raise TensegrityError("point group and gain graph use different groups")
        pts = np.einsum("gij,vj->gvi", point_group.matrices, reps).reshape(graph.n, point_group.d)
        return cls._make(graph, point_group, pts)

    @classmethod
    def from_points(cls, graph: SignedGainGraph, point_group: PointGroup, points: np.ndarray,
                    tol: float = COMPAT_TOL) -> "SymmetricTensegrity":
        points = np.asarray(points, dtype=float)
        if points.shape != (graph.n, point_group.d):
            raise TensegrityError(f"points must have shape {(graph.n, point_group.d)}, got {points.shape}")
        T = cls._make(graph, point_group, points)
        err, where = T.compatibility_residual()
        if err > tol * max(1.0, float(np.abs(points).max())):
            g, i = where
            raise TensegrityError(
                f"configuration is not compatible with the point group: worst pair "
                f"({graph.group.elements[g]}, {graph.vertex_label(i)}) deviates by {err:.3e}"
            )
        return T

    @classmethod
    def _make(cls, graph, point_group, points):
        if not np.all(np.isfinite(points)):
            raise TensegrityError("configuration has non-finite entries")
        return cls(graph, point_group, points, graph.lift())

    def compatibility_residual(self) -> tuple[float, tuple[int, int]]:
        """max |action(g) p_(a,v) - p_(g a,v)| with the worst (g, lifted vertex)."""
        G, gr = self.group, self.graph
        worst, where = 0.0, (G.identity, 0)
        for g in range(G.order):
            for i in range(self.n):
                a, v = divmod(i, self.n_hat)
                j = gr.vertex_index(G.multiply(g, a), v)
                err = float(np.abs(self.point_group.matrices[g] @ self.points[i] - self.points[j]).max())
                if err > worst:
                    worst, where = err, (g, i)
        return worst, where

    # --- Laplacians

    def member_laplacian(self, member_weights) -> np.ndarray:
        return weighted_laplacian(self.n, self.lifted.members, member_weights)

    def quotient_laplacian(self, quotient_weights) -> np.ndarray:
        return self.member_laplacian(self.lifted.expand(quotient_weights))

    def orbit_sizes(self) -> np.ndarray:
        return np.bincount(self.lifted.orbit_of, minlength=len(self.graph.edges))

    # --- stresses

    def stress_space(self, tol_rel: float = RANK_TOL) -> np.ndarray:
        """Equilibrium stresses on lifted members (columns)."""
        return equilibrium_stress_space(self.n, self.lifted.members, self.points, tol_rel)

    def expansion_matrix(self) -> np.ndarray:
        """|members| x |quotient edges| 0/1 matrix expanding orbit weights."""
        E = np.zeros((self.lifted.num_members, len(self.graph.edges)))
        E[np.arange(self.lifted.num_members), self.lifted.orbit_of] = 1.0
        return E

    def symmetric_stress_space(self, tol_rel: float = RANK_TOL) -> np.ndarray:
        """Orbit-constant equilibrium stresses, one row per quotient edge.

        Only the equilibrium rows at representative vertices are imposed;
        compatibility carries them to the rest of each orbit.
        """
        if not self.graph.edges:
            return np.zeros((0, 0))
        A = equilibrium_matrix(self.n, self.lifted.members, self.points) @ self.expansion_matrix()
        d = self.d
        e = self.group.identity
        rows = np.concatenate([
            np.arange(d) + d * self.graph.vertex_index(e, v) for v in range(self.n_hat)
        ])
        return nullspace(A[rows], tol_rel)

    def spans(self) -> bool:
        return affine_rank(self.points) == self.d
