"""Signed gain graphs over a finite group and their lifts.

A quotient edge ``(u, v, g, sign)`` stands for the orbit of lifted members
``{(a, u), (a g, v)}``.  The encodings ``(u, v, g)`` and ``(v, u, g^-1)`` name
the same edge; the lexicographically smaller one is stored.  Lifted vertex
``(g, v)`` sits at index ``g * n_hat + v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import FiniteGroup, GroupError, trivial_group


class GraphError(ValueError):
    pass


SIGN_NAMES = {1: "cable", 0: "bar", -1: "strut"}


@dataclass(frozen=True)
class QuotientEdge:
    u: int
    v: int
    gain: int
    sign: int


def canonical_edge(u: int, v: int, gain: int, group: FiniteGroup) -> tuple[int, int, int]:
    alt = (v, u, group.inverse(gain))
    return min((u, v, gain), alt)


@dataclass(frozen=True, eq=False)
class SignedGainGraph:
    group: FiniteGroup
    vertices: tuple[str, ...]
    edges: tuple[QuotientEdge, ...]

    @classmethod
    def build(cls, group: FiniteGroup, vertices: Sequence[str],
              edges: Iterable[tuple[int, int, int, int]]) -> "SignedGainGraph":
        """Canonicalize and validate ``(u, v, gain, sign)`` tuples given as indices."""
        vertices = tuple(str(v) for v in vertices)
        if len(set(vertices)) != len(vertices):
            raise GraphError("vertex names must be distinct")
        nv = len(vertices)
        seen: dict[tuple[int, int, int], int] = {}
        out = []
        for k, (u, v, g, s) in enumerate(edges):
            if not (0 <= u < nv and 0 <= v < nv):
                raise GraphError(f"edge {k}: vertex index out of range")
            if s not in (-1, 0, 1):
                raise GraphError(f"edge {k}: sign must be -1, 0 or 1")
            try:
                key = canonical_edge(int(u), int(v), int(g), group)
            except GroupError as exc:
                raise GraphError(f"edge {k}: {exc}") from None
            if key[0] == key[1] and key[2] == group.identity:
                raise GraphError(f"edge {k}: loop at {vertices[u]!r} with the identity label")
            if key in seen:
                raise GraphError(f"edge {k} duplicates edge {seen[key]} after canonicalization")
            seen[key] = k
            out.append(QuotientEdge(*key, int(s)))
        return cls(group, vertices, tuple(out))

    @classmethod
    def plain(cls, vertices: Sequence[str], edges: Iterable[tuple[int, int, int]]) -> "SignedGainGraph":
        """Non-symmetric graph: wrap with the trivial group."""
        G = trivial_group()
        return cls.build(G, vertices, [(u, v, 0, s) for u, v, s in edges])

    @property
    def n_hat(self) -> int:
        return len(self.vertices)

    @property
    def n(self) -> int:
        return self.group.order * self.n_hat

    @property
    def signs(self) -> np.ndarray:
        return np.array([e.sign for e in self.edges], dtype=int)

    def vertex_index(self, g: int, v: int) -> int:
        return g * self.n_hat + v

    def vertex_label(self, i: int) -> str:
        g, v = divmod(i, self.n_hat)
        if self.group.order == 1:
            return self.vertices[v]
        return f"({self.group.elements[g]},{self.vertices[v]})"

    def edge_orbit(self, k: int) -> list[tuple[int, int]]:
        """Distinct undirected lifted edges {(a,u),(a g,v)} of quotient edge k, in order of a."""
        e = self.edges[k]
        G = self.group
        out: list[tuple[int, int]] = []
        seen = set()
        for a in range(G.order):
            i = self.vertex_index(a, e.u)
            j = self.vertex_index(G.multiply(a, e.gain), e.v)
            pair = (min(i, j), max(i, j))
            if pair not in seen:
                seen.add(pair)
                out.append(pair)
        return out

    def lift(self) -> "LiftedGraph":
        members: list[tuple[int, int]] = []
        orbit_of: list[int] = []
        for k in range(len(self.edges)):
            for pair in self.edge_orbit(k):
                members.append(pair)
                orbit_of.append(k)
        first: dict[tuple[int, int], int] = {}
        parallel = []
        for m, pair in enumerate(members):
            if pair in first:
                parallel.append((first[pair], m))
            else:
                first[pair] = m
        signs = np.array([self.edges[k].sign for k in orbit_of], dtype=int)
        return LiftedGraph(
            n=self.n,
            labels=tuple(self.vertex_label(i) for i in range(self.n)),
            members=tuple(members),
            signs=signs,
            orbit_of=np.array(orbit_of, dtype=int),
            vertex_orbit=np.arange(self.n) % self.n_hat,
            parallel=tuple(parallel),
        )


@dataclass(frozen=True, eq=False)
class LiftedGraph:
    n: int
    labels: tuple[str, ...]
    members: tuple[tuple[int, int], ...]
    signs: np.ndarray
    orbit_of: np.ndarray
    vertex_orbit: np.ndarray
    parallel: tuple[tuple[int, int], ...] = ()

    @property
    def num_members(self) -> int:
        return len(self.members)

    def expand(self, quotient_weights: np.ndarray) -> np.ndarray:
        """Per-member weights from per-orbit weights."""
        return np.asarray(quotient_weights, dtype=float)[self.orbit_of]

    def neighbors(self) -> list[set[int]]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.members:
            nb[i].add(j)
            nb[j].add(i)
        return nb
