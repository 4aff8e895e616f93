"""Finite groups given by Cayley tables, plus a built-in catalogue.

Elements carry string ids for I/O; every computation works on indices.
The catalogue groups remember how they were built (``kind``) so that
:mod:`tensecert.irreps` can attach closed-form irreducible representations.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class GroupError(ValueError):
    """Raised for malformed tables and unknown elements."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    name: str
    elements: tuple[str, ...]
    table: np.ndarray
    identity: int
    kind: tuple = ("table",)
    _inverses: np.ndarray = field(init=False, repr=False)
    _lookup: dict = field(init=False, repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        inv = np.argmax(t == self.identity, axis=1)
        object.__setattr__(self, "_inverses", inv)
        object.__setattr__(self, "_lookup", {e: i for i, e in enumerate(self.elements)})

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def _check(self, g: int) -> int:
        if not isinstance(g, (int, np.integer)) or not 0 <= g < self.order:
            raise GroupError(f"element index {g!r} out of range for {self.name} (order {self.order})")
        return int(g)

    def index(self, element_id: str) -> int:
        try:
            return self._lookup[element_id]
        except KeyError:
            raise GroupError(f"unknown element {element_id!r} of group {self.name}") from None

    def multiply(self, g: int, h: int) -> int:
        return int(self.table[self._check(g), self._check(h)])

    def inverse(self, g: int) -> int:
        return int(self._inverses[self._check(g)])

    def regular_representation(self, g: int) -> np.ndarray:
        """Right regular representation: entry 1 at (alpha, alpha*g)."""
        g = self._check(g)
        R = np.zeros((self.order, self.order))
        R[np.arange(self.order), self.table[:, g]] = 1.0
        return R

    def regular_matrices(self) -> np.ndarray:
        return np.stack([self.regular_representation(g) for g in range(self.order)])

    def relabel(self, labels: Sequence[str]) -> "FiniteGroup":
        if len(labels) != self.order or len(set(labels)) != self.order:
            raise GroupError(f"need {self.order} distinct labels for {self.name}")
        return FiniteGroup(self.name, tuple(labels), self.table, self.identity, self.kind)


def from_table(elements: Sequence[str], table, name: str = "custom") -> FiniteGroup:
    """Validate a Cayley table and build a group from it.

    ``table`` entries may be indices or element ids.
    """
    elements = tuple(str(e) for e in elements)
    n = len(elements)
    if n == 0:
        raise GroupError("a group needs at least one element")
    if len(set(elements)) != n:
        raise GroupError("element ids must be distinct")
    lookup = {e: i for i, e in enumerate(elements)}
    rows = []
    for a, row in enumerate(table):
        if len(row) != n:
            raise GroupError(f"table row {a} has length {len(row)}, expected {n}")
        conv = []
        for b, x in enumerate(row):
            if isinstance(x, str):
                if x not in lookup:
                    raise GroupError(f"table[{a}][{b}] names unknown element {x!r}")
                conv.append(lookup[x])
            else:
                conv.append(int(x))
        rows.append(conv)
    if len(rows) != n:
        raise GroupError(f"table has {len(rows)} rows, expected {n}")
    T = np.array(rows, dtype=np.int64)
    if T.min() < 0 or T.max() >= n:
        raise GroupError("table entries out of range")
    perm = np.arange(n)
    for a in range(n):
        if not np.array_equal(np.sort(T[a]), perm):
            raise GroupError(f"table is not a Latin square: row {elements[a]!r} repeats an entry")
        if not np.array_equal(np.sort(T[:, a]), perm):
            raise GroupError(f"table is not a Latin square: column {elements[a]!r} repeats an entry")
    ids = [i for i in range(n) if np.array_equal(T[i], perm) and np.array_equal(T[:, i], perm)]
    if not ids:
        raise GroupError("table has no two-sided identity")
    # (ab)c against a(bc) for all triples at once
    bad = np.argwhere(T[T, :] != T[:, T])
    if bad.size:
        a, b, c = (elements[i] for i in bad[0])
        raise GroupError(f"table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")
    return FiniteGroup(name, elements, T, ids[0])


# ---------------------------------------------------------------- catalogue


def cyclic(n: int) -> FiniteGroup:
    """C_n with elements r^a at index a."""
    if n < 1:
        raise GroupError("cyclic order must be positive")
    ids = tuple(["e"] + ["r" if a == 1 else f"r{a}" for a in range(1, n)])
    a = np.arange(n)
    return FiniteGroup(f"C{n}", ids, (a[:, None] + a[None, :]) % n, 0, ("cyclic", n))


def dihedral(n: int) -> FiniteGroup:
    """D_n of order 2n; index b*n + a holds s^b r^a, with r s = s r^-1."""
    if n < 1:
        raise GroupError("dihedral parameter must be positive")

    def rname(a):
        return "" if a == 0 else ("r" if a == 1 else f"r{a}")

    ids = tuple(
        (("s" + rname(a)) if b else (rname(a) or "e")) for b in range(2) for a in range(n)
    )
    T = np.empty((2 * n, 2 * n), dtype=np.int64)
    for b1, a1, b2, a2 in itertools.product(range(2), range(n), range(2), range(n)):
        a = ((-a1 if b2 else a1) + a2) % n
        T[b1 * n + a1, b2 * n + a2] = ((b1 + b2) % 2) * n + a
    return FiniteGroup(f"D{n}", ids, T, 0, ("dihedral", n))


QUATERNION_UNITS = np.array(
    [[1, 0, 0, 0], [-1, 0, 0, 0], [0, 1, 0, 0], [0, -1, 0, 0],
     [0, 0, 1, 0], [0, 0, -1, 0], [0, 0, 0, 1], [0, 0, 0, -1]], dtype=float)


def quaternion_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product on trailing axis of length 4 (ij = k)."""
    a1, b1, c1, d1 = np.moveaxis(np.asarray(p, dtype=float), -1, 0)
    a2, b2, c2, d2 = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ], axis=-1)


def quaternion_group() -> FiniteGroup:
    ids = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")
    U = QUATERNION_UNITS
    T = np.empty((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            prod = quaternion_product(U[a], U[b])
            T[a, b] = int(np.argmin(np.abs(U - prod).sum(axis=1)))
    return FiniteGroup("Q8", ids, T, 0, ("quaternion",))


def symmetric(n: int) -> FiniteGroup:
    """S_n on {1..n}, one-line ids, composition (p q)(x) = p(q(x))."""
    perms = list(itertools.permutations(range(n)))
    pos = {p: i for i, p in enumerate(perms)}
    T = np.empty((len(perms), len(perms)), dtype=np.int64)
    for i, s in enumerate(perms):
        for j, t in enumerate(perms):
            T[i, j] = pos[tuple(s[t[x]] for x in range(n))]
    ids = tuple("".join(str(x + 1) for x in p) for p in perms)
    return FiniteGroup(f"S{n}", ids, T, 0, ("symmetric", n, tuple(perms)))


def trivial_group() -> FiniteGroup:
    return cyclic(1)


_ALIASES = {"trivial": "C1", "1": "C1", "Z2": "C2", "Cs": "C2", "Ci": "C2", "K4": "D2"}


def catalogue_names() -> list[str]:
    names = [f"C{n}" for n in range(1, 13)] + [f"D{n}" for n in range(1, 9)]
    return names + ["Q8", "S3", "S4"]


def catalogue_group(name: str) -> FiniteGroup:
    """Look up a catalogue group by name (C1..C12, D1..D8, Q8, S3, S4, plus aliases)."""
    key = _ALIASES.get(name, name)
    m = re.fullmatch(r"([CDZ])(\d+)", key)
    if m:
        letter, n = m.group(1), int(m.group(2))
        if letter in "CZ" and 1 <= n <= 12:
            return cyclic(n)
        if letter == "D" and 1 <= n <= 8:
            return dihedral(n)
    if key == "Q8":
        return quaternion_group()
    if key in ("S3", "S4"):
        return symmetric(int(key[1]))
    raise GroupError(f"unknown catalogue group {name!r}; known: {', '.join(catalogue_names())}")
