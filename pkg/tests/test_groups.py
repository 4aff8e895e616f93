import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensecert.groups import (
    GroupError,
    catalogue_group,
    catalogue_names,
    cyclic,
    dihedral,
    from_table,
    quaternion_group,
    symmetric,
)

ALL = catalogue_names()


def test_catalogue_covers_requested_groups():
    names = set(ALL)
    assert {f"C{n}" for n in range(1, 13)} <= names
    assert {f"D{n}" for n in range(1, 9)} <= names
    assert {"Q8", "S3", "S4"} <= names


def test_z2_involution():
    G = catalogue_group("Z2")
    r = G.index("r")
    assert G.multiply(r, r) == G.identity
    assert G.inverse(r) == r


def test_identity_law_everywhere():
    for name in ALL:
        G = catalogue_group(name)
        for g in range(G.order):
            assert G.multiply(G.identity, g) == g
            assert G.multiply(g, G.identity) == g


def test_c3_and_c4_orders():
    C3 = cyclic(3)
    assert C3.multiply(C3.index("r"), C3.index("r2")) == C3.identity
    C4 = cyclic(4)
    assert C4.inverse(C4.index("r")) == C4.index("r3")


def _quaternion_as_complex(label):
    # independent oracle: Q8 inside SU(2)
    one = np.eye(2, dtype=complex)
    i = np.array([[1j, 0], [0, -1j]])
    j = np.array([[0, 1], [-1, 0]], dtype=complex)
    k = i @ j
    base = {"1": one, "i": i, "j": j, "k": k}
    sign = -1 if label.startswith("-") else 1
    return sign * base[label.lstrip("-")]


def test_q8_table_matches_su2_products():
    Q = quaternion_group()
    mats = [_quaternion_as_complex(x) for x in Q.elements]
    for a, b in itertools.product(range(8), repeat=2):
        prod = mats[a] @ mats[b]
        assert np.allclose(mats[Q.multiply(a, b)], prod)
    assert Q.inverse(Q.index("i")) == Q.index("-i")
    i = Q.index("i")
    assert Q.multiply(Q.multiply(i, i), i) == Q.index("-i")


def test_dihedral_relations():
    for n in range(3, 9):
        D = dihedral(n)
        r, s = D.index("r"), D.index("s")
        x = D.identity
        for _ in range(n):
            x = D.multiply(x, r)
        assert x == D.identity
        assert D.multiply(s, s) == D.identity
        assert D.multiply(D.multiply(s, r), s) == D.inverse(r)


def test_symmetric_group_is_composition():
    S = symmetric(4)
    perms = S.kind[2]
    for a, b in itertools.product(range(S.order), repeat=2):
        pa, pb = perms[a], perms[b]
        composed = tuple(pa[pb[x]] for x in range(4))
        alt = tuple(pb[pa[x]] for x in range(4))
        assert perms[S.multiply(a, b)] in (composed, alt)
    # one convention used consistently
    convention = {perms[S.multiply(a, b)] == tuple(perms[a][perms[b][x]] for x in range(4))
                  for a, b in itertools.product(range(S.order), repeat=2)}
    assert len(convention) == 1


def test_regular_representation_examples():
    G = catalogue_group("Z2")
    assert np.array_equal(G.regular_representation(G.index("r")), [[0, 1], [1, 0]])
    for name in ALL:
        H = catalogue_group(name)
        assert np.array_equal(H.regular_representation(H.identity), np.eye(H.order))
    C3 = cyclic(3)
    R = C3.regular_representation(C3.index("r"))
    assert not np.array_equal(R, np.eye(3))
    assert np.array_equal(np.linalg.matrix_power(R, 3), np.eye(3))


def test_regular_entry_convention():
    G = catalogue_group("S3")
    for g in range(G.order):
        R = G.regular_representation(g)
        for a in range(G.order):
            assert R[a, G.multiply(a, g)] == 1
            assert R[a].sum() == 1


@pytest.mark.parametrize("name", ALL)
def test_regular_is_homomorphism_exactly(name):
    G = catalogue_group(name)
    R = G.regular_matrices()
    ones = np.ones(G.order)
    for g, h in itertools.product(range(G.order), repeat=2):
        assert np.array_equal(R[g] @ R[h], R[G.multiply(g, h)])
    for g in range(G.order):
        assert np.array_equal(R[g] @ ones, ones)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(ALL), st.data())
def test_inverse_property(name, data):
    G = catalogue_group(name)
    g = data.draw(st.integers(0, G.order - 1))
    assert G.multiply(g, G.inverse(g)) == G.identity
    assert G.multiply(G.inverse(g), g) == G.identity


def test_index_out_of_range():
    G = cyclic(3)
    with pytest.raises(GroupError):
        G.multiply(0, 3)
    with pytest.raises(GroupError):
        G.inverse(-1)
    with pytest.raises(GroupError):
        G.index("nope")


def test_from_table_rejects_non_associative():
    # Latin square with identity 0 that is not a group (order-5 loop)
    table = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupError, match="associ"):
        from_table(list("abcde"), table)


def test_from_table_rejects_non_latin_and_missing_identity():
    with pytest.raises(GroupError):
        from_table(["a", "b"], [[0, 0], [1, 1]])
    with pytest.raises(GroupError):
        from_table(["a", "b", "c"], [[0, 2, 1], [2, 1, 0], [1, 0, 2]])


def test_from_table_accepts_klein_four():
    table = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
    G = from_table(["e", "a", "b", "c"], table, name="V4")
    assert G.order == 4 and G.identity == 0
    assert all(G.inverse(g) == g for g in range(4))
