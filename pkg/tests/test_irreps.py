import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensecert.groups import catalogue_group, catalogue_names, cyclic, quaternion_group
from tensecert.irreps import (
    FieldType,
    IrrepError,
    IrrepSet,
    RealIrrep,
    aligning_change,
    block_sum,
    canonicalize_basis,
    catalogue_irreps,
    classify_type,
    commutant_dimension,
    coordinate_vector,
    degree_identity,
    field_basis,
    frame_residual,
    intertwiner_dimension,
    make_irrep,
    multiplicities,
    pattern_residual,
    symmetry_adapted_basis,
    verify_orthogonality_basis,
)
from tensecert.linalg import nullspace

ALL = catalogue_names()


def by_name(G, name):
    return next(r for r in catalogue_irreps(G) if r.name == name)


def scrambled(mats, seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((mats.shape[1],) * 2))
    return np.einsum("ji,gjk,kl->gil", Q, mats, Q)


def orthogonal_intertwiner(A, B):
    """Solve for orthogonal T with T A(g) T^T = B(g); None if none exists."""
    d = A.shape[1]
    rows = [np.kron(b, np.eye(d)) - np.kron(np.eye(d), a.T) for a, b in zip(A, B)]
    N = nullspace(np.vstack(rows), 1e-9)
    if N.shape[1] == 0:
        return None
    # any nonzero intertwiner of irreducibles is a multiple of an orthogonal one
    T = N[:, 0].reshape(d, d)
    U, s, Vt = np.linalg.svd(T)
    return U @ Vt


def test_commutant_dimension_examples():
    C4 = cyclic(4)
    assert commutant_dimension(by_name(C4, "tri")) == 1
    assert commutant_dimension(by_name(C4, "E1")) == 2
    assert commutant_dimension(by_name(quaternion_group(), "H")) == 4


def test_classify_examples():
    Z2 = catalogue_group("Z2")
    assert classify_type(by_name(Z2, "sgn")) is FieldType.REAL
    assert classify_type(by_name(cyclic(3), "E1")) is FieldType.COMPLEX
    assert classify_type(by_name(quaternion_group(), "H")) is FieldType.QUATERNIONIC


def test_reducible_input_rejected():
    G = cyclic(2)
    with pytest.raises(IrrepError, match="not irreducible"):
        commutant_dimension(np.stack([np.eye(3), np.eye(3)]))
    with pytest.raises(IrrepError):
        make_irrep(G, np.stack([np.eye(2), np.eye(2)]), "twice-trivial")


def test_declared_type_mismatch():
    C4 = cyclic(4)
    with pytest.raises(IrrepError, match="declared"):
        make_irrep(C4, by_name(C4, "E1").matrices, "E", field="real")


def test_non_homomorphism_rejected():
    C3 = cyclic(3)
    mats = by_name(C3, "E1").matrices.copy()
    mats[1] = mats[1].T
    with pytest.raises(IrrepError, match="homomorphism"):
        make_irrep(C3, mats)


def test_real_canonicalization_is_noop():
    r = by_name(catalogue_group("S3"), "std")
    out, T = canonicalize_basis(r, return_transform=True)
    assert out is r and np.array_equal(T, np.eye(2))


@pytest.mark.parametrize("group,name", [("C4", "E1"), ("C3", "E1"), ("C5", "E2"), ("C12", "E5"), ("Q8", "H")])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_scramble_then_recover(group, name, seed):
    G = catalogue_group(group)
    ref = by_name(G, name)
    mats = scrambled(ref.matrices, seed)
    if ref.degree > 2:
        # every orthogonal 2x2 change keeps the complex pattern, so only larger degrees scramble
        assert pattern_residual(mats, ref.field) > 1e-3
    rep = make_irrep(G, mats, name)
    assert rep.field is ref.field
    assert pattern_residual(rep.matrices, rep.field) < 1e-10
    T = orthogonal_intertwiner(mats, rep.matrices)
    assert T is not None
    assert np.abs(np.einsum("ij,gjk,lk->gil", T, mats, T) - rep.matrices).max() < 1e-9


def test_c4_pattern_entries():
    rep = make_irrep(cyclic(4), scrambled(by_name(cyclic(4), "E1").matrices, 5))
    for m in rep.matrices:
        assert abs(m[0, 0] - m[1, 1]) < 1e-10 and abs(m[0, 1] + m[1, 0]) < 1e-10


def test_coordinate_vector_examples():
    Z2 = catalogue_group("Z2")
    tri, sgn = by_name(Z2, "tri"), by_name(Z2, "sgn")
    E11 = np.ones((1, 1))
    assert np.array_equal(coordinate_vector(tri, E11), [1, 1])
    assert np.array_equal(coordinate_vector(sgn, E11), [1, -1])
    C4 = cyclic(4)
    E = by_name(C4, "E1")
    assert np.allclose(coordinate_vector(E, np.eye(2)), [1, 0, -1, 0])
    with pytest.raises(IrrepError):
        coordinate_vector(E, np.array([[1.0, 0], [0, 0]]))


def test_field_basis_sizes():
    Q = quaternion_group()
    assert len(field_basis(by_name(Q, "H"))) == 4
    assert len(field_basis(by_name(cyclic(6), "E2"))) == 2
    assert len(field_basis(by_name(catalogue_group("S4"), "std"))) == 9


@pytest.mark.parametrize("name", ALL)
def test_degree_identity_exact(name):
    irreps = catalogue_irreps(catalogue_group(name))
    lhs, order = degree_identity(irreps)
    assert lhs == order
    # exact rational check of the weighted identity
    from fractions import Fraction
    assert sum(Fraction(r.degree ** 2, r.fdim) for r in irreps) == order
    if all(r.field is FieldType.REAL for r in irreps):
        assert sum(r.degree ** 2 for r in irreps) == order


def test_q8_degree_split():
    irreps = catalogue_irreps(quaternion_group())
    assert sorted((r.degree, r.fdim) for r in irreps) == [(1, 1)] * 4 + [(4, 4)]


@pytest.mark.parametrize("name", ALL)
def test_orthogonality_report(name):
    G = catalogue_group(name)
    rep = verify_orthogonality_basis(catalogue_irreps(G))
    assert rep.ok and rep.count == rep.expected == G.order
    assert rep.max_deviation < 1e-10


def test_orthogonality_counts():
    assert verify_orthogonality_basis(catalogue_irreps(catalogue_group("S3"))).count == 6
    assert verify_orthogonality_basis(catalogue_irreps(cyclic(4))).count == 4
    assert verify_orthogonality_basis(catalogue_irreps(catalogue_group("Z2"))).count == 2


@pytest.mark.parametrize("name", ALL)
def test_commutant_matches_type(name):
    for r in catalogue_irreps(catalogue_group(name)):
        assert commutant_dimension(r) == r.fdim
        assert pattern_residual(r.matrices, r.field) < 1e-10


def test_set_order_and_validation():
    G = catalogue_group("C6")
    irreps = catalogue_irreps(G)
    assert irreps[0].is_trivial
    fields = [r.field for r in irreps]
    assert fields == sorted(fields, key=lambda f: f.dim)
    with pytest.raises(IrrepError, match="incomplete"):
        IrrepSet(G, list(irreps)[:-1])
    dup = list(irreps)[:-1] + [RealIrrep(G, irreps[2].matrices, irreps[2].field, "copy")]
    with pytest.raises(IrrepError, match="equivalent"):
        IrrepSet(G, dup)


def test_sign_conjugate_irreps_are_equivalent():
    # rho and its complex conjugate are the same real irrep
    E = by_name(cyclic(5), "E1")
    flip = np.diag([1.0, -1.0])
    conj = np.einsum("ij,gjk,kl->gil", flip, E.matrices, flip)
    assert intertwiner_dimension(E.matrices, conj) == 2


@pytest.mark.parametrize("name", ALL)
def test_symmetry_adapted_basis(name):
    G = catalogue_group(name)
    irreps = catalogue_irreps(G)
    Z = symmetry_adapted_basis(G, irreps)
    assert np.abs(Z.T @ Z - np.eye(G.order)).max() < 1e-12
    err, _ = frame_residual(G.regular_matrices(), Z, irreps, [r.copies for r in irreps])
    assert err < 1e-10
    assert np.allclose(Z[:, 0], 1 / np.sqrt(G.order))


def test_z2_basis_explicit():
    G = catalogue_group("Z2")
    Z = symmetry_adapted_basis(G, catalogue_irreps(G))
    s = 1 / np.sqrt(2)
    assert np.allclose(np.abs(Z), s) and np.allclose(Z[:, 0], [s, s])
    assert np.allclose(Z.T @ G.regular_representation(1) @ Z, np.diag([1, -1]))


def test_c3_and_q8_block_shapes():
    C3 = cyclic(3)
    irreps = catalogue_irreps(C3)
    assert [r.copies for r in irreps] == [1, 1]
    Z = symmetry_adapted_basis(C3, irreps)
    M = Z.T @ C3.regular_representation(1) @ Z
    assert abs(M[0, 0] - 1) < 1e-12
    assert np.allclose(M[1:, 1:], irreps[1].matrices[1])
    Q = quaternion_group()
    irreps = catalogue_irreps(Q)
    assert [r.copies for r in irreps] == [1, 1, 1, 1, 1]
    Z = symmetry_adapted_basis(Q, irreps)
    for g in range(8):
        M = Z.T @ Q.regular_representation(g) @ Z
        assert np.abs(M[4:, :4]).max() < 1e-12 and np.abs(M[:4, :4] - np.diag(np.diag(M[:4, :4]))).max() < 1e-12


def _char_oracle(action, rep):
    # multiplicity = <chi_theta, chi_rho> / (|G| dim End(rho))
    return np.trace(action, axis1=1, axis2=2) @ np.trace(rep.matrices, axis1=1, axis2=2) / (len(action) * commutant_dimension(rep))


def test_multiplicity_examples():
    Z2 = catalogue_group("Z2")
    irreps = catalogue_irreps(Z2)
    assert multiplicities(np.stack([np.eye(2), -np.eye(2)]), irreps) == [0, 2]
    S4 = catalogue_group("S4")
    irreps = catalogue_irreps(S4)
    triv = np.broadcast_to(np.eye(3), (24, 3, 3))
    assert multiplicities(triv, irreps) == [3, 0, 0, 0, 0]
    C4 = cyclic(4)
    irreps = catalogue_irreps(C4)
    rot = by_name(C4, "E1").matrices
    m = multiplicities(rot, irreps)
    assert m == [0, 0, 1]
    assert sum(r.degree * k for r, k in zip(irreps, m)) == 2
    for r, k in zip(irreps, m):
        assert np.isclose(_char_oracle(rot, r), k)


def test_multiplicities_reject_non_representation():
    irreps = catalogue_irreps(cyclic(3))
    bad = np.stack([np.eye(2), np.eye(2), -np.eye(2)])
    with pytest.raises(IrrepError):
        multiplicities(bad, irreps)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["C3", "C4", "D4", "S3", "Q8", "C6", "S4"]), st.integers(0, 2**31), st.data())
def test_aligning_change_property(name, seed, data):
    G = catalogue_group(name)
    irreps = catalogue_irreps(G)
    picks = data.draw(st.lists(st.integers(0, len(irreps) - 1), min_size=1, max_size=3))
    mults = [picks.count(i) for i in range(len(irreps))]
    action = np.stack([block_sum(irreps, mults, g) for g in range(G.order)])
    action = scrambled(action, seed)
    Y = aligning_change(action, irreps)
    assert np.abs(Y @ Y.T - np.eye(action.shape[1])).max() < 1e-10
    err, _ = frame_residual(action, Y.T, irreps, mults)
    assert err < 1e-10


def test_characters_orthogonal():
    for name in ("S4", "D6", "Q8", "C7"):
        irreps = catalogue_irreps(catalogue_group(name))
        for a, b in itertools.combinations(irreps, 2):
            assert abs(a.character() @ b.character()) < 1e-9
