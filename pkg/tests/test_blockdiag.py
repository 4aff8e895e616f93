import numpy as np
import pytest

from tensecert.blockdiag import (
    BlockError,
    ConeKind,
    assemble_blocks,
    block_rank_targets,
    block_ranks,
    block_structure,
    extract_blocks,
    gram_blocks_explicit,
    gram_factors,
    index_set,
    orbit_edge_blocks,
    psi_transform,
    psi_vectors,
    rank_budget,
)
from tensecert.gain_graph import SignedGainGraph
from tensecert.groups import catalogue_group, cyclic
from tensecert.irreps import block_sum, catalogue_irreps, multiplicities
from tensecert.tensegrity import PointGroup, SymmetricTensegrity, gram_centered, orbit_edge_matrix

from conftest import complete_gain_graph, point_group_pairs, random_symmetric, scramble
from test_gain_graph import halfturn_graph


def structure(name, n_hat):
    G = catalogue_group(name)
    return G, block_structure(catalogue_irreps(G), n_hat)


def test_bookkeeping():
    for name in ("Z2", "C4", "D4", "Q8", "S4", "C7"):
        for nh in (1, 2, 3):
            G, S = structure(name, nh)
            assert sum(b.copies * b.side for b in S.blocks) == S.n == G.order * nh
            assert S.blocks[0].cone is ConeKind.LAPLACIAN_PSD and S.blocks[0].side == nh


def test_cone_kinds():
    _, S = structure("Q8", 2)
    assert [b.cone for b in S.blocks] == [ConeKind.LAPLACIAN_PSD] + [ConeKind.PSD] * 3 + [ConeKind.H_PSD]
    _, S = structure("C4", 1)
    assert [b.cone for b in S.blocks] == [ConeKind.LAPLACIAN_PSD, ConeKind.PSD, ConeKind.C_PSD]
    assert [(b.side, b.copies) for b in S.blocks] == [(1, 1), (1, 1), (2, 1)]


def test_psi_identity_and_size_check():
    G, S = structure("S3", 2)
    assert np.allclose(psi_transform(np.eye(12), S.frame, 2), np.eye(12))
    with pytest.raises(BlockError):
        psi_transform(np.eye(5), S.frame, 2)


@pytest.mark.parametrize("name", ["Z2", "C4", "D4", "S3", "Q8", "C6"])
def test_psi_of_regular_tensor_unit(name, rng):
    G, S = structure(name, 2)
    Euv = np.zeros((2, 2))
    Euv[0, 1] = 1
    for g in range(G.order):
        Y = psi_transform(np.kron(G.regular_representation(g), Euv), S.frame, 2)
        expected = assemble_blocks([np.kron(b.irrep.matrices[g], Euv) for b in S.blocks], S)
        assert np.abs(Y - expected).max() < 1e-12


def test_psi_preserves_spectrum(rng):
    G, S = structure("D4", 3)
    X = rng.standard_normal((24, 24))
    X = X + X.T
    Y = psi_transform(X, S.frame, 3)
    assert np.allclose(np.linalg.eigvalsh(X), np.linalg.eigvalsh(Y))
    assert abs(np.linalg.norm(X) - np.linalg.norm(Y)) < 1e-12


def test_extract_examples():
    G = catalogue_group("Z2").relabel(["+1", "-1"])
    H = halfturn_graph()
    S = block_structure(catalogue_irreps(G), 3)
    blocks, res = extract_blocks(np.zeros((6, 6)), S)
    assert [B.shape for B in blocks] == [(3, 3), (3, 3)] and res.worst == 0.0
    L = sum(orbit_edge_matrix(H, k) for k in range(len(H.edges)))
    blocks, res = extract_blocks(psi_transform(L, S.frame, 3), S, check=True)
    assert res.worst < 1e-12
    assert np.abs(blocks[0] @ np.ones(3)).max() < 1e-12
    _, S4 = structure("C4", 1)
    assert [b.side for b in S4.blocks] == [1, 1, 2]


def test_extract_rejects_non_symmetric(rng):
    _, S = structure("C3", 2)
    X = rng.standard_normal((6, 6))
    with pytest.raises(BlockError, match="not group-symmetric"):
        extract_blocks(psi_transform(X + X.T, S.frame, 2), S, check=True)


@pytest.mark.parametrize("name", ["Z2", "C3", "C4", "D4", "S3", "Q8", "C5", "S4"])
def test_orbit_edge_blocks_closed_form(name):
    G = catalogue_group(name)
    H = complete_gain_graph(G, 2)
    S = block_structure(catalogue_irreps(G), 2)
    for k in range(len(H.edges)):
        oracle, res = extract_blocks(psi_transform(orbit_edge_matrix(H, k), S.frame, 2), S)
        assert res.worst < 1e-10
        for A, B in zip(orbit_edge_blocks(H, S, k), oracle):
            assert np.abs(A - B).max() < 1e-10


def test_trivial_block_is_laplacian(rng):
    G = catalogue_group("Q8")
    H = complete_gain_graph(G, 3)
    T = random_symmetric(G, catalogue_irreps(G)[4].matrices, H, rng)
    S = block_structure(catalogue_irreps(G), 3)
    L = T.quotient_laplacian(rng.standard_normal(len(H.edges)))
    blocks, _ = extract_blocks(psi_transform(L, S.frame, 3), S)
    assert np.abs(blocks[0] @ np.ones(3)).max() < 1e-10


def oracle_gram(T, S):
    return extract_blocks(psi_transform(gram_centered(T.points), S.frame, T.n_hat), S)


def test_z2_halfturn_gram_example(rng):
    G = catalogue_group("Z2")
    action = np.stack([np.eye(2), -np.eye(2)])
    H = halfturn_graph()
    T = random_symmetric(H.group, action, H, rng)
    S = block_structure(catalogue_irreps(G), 3)
    oracle, _ = oracle_gram(T, S)
    P = T.representatives  # centroid is zero for a half-turn
    assert np.abs(oracle[0]).max() < 1e-12
    assert np.allclose(oracle[1], 2 * (np.outer(P[:, 0], P[:, 0]) + np.outer(P[:, 1], P[:, 1])))
    explicit = gram_blocks_explicit(P, T.points, catalogue_irreps(G), action)
    for A, B in zip(explicit, oracle):
        assert np.abs(A - B).max() < 1e-12


def test_trivial_action_gram_example(rng):
    G = catalogue_group("S3")
    irreps = catalogue_irreps(G)
    H = complete_gain_graph(G, 2)
    action = PointGroup.trivial(G, 2).matrices
    T = random_symmetric(G, action, H, rng)
    S = block_structure(irreps, 2)
    oracle, _ = oracle_gram(T, S)
    for B in oracle[1:]:
        assert np.abs(B).max() < 1e-12
    Pc = T.representatives - T.points.mean(axis=0)
    assert np.allclose(oracle[0], G.order * Pc @ Pc.T)


def test_c4_rotation_gram_example():
    G = cyclic(4)
    irreps = catalogue_irreps(G)
    H = SignedGainGraph.build(G, ["v"], [(0, 0, 1, 1)])
    T = SymmetricTensegrity.from_representatives(H, PointGroup(G, irreps[2].matrices), [[0.7, -0.2]])
    S = block_structure(irreps, 1)
    oracle, res = oracle_gram(T, S)
    assert res.pattern < 1e-12
    explicit = gram_blocks_explicit(T.representatives, T.points, irreps, T.point_group.matrices)
    assert np.abs(explicit[2] - oracle[2]).max() < 1e-12
    assert block_ranks(explicit)[2] == 2


@pytest.mark.parametrize("pair", point_group_pairs(), ids=lambda p: f"{p[0]}-{p[1]}")
def test_gram_blocks_scrambled_theta(pair, rng):
    name, _, action = pair
    G = catalogue_group(name)
    irreps = catalogue_irreps(G)
    action = scramble(action, rng)
    H = complete_gain_graph(G, 2)
    S = block_structure(irreps, 2)
    m = multiplicities(action, irreps)
    for _ in range(3):
        T = random_symmetric(G, action, H, rng)
        oracle, _ = oracle_gram(T, S)
        explicit = gram_blocks_explicit(T.representatives, T.points, irreps, action)
        for A, B, r, k in zip(explicit, oracle, irreps, m):
            assert np.abs(A - B).max() < 1e-10
            assert np.linalg.matrix_rank(A, tol=1e-9 * max(1, np.abs(A).max())) <= r.fdim * k


def test_gram_factor_shapes():
    G = catalogue_group("Q8")
    irreps = catalogue_irreps(G)
    action = irreps[4].matrices
    reps = np.array([[1.0, 0.5, -0.3, 0.2], [0.1, 0.2, 0.3, 0.4]])
    pts = np.einsum("gij,vj->gvi", action, reps).reshape(-1, 4)
    facs = gram_factors(reps, pts, irreps, action)
    assert [len(f) for f in facs] == [0, 0, 0, 0, 1]
    assert facs[4][0].shape == (8, 4)
    assert len(index_set(irreps, [0, 0, 0, 0, 1])) == 4


def test_misaligned_y_rejected():
    G = cyclic(4)
    irreps = catalogue_irreps(G)
    action = irreps[2].matrices
    with pytest.raises(BlockError, match="aligning"):
        # a reflection conjugates the rotation to its inverse
        gram_factors(np.eye(2)[:1], np.zeros((4, 2)), irreps, action, align=np.diag([1.0, -1.0]))


def test_rank_budget_examples():
    G = catalogue_group("Z2")
    S = block_structure(catalogue_irreps(G), 3)
    budget = rank_budget(S, [2, 1], 2, [0, 2])
    assert [e.target for e in budget.entries] == [2, 1]
    assert budget.total == budget.expected == 3 and budget.ok
    S1 = block_structure(catalogue_irreps(cyclic(1)), 6)
    assert block_rank_targets(S1, [2]) == [6 - 2 - 1]
    S4 = block_structure(catalogue_irreps(cyclic(4)), 1)
    b = rank_budget(S4, [0, 1, 0], 2, [0, 0, 1])
    assert [e.target for e in b.entries] == [0, 1, 0]
    assert b.total == b.expected == 4 - 2 - 1 and b.ok
    assert not rank_budget(S4, [0, 1, 1], 2, [0, 0, 1]).ok


def test_block_ranks_relative_to_largest_block():
    assert block_ranks([np.eye(2), 1e-14 * np.eye(3), np.zeros((0, 0))]) == [2, 0, 0]
    assert block_ranks([np.zeros((2, 2))]) == [0]


def test_psi_vectors_matches_matrix_psi(rng):
    G, S = structure("C3", 2)
    V = rng.standard_normal((6, 2))
    assert np.allclose(psi_vectors(V, S.frame, 2) @ psi_vectors(V, S.frame, 2).T, psi_transform(V @ V.T, S.frame, 2))


def test_block_sum_shape():
    irreps = catalogue_irreps(catalogue_group("S4"))
    assert block_sum(irreps, [1, 0, 1, 0, 0], 3).shape == (4, 4)
