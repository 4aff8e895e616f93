import itertools

import numpy as np
import pytest

from tensecert.gain_graph import SignedGainGraph
from tensecert.groups import catalogue_group
from tensecert.io import parse_instance
from tensecert.irreps import catalogue_irreps
from tensecert.tensegrity import PointGroup, SymmetricTensegrity

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)


def complete_gain_graph(G, n_hat, sign=0):
    """Every canonical quotient edge on n_hat vertices except identity loops."""
    edges = []
    seen = set()
    for u, v in itertools.product(range(n_hat), repeat=2):
        for g in range(G.order):
            alt = (v, u, G.inverse(g))
            key = min((u, v, g), alt)
            if key in seen or (u == v and g == G.identity):
                continue
            seen.add(key)
            edges.append((*key, sign))
    return SignedGainGraph.build(G, [f"v{i}" for i in range(n_hat)], edges)


def axis_plus(rho_mats, extra=1):
    """action = rho (+) trivial^extra."""
    k = rho_mats.shape[1]
    out = np.zeros((len(rho_mats), k + extra, k + extra))
    out[:, :k, :k] = rho_mats
    out[:, k:, k:] = np.eye(extra)
    return out


def point_group_pairs():
    """(group name, label, action) pairs covering every cone type."""
    pairs = []

    def irr(name, i):
        return catalogue_irreps(catalogue_group(name))[i].matrices

    pairs.append(("Z2", "halfturn", np.stack([np.eye(2), -np.eye(2)])))
    pairs.append(("Z2", "mirror", np.stack([np.eye(2), np.diag([-1.0, 1.0])])))
    pairs.append(("C3", "axis", axis_plus(irr("C3", 1))))
    pairs.append(("C4", "rot90", irr("C4", 2)))
    pairs.append(("C4", "rot90+sgn", np.stack([
        np.block([[irr("C4", 2)[g], np.zeros((2, 1))], [np.zeros((1, 2)), irr("C4", 1)[g]]])
        for g in range(4)])))
    pairs.append(("D4", "square", irr("D4", 4)))
    pairs.append(("S3", "permutation", np.stack([
        np.block([[np.ones((1, 1)), np.zeros((1, 2))], [np.zeros((2, 1)), m]]) for m in irr("S3", 2)])))
    pairs.append(("Q8", "quaternion", irr("Q8", 4)))
    pairs.append(("C6", "rot60", irr("C6", 2)))
    pairs.append(("S4", "tetrahedral", irr("S4", 2)))
    return pairs


def scramble(action, rng):
    Q, _ = np.linalg.qr(rng.standard_normal((action.shape[1], action.shape[1])))
    return np.einsum("ij,gjk,lk->gil", Q, action, Q)


def random_symmetric(G, action, graph, rng):
    reps = rng.uniform(-1, 1, (graph.n_hat, action.shape[1]))
    return SymmetricTensegrity.from_representatives(graph, PointGroup(G, action), reps)


@pytest.fixture(scope="session")
def fixtures():
    names = ["hexagon_cauchy", "hexagon_nonconvex", "z2_halfturn", "c3_prism", "c4_square",
             "q8_cross_polytope", "hexagon_c2"]
    return {n: parse_instance(f"{n}.json") for n in names}
