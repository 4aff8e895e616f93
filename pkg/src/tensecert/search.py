"""Search for a super-stable stress inside the (symmetric) stress space.

The objective on stress coordinates x is

    g(x) = min( lambda_min(Q^T L(x) Q),  min_e sign_e * weight_e(x) - eps * |x| )

where Q spans the complement of the forced kernel span{P^T, 1}.  It is
concave and positively homogeneous, so its maximum over the unit ball is
positive exactly when a strictly proper stress with PSD Laplacian of rank
n - d - 1 exists.  Maximization uses normalized subgradient steps with a
diminishing step from several seeded starts.  Stress spaces of
dimension at most three also get an exhaustive sphere grid.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .blockdiag import (
    BlockStructure,
    block_rank_targets,
    block_ranks,
    block_structure,
    gram_factors,
    orbit_edge_blocks,
    rank_budget,
)
from .certify import StressCertificate, Tolerances, Verdict, check_super_stable
from .irreps import IrrepSet, catalogue_irreps, multiplicities
from .linalg import complement_basis, psd_rank, range_basis
from .tensegrity import SymmetricTensegrity, center

GRID_CHUNK = 4096


@dataclass(frozen=True)
class SearchConfig:
    max_iters: int = 2000
    multistart: int = 8
    step: float = 0.3
    patience: int = 400
    seed: int = 0
    eps: float = 1e-6
    grid_max_dim: int = 3
    grid_degrees: float = 1.0
    tol: Tolerances = field(default_factory=Tolerances)
    threads: int | None = None

    def __post_init__(self):
        if self.max_iters < 0 or self.multistart < 1:
            raise ValueError("max_iters must be >= 0 and multistart >= 1")


@dataclass
class SearchResult:
    status: str  # FOUND | BOUND_ONLY | EMPTY_STRESS_SPACE
    route: str
    stress_dim: int
    coords: list[float]
    member_stress: list[float]
    quotient_stress: list[float] | None
    value: float
    min_eig: float
    psd_rank: int
    starts: int
    grid_points: int
    certificate: StressCertificate | None = None
    blocks: list[dict] | None = None
    rank_budget: dict | None = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "route": self.route,
            "stress_dim": self.stress_dim,
            "coords": self.coords,
            "objective": self.value,
            "min_eig_restricted": self.min_eig,
            "psd_rank": self.psd_rank,
            "starts": self.starts,
            "grid_points": self.grid_points,
        }


# ----------------------------------------------------------- objectives


class _Spectral:
    """lambda_min of sum_j x_j M_j over one or more independent blocks."""

    def __init__(self, mats_per_block: list[np.ndarray]):
        # each entry: (k, r, r) stack, one matrix per stress coordinate
        self.mats = [M for M in mats_per_block if M.shape[1] > 0]

    def value_and_subgradient(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        best, grad = np.inf, np.zeros_like(x)
        for M in self.mats:
            A = np.einsum("j,jab->ab", x, M)
            w, V = np.linalg.eigh(A)
            if w[0] < best:
                best = float(w[0])
                v = V[:, 0]
                grad = np.einsum("a,jab,b->j", v, M, v)
        return best, grad

    def value(self, x: np.ndarray) -> float:
        return self.value_and_subgradient(x)[0]

    def values(self, X: np.ndarray) -> np.ndarray:
        """Batch values for rows of X."""
        out = np.full(len(X), np.inf)
        for M in self.mats:
            for s in range(0, len(X), GRID_CHUNK):
                A = np.einsum("nj,jab->nab", X[s:s + GRID_CHUNK], M)
                out[s:s + GRID_CHUNK] = np.minimum(out[s:s + GRID_CHUNK], np.linalg.eigvalsh(A)[:, 0])
        return out


class FullObjective(_Spectral):
    """Objective on the whole n x n Laplacian, restricted to the forced-kernel complement."""

    def __init__(self, laps: np.ndarray, points: np.ndarray):
        n = laps.shape[1]
        K = np.column_stack([center(points), np.ones(n)])
        Q = complement_basis(K)
        self.Q = Q
        super().__init__([np.einsum("ai,jab,bk->jik", Q, laps, Q)])


class BlockwiseObjective(_Spectral):
    """Same objective evaluated block by block in symmetry-adapted coordinates."""

    def __init__(self, block_laps: list[np.ndarray], complements: list[np.ndarray]):
        self.Qs = complements
        super().__init__([np.einsum("ai,jab,bk->jik", Q, B, Q) for B, Q in zip(block_laps, complements)])


class SignPart:
    def __init__(self, basis: np.ndarray, signs: np.ndarray, eps: float):
        active = signs != 0
        self.rows = (signs[active, None] * basis[active]) if active.any() else np.zeros((0, basis.shape[1]))
        self.eps = eps

    def value_and_subgradient(self, x):
        if not len(self.rows):
            return np.inf, np.zeros_like(x)
        vals = self.rows @ x
        i = int(np.argmin(vals))
        nx = np.linalg.norm(x)
        g = self.rows[i] - (self.eps * x / nx if nx > 0 else 0.0)
        return float(vals[i] - self.eps * nx), g

    def values(self, X):
        if not len(self.rows):
            return np.full(len(X), np.inf)
        return (X @ self.rows.T).min(axis=1) - self.eps * np.linalg.norm(X, axis=1)


class Composite:
    def __init__(self, spectral: _Spectral, sign: SignPart):
        self.spectral, self.sign = spectral, sign

    def value_and_subgradient(self, x):
        f, gf = self.spectral.value_and_subgradient(x)
        h, gh = self.sign.value_and_subgradient(x)
        return (f, gf) if f <= h else (h, gh)

    def values(self, X):
        return np.minimum(self.spectral.values(X), self.sign.values(X))


# ----------------------------------------------------------- problem setup


@dataclass
class Problem:
    route: str
    basis: np.ndarray  # rows: members (direct) or quotient edges (symmetric)
    expand: np.ndarray  # member weights = expand @ basis @ x
    laps: np.ndarray  # (k, n, n) full Laplacian of each basis vector
    objective: Composite
    full: FullObjective
    structure: BlockStructure | None = None
    block_laps: list[np.ndarray] | None = None
    mults: list[int] | None = None


def block_laplacians(T: SymmetricTensegrity, S: BlockStructure, quotient_weights: np.ndarray) -> list[np.ndarray]:
    """Blocks of the member Laplacian of an orbit-constant stress (one column per stress)."""
    W = np.atleast_2d(np.asarray(quotient_weights, dtype=float).T).T  # (edges, k)
    sizes = T.orbit_sizes() / T.group.order
    k = W.shape[1]
    out = [np.zeros((k, b.side, b.side)) for b in S.blocks]
    for e in range(len(T.graph.edges)):
        eb = orbit_edge_blocks(T.graph, S, e)
        for bi, B in enumerate(eb):
            out[bi] += (W[e] * sizes[e])[:, None, None] * B[None]
    return out


def block_complements(T: SymmetricTensegrity, S: BlockStructure, action_mults) -> list[np.ndarray]:
    """Per block, an orthonormal basis of the complement of the forced kernel."""
    factors = gram_factors(T.representatives, T.points, S.irreps, T.point_group.matrices, mults=action_mults)
    out = []
    for b, facs in zip(S.blocks, factors):
        cols = [W for W in facs]
        if b.irrep.is_trivial:
            cols.append(np.ones((S.n_hat, 1)))
        K = np.hstack(cols) if cols else np.zeros((b.side, 0))
        out.append(complement_basis(K) if K.shape[1] else np.eye(b.side))
    return out


def build_problem(T: SymmetricTensegrity, route: str, irreps: IrrepSet | None, cfg: SearchConfig) -> Problem | None:
    if route == "direct":
        B = T.stress_space(cfg.tol.rank)
        if B.size == 0 or B.shape[1] == 0:
            return None
        expand = np.eye(T.lifted.num_members)
        laps = np.stack([T.member_laplacian(B[:, j]) for j in range(B.shape[1])])
        full = FullObjective(laps, T.points)
        obj = Composite(full, SignPart(B, T.lifted.signs, cfg.eps))
        return Problem(route, B, expand, laps, obj, full)
    B = T.symmetric_stress_space(cfg.tol.rank)
    if B.size == 0 or B.shape[1] == 0:
        return None
    irreps = irreps if irreps is not None else catalogue_irreps(T.group)
    S = block_structure(irreps, T.n_hat)
    mults = multiplicities(T.point_group.matrices, irreps)
    expand = T.expansion_matrix()
    laps = np.stack([T.quotient_laplacian(B[:, j]) for j in range(B.shape[1])])
    full = FullObjective(laps, T.points)
    blaps = block_laplacians(T, S, B)
    spectral = BlockwiseObjective(blaps, block_complements(T, S, mults))
    obj = Composite(spectral, SignPart(B, T.graph.signs, cfg.eps))
    return Problem(route, B, expand, laps, obj, full, S, blaps, mults)


# ----------------------------------------------------------- optimizer


def sphere_grid(k: int, degrees: float = 1.0) -> np.ndarray:
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        t = np.deg2rad(np.arange(0.0, 360.0, degrees))
        return np.column_stack([np.cos(t), np.sin(t)])
    if k == 3:
        h = np.deg2rad(degrees)
        N = int(np.ceil(4 * np.pi / (h * h)))
        i = np.arange(N) + 0.5
        phi = np.arccos(1 - 2 * i / N)
        action = np.pi * (1 + 5 ** 0.5) * i
        return np.column_stack([np.cos(action) * np.sin(phi), np.sin(action) * np.sin(phi), np.cos(phi)])
    raise ValueError("sphere grid only for dimension <= 3")


def _ascend(obj: Composite, x0: np.ndarray, cfg: SearchConfig) -> tuple[float, np.ndarray]:
    x = x0 / np.linalg.norm(x0)
    best_v, best_x = -np.inf, x
    stall = 0
    for it in range(cfg.max_iters):
        v, s = obj.value_and_subgradient(x)
        if v > best_v + 1e-15 * max(1.0, abs(v)):
            best_v, best_x, stall = v, x, 0
        else:
            stall += 1
            if stall > cfg.patience:
                break
        ns = np.linalg.norm(s)
        if ns == 0:
            break
        x = x + cfg.step / np.sqrt(it + 1.0) * s / ns
        x = x / np.linalg.norm(x)
    if cfg.max_iters == 0:
        best_v = obj.value_and_subgradient(x)[0]
    return best_v, best_x


def _thread_count(cfg: SearchConfig) -> int:
    if cfg.threads is not None:
        return max(1, cfg.threads)
    env = os.environ.get("TENSECERT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def search(T: SymmetricTensegrity, cfg: SearchConfig = SearchConfig(), route: str = "auto",
           irreps: IrrepSet | None = None) -> SearchResult:
    if route == "auto":
        route = "symmetric" if T.group.order > 1 else "direct"
    prob = build_problem(T, route, irreps, cfg)
    if prob is None:
        zero = [0.0] * T.lifted.num_members
        cert = check_super_stable(T, zero, cfg.tol)
        cert.verdict = Verdict.NO_CERTIFICATE_FOUND
        return SearchResult("EMPTY_STRESS_SPACE", route, 0, [], zero, None, 0.0, 0.0, 0, 0, 0, cert)
    k = prob.basis.shape[1]
    rng = np.random.default_rng(cfg.seed)
    candidates: list[np.ndarray] = []
    grid_n = 0
    if k <= cfg.grid_max_dim:
        grid = sphere_grid(k, cfg.grid_degrees)
        grid_n = len(grid)
        vals = prob.objective.values(grid)
        order = np.argsort(-vals, kind="stable")
        candidates.extend(grid[order[:16]])
    starts = [candidates[0]] if candidates else []
    while len(starts) < cfg.multistart:
        starts.append(rng.standard_normal(k))
    if k == 1:
        results = [(float(prob.objective.values(g[None])[0]), g) for g in sphere_grid(1)]
    else:
        workers = _thread_count(cfg)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(lambda s: _ascend(prob.objective, s, cfg), starts))
        else:
            results = [_ascend(prob.objective, s, cfg) for s in starts]
        results += [(float(prob.objective.values(c[None])[0]), c) for c in candidates[1:]]

    def member_weights(x):
        return prob.expand @ (prob.basis @ x)

    def rank_of(x) -> int:
        r = psd_rank(T.member_laplacian(member_weights(x)), cfg.tol.psd)
        return -1 if r is None else r

    scored = [(rank_of(x), v, -i, x) for i, (v, x) in enumerate(results)]
    best_rank, best_v, _, best_x = max(scored, key=lambda s: (s[0], s[1], s[2]))
    max_rank = max(0, max(s[0] for s in scored))
    weights = member_weights(best_x)
    q = prob.basis @ best_x if route == "symmetric" else None
    scale = float(np.abs(weights).max())
    if scale > 0:
        weights, best_x = weights / scale, best_x / scale
        q = None if q is None else q / scale
    cert = check_super_stable(T, weights, cfg.tol, quotient_stress=q)
    status = "FOUND" if cert.verdict is Verdict.SUPER_STABLE else "BOUND_ONLY"
    min_eig = prob.full.value(best_x)
    res = SearchResult(status, route, k, [float(v) for v in best_x], cert.stress,
                       cert.quotient_stress, float(best_v), float(min_eig), max_rank,
                       len(starts), grid_n, cert)
    if route == "symmetric":
        res.blocks, res.rank_budget = _block_report(T, prob, q, cfg)
    return res


def _block_report(T: SymmetricTensegrity, prob: Problem, q: np.ndarray, cfg: SearchConfig):
    S = prob.structure
    blocks = [B[0] for B in block_laplacians(T, S, q[:, None])]
    ranks = block_ranks(blocks, cfg.tol.rank)
    targets = block_rank_targets(S, prob.mults)
    report = []
    for b, B, r, t, m in zip(S.blocks, blocks, ranks, targets, prob.mults):
        report.append({
            "irrep": b.name, "degree": b.irrep.degree, "type": b.field.value, "copies": b.copies,
            "side": b.side, "multiplicity": m, "rank": r, "target_rank": t,
            "min_eig": float(np.linalg.eigvalsh(B)[0]) if B.size else 0.0,
        })
    budget = rank_budget(S, ranks, T.d, prob.mults)
    summary = {"total": budget.total, "expected": budget.expected, "target_total": budget.target_total,
               "ok": budget.ok}
    return report, summary


__all__ = ["SearchConfig", "SearchResult", "search", "FullObjective", "BlockwiseObjective",
           "build_problem", "block_laplacians", "block_complements", "sphere_grid"]
