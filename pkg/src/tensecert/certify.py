"""Super-stability certificates and universal-rigidity verdicts.

A certificate is a strictly proper equilibrium stress whose Laplacian is
PSD with rank n - d - 1, together with the conic condition on member
directions (or the neighbor-span condition, which implies it for such a
stress).
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .linalg import RANK_TOL, is_psd, numeric_rank
from .tensegrity import (
    SymmetricTensegrity,
    affine_rank,
    center,
    equilibrium_residual,
    gram_centered,
    properness,
)


class CertifyError(ValueError):
    pass


class Verdict(str, enum.Enum):
    SUPER_STABLE = "SUPER_STABLE"
    CERTIFICATE_INVALID = "CERTIFICATE_INVALID"
    NO_CERTIFICATE_FOUND = "NO_CERTIFICATE_FOUND"


@dataclass(frozen=True)
class Tolerances:
    rank: float = RANK_TOL
    psd: float = RANK_TOL
    strict: float = 1e-9
    equilibrium: float = 1e-9
    complementarity: float = 1e-8

    def to_json(self) -> dict:
        return asdict(self)


def conic_condition(members: Sequence[tuple[int, int]], points: np.ndarray, tol_rel: float = RANK_TOL) -> bool:
    """True iff no nonzero symmetric S has w^T S w = 0 for every member direction w."""
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    if affine_rank(points, tol_rel) != d:
        raise CertifyError("configuration does not span R^d: apply after dimension reduction")
    iu = np.triu_indices(d)
    rows = []
    for i, j in members:
        w = points[i] - points[j]
        outer = np.outer(w, w)
        rows.append(np.where(iu[0] == iu[1], 1.0, 2.0) * outer[iu])
    if not rows:
        return False
    return numeric_rank(np.array(rows), tol_rel) == d * (d + 1) // 2


def neighbor_span_check(n: int, members: Sequence[tuple[int, int]], points: np.ndarray,
                        tol_rel: float = RANK_TOL) -> bool:
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    nb: list[set[int]] = [{i} for i in range(n)]
    for i, j in members:
        nb[i].add(j)
        nb[j].add(i)
    return all(affine_rank(points[sorted(s)], tol_rel) == d for s in nb)


@dataclass
class StressCertificate:
    stress: list[float]
    quotient_stress: list[float] | None
    eigenvalues: list[float]
    rank: int
    psd: bool
    rank_target: int
    strictly_proper: bool
    conic_condition: bool
    neighbor_span_ok: bool
    conic_ok: bool
    conic_route: str
    equilibrium_residual: float
    complementarity: float
    gram_rank: int
    verdict: Verdict
    reasons: list[str] = field(default_factory=list)

    @property
    def super_stable(self) -> bool:
        return self.verdict is Verdict.SUPER_STABLE

    def to_json(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict.value
        return out


def check_super_stable(T: SymmetricTensegrity, member_stress, tol: Tolerances = Tolerances(),
                       quotient_stress=None, found_by_search: bool = True) -> StressCertificate:
    """Assemble the Laplacian of a member stress and run every certificate check.

    A stress that fails gets CERTIFICATE_INVALID; callers that searched and
    came up empty relabel the verdict as NO_CERTIFICATE_FOUND.
    """
    weights = np.asarray(member_stress, dtype=float)
    lifted = T.lifted
    n, d = T.n, T.d
    if not T.spans():
        raise CertifyError("configuration does not span R^d: apply after dimension reduction")
    L = T.member_laplacian(weights)
    ev = np.linalg.eigvalsh(L)
    psd = is_psd(ev, tol.psd)
    rank = numeric_rank(L, tol.rank)
    target = n - d - 1
    G = gram_centered(T.points)
    eq = equilibrium_residual(T.points, L)
    gn, ln = np.linalg.norm(G), np.linalg.norm(L)
    comp = float(abs(np.sum(G * L)) / (gn * ln)) if gn * ln > 0 else 0.0
    strict = properness(lifted.signs, weights, strict=True, tol_strict=tol.strict * float(np.abs(weights).max(initial=0.0)))
    conic = conic_condition(lifted.members, T.points, tol.rank)
    nspan = neighbor_span_check(n, lifted.members, T.points, tol.rank)
    conic_ok = conic or nspan
    route = "conic" if conic else ("neighbor_span" if nspan else "none")
    reasons = []
    if eq > tol.equilibrium:
        reasons.append(f"not an equilibrium stress (relative residual {eq:.2e})")
    if not psd:
        reasons.append(f"Laplacian not PSD (min eigenvalue {ev.min():.3e})")
    if rank != target:
        reasons.append(f"rank {rank} differs from n-d-1 = {target}")
    if not strict:
        reasons.append("stress is not strictly proper")
    if not conic_ok:
        reasons.append("conic condition fails and neighbor spans do not cover R^d")
    verdict = Verdict.SUPER_STABLE if not reasons else Verdict.CERTIFICATE_INVALID
    return StressCertificate(
        stress=[float(x) for x in weights],
        quotient_stress=None if quotient_stress is None else [float(x) for x in quotient_stress],
        eigenvalues=[float(x) for x in ev],
        rank=rank,
        psd=psd,
        rank_target=target,
        strictly_proper=strict,
        conic_condition=conic,
        neighbor_span_ok=nspan,
        conic_ok=conic_ok,
        conic_route=route,
        equilibrium_residual=eq,
        complementarity=comp,
        gram_rank=numeric_rank(G, tol.rank),
        verdict=verdict,
        reasons=reasons,
    )


# ----------------------------------------------------------- end to end


@dataclass
class CertifyOptions:
    route: str = "auto"  # auto | direct | symmetric
    tol: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    max_iters: int = 2000
    multistart: int = 8
    threads: int | None = None


@dataclass
class CertifyReport:
    verdict: Verdict
    route: str
    certificate: StressCertificate | None
    search: dict | None
    blocks: list[dict] | None
    rank_budget: dict | None
    notes: list[str]
    tolerances: Tolerances
    n: int
    d: int
    group: str

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "universally_rigid": self.verdict is Verdict.SUPER_STABLE,
            "route": self.route,
            "n": self.n,
            "d": self.d,
            "group": self.group,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "search": self.search,
            "blocks": self.blocks,
            "rank_budget": self.rank_budget,
            "notes": self.notes,
            "tolerances": self.tolerances.to_json(),
        }


def _small_instance(T: SymmetricTensegrity, tol: Tolerances) -> CertifyReport:
    n, d = T.n, T.d
    pairs = {tuple(sorted(m)) for m in T.lifted.members}
    complete = len(pairs) == n * (n - 1) // 2
    all_bars = bool(np.all(T.lifted.signs == 0))
    common = dict(route="simplex", certificate=None, search=None, blocks=None, rank_budget=None,
                  tolerances=tol, n=n, d=d, group=T.group.name)
    if complete and all_bars:
        note = "n <= d+1 with every pair joined by a bar: all distances fixed, so every realization is congruent"
        return CertifyReport(Verdict.SUPER_STABLE, notes=[note], **common)
    note = "n <= d+1 without a complete bar simplex: outside what a stress certificate can decide"
    return CertifyReport(Verdict.NO_CERTIFICATE_FOUND, notes=[note], **common)


def certify_universal_rigidity(T: SymmetricTensegrity, irreps=None,
                               options: CertifyOptions | None = None) -> CertifyReport:
    from .search import SearchConfig, search

    opts = options or CertifyOptions()
    if not T.spans():
        raise CertifyError("configuration does not span R^d: apply after dimension reduction")
    if T.n <= T.d + 1:
        return _small_instance(T, opts.tol)
    route = opts.route
    if route == "auto":
        route = "symmetric" if T.group.order > 1 else "direct"
    if route not in ("direct", "symmetric"):
        raise CertifyError(f"unknown route {opts.route!r}")
    cfg = SearchConfig(max_iters=opts.max_iters, multistart=opts.multistart, seed=opts.seed,
                       tol=opts.tol, threads=opts.threads)
    res = search(T, cfg, route=route, irreps=irreps)
    notes = []
    cert = res.certificate
    if res.status == "FOUND":
        verdict = Verdict.SUPER_STABLE
    else:
        verdict = Verdict.NO_CERTIFICATE_FOUND
        if cert is not None:
            cert.verdict = Verdict.NO_CERTIFICATE_FOUND
        notes.append(
            "no super-stable stress found; not universally rigid if the configuration is generic"
            + (" modulo symmetry" if route == "symmetric" else "")
            + f" (conditional on genericity; best PSD rank reached {res.psd_rank} of {T.n - T.d - 1})"
        )
    return CertifyReport(verdict, route, cert, res.to_json(), res.blocks, res.rank_budget, notes,
                         opts.tol, T.n, T.d, T.group.name)
