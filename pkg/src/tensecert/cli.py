"""Command-line interface: ``tensecert certify|blocks|stress-space|generate``.

Exit codes: 0 success or SUPER_STABLE, 2 no certificate found, 1 error.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .blockdiag import block_rank_targets, block_ranks, block_structure, extract_blocks, gram_blocks_explicit, psi_transform
from .certify import CertifyOptions, Tolerances, Verdict, certify_universal_rigidity
from .io import TEMPLATES, bundled_fixtures, dumps, generate_instance, parse_instance
from .irreps import multiplicities
from .tensegrity import gram_centered

EXIT_OK, EXIT_ERROR, EXIT_NO_CERT = 0, 1, 2


def _tolerances(args) -> Tolerances:
    tol = Tolerances()
    if args.tol is not None:
        tol = dataclasses.replace(tol, rank=args.tol, psd=args.tol, equilibrium=args.tol)
    if getattr(args, "strict_tol", None) is not None:
        tol = dataclasses.replace(tol, strict=args.strict_tol)
    return tol


def _threads() -> int | None:
    env = os.environ.get("TENSECERT_THREADS")
    if not env:
        return None
    try:
        return max(1, int(env))
    except ValueError:
        raise SystemExit(f"TENSECERT_THREADS must be an integer, got {env!r}") from None


def _emit(obj: dict, fmt: str, text_lines: Sequence[str]) -> None:
    if fmt == "json":
        sys.stdout.write(dumps(obj))
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def cmd_certify(args) -> int:
    inst = parse_instance(args.instance)
    opts = CertifyOptions(route=args.route, tol=_tolerances(args), seed=args.seed,
                          max_iters=args.max_iters, multistart=args.multistart, threads=_threads())
    irreps = inst.irrep_set() if inst.group.order > 1 else None
    rep = certify_universal_rigidity(inst.tensegrity, irreps, opts)
    out = rep.to_json()
    out["instance"] = inst.name
    out["seed"] = args.seed
    lines = [f"instance: {inst.name}", f"verdict: {rep.verdict.value}", f"route: {rep.route}"]
    if rep.certificate is not None:
        c = rep.certificate
        lines += [f"rank: {c.rank} (target {c.rank_target})", f"psd: {c.psd}",
                  f"strictly proper: {c.strictly_proper}", f"conic: {c.conic_ok} via {c.conic_route}"]
        lines += [f"reason: {r}" for r in c.reasons]
    if rep.blocks:
        for b in rep.blocks:
            lines.append(f"block {b['irrep']}: rank {b['rank']} target {b['target_rank']} min eig {b['min_eig']:.3e}")
    lines += [f"note: {n}" for n in rep.notes]
    lines.append("tolerances: " + ", ".join(f"{k}={v:g}" for k, v in opts.tol.to_json().items()))
    _emit(out, args.format, lines)
    return EXIT_OK if rep.verdict is Verdict.SUPER_STABLE else EXIT_NO_CERT


def cmd_blocks(args) -> int:
    inst = parse_instance(args.instance)
    tol = _tolerances(args)
    T = inst.tensegrity
    irreps = inst.irrep_set()
    S = block_structure(irreps, T.n_hat)
    action = T.point_group.matrices
    mults = multiplicities(action, irreps)
    gram = gram_centered(T.points)
    oracle, res = extract_blocks(psi_transform(gram, S.frame, T.n_hat), S)
    explicit = gram_blocks_explicit(T.representatives, T.points, irreps, action)
    ranks = block_ranks(explicit, tol.rank)
    targets = block_rank_targets(S, mults)
    report = []
    for b, m, r, X, Xo, t in zip(S.blocks, mults, ranks, explicit, oracle, targets):
        report.append({
            "irrep": b.name, "degree": b.irrep.degree, "type": b.field.value, "copies": b.copies,
            "side": b.side, "cone": b.cone.value, "multiplicity": m,
            "gram_rank": r, "gram_rank_bound": b.irrep.fdim * m,
            "stress_rank_target": t,
            "gram_block_deviation": float(np.abs(X - Xo).max()) if X.size else 0.0,
        })
    out = {"instance": inst.name, "group": inst.group.name, "n": T.n, "n_hat": T.n_hat, "d": T.d,
           "blocks": report, "extraction_residual": res.worst, "tolerances": tol.to_json()}
    lines = [f"instance: {inst.name} (group {inst.group.name}, n={T.n}, n_hat={T.n_hat}, d={T.d})"]
    for e in report:
        lines.append(f"{e['irrep']}: {e['side']}x{e['side']} {e['cone']} x{e['copies']}, m={e['multiplicity']}, "
                     f"gram rank {e['gram_rank']}/{e['gram_rank_bound']}, stress target {e['stress_rank_target']}")
    _emit(out, args.format, lines)
    return EXIT_OK


def cmd_stress_space(args) -> int:
    inst = parse_instance(args.instance)
    tol = _tolerances(args)
    T = inst.tensegrity
    full = T.stress_space(tol.rank)
    out = {"instance": inst.name, "members": T.lifted.num_members, "quotient_edges": len(T.graph.edges),
           "stress_dim": int(full.shape[1]) if full.size else 0,
           "samples": [[float(x) for x in full[:, j]] for j in range(min(args.samples, full.shape[1] if full.size else 0))],
           "tolerances": tol.to_json()}
    lines = [f"instance: {inst.name}", f"stress space dimension: {out['stress_dim']}"]
    if T.group.order > 1:
        sym = T.symmetric_stress_space(tol.rank)
        k = int(sym.shape[1]) if sym.size else 0
        out["symmetric_stress_dim"] = k
        out["symmetric_samples"] = [[float(x) for x in sym[:, j]] for j in range(min(args.samples, k))]
        lines.append(f"symmetric stress space dimension: {k}")
    _emit(out, args.format, lines)
    return EXIT_OK


def cmd_generate(args) -> int:
    data = generate_instance(args.template, args.seed)
    text = dumps(data)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tensecert", description="Universal-rigidity certificates for tensegrities.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, strict=False):
        sp.add_argument("instance", help="instance JSON file or bundled fixture name")
        sp.add_argument("--tol", type=float, default=None, help="relative rank/PSD tolerance (default 1e-9)")
        if strict:
            sp.add_argument("--strict-tol", type=float, default=None, help="relative strictness floor (default 1e-9)")
        sp.add_argument("--format", choices=("json", "text"), default="json")

    c = sub.add_parser("certify", help="search for and verify a super-stability certificate")
    common(c, strict=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--route", choices=("auto", "direct", "symmetric"), default="auto")
    c.add_argument("--max-iters", type=int, default=2000)
    c.add_argument("--multistart", type=int, default=8)
    c.set_defaults(func=cmd_certify)

    b = sub.add_parser("blocks", help="block structure and Gram-block report")
    common(b)
    b.set_defaults(func=cmd_blocks)

    s = sub.add_parser("stress-space", help="equilibrium stress space dimensions and samples")
    common(s)
    s.add_argument("--samples", type=int, default=3)
    s.set_defaults(func=cmd_stress_space)

    g = sub.add_parser("generate", help="random symmetric instance from a template")
    g.add_argument("--template", required=True, choices=sorted(TEMPLATES))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", "-o", default=None)
    g.set_defaults(func=cmd_generate)

    sub.add_parser("fixtures", help="list bundled instance files").set_defaults(
        func=lambda a: (print("\n".join(bundled_fixtures())), EXIT_OK)[1])
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
