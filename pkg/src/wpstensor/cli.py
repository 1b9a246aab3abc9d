"""Command-line entry point.

Every command prints human-readable lines followed by one line of the form
``RESULT {...}`` holding the same information as JSON.  Exit codes: 0 holds,
1 fails, 2 inconclusive, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from itertools import combinations

from . import conjugacy as cj
from . import fock
from .characters import FixedIntervalDisc, disc_data
from .corpus import CORPUS, run_entry
from .io import (
    DocumentError,
    dump_element,
    dump_system,
    jsonable,
    load_certificate,
    load_element,
    load_system,
    parse_gamma,
    read_json,
    verdict_record,
)
from .rationals import q, qstr
from .randomized import hierarchy_selfcheck
from .spaces import DomainError, PreconditionError
from .wps import (
    branching_edges,
    branching_points,
    coinciding_set,
    fixed_points,
    is_well_supported,
    weight_bounds,
)

INPUT_ERROR = 3
MAX_SUBSET_BRANCHES = 6


def _emit(record: dict) -> None:
    print("RESULT " + json.dumps(jsonable(record), sort_keys=True))


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return qstr(x)
    if isinstance(x, tuple):
        return "(" + ", ".join(_fmt(v) for v in x) + ")"
    if isinstance(x, (list, frozenset, set)):
        items = sorted(x, key=repr) if isinstance(x, (set, frozenset)) else x
        return "{" + ", ".join(_fmt(v) for v in items) + "}"
    return str(x)


def cmd_analyze(args) -> int:
    s = load_system(args.system)
    rec: dict = {"finite": s.is_finite, "branches": s.d}
    if s.is_finite:
        edges = sorted(s.edge_set.finite, key=repr)
        print(f"finite space with {len(s.space.points)} points, {s.d} branches, {len(edges)} edges")
        rec["edges"] = edges
    else:
        es = s.edge_set
        print(f"{len(s.space.components)} interval components, {s.d} branches, "
              f"{len(es.lines)} graph segments, {len(es.points)} isolated edges")
        rec["segments"] = [{"slope": m, "intercept": k, "sources": [list(p) for p in cov]} for (m, k), cov in es.lines]
    bp, be = branching_points(s), branching_edges(s)
    print("branching points:", _fmt(list(bp)))
    print("branching edges:", _fmt(be))
    rec["branching_points"], rec["branching_edges"] = list(bp), be
    coinc = []
    if s.d <= MAX_SUBSET_BRANCHES:
        for k in range(2, s.d + 1):
            for I in combinations(range(s.d), k):
                C = coinciding_set(s, I)
                shown = sorted(C, key=repr) if s.is_finite else [list(p) for p in C]
                if shown:
                    print(f"coinciding set C{set(I)}: {_fmt(shown) if s.is_finite else C}")
                coinc.append({"indices": list(I), "set": shown})
    rec["coinciding"] = coinc
    fp = fixed_points(s)
    fp_out = sorted(fp, key=repr) if s.is_finite else [list(p) for p in fp]
    print("fixed points:", _fmt(fp_out) if s.is_finite else fp)
    rec["fixed_points"] = fp_out
    ws = is_well_supported(s)
    print("well-supported" if ws else "not well-supported")
    rec["well_supported"] = ws
    lo, hi = weight_bounds(s)
    print(f"weight bounds: [{qstr(lo)}, {qstr(hi)}]")
    rec["weight_bounds"] = [lo, hi]
    discs = []
    for dd in disc_data(s):
        if isinstance(dd, FixedIntervalDisc):
            lo_r, hi_r = dd.at(dd.lo).radius_sq, dd.at(dd.hi).radius_sq
            print(f"discs over [{qstr(dd.lo)}, {qstr(dd.hi)}]: radius^2 from {qstr(lo_r)} to {qstr(hi_r)}")
            discs.append({"interval": [dd.lo, dd.hi], "radius_sq_ends": [lo_r, hi_r]})
        else:
            print(f"disc at {_fmt(dd.x)}: radius^2 = {qstr(dd.radius_sq)}")
            discs.append({"point": dd.x, "radius_sq": dd.radius_sq})
    rec["discs"] = discs
    _emit(rec)
    return 0


def _replay(a, b, gamma, cert, witness: dict) -> dict:
    """Re-check a stored witness directly from the definitions."""
    kind = witness.get("kind")
    conv = (lambda v: v) if a.is_finite else q
    if kind == "path":
        if cert is None:
            raise DocumentError("--replay", "path witnesses need --certificate")
        return cj.replay_witness(a, b, cert, witness)
    if kind == "no-isomorphism":
        again = cj.find_graph_conjugacy_finite(a, b)
        return {"violates": again is None}
    e = tuple(conv(v) for v in witness["edge"])
    if kind == "edge":
        bc = cj.conjugate_system(b, gamma, a.space)
        return {"violates": a.in_graph(*e) != bc.in_graph(*e), "edge": e}
    if kind == "limit":
        tr = cj.transition_ratio(a, b, gamma)
        lims = sorted({lim for *_, lim in tr.limits.get(e, [])})
        val = tr.value(e)
        return {"violates": any(lim != val for lim in lims), "value": val, "limits": lims, "edge": e}
    if kind == "forced":
        fh = cj.forced_H_values(a, b, gamma)
        return {"violates": fh.verdict.fails, "value": fh.values.get(e), "edge": e}
    raise DocumentError("--replay", f"unknown witness kind {kind!r}")


def cmd_conjugacy(args) -> int:
    a, b = load_system(args.first), load_system(args.second)
    if a.is_finite != b.is_finite:
        raise DocumentError("spaces", "one system is finite and the other is not")
    gamma = parse_gamma(read_json(args.gamma), a) if args.gamma else None
    cert = load_certificate(args.certificate, a) if args.certificate else None
    if cert is not None and gamma is None:
        gamma = cert.gamma
    if args.replay:
        doc = read_json(args.replay)
        witness = doc.get("witness", doc) if isinstance(doc, dict) else None
        if not isinstance(witness, dict):
            raise DocumentError(args.replay, "expected a witness object")
        g = gamma if gamma is not None else cj.identity_gamma(a)
        out = _replay(a, b, g, cert, witness)
        status = cj.FAILS if out["violates"] else cj.HOLDS
        print("violation confirmed" if out["violates"] else "witness does not show a violation")
        _emit({"replay": out, "status": status})
        return cj.EXIT_CODES[status]
    rel = args.relation
    if cert is not None:
        if rel != "woc":
            raise DocumentError("--certificate", "certificates apply to --relation woc")
        v = cj.verify_weighted_orbit_certificate(a, b, cert, depth=args.depth)
    elif gamma is None and a.is_finite:
        v = cj.decide_finite(a, b, rel)
    elif gamma is None and not cj.check_graph_conjugacy(a, b).holds:
        v = cj.search_gamma(a, b, rel)
    else:
        g = gamma if gamma is not None else cj.identity_gamma(a)
        if rel == "graph":
            v = cj.check_graph_conjugacy(a, b, g)
        elif rel == "btc":
            v = cj.check_branch_transition(a, b, g)
        else:
            v = cj.decide_weighted_orbit(a, b, g)
    print(f"{rel}: {v.status}")
    if v.reason:
        print(v.reason)
    if v.witness is not None:
        print("witness:", ", ".join(f"{k}={_fmt(val)}" for k, val in v.witness.items()))
    if v.certificate is not None and v.holds and rel == "woc":
        print(f"certificate constant C = {qstr(q(v.certificate.C))}")
    _emit(verdict_record(v))
    return v.exit_code


def cmd_fock(args) -> int:
    s = load_system(args.system)
    if not s.is_finite:
        raise PreconditionError("Fock computations need a finite space")
    T = load_element(args.element, s)
    N = T.N if args.N is None else args.N
    if args.op == "norm":
        val = fock.op_norm(T, N)
        print(f"norm at truncation {N}: {val!r}")
        _emit({"op": "norm", "N": N, "value": val})
    elif args.op == "mindeg":
        val = fock.min_degree(T)
        print(f"minimal degree: {val}")
        _emit({"op": "mindeg", "value": val})
    elif args.op == "cesaro":
        out = fock.cesaro(T, N)
        print(f"Cesaro mean of order {N} with {sum(len(c) for c in out.coeffs.values())} coefficients")
        _emit({"op": "cesaro", "N": N, "element": dump_element(out)})
    else:
        degs = [args.degree] if args.degree is not None else list(range(T.N + 1))
        parts = {n: fock.fourier_coeff(T, n) for n in degs}
        same = None
        if args.degree is None:
            total = parts[0]
            for n in degs[1:]:
                total = total + parts[n]
            same = _nonzero(total) == _nonzero(T)
            print("reassembled coefficients identical" if same else "reassembly differs")
        for n, P in parts.items():
            print(f"Phi_{n}: {len(P.coefficient(n))} coefficients")
        _emit({"op": "fourier", "coefficients": {str(n): dump_element(P) for n, P in parts.items()},
               "reassembled_identical": same})
    return 0


def _nonzero(T) -> dict:
    return {n: {mu: v for mu, v in c.items() if v != 0} for n, c in T.coeffs.items() if any(v != 0 for v in c.values())}


def cmd_examples(args) -> int:
    names = list(CORPUS) if args.name == "all" else [args.name]
    if args.name != "all" and args.name not in CORPUS:
        raise DocumentError("examples", f"unknown entry {args.name!r}; known: {', '.join(CORPUS)}")
    ok_all, rec = True, {}
    if args.dump:
        os.makedirs(args.dump, exist_ok=True)
    for name in names:
        if args.dump:
            for k, system in enumerate(CORPUS[name].systems()):
                path = os.path.join(args.dump, f"{name}-{k}.json")
                with open(path, "w") as fh:
                    json.dump(dump_system(system), fh, indent=1)
                print(f"wrote {path}")
        checks = run_entry(name)
        ok = all(c.ok for c in checks)
        ok_all &= ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {CORPUS[name].summary}")
        for c in checks:
            if not c.ok:
                print(f"    {c.name}: expected {_fmt(c.expected)}, got {_fmt(c.observed)}")
        rec[name] = {"ok": ok, "checks": [{"name": c.name, "ok": c.ok} for c in checks]}
    _emit({"examples": rec, "all_ok": ok_all})
    return 0 if ok_all else 1


def cmd_selfcheck(args) -> int:
    problems = hierarchy_selfcheck(args.seed, args.count)
    for p in problems:
        print(p)
    print(f"{args.count} random instances, {len(problems)} hierarchy violations (seed {args.seed})")
    _emit({"seed": args.seed, "count": args.count, "violations": problems})
    return 1 if problems else 0


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wpstensor", description="Analyze weighted partial systems.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="structural invariants of one system")
    a.add_argument("system")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("conjugacy", help="decide a conjugacy relation between two systems")
    c.add_argument("first")
    c.add_argument("second")
    c.add_argument("--relation", choices=("graph", "btc", "woc"), default="woc")
    c.add_argument("--gamma", help="homeomorphism or bijection document")
    c.add_argument("--certificate", help="certificate document (gamma, H, C)")
    c.add_argument("--depth", type=int, default=12, help="path length explored for finite systems")
    c.add_argument("--replay", help="re-verify a witness taken from an earlier RESULT line")
    c.set_defaults(func=cmd_conjugacy)

    f = sub.add_parser("fock", help="truncated Fock computations")
    f.add_argument("system")
    f.add_argument("element")
    f.add_argument("--op", choices=("norm", "fourier", "cesaro", "mindeg"), default="norm")
    f.add_argument("--N", type=int, default=None, help="truncation level (defaults to the element's)")
    f.add_argument("--degree", type=int, default=None, help="single Fourier coefficient to extract")
    f.set_defaults(func=cmd_fock)

    e = sub.add_parser("examples", help="run built-in examples and check their expected verdicts")
    e.add_argument("name", help="entry name or 'all'")
    e.add_argument("--dump", metavar="DIR", help="also write the entry's systems as JSON documents")
    e.set_defaults(func=cmd_examples)

    s = sub.add_parser("selfcheck", help="hierarchy check on random instances")
    s.add_argument("--count", type=int, default=100)
    s.set_defaults(func=cmd_selfcheck)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DocumentError, DomainError, PreconditionError, cj.MalformedCertificate, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"error": str(exc)})
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
