"""Graph, branch-transition and weighted-orbit conjugacy.

Every decision returns a :class:`Verdict`.  ``fails`` verdicts carry a
witness that can be replayed against the inputs without trusting the code
path that produced it; ``inconclusive`` is used whenever the exact analysis
ran out of refinement budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Any

import networkx as nx

from . import cycles
from .rationals import q, show
from .spaces import (
    FiniteSpace,
    IntervalSpace,
    IntervalUnion,
    PLFunc,
    PreconditionError,
    compose,
    invert,
    is_homeomorphism,
    solve_equal,
)
from .wps import (
    WPS,
    Branch,
    OpenPiece,
    PointEdge,
    branching_points,
    coinciding_set,
    edge_weight,
    fixed_points,
    index_set,
    joint_refinement,
)

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
EXIT_CODES = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 2}


class MalformedCertificate(ValueError):
    pass


@dataclass
class EdgeFunction:
    """A positive function on the graph of the source system.

    Exactly one representation is used: ``table`` (finite spaces, edge ->
    value), ``branches`` (interval spaces, one PLFunc per source branch in
    the source variable, so ``H(sigma_i(s), s) = branches[i](s)``), or
    ``inverse_ratio`` meaning ``H = w / u^gamma`` exactly.
    """

    table: dict | None = None
    branches: tuple | None = None
    inverse_ratio: bool = False

    def at(self, sys: WPS, e) -> Fraction:
        if self.table is not None:
            return q(self.table[e])
        if self.branches is not None:
            i = min(index_set(sys, e))
            return self.branches[i](e[1])
        raise ValueError("inverse-ratio functions need both systems to evaluate")

    def reciprocal(self) -> "EdgeFunction":
        if self.table is None:
            raise ValueError("only tables have a PL reciprocal")
        return EdgeFunction(table={e: 1 / q(v) for e, v in self.table.items()})


@dataclass
class ConjugacyCertificate:
    gamma: Any
    H: EdgeFunction
    C: Fraction = Fraction(1)


@dataclass
class Verdict:
    status: str
    relation: str
    witness: dict | None = None
    certificate: ConjugacyCertificate | None = None
    reason: str = ""
    depth: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


# homeomorphisms and conjugation


def identity_gamma(sys: WPS):
    if sys.is_finite:
        return {x: x for x in sys.space.points}
    return PLFunc.identity(sys.space.components)


def _check_finite_bijection(gamma: dict, src: FiniteSpace, dst: FiniteSpace) -> None:
    if set(gamma) != set(src.points) or sorted(map(repr, gamma.values())) != sorted(map(repr, dst.points)):
        raise PreconditionError("gamma is not a bijection between the point sets")
    if set(gamma.values()) != set(dst.points):
        raise PreconditionError("gamma is not a bijection between the point sets")


def invert_gamma(gamma, src, dst):
    if src.is_finite:
        _check_finite_bijection(gamma, src, dst)
        return {y: x for x, y in gamma.items()}
    return invert(gamma, src, dst)


def conjugate_system(sys: WPS, gamma, space) -> WPS:
    """``tau^gamma``: transport ``sys`` (over Y) to ``space`` (X) along ``gamma: X -> Y``."""
    if space.is_finite != sys.is_finite:
        raise PreconditionError("spaces of different kinds")
    if sys.is_finite:
        ginv = invert_gamma(gamma, space, sys.space)
        out = []
        for br in sys.branches:
            dom = frozenset(x for x in space.points if gamma[x] in br.domain)
            out.append(Branch(dom, {x: ginv[br.map[gamma[x]]] for x in dom},
                              {x: q(br.weight[gamma[x]]) for x in dom}))
        return WPS(space, out)
    if not is_homeomorphism(gamma, space, sys.space):
        raise PreconditionError("gamma is not a homeomorphism")
    ginv = invert(gamma, space, sys.space)
    comp_to = {k: sys.space.component_of(gamma(a)) for k, (a, _) in enumerate(space.components)}
    out = []
    for br in sys.branches:
        dom = frozenset(k for k, j in comp_to.items() if j in br.domain)
        spans = [space.components[k] for k in sorted(dom)]
        g = gamma.restrict(spans)
        out.append(Branch(dom, compose(ginv, compose(br.map, g)), compose(br.weight, g)))
    return WPS(space, out)


# graph conjugacy


def _gaps(a, b, cover: IntervalUnion) -> list[tuple[Fraction, Fraction]]:
    gaps, cur = [], a
    for l, r in cover:
        if r < cur or l > b:
            continue
        if l > cur:
            gaps.append((cur, l))
        cur = max(cur, r)
    if cur < b:
        gaps.append((cur, b))
    return gaps


def _graph_witness(A: WPS, B: WPS):
    """A point of one graph missing from the other, or ``None`` if equal."""
    for src, other, side in ((A, B, "first"), (B, A, "second")):
        if src.is_finite:
            missing = sorted(src.edge_set.finite - other.edge_set.finite, key=repr)
            if missing:
                return missing[0], side
            continue
        lines_other = dict(other.edge_set.lines)
        for (m, k), cover in src.edge_set.lines:
            ocover = lines_other.get((m, k), IntervalUnion())
            for a, b in cover:
                for l, r in _gaps(a, b, ocover):
                    for j in range(1, 16):
                        t = l + (r - l) * Fraction(j, 16)
                        if not other.in_graph(m * t + k, t):
                            return (m * t + k, t), side
        for e in src.edge_set.points:
            if not other.in_graph(*e):
                return e, side
    return None


def check_graph_conjugacy(a: WPS, b: WPS, gamma=None) -> Verdict:
    gamma = identity_gamma(a) if gamma is None else gamma
    bc = conjugate_system(b, gamma, a.space)
    if a.edge_set == bc.edge_set:
        return Verdict(HOLDS, "graph", certificate=ConjugacyCertificate(gamma, EdgeFunction(inverse_ratio=True)),
                       reason="the graphs coincide after conjugating by gamma")
    found = _graph_witness(a, bc)
    if found is None:  # canonical forms differ only in representation
        return Verdict(HOLDS, "graph", certificate=ConjugacyCertificate(gamma, EdgeFunction(inverse_ratio=True)),
                       reason="the graphs coincide after conjugating by gamma")
    e, side = found
    where = "first graph only" if side == "first" else "conjugated second graph only"
    return Verdict(FAILS, "graph", witness={"kind": "edge", "edge": e, "in": side},
                   reason=f"edge {show(e)} lies in the {where}")


def _degree_profile(sys: WPS) -> dict:
    E = sys.edge_set.finite
    out = {x: [0, 0, False] for x in sys.space.points}
    for r, s in E:
        out[s][0] += 1
        out[r][1] += 1
        if r == s:
            out[s][2] = True
    return {x: tuple(v) for x, v in out.items()}


def find_graph_conjugacy_finite(a: WPS, b: WPS) -> dict | None:
    """A digraph isomorphism ``Gr(a) -> Gr(b)`` by pruned backtracking."""
    if not (a.is_finite and b.is_finite):
        raise PreconditionError("finite spaces expected")
    if len(a.space.points) != len(b.space.points):
        return None
    pa, pb = _degree_profile(a), _degree_profile(b)
    if sorted(pa.values()) != sorted(pb.values()):
        return None
    Ea, Eb = a.edge_set.finite, b.edge_set.finite
    order = sorted(a.space.points, key=lambda x: (pa[x][0], pa[x][1], repr(x)))
    cands = {x: [y for y in sorted(b.space.points, key=repr) if pb[y] == pa[x]] for x in order}
    mapping: dict = {}
    used: set = set()

    def consistent(x, y) -> bool:
        for x2, y2 in mapping.items():
            if ((x2, x) in Ea) != ((y2, y) in Eb) or ((x, x2) in Ea) != ((y, y2) in Eb):
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        x = order[k]
        for y in cands[x]:
            if y in used or not consistent(x, y):
                continue
            mapping[x] = y
            used.add(y)
            if search(k + 1):
                return True
            del mapping[x]
            used.discard(y)
        return False

    return dict(mapping) if search(0) else None


def candidate_gammas(a: WPS, b: WPS) -> list[PLFunc]:
    """Heuristic PL homeomorphisms matching special points, both orientations."""
    if a.is_finite or len(a.space.components) != len(b.space.components):
        return []

    def specials(sys: WPS, k: int) -> list[Fraction]:
        lo, hi = sys.space.components[k]
        pts = {lo, hi} | {p for p in branching_points(sys) if lo <= p <= hi}
        pts |= {p for p in fixed_points(sys).endpoints() if lo <= p <= hi}
        return sorted(pts)

    per_comp = []
    for k, ((xa, xb), (ya, yb)) in enumerate(zip(a.space.components, b.space.components)):
        opts = []
        if xa == xb:
            opts.append(((xa,), (ya,)))
            per_comp.append(opts)
            continue
        sa, sb = specials(a, k), specials(b, k)
        if len(sa) == len(sb):
            opts.append((tuple(sa), tuple(sb)))
            opts.append((tuple(sa), tuple(reversed(sb))))
        opts.append(((xa, xb), (ya, yb)))
        opts.append(((xa, xb), (yb, ya)))
        per_comp.append(opts)
    out = []
    for combo in iproduct(*per_comp):
        g = PLFunc(tuple(combo))
        if is_homeomorphism(g, a.space, b.space) and g not in out:
            out.append(g)
    return out


# transition ratio


@dataclass(frozen=True)
class RatioPiece:
    piece: OpenPiece  # geometry and source weight of the first system
    u_slope: Fraction
    u_intercept: Fraction

    def at(self, s) -> Fraction:
        return (self.u_slope * s + self.u_intercept) / self.piece.weight_at(s)


@dataclass
class TransitionRatio:
    finite: dict | None = None
    pieces: list[RatioPiece] = field(default_factory=list)
    points: dict = field(default_factory=dict)  # edge -> value
    limits: dict = field(default_factory=dict)  # edge -> [(side, slope, intercept, limit)]
    lower: Fraction = Fraction(1)
    upper: Fraction = Fraction(1)

    def value(self, e) -> Fraction:
        if self.finite is not None:
            return self.finite[e]
        r, s = q(e[0]), q(e[1])
        if (r, s) in self.points:
            return self.points[(r, s)]
        for rp in self.pieces:
            pc = rp.piece
            if pc.a < s < pc.b and pc.range_at(s) == r:
                return rp.at(s)
        raise KeyError(e)


def transition_ratio(a: WPS, b: WPS, gamma=None) -> TransitionRatio:
    gamma = identity_gamma(a) if gamma is None else gamma
    bc = conjugate_system(b, gamma, a.space)
    if a.edge_set != bc.edge_set:
        raise PreconditionError("graphs differ under gamma")
    return _ratio(a, bc)


def _ratio(a: WPS, bc: WPS, refinement: dict | None = None) -> TransitionRatio:
    if a.is_finite:
        wa, ub = a.finite_edge_weights, bc.finite_edge_weights
        vals = {e: ub[e] / wa[e] for e in wa}
        return TransitionRatio(finite=vals, lower=min(vals.values()), upper=max(vals.values()))
    ref = refinement if refinement is not None else joint_refinement(a, bc)
    oa, pa = a.pieces(ref)
    ob, pb = bc.pieces(ref)
    ukey = {(pc.comp, pc.a, pc.b, pc.slope, pc.intercept): pc for pc in ob}
    tr = TransitionRatio()
    for pc in oa:
        other = ukey[(pc.comp, pc.a, pc.b, pc.slope, pc.intercept)]
        tr.pieces.append(RatioPiece(pc, other.wslope, other.wintercept))
    uw = {pe.edge: pe.weight for pe in pb}
    for pe in pa:
        tr.points[pe.edge] = uw[pe.edge] / pe.weight
    ends: dict = {}
    for rp in tr.pieces:
        ends.setdefault(rp.piece.a, []).append(("right", rp))
        ends.setdefault(rp.piece.b, []).append(("left", rp))
    vals = list(tr.points.values())
    for pe in pa:
        lims = []
        for side, rp in ends.get(pe.s, []):
            if rp.piece.comp == a.space.component_of(pe.s) and rp.piece.range_at(pe.s) == pe.r:
                lims.append((side, rp.piece.slope, rp.piece.intercept, rp.at(pe.s)))
        tr.limits[pe.edge] = lims
        vals.extend(lim for *_, lim in lims)
    tr.lower, tr.upper = min(vals), max(vals)
    return tr


def check_branch_transition(a: WPS, b: WPS, gamma=None) -> Verdict:
    gamma = identity_gamma(a) if gamma is None else gamma
    gv = check_graph_conjugacy(a, b, gamma)
    if not gv.holds:
        return Verdict(FAILS, "btc", witness=gv.witness, reason="not graph conjugate: " + gv.reason)
    cert = ConjugacyCertificate(gamma, EdgeFunction(inverse_ratio=True), Fraction(1))
    if a.is_finite:
        return Verdict(HOLDS, "btc", certificate=cert, reason="discrete space: the ratio is continuous")
    bc = conjugate_system(b, gamma, a.space)
    tr = _ratio(a, bc)
    bad = []
    for e, lims in sorted(tr.limits.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        val = tr.points[e]
        if any(lim != val for *_, lim in lims):
            bad.append((e, val, sorted({lim for *_, lim in lims})))
    if bad:
        e, val, lims = bad[0]
        return Verdict(FAILS, "btc", witness={"kind": "limit", "edge": e, "value": val, "limits": lims},
                       reason=f"u^gamma/w is discontinuous at {show(e)}",
                       details={"all_discontinuities": bad, "K": (tr.lower, tr.upper)})
    return Verdict(HOLDS, "btc", certificate=cert, details={"K": (tr.lower, tr.upper)},
                   reason=f"u^gamma/w is continuous at all {len(tr.limits)} point edges")


# forced values of H


@dataclass
class ForcedH:
    values: dict  # edge -> forced value at point edges
    pieces: list  # (OpenPiece, forced value at a, at b) on diagonal pieces
    cycles: list  # (edges, product of H forced over the cycle)
    verdict: Verdict


def _special_closure(sys: WPS, start, cap: int = 64) -> set:
    seen, todo = set(), list(start)
    while todo and len(seen) < cap:
        x = todo.pop()
        if x in seen:
            continue
        seen.add(x)
        todo.extend(r for r in sys.successors(x) if r not in seen)
    return seen


def forced_H_values(a: WPS, b: WPS, gamma=None, max_cycle_len: int = 6) -> ForcedH:
    """Values of H forced by bounded powers along self-loops and short cycles."""
    gamma = identity_gamma(a) if gamma is None else gamma
    gv = check_graph_conjugacy(a, b, gamma)
    if not gv.holds:
        return ForcedH({}, [], [], Verdict(FAILS, "woc", witness=gv.witness, reason="not graph conjugate"))
    bc = conjugate_system(b, gamma, a.space)
    tr = _ratio(a, bc)
    if a.is_finite:
        pts = list(a.space.points)
        edges = sorted(tr.finite, key=repr)
    else:
        pts = sorted(_special_closure(a, sorted({p for v in a.refinement.values() for p in v})))
        edges = sorted({(r, s) for s in pts for r in a.successors(s)})
    ratio = {e: tr.value(e) for e in edges}
    forced = {e: 1 / ratio[e] for e in edges if e[0] == e[1]}
    diag = []
    mismatch = None
    for rp in tr.pieces:
        if rp.piece.is_diagonal():
            pc = rp.piece
            diag.append((pc, 1 / rp.at(pc.a), 1 / rp.at(pc.b)))
    for pc, fa, fb in diag:
        for end, lim in ((pc.a, fa), (pc.b, fb)):
            e = (end, end)
            if e in forced and forced[e] != lim and mismatch is None:
                mismatch = {"kind": "forced", "edge": e, "value": forced[e], "limits": [lim],
                            "piece": (pc.a, pc.b)}
    G = nx.DiGraph()
    G.add_edges_from((s, r) for r, s in edges)
    cyc = []
    for c in nx.simple_cycles(G, length_bound=max_cycle_len):
        if len(c) == 1:
            continue
        ce = [(c[(k + 1) % len(c)], c[k]) for k in range(len(c))]
        prod = Fraction(1)
        for e in ce:
            prod /= ratio[e]
        cyc.append((ce, prod))
        if len(cyc) >= 200:
            break
    if mismatch:
        v = Verdict(FAILS, "woc", witness=mismatch,
                    reason=f"self-loops force H{show(mismatch['edge'])} = {mismatch['value']} but nearby forced "
                           f"values tend to {mismatch['limits'][0]}; no continuous H exists")
    else:
        v = Verdict(HOLDS, "woc", reason="forced values extend continuously")
    return ForcedH(forced, diag, cyc, v)


# weighted-orbit certificates


def validate_H(a: WPS, H: EdgeFunction) -> None:
    if H.inverse_ratio:
        return
    if a.is_finite:
        if H.table is None:
            raise MalformedCertificate("finite systems need an edge table for H")
        missing = a.edge_set.finite - set(H.table)
        if missing:
            raise MalformedCertificate(f"H is missing edges {sorted(missing, key=repr)[:3]}")
        if any(q(v) <= 0 for v in H.table.values()):
            raise MalformedCertificate("H must be strictly positive")
        return
    if H.branches is None or len(H.branches) != a.d:
        raise MalformedCertificate("H needs one piecewise-linear function per branch")
    for i, (h, br) in enumerate(zip(H.branches, a.branches)):
        if not isinstance(h, PLFunc) or sorted(h.spans()) != sorted(br.map.spans()):
            raise MalformedCertificate(f"H on branch {i} must cover exactly the branch domain")
        if h.min_value() <= 0:
            raise MalformedCertificate(f"H on branch {i} is not strictly positive")
    for i in range(a.d):
        for j in range(i + 1, a.d):
            C = coinciding_set(a, (i, j))
            if not C:
                continue
            agree = solve_equal(H.branches[i], H.branches[j])
            if (agree & C) != C:
                raise MalformedCertificate(f"H is discontinuous: branches {i} and {j} disagree on a shared edge")


def _g_point(a: WPS, bc: WPS, H: EdgeFunction, e) -> Fraction:
    w = edge_weight(a, e)
    u = edge_weight(bc, e)
    h = w / u if H.inverse_ratio else H.at(a, e)
    return u / w * h


def replay_witness(a: WPS, b: WPS, cert: ConjugacyCertificate, witness: dict) -> dict:
    """Recompute a path witness from its source point and branch word."""
    bc = conjugate_system(b, cert.gamma, a.space)
    x = witness["source"] if a.is_finite else q(witness["source"])
    word = list(witness["word"]) * int(witness.get("repeat", 1))
    prod = Fraction(1)
    for i in word:
        if not a.in_domain(i, x):
            raise ValueError(f"branch {i} is not defined at {x}")
        r = a.apply(i, x)
        prod *= _g_point(a, bc, cert.H, (r, x))
        x = r
    C = q(cert.C)
    return {"product": prod, "violates": not (1 / C <= prod <= C), "end": x}


def _finite_word(a: WPS, walk_edges: list) -> tuple:
    """Source point and branch word for a list of ``(r, s)`` edges in walk order."""
    word = []
    for r, s in walk_edges:
        word.append(min(index_set(a, (r, s))))
    return walk_edges[0][1], word


def verify_weighted_orbit_certificate(a: WPS, b: WPS, cert: ConjugacyCertificate, depth: int = 12,
                                      rounds: int = 8) -> Verdict:
    C = q(cert.C)
    if C < 1:
        raise MalformedCertificate("C must be at least 1")
    gv = check_graph_conjugacy(a, b, cert.gamma)
    if not gv.holds:
        return Verdict(FAILS, "woc", witness=gv.witness, reason="not graph conjugate: " + gv.reason)
    validate_H(a, cert.H)
    bc = conjugate_system(b, cert.gamma, a.space)
    if a.is_finite:
        return _verify_finite(a, bc, cert, C, depth)
    if cert.H.inverse_ratio:
        btc = check_branch_transition(a, b, cert.gamma)
        if btc.holds:
            return Verdict(HOLDS, "woc", certificate=cert, reason="H = w/u^gamma is continuous; every factor is 1",
                           details={"sup": Fraction(1), "inf": Fraction(1)})
        return Verdict(FAILS, "woc", witness=btc.witness, reason="H = w/u^gamma is not continuous")
    return _verify_interval(a, bc, cert, C, rounds)


def _verify_finite(a: WPS, bc: WPS, cert: ConjugacyCertificate, C: Fraction, depth: int) -> Verdict:
    g = {e: _g_point(a, bc, cert.H, e) for e in a.edge_set.finite}
    E = sorted(((s, r, v) for (r, s), v in g.items()), key=repr)
    as_edges = lambda walk: [(E[k][1], E[k][0]) for k in walk.edges]

    def fail(walk_edges, repeat, prod, why):
        src, word = _finite_word(a, walk_edges)
        wit = {"kind": "path", "source": src, "word": word, "repeat": repeat, "product": prod, "C": C,
               "edges": walk_edges}
        return Verdict(FAILS, "woc", witness=wit, reason=why, depth=depth)

    for maximize in (True, False):
        for n, wk in enumerate(cycles.best_walks_by_length(E, depth, maximize)):
            if wk is not None and not (1 / C <= wk.product <= C):
                return fail(as_edges(wk), 1, wk.product, f"a path of length {n} has product {wk.product}")
    for above in (True, False):
        cyc = cycles.pumping_cycle(E, above)
        if cyc is not None:
            k = cycles.min_repetitions(cyc.product, C)
            return fail(as_edges(cyc), k, cyc.product ** k,
                        f"a cycle has product {cyc.product} != 1 and pumps past C after {k} turns")
    hi = cycles.extremal_walk(E, True)
    lo = cycles.extremal_walk(E, False)
    for wk in (hi, lo):
        if not (1 / C <= wk.product <= C):
            return fail(as_edges(wk), 1, wk.product, f"a path has product {wk.product}")
    return Verdict(HOLDS, "woc", certificate=cert, depth=depth, reason="all cycles have product 1",
                   details={"sup": hi.product, "inf": lo.product})


# interval certificates via a cell abstraction


@dataclass(frozen=True)
class _AbsEdge:
    src: tuple
    dst: tuple
    lo: Fraction
    hi: Fraction
    exact: bool
    point: PointEdge | None = None
    piece: OpenPiece | None = None
    branch: int = 0


def _node_of(ref: dict, space: IntervalSpace, x: Fraction) -> tuple:
    k = space.component_of(x)
    pts = ref[k]
    if x in pts:
        return ("p", x)
    for l, r in zip(pts, pts[1:]):
        if l < x < r:
            return ("c", l, r)
    raise AssertionError("point not covered by the refinement")


def _in_node(node: tuple, x: Fraction) -> bool:
    return x == node[1] if node[0] == "p" else node[1] < x < node[2]


def _abstraction(a: WPS, bc: WPS, H: EdgeFunction, ref: dict) -> list[_AbsEdge]:
    oa, pa = a.pieces(ref)
    ob, _ = bc.pieces(ref)
    ukey = {(pc.comp, pc.a, pc.b, pc.slope, pc.intercept): pc for pc in ob}
    out = []
    for pe in pa:
        gv = _g_point(a, bc, H, pe.edge)
        out.append(_AbsEdge(("p", pe.s), _node_of(ref, a.space, pe.r), gv, gv, True,
                            point=pe, branch=min(pe.indices)))
    for pc in oa:
        up = ukey[(pc.comp, pc.a, pc.b, pc.slope, pc.intercept)]
        i = min(pc.indices)
        hm, hc = H.branches[i].affine_on(pc.a, pc.b)
        R = lambda s: (up.wslope * s + up.wintercept) / pc.weight_at(s)
        h = lambda s: hm * s + hc
        Ra, Rb, ha, hb = R(pc.a), R(pc.b), h(pc.a), h(pc.b)
        same_dir = (Rb - Ra) * (hb - ha) >= 0
        if same_dir:
            lo, hi = min(Ra * ha, Rb * hb), max(Ra * ha, Rb * hb)
        else:
            lo, hi = min(Ra, Rb) * min(ha, hb), max(Ra, Rb) * max(ha, hb)
        src = ("c", pc.a, pc.b)
        ylo, yhi = pc.image()
        if ylo == yhi:
            targets = [_node_of(ref, a.space, ylo)]
        else:
            k = a.space.component_of(ylo)
            pts = ref[k]
            targets = [("p", p) for p in pts if ylo < p < yhi]
            targets += [("c", l, r) for l, r in zip(pts, pts[1:]) if l < yhi and r > ylo]
        for t in targets:
            out.append(_AbsEdge(src, t, lo, hi, same_dir, piece=pc, branch=i))
    return out


def _constraint_set(path: list[_AbsEdge]):
    """Feasible start interval and the composite affine map of an abstract walk.

    Returns ``(lo, hi, lo_open, hi_open, m, c)`` or ``None`` if empty; the
    walk's end point is ``m * x + c``.
    """
    box = [None, True, None, True]  # lo, lo_open, hi, hi_open
    m, c = Fraction(1), Fraction(0)

    def meet(node) -> bool:
        if node[0] == "p":
            if m == 0:
                return c == node[1]
            x = (node[1] - c) / m
            nl, nlo, nh, nho = x, False, x, False
        else:
            if m == 0:
                return node[1] < c < node[2]
            nl, nh = sorted(((node[1] - c) / m, (node[2] - c) / m))
            nlo = nho = True
        lo, lo_open, hi, hi_open = box
        if lo is None or nl > lo:
            lo, lo_open = nl, nlo
        elif nl == lo:
            lo_open = lo_open or nlo
        if hi is None or nh < hi:
            hi, hi_open = nh, nho
        elif nh == hi:
            hi_open = hi_open or nho
        box[:] = [lo, lo_open, hi, hi_open]
        return lo < hi or (lo == hi and not lo_open and not hi_open)

    for ae in path:
        if not meet(ae.src):
            return None
        if ae.point is not None:
            m, c = Fraction(0), ae.point.r
        else:
            m, c = ae.piece.slope * m, ae.piece.slope * c + ae.piece.intercept
    if not meet(path[-1].dst):
        return None
    lo, lo_open, hi, hi_open = box
    return lo, hi, lo_open, hi_open, m, c


def _samples(lo, hi, lo_open, hi_open) -> list[Fraction]:
    if lo == hi:
        return [lo]
    pts = [lo + (hi - lo) * Fraction(j, 8) for j in range(1, 8)]
    if not lo_open:
        pts.insert(0, lo)
    if not hi_open:
        pts.append(hi)
    return pts


def _run(a: WPS, bc: WPS, H: EdgeFunction, path: list[_AbsEdge], x: Fraction):
    """Follow an abstract walk concretely from ``x``; ``(product, word, end)`` or ``None``."""
    prod, word = Fraction(1), []
    for ae in path:
        if not _in_node(ae.src, x):
            return None
        if ae.point is not None:
            r = ae.point.r
        else:
            r = ae.piece.range_at(x)
        if not _in_node(ae.dst, r):
            return None
        prod *= _g_point(a, bc, H, (r, x))
        word.append(ae.branch)
        x = r
    return prod, word, x


def _walk_edges(E: list[_AbsEdge], walk: cycles.Walk) -> list[_AbsEdge]:
    return [E[k] for k in walk.edges]


def _concretize_cycle(a, bc, H, path, above: bool):
    cs = _constraint_set(path)
    if cs is None:
        return None
    lo, hi, lo_open, hi_open, m, c = cs
    if m != 1:
        cands = [c / (1 - m)]
    elif c == 0:
        cands = _samples(lo, hi, lo_open, hi_open)
    else:
        return None
    for x in cands:
        got = _run(a, bc, H, path, x)
        if got is None or got[2] != x:
            continue
        prod, word, _ = got
        if (prod > 1) if above else (prod < 1):
            return x, word, prod
    return None


def _concretize_path(a, bc, H, path, C):
    cs = _constraint_set(path)
    if cs is None:
        return None
    lo, hi, lo_open, hi_open, _, _ = cs
    for x in _samples(lo, hi, lo_open, hi_open):
        got = _run(a, bc, H, path, x)
        if got is not None and not (1 / C <= got[0] <= C):
            return x, got[1], got[0]
    return None


def _verify_interval(a: WPS, bc: WPS, cert: ConjugacyCertificate, C: Fraction, rounds: int) -> Verdict:
    H = cert.H
    extra = {x for h in H.branches for x in h.breakpoints()}
    ref = {k: list(v) for k, v in joint_refinement(a, bc, extra=extra).items()}

    def fail(x, word, repeat, prod, why, r):
        wit = {"kind": "path", "source": x, "word": word, "repeat": repeat, "product": prod, "C": C}
        return Verdict(FAILS, "woc", witness=wit, reason=why, depth=r)

    for r in range(rounds + 1):
        frozen = {k: tuple(v) for k, v in ref.items()}
        E = _abstraction(a, bc, H, frozen)
        hiE = [(e.src, e.dst, e.hi) for e in E]
        loE = [(e.src, e.dst, e.lo) for e in E]
        exact_pts = [k for k, e in enumerate(E) if e.point is not None and e.dst[0] == "p"]
        suspects: list[list[_AbsEdge]] = []
        for above, lab in ((True, hiE), (False, loE)):
            sub = [lab[k] for k in exact_pts]
            cyc = cycles.pumping_cycle(sub, above)
            if cyc is not None:
                path = [E[exact_pts[k]] for k in cyc.edges]
                x = path[0].point.s
                prod, word, _ = _run(a, bc, H, path, x)
                k = cycles.min_repetitions(prod, C)
                return fail(x, word, k, prod ** k,
                            f"a periodic orbit through {x} has factor product {prod}; "
                            f"{k} turns leave [1/C, C]", r)
        for above, lab in ((True, hiE), (False, loE)):
            cyc = cycles.pumping_cycle(lab, above)
            if cyc is None:
                continue
            path = _walk_edges(E, cyc)
            got = _concretize_cycle(a, bc, H, path, above)
            if got is not None:
                x, word, prod = got
                k = cycles.min_repetitions(prod, C)
                return fail(x, word, k, prod ** k,
                            f"a periodic orbit through {x} has factor product {prod}; "
                            f"{k} turns leave [1/C, C]", r)
            suspects.append(path)
        if not suspects:
            top = cycles.extremal_walk(hiE, True)
            bot = cycles.extremal_walk(loE, False)
            ok_hi = top.product <= C
            ok_lo = bot.product >= 1 / C
            if ok_hi and ok_lo:
                return Verdict(HOLDS, "woc", certificate=cert, depth=r,
                               reason="cell abstraction bounds every path product",
                               details={"sup_bound": top.product, "inf_bound": bot.product,
                                        "cells": sum(len(v) - 1 for v in frozen.values()),
                                        "method": "cell abstraction"})
            for good, wk in ((ok_hi, top), (ok_lo, bot)):
                if good:
                    continue
                path = _walk_edges(E, wk)
                got = _concretize_path(a, bc, H, path, C)
                if got is not None:
                    x, word, prod = got
                    return fail(x, word, 1, prod, f"a path from {x} has product {prod}", r)
                suspects.append(path)
        split = set()
        for path in suspects:
            for ae in path:
                for node in (ae.src, ae.dst):
                    if node[0] == "c":
                        split.add(node)
        if not split:
            break
        for _, l, rr in split:
            k = a.space.component_of(l)
            ref[k] = sorted(set(ref[k]) | {(l + rr) / 2})
    return Verdict(INCONCLUSIVE, "woc", depth=rounds,
                   reason=f"no violation found and the abstraction did not close after {rounds} refinements")


# finite deciders


def decide_finite(a: WPS, b: WPS, relation: str = "woc") -> Verdict:
    """Decide one relation for finite systems, searching for gamma."""
    gamma = find_graph_conjugacy_finite(a, b)
    if gamma is None:
        pa, pb = _degree_profile(a), _degree_profile(b)
        wit = {"kind": "no-isomorphism", "degrees_first": sorted(pa.values()), "degrees_second": sorted(pb.values())}
        why = "degree sequences differ" if sorted(pa.values()) != sorted(pb.values()) else "exhaustive search found no isomorphism"
        return Verdict(FAILS, relation, witness=wit, reason=f"graphs are not isomorphic ({why})")
    if relation == "graph":
        return check_graph_conjugacy(a, b, gamma)
    if relation == "btc":
        return check_branch_transition(a, b, gamma)
    return decide_weighted_orbit_finite(a, b, gamma)


def decide_weighted_orbit_finite(a: WPS, b: WPS, gamma: dict | None = None) -> Verdict:
    if not (a.is_finite and b.is_finite):
        raise PreconditionError("finite spaces expected")
    gamma = find_graph_conjugacy_finite(a, b) if gamma is None else gamma
    if gamma is None:
        return decide_finite(a, b, "woc")
    bc = conjugate_system(b, gamma, a.space)
    wa, ub = a.finite_edge_weights, bc.finite_edge_weights
    cert = ConjugacyCertificate(gamma, EdgeFunction(table={e: wa[e] / ub[e] for e in wa}), Fraction(1))
    return verify_weighted_orbit_certificate(a, b, cert)


def reciprocal_certificate(a: WPS, b: WPS, cert: ConjugacyCertificate) -> ConjugacyCertificate:
    """Certificate for ``(b, a)`` along ``gamma^{-1}`` with ``H' = 1/H`` transported (finite)."""
    if not a.is_finite:
        raise PreconditionError("finite spaces expected")
    g = cert.gamma
    table = {(g[r], g[s]): 1 / q(v) for (r, s), v in cert.H.table.items()}
    return ConjugacyCertificate(invert_gamma(g, a.space, b.space), EdgeFunction(table=table), cert.C)


def search_gamma(a: WPS, b: WPS, relation: str) -> Verdict:
    """Try heuristic candidate homeomorphisms for interval systems.

    A failure under every candidate is reported as inconclusive, because the
    candidates do not exhaust all homeomorphisms.
    """
    if a.is_finite:
        return decide_finite(a, b, relation)
    notes = []
    for g in candidate_gammas(a, b):
        if relation == "graph":
            v = check_graph_conjugacy(a, b, g)
        elif relation == "btc":
            v = check_branch_transition(a, b, g)
        else:
            v = decide_weighted_orbit(a, b, g)
        if v.holds:
            return v
        notes.append(v.reason)
    return Verdict(INCONCLUSIVE, relation, reason=f"none of {len(notes)} candidate homeomorphisms settled the relation",
                   details={"attempts": notes})


def decide_weighted_orbit(a: WPS, b: WPS, gamma=None) -> Verdict:
    """Weighted-orbit verdict for a fixed gamma when no certificate is given."""
    if a.is_finite and gamma is None:
        return decide_weighted_orbit_finite(a, b)
    gamma = identity_gamma(a) if gamma is None else gamma
    if a.is_finite:
        return decide_weighted_orbit_finite(a, b, gamma) if check_graph_conjugacy(a, b, gamma).holds \
            else check_graph_conjugacy(a, b, gamma)
    forced = forced_H_values(a, b, gamma)
    if forced.verdict.fails:
        return forced.verdict
    btc = check_branch_transition(a, b, gamma)
    if btc.holds:
        return verify_weighted_orbit_certificate(a, b, ConjugacyCertificate(gamma, EdgeFunction(inverse_ratio=True)))
    return Verdict(INCONCLUSIVE, "woc", reason="forced values are consistent but no certificate was supplied",
                   details={"forced_cycles": len(forced.cycles)})
