"""Weighted partial systems and their multiplicity-free graphs.

Edges are pairs ``(r, s)`` with the range first.  Branch indices are
0-based.  On interval spaces the graph is cut into point edges (over the
points of a common breakpoint refinement) and open pieces (affine curves over
the open cells between them), which is all the exact geometry the other
modules need.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Hashable, Iterable

from .rationals import q
from .spaces import (
    DomainError,
    FiniteSpace,
    IntervalSpace,
    IntervalUnion,
    PLFunc,
    PreconditionError,
    boundary_in,
    solve_equal,
)

Edge = tuple


@dataclass(frozen=True)
class Branch:
    """One partial map with its weight.

    ``domain`` is a frozenset of atoms (finite space) or of component
    indices (interval space).  ``map`` and ``weight`` are dicts over atoms or
    PLFuncs whose pieces are exactly the domain components.
    """

    domain: frozenset
    map: dict | PLFunc
    weight: dict | PLFunc


@dataclass(frozen=True)
class OpenPiece:
    """Branches ``indices`` share the curve ``r = slope*s + intercept`` over ``a < s < b``."""

    comp: int
    a: Fraction
    b: Fraction
    slope: Fraction
    intercept: Fraction
    indices: frozenset
    wslope: Fraction
    wintercept: Fraction

    def range_at(self, s) -> Fraction:
        return self.slope * s + self.intercept

    def weight_at(self, s) -> Fraction:
        """Weight-sum formula, also valid as a one-sided limit at ``a`` and ``b``."""
        return self.wslope * s + self.wintercept

    def image(self) -> tuple[Fraction, Fraction]:
        ra, rb = self.range_at(self.a), self.range_at(self.b)
        return (min(ra, rb), max(ra, rb))

    def is_diagonal(self) -> bool:
        return self.slope == 1 and self.intercept == 0


@dataclass(frozen=True)
class PointEdge:
    s: Fraction
    r: Fraction
    indices: frozenset
    weight: Fraction

    @property
    def edge(self) -> Edge:
        return (self.r, self.s)


@dataclass(frozen=True)
class Discontinuity:
    edge: Edge
    value: Fraction
    limits: tuple[tuple[str, Fraction], ...]


@dataclass(frozen=True)
class EdgeSet:
    """Canonical form of a graph.

    Finite graphs are a frozenset of edges.  Interval graphs are a sorted
    tuple of lines ``(slope, intercept)`` with the merged source intervals
    they cover, plus isolated edges not lying on any segment.
    """

    finite: frozenset | None = None
    lines: tuple = ()
    points: tuple = ()

    def __contains__(self, e) -> bool:
        r, s = e
        if self.finite is not None:
            return e in self.finite
        r, s = q(r), q(s)
        for (m, k), cover in self.lines:
            if m * s + k == r and s in cover:
                return True
        return (r, s) in self.points

    def __len__(self) -> int:
        if self.finite is not None:
            return len(self.finite)
        return len(self.lines) + len(self.points)

    def sample_points(self) -> list[Edge]:
        """Rational points on every segment and every isolated edge."""
        out = list(self.points)
        for (m, k), cover in self.lines:
            for a, b in cover:
                for t in (a, b, (a + b) / 2, a + (b - a) / 3):
                    out.append((m * t + k, t))
        return out


class WPS:
    """A weighted partial system over a finite or interval space."""

    def __init__(self, space: FiniteSpace | IntervalSpace, branches: Iterable[Branch]):
        self.space = space
        self.branches = tuple(branches)
        if not self.branches:
            raise ValueError("a system needs at least one branch")
        for i, br in enumerate(self.branches):
            self._validate(i, br)

    @property
    def d(self) -> int:
        return len(self.branches)

    @property
    def is_finite(self) -> bool:
        return self.space.is_finite

    def __eq__(self, other) -> bool:
        if not isinstance(other, WPS):
            return NotImplemented
        return self.space == other.space and self.branches == other.branches

    def __hash__(self):
        return hash((self.space, len(self.branches)))

    def __repr__(self) -> str:
        kind = "finite" if self.is_finite else "intervals"
        return f"WPS({kind}, d={self.d})"

    def _validate(self, i: int, br: Branch) -> None:
        sp = self.space
        if not br.domain <= sp.all():
            raise ValueError(f"branch {i}: domain outside the space")
        if sp.is_finite:
            if set(br.map) != set(br.domain) or set(br.weight) != set(br.domain):
                raise ValueError(f"branch {i}: map/weight must be defined exactly on the domain")
            for x in br.domain:
                if br.map[x] not in sp:
                    raise ValueError(f"branch {i}: image of {x!r} is not a point")
                if not q(br.weight[x]) > 0:
                    raise ValueError(f"branch {i}: weight must be strictly positive")
            return
        spans = sorted(sp.components[k] for k in br.domain)
        for name, fn in (("map", br.map), ("weight", br.weight)):
            if not isinstance(fn, PLFunc):
                raise ValueError(f"branch {i}: {name} must be piecewise linear")
            if sorted(fn.spans()) != spans:
                raise ValueError(f"branch {i}: {name} pieces must be exactly the domain components")
        if br.weight.min_value() <= 0:
            raise ValueError(f"branch {i}: weight must be strictly positive")
        for xs, ys in br.map.pieces:
            lo, hi = min(ys), max(ys)
            k = sp.component_of(lo)
            if k is None or hi > sp.components[k][1]:
                raise ValueError(f"branch {i}: image of [{xs[0]}, {xs[-1]}] is not inside one component")

    # pointwise access

    def in_domain(self, i: int, x) -> bool:
        if self.is_finite:
            return x in self.branches[i].domain
        k = self.space.component_of(x)
        return k is not None and k in self.branches[i].domain

    def apply(self, i: int, x):
        br = self.branches[i]
        return br.map[x] if self.is_finite else br.map(x)

    def weight(self, i: int, x) -> Fraction:
        br = self.branches[i]
        return q(br.weight[x]) if self.is_finite else br.weight(x)

    def _check_point(self, x):
        if self.is_finite:
            if x not in self.space:
                raise DomainError(f"{x!r} is not a point of the space")
            return x
        x = q(x)
        if x not in self.space:
            raise DomainError(f"{x} is not a point of the space")
        return x

    def successors(self, x) -> dict:
        """``r -> index set`` for the edges with source ``x``."""
        x = self._check_point(x)
        out: dict = {}
        for i in range(self.d):
            if self.in_domain(i, x):
                out.setdefault(self.apply(i, x), set()).add(i)
        return {r: frozenset(s) for r, s in out.items()}

    def in_graph(self, r, s) -> bool:
        try:
            s = self._check_point(s)
        except DomainError:
            return False
        if not self.is_finite:
            r = q(r)
        return any(self.in_domain(i, s) and self.apply(i, s) == r for i in range(self.d))

    # finite fast paths

    @cached_property
    def finite_edge_weights(self) -> dict:
        if not self.is_finite:
            raise PreconditionError("finite-space system expected")
        out: dict = {}
        for i, br in enumerate(self.branches):
            for x in br.domain:
                e = (br.map[x], x)
                out[e] = out.get(e, Fraction(0)) + q(br.weight[x])
        return out

    # interval geometry

    def component_points(self, k: int) -> set:
        """Breakpoints, crossings and fixed-point ends inside component ``k``."""
        a, b = self.space.components[k]
        pts = {a, b}
        live = [i for i in range(self.d) if k in self.branches[i].domain]
        comp = ((a, b),)
        maps = {i: self.branches[i].map.restrict(comp) for i in live}
        for i in live:
            pts.update(maps[i].breakpoints())
            pts.update(self.branches[i].weight.restrict(comp).breakpoints())
            pts.update(solve_equal(maps[i], PLFunc.identity(comp)).endpoints())
        for i, j in combinations(live, 2):
            pts.update(solve_equal(maps[i], maps[j]).endpoints())
        return pts

    @cached_property
    def refinement(self) -> dict[int, tuple[Fraction, ...]]:
        return {k: tuple(sorted(self.component_points(k))) for k in range(len(self.space.components))}

    def pieces(self, refinement: dict | None = None) -> tuple[list[OpenPiece], list[PointEdge]]:
        """Open pieces and point edges of the graph over a refinement.

        A custom refinement must contain this system's own refinement points.
        """
        if self.is_finite:
            raise PreconditionError("interval-space system expected")
        ref = refinement if refinement is not None else self.refinement
        key = tuple(sorted((k, tuple(v)) for k, v in ref.items()))
        cache = self.__dict__.setdefault("_piece_cache", {})
        if key in cache:
            return cache[key]
        opens: list[OpenPiece] = []
        points: list[PointEdge] = []
        for k, pts in sorted(ref.items()):
            live = [i for i in range(self.d) if k in self.branches[i].domain]
            for p in pts:
                for r, idx in sorted(self.successors(p).items()):
                    points.append(PointEdge(p, r, idx, sum(self.weight(i, p) for i in idx)))
            for a, b in zip(pts, pts[1:]):
                groups: dict = {}
                for i in live:
                    groups.setdefault(self.branches[i].map.affine_on(a, b), []).append(i)
                for (m, c), idx in sorted(groups.items()):
                    wm = sum(self.branches[i].weight.affine_on(a, b)[0] for i in idx)
                    wc = sum(self.branches[i].weight.affine_on(a, b)[1] for i in idx)
                    opens.append(OpenPiece(k, a, b, m, c, frozenset(idx), Fraction(wm), Fraction(wc)))
        cache[key] = (opens, points)
        return opens, points

    @cached_property
    def edge_set(self) -> EdgeSet:
        if self.is_finite:
            return EdgeSet(finite=frozenset(self.finite_edge_weights))
        opens, points = self.pieces()
        by_line: dict = {}
        for pc in opens:
            by_line.setdefault((pc.slope, pc.intercept), []).append((pc.a, pc.b))
        lines = tuple(sorted((ln, IntervalUnion(tuple(iv))) for ln, iv in by_line.items()))
        probe = EdgeSet(lines=lines)
        iso = tuple(sorted({pe.edge for pe in points if pe.edge not in probe}))
        return EdgeSet(lines=lines, points=iso)


def joint_refinement(*systems: WPS, extra: Iterable = ()) -> dict[int, tuple[Fraction, ...]]:
    """Common refinement of several interval systems over the same space."""
    space = systems[0].space
    extra = [q(x) for x in extra]
    out = {}
    for k, (a, b) in enumerate(space.components):
        pts = set()
        for sys in systems:
            pts.update(sys.refinement[k])
        pts.update(x for x in extra if a <= x <= b)
        out[k] = tuple(sorted(pts))
    return out


def graph(sys: WPS) -> EdgeSet:
    return sys.edge_set


def index_set(sys: WPS, e: Edge) -> frozenset:
    r, s = e
    succ = sys.successors(s)
    if not sys.is_finite:
        r = q(r)
    if r not in succ:
        raise DomainError(f"{e!r} is not an edge of the graph")
    return succ[r]


def edge_weight(sys: WPS, e: Edge) -> Fraction:
    idx = index_set(sys, e)
    return sum((sys.weight(i, e[1]) for i in idx), Fraction(0))


def coinciding_set(sys: WPS, I: Iterable[int]):
    I = sorted(set(I))
    if len(I) < 2:
        raise ValueError("a coinciding set needs at least two indices")
    if sys.is_finite:
        common = frozenset.intersection(*(sys.branches[i].domain for i in I))
        return frozenset(x for x in common if len({sys.apply(i, x) for i in I}) == 1)
    comps = frozenset.intersection(*(sys.branches[i].domain for i in I))
    if not comps:
        return IntervalUnion()
    spans = tuple(sys.space.components[k] for k in sorted(comps))
    first = sys.branches[I[0]].map.restrict(spans)
    out = IntervalUnion(spans)
    for j in I[1:]:
        out = out & solve_equal(first, sys.branches[j].map.restrict(spans))
    return out


def boundary(sys: WPS, I: Iterable[int]):
    C = coinciding_set(sys, I)
    if sys.is_finite:
        return frozenset()
    return boundary_in(C, sys.space)


def branching_points(sys: WPS):
    if sys.is_finite:
        return frozenset()
    pts = set()
    for i, j in combinations(range(sys.d), 2):
        pts.update(boundary(sys, (i, j)))
    return sorted(pts)


def branching_edges(sys: WPS) -> list[Edge]:
    if sys.is_finite:
        return []
    out = set()
    for i, j in combinations(range(sys.d), 2):
        for p in boundary(sys, (i, j)):
            out.add((sys.apply(i, p), p))
    return sorted(out, key=lambda e: (e[1], e[0]))


def fixed_points(sys: WPS):
    if sys.is_finite:
        return frozenset(x for i, br in enumerate(sys.branches) for x in br.domain if br.map[x] == x)
    out = IntervalUnion()
    for br in sys.branches:
        spans = br.map.spans()
        out = out | solve_equal(br.map, PLFunc.identity(spans))
    return out


def weight_discontinuities(sys: WPS) -> list[Discontinuity]:
    """Edges where a one-sided limit of the edge weight differs from its value."""
    if sys.is_finite:
        return []
    opens, points = sys.pieces()
    by_cell: dict = {}
    for pc in opens:
        by_cell.setdefault(pc.a, []).append(("right", pc))
        by_cell.setdefault(pc.b, []).append(("left", pc))
    out = []
    for pe in points:
        limits = []
        for side, pc in by_cell.get(pe.s, []):
            if pc.comp == sys.space.component_of(pe.s) and pc.range_at(pe.s) == pe.r:
                limits.append((side, pc.weight_at(pe.s)))
        if any(lim != pe.weight for _, lim in limits):
            out.append(Discontinuity(pe.edge, pe.weight, tuple(limits)))
    return out


def weight_bounds(sys: WPS) -> tuple[Fraction, Fraction]:
    """``(min_i min w_i, d * max_i max w_i)``, the a priori edge-weight bounds."""
    if sys.is_finite:
        ws = [q(v) for br in sys.branches for v in br.weight.values()]
    else:
        ws = [y for br in sys.branches for y in (br.weight.min_value(), br.weight.max_value())]
    return min(ws), sys.d * max(ws)


def is_well_supported(sys: WPS) -> bool:
    covered = frozenset().union(*(br.domain for br in sys.branches))
    return covered == sys.space.all()


def weight_sum(sys: WPS):
    """``w_sigma``: dict over atoms, or PLFunc on the covered components."""
    if sys.is_finite:
        out: dict = {}
        for br in sys.branches:
            for x in br.domain:
                out[x] = out.get(x, Fraction(0)) + q(br.weight[x])
        return out
    pieces = []
    for k, (a, b) in enumerate(sys.space.components):
        live = [br for br in sys.branches if k in br.domain]
        if not live:
            continue
        pts = sorted({a, b} | {x for br in live for x in br.weight.breakpoints() if a <= x <= b})
        pieces.append((tuple(pts), tuple(sum(br.weight(x) for br in live) for x in pts)))
    return PLFunc(tuple(pieces))


def normalize(sys: WPS) -> WPS:
    """Divide every weight by ``w_sigma``; refuses results that are not PL."""
    if not is_well_supported(sys):
        raise PreconditionError("normalize needs a well-supported system")
    total = weight_sum(sys)
    if sys.is_finite:
        return WPS(sys.space, [Branch(br.domain, dict(br.map),
                                      {x: q(br.weight[x]) / total[x] for x in br.domain})
                               for br in sys.branches])
    out = []
    for br in sys.branches:
        pieces = []
        for xs, _ in br.weight.pieces:
            a, b = xs[0], xs[-1]
            pts = sorted({a, b} | {x for x in total.breakpoints() + br.weight.breakpoints() if a < x < b})
            for x0, x1 in zip(pts, pts[1:]):
                m1, c1 = br.weight.affine_on(x0, x1)
                m2, c2 = total.affine_on(x0, x1)
                if m2 != 0 and m1 * c2 != m2 * c1:
                    raise PreconditionError(f"normalized weight is not piecewise linear on [{x0}, {x1}]")
            pieces.append((tuple(pts), tuple(br.weight(x) / total(x) for x in pts)))
        out.append(Branch(br.domain, br.map, PLFunc(tuple(pieces))))
    return WPS(sys.space, out)


def positive_operator(sys: WPS, f) -> dict | Callable:
    """``P(f)(x) = sum_i w_i(x) f(sigma_i(x))`` over the branches defined at ``x``."""
    if sys.is_finite:
        if not isinstance(f, dict) or set(f) < set(sys.space.points):
            raise DomainError("f must be defined on every point")
        out = {x: Fraction(0) for x in sys.space.points}
        for i, br in enumerate(sys.branches):
            for x in br.domain:
                out[x] += q(br.weight[x]) * f[br.map[x]]
        return out
    if isinstance(f, PLFunc):
        dom = f.domain()
        for a, b in sys.space.components:
            if a not in dom or b not in dom or (dom & IntervalUnion(((a, b),))).parts != ((a, b),):
                raise DomainError("f must be defined on the whole space")

    def Pf(x):
        x = sys._check_point(x)
        return sum((sys.weight(i, x) * f(sys.apply(i, x)) for i in range(sys.d) if sys.in_domain(i, x)),
                   Fraction(0))

    return Pf


def image_of(sys: WPS, subset: IntervalUnion) -> IntervalUnion:
    """Union over branches of the image of ``subset``."""
    parts = []
    for br in sys.branches:
        for xs, ys in br.map.pieces:
            for a, b in subset & IntervalUnion(((xs[0], xs[-1]),)):
                pts = [a, b] + [x for x in xs if a < x < b]
                vals = [br.map(x) for x in pts]
                parts.append((min(vals), max(vals)))
    return IntervalUnion(tuple(parts))


def eventual_finiteness_horizon(sys: WPS, max_steps: int = 32) -> int | None:
    """Smallest ``k`` with a finite image of the space under all length-``k`` words."""
    if sys.is_finite:
        return 0
    S = sys.space.as_union()
    for k in range(max_steps + 1):
        if S.is_finite_set():
            return k
        nxt = image_of(sys, S)
        if nxt == S:
            return None
        S = nxt
    return None


def finite_system(points: Iterable[Hashable], branches: Iterable[tuple[dict, dict]]) -> WPS:
    """Finite system from ``(map, weight)`` dict pairs."""
    sp = FiniteSpace(tuple(points))
    return WPS(sp, [Branch(frozenset(m), dict(m), {x: q(v) for x, v in w.items()}) for m, w in branches])


def matrix_system(A) -> WPS:
    """Entries ``A[i][j] > 0`` give ``sigma_i(j) = i`` with weight ``A[i][j]`` (0-based states)."""
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix must be square")
    branches = []
    for i in range(n):
        dom = [j for j in range(n) if q(A[i][j]) != 0]
        if any(q(A[i][j]) < 0 for j in range(n)):
            raise ValueError("matrix entries must be non-negative")
        if dom:
            branches.append(({j: i for j in dom}, {j: q(A[i][j]) for j in dom}))
    return finite_system(range(n), branches)


def graph_system(n_or_points, edges: Iterable[tuple]) -> WPS:
    """Counting-measure system: one weight-1 branch per edge ``(r, s)``."""
    pts = tuple(range(n_or_points)) if isinstance(n_or_points, int) else tuple(n_or_points)
    edges = sorted(set(edges), key=repr)
    return finite_system(pts, [({s: r}, {s: 1}) for r, s in edges])


def interval_system(components, branches: Iterable[tuple]) -> WPS:
    """Interval system from ``(domain component indices, map, weight)`` triples."""
    sp = IntervalSpace(tuple(components))
    return WPS(sp, [Branch(frozenset(dom), m, w) for dom, m, w in branches])
