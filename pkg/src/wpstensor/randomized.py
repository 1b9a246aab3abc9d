"""Seeded generators of random systems and the hierarchy self-check."""

from __future__ import annotations

import random
from fractions import Fraction

from .conjugacy import (
    check_branch_transition,
    check_graph_conjugacy,
    decide_finite,
    decide_weighted_orbit,
)
from .correspondence import paths
from .fock import FourierElement
from .rationals import QComplex
from .spaces import FiniteSpace, PLFunc
from .wps import WPS, Branch, interval_system

UNIT = ((Fraction(0), Fraction(1)),)


def rand_rational(rng: random.Random, lo: int = 1, hi: int = 9) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, hi))


def random_finite_wps(rng: random.Random, max_points: int = 6, max_branches: int = 4) -> WPS:
    n = rng.randint(1, max_points)
    pts = tuple(range(n))
    branches = []
    for _ in range(rng.randint(1, max_branches)):
        dom = [x for x in pts if rng.random() < 0.7] or [rng.choice(pts)]
        branches.append(Branch(frozenset(dom), {x: rng.choice(pts) for x in dom},
                               {x: rand_rational(rng) for x in dom}))
    return WPS(FiniteSpace(pts), branches)


def reweighted(rng: random.Random, sys: WPS) -> WPS:
    """Same maps, fresh random weights."""
    return WPS(sys.space, [Branch(br.domain, dict(br.map), {x: rand_rational(rng) for x in br.domain})
                           for br in sys.branches])


def random_matrix(rng: random.Random, n: int, density: float = 0.4) -> list[list[int]]:
    """Non-negative integer matrix with at least one positive entry."""
    A = [[rng.randint(1, 5) if rng.random() < density else 0 for _ in range(n)] for _ in range(n)]
    if not any(any(row) for row in A):
        A[rng.randrange(n)][rng.randrange(n)] = rng.randint(1, 5)
    return A


def permute_matrix(A: list[list], perm: list[int], rng: random.Random | None = None) -> list[list]:
    """``B[perm[i]][perm[j]] = A[i][j]``, optionally with entries rescaled at random."""
    n = len(A)
    B = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            v = A[i][j]
            if v and rng is not None:
                v = rng.randint(1, 5)
            B[perm[i]][perm[j]] = v
    return B


def degree_sequence(A: list[list]) -> list[tuple[int, int]]:
    n = len(A)
    return sorted((sum(1 for i in range(n) if A[i][j]), sum(1 for k in range(n) if A[j][k])) for j in range(n))


def _rand_map(rng: random.Random) -> PLFunc:
    grid = [Fraction(k, 4) for k in range(5)]
    if rng.random() < 0.3:
        return PLFunc.constant(UNIT, rng.choice(grid))
    if rng.random() < 0.5:
        y0, y1 = rng.choice(grid), rng.choice(grid)
        return PLFunc.from_points([(0, y0), (1, y1)])
    knot = Fraction(rng.randint(1, 3), 4)
    return PLFunc.from_points([(0, rng.choice(grid)), (knot, rng.choice(grid)), (1, rng.choice(grid))])


def _rand_weight(rng: random.Random) -> PLFunc:
    if rng.random() < 0.5:
        return PLFunc.constant(UNIT, rand_rational(rng))
    return PLFunc.from_points([(0, rand_rational(rng)), (1, rand_rational(rng))])


def random_interval_pair(rng: random.Random, max_branches: int = 3) -> tuple[WPS, WPS]:
    """Two systems on [0,1] with the same maps; weights shared, rescaled or redrawn."""
    maps = [_rand_map(rng) for _ in range(rng.randint(1, max_branches))]
    wa = [_rand_weight(rng) for _ in maps]
    mode = rng.choice(("same", "scaled", "fresh"))
    if mode == "same":
        wb = wa
    elif mode == "scaled":
        c = rand_rational(rng)
        wb = [w.map_values(lambda v, c=c: c * v) for w in wa]
    else:
        wb = [_rand_weight(rng) for _ in maps]
    a = interval_system(UNIT, [({0}, m, w) for m, w in zip(maps, wa)])
    b = interval_system(UNIT, [({0}, m, w) for m, w in zip(maps, wb)])
    return a, b


def hierarchy_violation(a: WPS, b: WPS) -> str | None:
    """Check BTC => WOC => graph for one pair; returns a description on violation."""
    if a.is_finite:
        g, t, w = (decide_finite(a, b, rel) for rel in ("graph", "btc", "woc"))
    else:
        g, t = check_graph_conjugacy(a, b), check_branch_transition(a, b)
        w = decide_weighted_orbit(a, b)
    if t.holds and not w.holds:
        return f"BTC holds but WOC is {w.status}: {w.reason}"
    if w.holds and not g.holds:
        return f"WOC holds but graph conjugacy is {g.status}"
    if t.holds and w.certificate is not None and w.certificate.C != 1:
        return "BTC holds but the emitted certificate has C != 1"
    return None


def hierarchy_selfcheck(seed: int = 0, count: int = 100) -> list[str]:
    rng = random.Random(seed)
    problems = []
    for k in range(count):
        if k % 2 == 0:
            a = random_finite_wps(rng)
            b = reweighted(rng, a) if rng.random() < 0.7 else random_finite_wps(rng)
        else:
            a, b = random_interval_pair(rng)
        bad = hierarchy_violation(a, b)
        if bad:
            problems.append(f"instance {k}: {bad}")
    return problems



def random_element(rng: random.Random, sys: WPS, N: int, max_degree: int | None = None,
                   density: float = 0.5, complex_values: bool = True) -> FourierElement:
    """Random truncated Fourier series with small Gaussian-rational coefficients."""
    top = N if max_degree is None else min(N, max_degree)
    coeffs = {}
    for n in range(top + 1):
        vals = {}
        for mu in paths(sys, n):
            if rng.random() < density:
                im = Fraction(rng.randint(-3, 3), rng.randint(1, 3)) if complex_values else 0
                vals[mu] = QComplex(Fraction(rng.randint(-3, 3), rng.randint(1, 3)), im)
        if vals:
            coeffs[n] = vals
    return FourierElement(sys, N, coeffs)
