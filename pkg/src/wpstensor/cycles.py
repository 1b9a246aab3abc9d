"""Exact max/min-product walk analysis on small weighted digraphs.

Edges are ``(tail, head, weight)`` triples with positive Fraction weights and
walks follow tail -> head.  Everything is Bellman-Ford style relaxation in
exact arithmetic, so comparisons against 1 are decisions, not estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

WEdge = tuple[Hashable, Hashable, Fraction]


@dataclass(frozen=True)
class Walk:
    edges: tuple[int, ...]  # indices into the edge list, in walk order
    product: Fraction


def _flip(edges: Sequence[WEdge]) -> list[WEdge]:
    return [(u, v, 1 / w) for u, v, w in edges]


def best_walks_by_length(edges: Sequence[WEdge], n: int, maximize: bool = True) -> list[Walk | None]:
    """Entry ``k`` is an extremal walk of exactly ``k`` edges (``k = 1..n``)."""
    better = (lambda a, b: a > b) if maximize else (lambda a, b: a < b)
    cur: dict = {}
    for k, (u, v, w) in enumerate(edges):
        if v not in cur or better(w, cur[v].product):
            cur[v] = Walk((k,), w)
    out: list[Walk | None] = [None, _pick(cur, better)]
    for _ in range(2, n + 1):
        nxt: dict = {}
        for k, (u, v, w) in enumerate(edges):
            if u in cur:
                p = cur[u].product * w
                if v not in nxt or better(p, nxt[v].product):
                    nxt[v] = Walk(cur[u].edges + (k,), p)
        cur = nxt
        out.append(_pick(cur, better))
    return out[: n + 1]


def _pick(table: dict, better) -> Walk | None:
    best = None
    for key in sorted(table, key=repr):
        wk = table[key]
        if best is None or better(wk.product, best.product):
            best = wk
    return best


def pumping_cycle(edges: Sequence[WEdge], above: bool = True) -> Walk | None:
    """A cycle with product ``> 1`` (or ``< 1`` when ``above`` is false), if any."""
    E = list(edges) if above else _flip(edges)
    nodes = sorted({u for u, _, _ in E} | {v for _, v, _ in E}, key=repr)
    dist = {v: Fraction(1) for v in nodes}
    pred: dict = {}
    changed = None
    for _ in range(len(nodes)):
        changed = None
        for k, (u, v, w) in enumerate(E):
            if dist[u] * w > dist[v]:
                dist[v] = dist[u] * w
                pred[v] = k
                changed = v
        if changed is None:
            return None
    v = changed
    for _ in range(len(nodes)):
        v = E[pred[v]][0]
    cyc = []
    x = v
    while True:
        k = pred[x]
        cyc.append(k)
        x = E[k][0]
        if x == v:
            break
    cyc.reverse()
    prod = Fraction(1)
    for k in cyc:
        prod *= edges[k][2]
    return Walk(tuple(cyc), prod)


def extremal_walk(edges: Sequence[WEdge], maximize: bool = True) -> Walk | None:
    """Extremal product over all walks with at least one edge.

    Only meaningful when no cycle pumps in the chosen direction; then the
    optimum is attained on a simple path and ``|V|`` rounds suffice.
    """
    better = (lambda a, b: a > b) if maximize else (lambda a, b: a < b)
    nodes = {u for u, _, _ in edges} | {v for _, v, _ in edges}
    cur: dict = {}
    for k, (u, v, w) in enumerate(edges):
        if v not in cur or better(w, cur[v].product):
            cur[v] = Walk((k,), w)
    for _ in range(len(nodes)):
        changed = False
        for k, (u, v, w) in enumerate(edges):
            if u in cur:
                p = cur[u].product * w
                if v not in cur or better(p, cur[v].product):
                    cur[v] = Walk(cur[u].edges + (k,), p)
                    changed = True
        if not changed:
            break
    return _pick(cur, better)


def walk_product(edges: Sequence[WEdge], walk: Sequence[int]) -> Fraction:
    prod = Fraction(1)
    for a, b in zip(walk, walk[1:]):
        if edges[a][1] != edges[b][0]:
            raise ValueError("edges do not concatenate")
    for k in walk:
        prod *= edges[k][2]
    return prod


def min_repetitions(product: Fraction, bound: Fraction, prefix: Fraction = Fraction(1)) -> int:
    """Least ``k >= 1`` with ``prefix * product**k`` outside ``[1/bound, bound]``."""
    if product == 1:
        raise ValueError("a cycle of product 1 never pumps")
    k, val = 0, prefix
    while 1 / bound <= val <= bound or k == 0:
        val *= product
        k += 1
    return k
