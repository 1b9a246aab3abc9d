"""The quiver correspondence of a system: elements, inner products, paths.

Finite-space elements are dicts ``edge -> scalar`` (Fraction or QComplex).
Paths of length ``n`` are vertex tuples ``(x_n, ..., x_1, x_0)`` read range
first, so ``mu[-1]`` is the source and edge ``k`` (from the right) is
``(mu[-k-1], mu[-k])``.  Interval-space elements are real and use the
per-branch representation of :class:`~wpstensor.conjugacy.EdgeFunction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import cycles
from .conjugacy import (
    FAILS,
    HOLDS,
    ConjugacyCertificate,
    EdgeFunction,
    Verdict,
    conjugate_system,
)
from .rationals import abs2, conj, q, real_part
from .spaces import PreconditionError
from .wps import WPS, edge_weight


class ResourceError(RuntimeError):
    def __init__(self, msg: str, partial: int):
        super().__init__(f"{msg} (stopped after {partial} paths)")
        self.partial = partial


def _need_finite(sys: WPS) -> None:
    if not sys.is_finite:
        raise PreconditionError("finite-space system expected")


def _check_attached(sys: WPS, *elements: dict) -> None:
    E = sys.edge_set.finite
    for el in elements:
        if set(el) != E:
            raise ValueError("element is not attached to this graph")


def unit(sys: WPS) -> dict:
    """The element ``1 ⊙ 1``."""
    _need_finite(sys)
    return {e: Fraction(1) for e in sys.edge_set.finite}


def odot(sys: WPS, f: dict, g: dict) -> dict:
    """``(f ⊙ g)(e) = f(r(e)) g(s(e))``."""
    _need_finite(sys)
    return {(r, s): f[r] * g[s] for r, s in sys.edge_set.finite}


def module_action(sys: WPS, f: dict | None, xi: dict, g: dict | None) -> dict:
    """``(f·ξ·g)(e) = f(r(e)) ξ(e) g(s(e))``; ``None`` stands for the constant 1."""
    _check_attached(sys, xi)
    return {(r, s): (f[r] if f else 1) * v * (g[s] if g else 1) for (r, s), v in xi.items()}


def inner_product(sys: WPS, xi, eta) -> dict | Callable:
    """Fibrewise ``<ξ,η>(x) = Σ_{s(e)=x} conj(ξ(e)) w(e) η(e)``."""
    if not sys.is_finite:
        return _interval_inner(sys, xi, eta)
    _check_attached(sys, xi, eta)
    w = sys.finite_edge_weights
    out = {x: Fraction(0) for x in sys.space.points}
    for e, v in xi.items():
        out[e[1]] = out[e[1]] + conj(v) * w[e] * eta[e]
    return out


def _interval_inner(sys: WPS, xi: EdgeFunction, eta: EdgeFunction) -> Callable:
    def fiber(x):
        x = q(x)
        total = Fraction(0)
        for r in sys.successors(x):
            e = (r, x)
            total += xi.at(sys, e) * edge_weight(sys, e) * eta.at(sys, e)
        return total

    return fiber


@dataclass(frozen=True)
class NormSq:
    """Squared norm; ``lo == hi`` and ``exact`` when the supremum is rational."""

    lo: Fraction
    hi: Fraction
    exact: bool

    @property
    def value(self) -> Fraction:
        return self.lo if self.exact else (self.lo + self.hi) / 2


def corr_norm_sq(sys: WPS, xi) -> NormSq:
    """``‖ξ‖² = sup_x <ξ,ξ>(x)``."""
    if sys.is_finite:
        ip = inner_product(sys, xi, xi)
        v = max(real_part(t) for t in ip.values())
        return NormSq(v, v, True)
    return _interval_norm_sq(sys, xi)


def corr_norm(sys: WPS, xi) -> float:
    return float(corr_norm_sq(sys, xi).value) ** 0.5


def sup_norm_sq(xi: dict) -> Fraction:
    return max(abs2(v) for v in xi.values())


# polynomial helpers for the interval norm


def _pmul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _padd(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _peval(p: list, x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(p):
        out = out * x + c
    return out


def _pderiv(p: list) -> list:
    return [k * p[k] for k in range(1, len(p))] or [Fraction(0)]


def _rational_sqrt(v: Fraction) -> Fraction | None:
    from math import isqrt

    if v < 0:
        return None
    n, d = v.numerator, v.denominator
    rn, rd = isqrt(n), isqrt(d)
    return Fraction(rn, rd) if rn * rn == n and rd * rd == d else None


def _sup_on(p: list, a: Fraction, b: Fraction, tol: Fraction) -> tuple[Fraction, Fraction, bool]:
    """Exact or bracketed ``max`` of polynomial ``p`` (degree <= 3) on ``[a, b]``."""
    best = max(_peval(p, a), _peval(p, b))
    dp = _pderiv(p)
    while len(dp) > 1 and dp[-1] == 0:
        dp.pop()
    roots_exact, roots_brackets = [], []
    if len(dp) == 2:
        roots_exact.append(-dp[0] / dp[1])
    elif len(dp) == 3:
        c0, c1, c2 = dp
        disc = c1 * c1 - 4 * c2 * c0
        if disc >= 0:
            sq = _rational_sqrt(disc)
            if sq is not None:
                roots_exact += [(-c1 + sq) / (2 * c2), (-c1 - sq) / (2 * c2)]
            else:
                roots_brackets.append(True)
    for r in roots_exact:
        if a < r < b:
            best = max(best, _peval(p, r))
    if not roots_brackets:
        return best, best, True
    # irrational critical points: bisect on sign changes of p'
    lo, hi = best, best
    lip = sum(abs(c) * max(abs(a), abs(b), 1) ** k for k, c in enumerate(dp))
    segs = [(a, b)]
    c0, c1, c2 = dp
    vertex = -c1 / (2 * c2)
    if a < vertex < b:
        segs = [(a, vertex), (vertex, b)]
    for l, r in segs:
        fl, fr = _peval(dp, l), _peval(dp, r)
        if fl == 0 or fr == 0 or (fl > 0) == (fr > 0):
            continue
        while (r - l) * lip > tol:
            m = (l + r) / 2
            fm = _peval(dp, m)
            if (fm > 0) == (fl > 0):
                l, fl = m, fm
            else:
                r = m
        lo = max(lo, _peval(p, l), _peval(p, r))
        hi = max(hi, max(_peval(p, l), _peval(p, r)) + lip * (r - l))
    return lo, hi, lo == hi


def _interval_norm_sq(sys: WPS, xi: EdgeFunction, tol: Fraction = Fraction(1, 10**12)) -> NormSq:
    extra = {x for h in xi.branches for x in h.breakpoints()}
    from .wps import joint_refinement

    ref = joint_refinement(sys, extra=extra)
    opens, points = sys.pieces(ref)
    lo = hi = Fraction(0)
    exact = True
    for pe in points:
        v = xi.at(sys, pe.edge) ** 2 * pe.weight
        lo, hi = max(lo, v), max(hi, v)
    cells: dict = {}
    for pc in opens:
        cells.setdefault((pc.a, pc.b), []).append(pc)
    for (a, b), pcs in cells.items():
        poly = [Fraction(0)]
        for pc in pcs:
            m, c = xi.branches[min(pc.indices)].affine_on(a, b)
            poly = _padd(poly, _pmul(_pmul([c, m], [c, m]), [pc.wintercept, pc.wslope]))
        l, h, ex = _sup_on(poly, a, b, tol)
        lo, hi = max(lo, l), max(hi, h)
        exact = exact and (ex or h <= lo)
    if hi <= lo:
        return NormSq(lo, lo, True)
    return NormSq(lo, hi, exact)


# paths and tensor iterates


def paths(sys: WPS, n: int, source=None, cap: int = 200_000) -> list[tuple]:
    """Paths of length ``n`` as vertex tuples, range first.

    Interval systems need a ``source`` point; their paths are the distinct
    concrete orbits reached by all branch words of length ``n``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if sys.is_finite:
        starts = [source] if source is not None else list(sys.space.points)
    else:
        if source is None:
            raise PreconditionError("interval systems enumerate paths from a given source")
        starts = [q(source)]
    layer = [(x,) for x in starts]
    for _ in range(n):
        nxt = []
        for mu in layer:
            for r in sorted(sys.successors(mu[0]), key=repr):
                nxt.append((r,) + mu)
                if len(nxt) > cap:
                    raise ResourceError("path enumeration exceeded the cap", len(nxt))
        layer = nxt
    return layer


def branch_words(sys: WPS, n: int, source) -> list[tuple[tuple, tuple]]:
    """All ``(word, path)`` pairs from ``source``; words list branches in application order."""
    out = [((), (sys._check_point(source),))]
    for _ in range(n):
        nxt = []
        for word, mu in out:
            for i in range(sys.d):
                if sys.in_domain(i, mu[0]):
                    nxt.append((word + (i,), (sys.apply(i, mu[0]),) + mu))
        out = nxt
    return out


def path_edges(mu: Sequence) -> list[tuple]:
    """Edges of ``mu`` from the top: ``[mu_n, ..., mu_1]``."""
    return [(mu[k], mu[k + 1]) for k in range(len(mu) - 1)]


def path_weight(sys: WPS, mu: Sequence) -> Fraction:
    w = Fraction(1)
    for e in path_edges(mu):
        w *= edge_weight(sys, e)
    return w


def concat(mu: Sequence, nu: Sequence) -> tuple:
    """``μν``: first ``nu``, then ``mu``; requires ``s(μ) = r(ν)``."""
    if mu[-1] != nu[0]:
        raise ValueError("paths do not concatenate")
    return tuple(mu) + tuple(nu[1:])


def tensor(sys: WPS, xis: Sequence[dict], n_paths: list | None = None) -> dict:
    """``ξ_n ⊗ … ⊗ ξ_1`` as the function ``μ ↦ ξ_n(μ_n)…ξ_1(μ_1)``."""
    n = len(xis)
    out = {}
    for mu in n_paths if n_paths is not None else paths(sys, n):
        v = 1
        for xi, e in zip(xis, path_edges(mu)):
            v = v * xi[e]
        out[mu] = v
    return out


def path_inner_product(sys: WPS, X: dict, Y: dict) -> dict:
    out = {x: Fraction(0) for x in sys.space.points}
    for mu, v in X.items():
        out[mu[-1]] = out[mu[-1]] + conj(v) * path_weight(sys, mu) * Y[mu]
    return out


def path_norm_sq(sys: WPS, X: dict) -> Fraction:
    return max(real_part(v) for v in path_inner_product(sys, X, X).values())


# multipliers


@dataclass(frozen=True)
class Multiplier:
    """``V(ξ)(e) = ζ(e) ξ(e)`` with ``|ζ|² = H`` kept exact; ``phase`` is unimodular."""

    H: dict
    phase: dict | None = None

    def inverse(self) -> "Multiplier":
        ph = None if self.phase is None else {e: conj(p) for e, p in self.phase.items()}
        return Multiplier({e: 1 / v for e, v in self.H.items()}, ph)

    def zeta(self, e) -> complex:
        z = float(self.H[e]) ** 0.5
        return z * complex(self.phase[e]) if self.phase else complex(z)


def multiplier_from_certificate(a: WPS, b: WPS, cert: ConjugacyCertificate) -> Multiplier:
    _need_finite(a)
    if cert.H.inverse_ratio:
        bc = conjugate_system(b, cert.gamma, a.space)
        wa, ub = a.finite_edge_weights, bc.finite_edge_weights
        return Multiplier({e: wa[e] / ub[e] for e in wa})
    if cert.H.table is None or any(q(v) <= 0 for v in cert.H.table.values()):
        raise ValueError("malformed H")
    return Multiplier({e: q(v) for e, v in cert.H.table.items()})


def transported_inner_product(V: Multiplier, target: WPS, xi: dict, eta: dict) -> dict:
    """``<Vξ, Vη>`` in the target correspondence, computed from ``|ζ|²`` only."""
    u = target.finite_edge_weights
    out = {x: Fraction(0) for x in target.space.points}
    for e, v in xi.items():
        out[e[1]] = out[e[1]] + V.H[e] * conj(v) * u[e] * eta[e]
    return out


def gain(V: Multiplier, source: WPS, target: WPS) -> dict:
    """Per-edge factor ``g = |ζ|² u / w``."""
    w, u = source.finite_edge_weights, target.finite_edge_weights
    return {e: V.H[e] * u[e] / w[e] for e in w}


def _gain_edges(V, source, target) -> list:
    g = gain(V, source, target)
    return sorted(((s, r, v) for (r, s), v in g.items()), key=repr)


def tensor_power_norm_sq(V: Multiplier, source: WPS, target: WPS, n: int) -> Fraction:
    """``‖V^{⊗n}‖²``: the largest path product of the gain over length-``n`` paths."""
    if n == 0:
        return Fraction(1)
    wk = cycles.best_walks_by_length(_gain_edges(V, source, target), n)[n]
    if wk is None:
        return Fraction(0)
    return wk.product


def tensor_power_norm_sq_bruteforce(V: Multiplier, source: WPS, target: WPS, n: int) -> Fraction:
    g = gain(V, source, target)
    best = Fraction(0)
    for mu in paths(source, n):
        p = Fraction(1)
        for e in path_edges(mu):
            p *= g[e]
        best = max(best, p)
    return best


def is_tensor_power_bounded(V: Multiplier, source: WPS, target: WPS) -> Verdict:
    """Bounded iff no cycle has gain product above 1; ``details['sup']`` is ``sup_{n>=1}``."""
    E = _gain_edges(V, source, target)
    cyc = cycles.pumping_cycle(E, above=True)
    if cyc is not None:
        wedges = [(E[k][1], E[k][0]) for k in cyc.edges]
        return Verdict(FAILS, "tensor-power", witness={"kind": "cycle", "edges": wedges, "product": cyc.product},
                       reason=f"a cycle has gain product {cyc.product} > 1")
    top = cycles.extremal_walk(E, True)
    if top is None:  # no edges: only the empty path
        return Verdict(HOLDS, "tensor-power", details={"sup": Fraction(0), "path": []})
    return Verdict(HOLDS, "tensor-power", details={"sup": top.product,
                                                   "path": [(E[k][1], E[k][0]) for k in top.edges]})
