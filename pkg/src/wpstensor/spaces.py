"""Base spaces, clopen subsets and exact piecewise-linear functions.

A space is either a finite set of atoms or a finite union of disjoint closed
rational intervals (degenerate ``[a, a]`` components model isolated points).
Clopen subsets of an interval space are unions of whole components, so they
are stored as sets of component indices.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Sequence

from .rationals import q


class DomainError(ValueError):
    """A point or set falls outside the domain of a function."""


class PreconditionError(ValueError):
    """An operation was called on input that violates its precondition."""


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[Hashable, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("a space needs at least one point")
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate atoms")

    is_finite = True

    def __contains__(self, x) -> bool:
        return x in self._index

    @property
    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {p: k for k, p in enumerate(self.points)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def all(self) -> frozenset:
        return frozenset(self.points)


@dataclass(frozen=True)
class IntervalSpace:
    components: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        comps = tuple((q(a), q(b)) for a, b in self.components)
        if not comps:
            raise ValueError("a space needs at least one component")
        for a, b in comps:
            if a > b:
                raise ValueError(f"empty component [{a}, {b}]")
        for (a0, b0), (a1, b1) in zip(comps, comps[1:]):
            if not b0 < a1:
                raise ValueError("components must be disjoint and sorted")
        object.__setattr__(self, "components", comps)

    is_finite = False

    def component_of(self, x) -> int | None:
        x = q(x)
        k = bisect_right([a for a, _ in self.components], x) - 1
        if k >= 0 and x <= self.components[k][1]:
            return k
        return None

    def __contains__(self, x) -> bool:
        try:
            return self.component_of(x) is not None
        except TypeError:
            return False

    def all(self) -> frozenset:
        return frozenset(range(len(self.components)))

    def as_union(self) -> "IntervalUnion":
        return IntervalUnion(self.components)


Space = FiniteSpace | IntervalSpace


@dataclass(frozen=True)
class IntervalUnion:
    """Finite union of closed rational intervals; points are ``(p, p)``.

    The constructor sorts and merges, so two equal sets always have equal
    ``parts`` tuples.
    """

    parts: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        raw = sorted((q(a), q(b)) for a, b in self.parts)
        merged: list[list[Fraction]] = []
        for a, b in raw:
            if a > b:
                continue
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        object.__setattr__(self, "parts", tuple((a, b) for a, b in merged))

    @classmethod
    def points(cls, pts: Iterable) -> "IntervalUnion":
        return cls(tuple((p, p) for p in pts))

    def __contains__(self, x) -> bool:
        x = q(x)
        k = bisect_right([a for a, _ in self.parts], x) - 1
        return k >= 0 and x <= self.parts[k][1]

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __or__(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.parts + other.parts)

    def __and__(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        i = j = 0
        A, B = self.parts, other.parts
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion(tuple(out))

    def isolated_points(self) -> list[Fraction]:
        return [a for a, b in self.parts if a == b]

    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        return [(a, b) for a, b in self.parts if a < b]

    def is_finite_set(self) -> bool:
        return all(a == b for a, b in self.parts)

    def endpoints(self) -> list[Fraction]:
        pts = set()
        for a, b in self.parts:
            pts.add(a)
            pts.add(b)
        return sorted(pts)

    def __repr__(self) -> str:
        body = ", ".join(f"{{{a}}}" if a == b else f"[{a}, {b}]" for a, b in self.parts)
        return f"IntervalUnion({body})"


def boundary_in(subset: IntervalUnion, space: IntervalSpace) -> list[Fraction]:
    """Topological boundary of a closed ``subset`` relative to ``space``.

    ``p`` is a boundary point when every neighbourhood of ``p`` inside the
    space meets the complement; component endpoints of the space therefore
    only count from the inside.
    """
    out = set()
    for a, b in subset.parts:
        k = space.component_of(a)
        if k is None:
            raise DomainError(f"{a} is not in the space")
        c, d = space.components[k]
        if a > c:
            out.add(a)
        if b < d:
            out.add(b)
    return sorted(out)


def _affine_through(x0, y0, x1, y1) -> tuple[Fraction, Fraction]:
    slope = (y1 - y0) / (x1 - x0)
    return slope, y0 - slope * x0


@dataclass(frozen=True)
class PLFunc:
    """Continuous piecewise-linear function on a union of closed intervals.

    ``pieces`` holds one ``(xs, ys)`` pair per connected piece of the domain:
    strictly increasing breakpoints and the values there.  A degenerate piece
    has a single breakpoint.
    """

    pieces: tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...]], ...]

    def __post_init__(self):
        clean = []
        for xs, ys in self.pieces:
            xs = tuple(q(x) for x in xs)
            ys = tuple(q(y) for y in ys)
            if not xs or len(xs) != len(ys):
                raise ValueError("each piece needs matching breakpoints and values")
            if any(a >= b for a, b in zip(xs, xs[1:])):
                raise ValueError("breakpoints must be strictly increasing")
            clean.append(_simplify(xs, ys))
        clean.sort(key=lambda p: p[0][0])
        for (xs0, _), (xs1, _) in zip(clean, clean[1:]):
            if not xs0[-1] < xs1[0]:
                raise ValueError("pieces must have disjoint domains")
        object.__setattr__(self, "pieces", tuple(clean))

    # construction helpers

    @classmethod
    def from_points(cls, *pieces: Sequence[tuple]) -> "PLFunc":
        """``PLFunc.from_points([(0, 0), (1, 2)])`` builds one piece per list."""
        return cls(tuple((tuple(x for x, _ in pc), tuple(y for _, y in pc)) for pc in pieces))

    @classmethod
    def identity(cls, components: Iterable[tuple]) -> "PLFunc":
        return cls(tuple(((a,), (a,)) if a == b else ((a, b), (a, b)) for a, b in components))

    @classmethod
    def constant(cls, components: Iterable[tuple], c) -> "PLFunc":
        c = q(c)
        return cls(tuple(((a,), (c,)) if a == b else ((a, b), (c, c)) for a, b in components))

    @classmethod
    def affine(cls, components: Iterable[tuple], slope, intercept) -> "PLFunc":
        m, k = q(slope), q(intercept)
        return cls(tuple(((a,), (m * a + k,)) if a == b else ((a, b), (m * a + k, m * b + k))
                         for a, b in components))

    # queries

    def domain(self) -> IntervalUnion:
        return IntervalUnion(tuple((xs[0], xs[-1]) for xs, _ in self.pieces))

    def spans(self) -> list[tuple[Fraction, Fraction]]:
        return [(xs[0], xs[-1]) for xs, _ in self.pieces]

    def _piece_at(self, x: Fraction):
        starts = [xs[0] for xs, _ in self.pieces]
        k = bisect_right(starts, x) - 1
        if k >= 0:
            xs, ys = self.pieces[k]
            if x <= xs[-1]:
                return xs, ys
        return None

    def defined_at(self, x) -> bool:
        return self._piece_at(q(x)) is not None

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    def breakpoints(self) -> list[Fraction]:
        return sorted({x for xs, _ in self.pieces for x in xs})

    def segments(self) -> Iterator[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Yield ``(x0, x1, y0, y1)`` for every affine segment (``x0 == x1`` for points)."""
        for xs, ys in self.pieces:
            if len(xs) == 1:
                yield xs[0], xs[0], ys[0], ys[0]
            for k in range(len(xs) - 1):
                yield xs[k], xs[k + 1], ys[k], ys[k + 1]

    def affine_on(self, a, b) -> tuple[Fraction, Fraction]:
        """Slope and intercept of the affine formula valid on ``[a, b]``."""
        a, b = q(a), q(b)
        if a == b:
            return Fraction(0), evaluate(self, a)
        ya, yb = evaluate(self, a), evaluate(self, b)
        mid = (a + b) / 2
        m, k = _affine_through(a, ya, b, yb)
        if evaluate(self, mid) != m * mid + k:
            raise DomainError(f"not affine on [{a}, {b}]")
        return m, k

    def restrict(self, spans: Iterable[tuple]) -> "PLFunc":
        """Restrict to whole pieces whose spans are listed."""
        wanted = {(q(a), q(b)) for a, b in spans}
        kept = tuple(p for p in self.pieces if (p[0][0], p[0][-1]) in wanted)
        if len(kept) != len(wanted):
            raise DomainError("restriction to a span that is not a piece of the domain")
        return PLFunc(kept)

    def image(self) -> IntervalUnion:
        return IntervalUnion(tuple((min(ys), max(ys)) for _, ys in self.pieces))

    def min_value(self) -> Fraction:
        return min(y for _, ys in self.pieces for y in ys)

    def max_value(self) -> Fraction:
        return max(y for _, ys in self.pieces for y in ys)

    def map_values(self, fn) -> "PLFunc":
        """Apply ``fn`` to the values at breakpoints (only sound for affine ``fn``)."""
        return PLFunc(tuple((xs, tuple(fn(y) for y in ys)) for xs, ys in self.pieces))

    def __add__(self, other: "PLFunc") -> "PLFunc":
        return _pointwise(self, other, lambda a, b: a + b)

    def __sub__(self, other: "PLFunc") -> "PLFunc":
        return _pointwise(self, other, lambda a, b: a - b)


def _simplify(xs, ys):
    """Drop interior breakpoints where the function does not bend."""
    if len(xs) <= 2:
        return tuple(xs), tuple(ys)
    kx, ky = [xs[0]], [ys[0]]
    for k in range(1, len(xs) - 1):
        s0 = (ys[k] - ky[-1]) / (xs[k] - kx[-1])
        s1 = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])
        if s0 != s1:
            kx.append(xs[k])
            ky.append(ys[k])
    kx.append(xs[-1])
    ky.append(ys[-1])
    return tuple(kx), tuple(ky)


def _pointwise(f: PLFunc, g: PLFunc, op) -> PLFunc:
    """Combine two PL functions on their common domain (op must preserve affinity)."""
    pieces = []
    for a, b in (f.domain() & g.domain()):
        pts = sorted({a, b} | {x for x in f.breakpoints() + g.breakpoints() if a < x < b})
        pieces.append((tuple(pts), tuple(op(f(x), g(x)) for x in pts)))
    return PLFunc(tuple(pieces))


def evaluate(f: PLFunc, x) -> Fraction:
    """Exact value of ``f`` at rational ``x`` by affine interpolation."""
    x = q(x)
    piece = f._piece_at(x)
    if piece is None:
        raise DomainError(f"{x} is outside the domain")
    xs, ys = piece
    k = bisect_right(xs, x) - 1
    if xs[k] == x:
        return ys[k]
    x0, x1, y0, y1 = xs[k], xs[k + 1], ys[k], ys[k + 1]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def compose(f: PLFunc, g: PLFunc) -> PLFunc:
    """Exact ``f ∘ g``; every piece of ``g`` must land inside one piece of ``f``."""
    pieces = []
    for xs, ys in g.pieces:
        lo, hi = min(ys), max(ys)
        fp = f._piece_at(lo)
        if fp is None or hi > fp[0][-1]:
            raise DomainError(f"range [{lo}, {hi}] escapes the domain of the outer function")
        fbreaks = fp[0]
        pts = set(xs)
        for k in range(len(xs) - 1):
            x0, x1, y0, y1 = xs[k], xs[k + 1], ys[k], ys[k + 1]
            if y0 == y1:
                continue
            for t in fbreaks:
                if min(y0, y1) < t < max(y0, y1):
                    pts.add(x0 + (t - y0) * (x1 - x0) / (y1 - y0))
        pts = sorted(pts)
        pieces.append((tuple(pts), tuple(evaluate(f, evaluate(g, x)) for x in pts)))
    return PLFunc(tuple(pieces))


def is_homeomorphism(gamma: PLFunc, source: IntervalSpace, target: IntervalSpace) -> bool:
    """Continuous bijection between the spaces with PL inverse."""
    if sorted(gamma.spans()) != sorted(source.components):
        return False
    images = []
    for xs, ys in gamma.pieces:
        if len(ys) > 1:
            inc = all(a < b for a, b in zip(ys, ys[1:]))
            dec = all(a > b for a, b in zip(ys, ys[1:]))
            if not (inc or dec):
                return False
        images.append((min(ys), max(ys)))
    return sorted(images) == sorted(target.components)


def invert(gamma: PLFunc, source: IntervalSpace, target: IntervalSpace) -> PLFunc:
    if not is_homeomorphism(gamma, source, target):
        raise PreconditionError("cannot invert a map that is not a homeomorphism")
    pieces = []
    for xs, ys in gamma.pieces:
        if len(ys) > 1 and ys[0] > ys[-1]:
            pieces.append((tuple(reversed(ys)), tuple(reversed(xs))))
        else:
            pieces.append((ys, xs))
    return PLFunc(tuple(pieces))


def solve_equal(f: PLFunc, g: PLFunc) -> IntervalUnion:
    """Exact ``{x : f(x) = g(x)}`` on the common domain."""
    parts = []
    for a, b in (f.domain() & g.domain()):
        if a == b:
            if f(a) == g(a):
                parts.append((a, a))
            continue
        pts = sorted({a, b} | {x for x in f.breakpoints() + g.breakpoints() if a < x < b})
        for x0, x1 in zip(pts, pts[1:]):
            d0, d1 = f(x0) - g(x0), f(x1) - g(x1)
            if d0 == 0 and d1 == 0:
                parts.append((x0, x1))
            elif d0 == 0:
                parts.append((x0, x0))
            elif d1 == 0:
                parts.append((x1, x1))
            elif (d0 < 0) != (d1 < 0):
                r = x0 + d0 * (x1 - x0) / (d0 - d1)
                parts.append((r, r))
    return IntervalUnion(tuple(parts))
