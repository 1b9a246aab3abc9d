"""Discs over fixed points, character evaluation and unit-disc automorphisms."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .rationals import q
from .spaces import DomainError, IntervalUnion
from .wps import WPS, edge_weight, fixed_points


@dataclass(frozen=True)
class DiscDatum:
    x: object
    radius_sq: Fraction

    @property
    def radius(self) -> float:
        return math.sqrt(self.radius_sq)


@dataclass(frozen=True)
class FixedIntervalDisc:
    """A whole interval of fixed points; the squared radius is evaluated on demand."""

    lo: Fraction
    hi: Fraction
    radius_sq: Callable

    def at(self, x) -> DiscDatum:
        x = q(x)
        if not self.lo <= x <= self.hi:
            raise DomainError(f"{x} is not in [{self.lo}, {self.hi}]")
        return DiscDatum(x, self.radius_sq(x))


def radius_sq(sys: WPS, x) -> Fraction:
    """``w(x, x)`` at a fixed point; raises for points that are not fixed."""
    if not sys.is_finite:
        x = q(x)
    if not sys.in_graph(x, x):
        raise DomainError(f"{x!r} is not a fixed point")
    return edge_weight(sys, (x, x))


def disc_data(sys: WPS) -> list:
    if sys.is_finite:
        return [DiscDatum(x, radius_sq(sys, x)) for x in sorted(fixed_points(sys), key=repr)]
    out: list = []
    fp: IntervalUnion = fixed_points(sys)
    for a, b in fp:
        if a == b:
            out.append(DiscDatum(a, radius_sq(sys, a)))
        else:
            out.append(FixedIntervalDisc(a, b, lambda x, s=sys: radius_sq(s, x)))
    return out


def eval_character(T, x, z: complex, rsq: Fraction | None = None) -> complex:
    """``θ_{x,z}(T) = Σ ξ_n(x,…,x) z^n``; requires ``|z|² <= w(x,x)`` at fixed ``x``.

    At a point that is not fixed the only character is ``z = 0``.
    """
    sys = T.sys
    fixed = sys.in_graph(x, x)
    rsq = (radius_sq(sys, x) if fixed else Fraction(0)) if rsq is None else q(rsq)
    zc = complex(z)
    mod = Fraction(zc.real) ** 2 + Fraction(zc.imag) ** 2
    if mod > rsq:
        raise DomainError(f"|z|^2 = {float(mod)} exceeds the squared radius {rsq}")
    total = 0j
    for n, c in T.coeffs.items():
        v = c.get((x,) * (n + 1), 0)
        if v:
            total += complex(v) * zc ** n
    return total


# Möbius maps z -> e^{iθ}(w - z)/(1 - conj(w) z)


@dataclass(frozen=True)
class MobiusMap:
    theta: float
    center: complex

    def __post_init__(self):
        if abs(self.center) >= 1:
            raise ValueError("the center must lie in the open unit disc")
        object.__setattr__(self, "theta", self.theta % (2 * math.pi))
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(math.pi, 0j)

    @classmethod
    def rotation(cls, lam: complex) -> "MobiusMap":
        """``z -> λz`` for unimodular ``λ``."""
        return cls(cmath.phase(-complex(lam)), 0j)

    def matrix(self) -> tuple[complex, complex, complex, complex]:
        u = cmath.exp(1j * self.theta)
        w = self.center
        return -u, u * w, -w.conjugate(), 1 + 0j

    @classmethod
    def from_matrix(cls, a, b, c, d) -> "MobiusMap":
        u = -a / d
        w = -(c / d).conjugate()
        return cls(cmath.phase(u), w)

    def __call__(self, z) -> complex:
        return mobius_apply(self, z)


def mobius_apply(m: MobiusMap, z) -> complex:
    z = complex(z)
    if abs(z) > 1 + 1e-12:
        raise DomainError("Möbius maps are applied on the closed unit disc")
    w = m.center
    return cmath.exp(1j * m.theta) * (w - z) / (1 - w.conjugate() * z)


def mobius_compose(m2: MobiusMap, m1: MobiusMap) -> MobiusMap:
    """``m2 ∘ m1`` renormalized to canonical form."""
    a2, b2, c2, d2 = m2.matrix()
    a1, b1, c1, d1 = m1.matrix()
    return MobiusMap.from_matrix(a2 * a1 + b2 * c1, a2 * b1 + b2 * d1, c2 * a1 + d2 * c1, c2 * b1 + d2 * d1)


def mobius_invert(m: MobiusMap) -> MobiusMap:
    return MobiusMap(-m.theta, cmath.exp(1j * m.theta) * m.center)


def solve_zeroing_pair(h: float) -> tuple[complex, complex]:
    """``(λ, γ)`` with ``γ = ((1+h)/2, sqrt(1 - ((1+h)/2)^2))`` and ``λ = (γ-1)/(γ-h)``."""
    if not 0 <= h < 1:
        raise DomainError("h must lie in [0, 1)")
    re = (1 + h) / 2
    gamma = complex(re, math.sqrt(1 - re * re))
    lam = (gamma - 1) / (gamma - h)
    return lam, gamma


def verify_zeroing_composition(f_phi: MobiusMap, f_phi_inv: MobiusMap, lam: complex, gamma: complex) -> float:
    """``|f^φ(γ · f^{φ⁻¹}(λ · f^φ(0)))|`` (rotations written as multiplications)."""
    z = f_phi(0)
    z = f_phi_inv(lam * z)
    z = f_phi(gamma * z)
    return abs(z)


def zeroing_residual(f_phi: MobiusMap) -> float:
    lam, gamma = solve_zeroing_pair(abs(f_phi.center) ** 2)
    return verify_zeroing_composition(f_phi, mobius_invert(f_phi), lam, gamma)


@dataclass
class ProbeReport:
    moved: list  # fixed points with f_x(0) != 0
    corrections: dict  # x -> (λ, γ, residual)

    @property
    def graded(self) -> bool:
        return not self.moved


def semi_gradedness_probe(family: dict, tol: float = 1e-12) -> ProbeReport:
    """Find the points whose disc map moves 0 and build the zeroing correction there."""
    moved = [x for x, m in family.items() if abs(m(0)) > tol]
    corr = {}
    for x in moved:
        m = family[x]
        lam, gamma = solve_zeroing_pair(abs(m.center) ** 2)
        corr[x] = (lam, gamma, verify_zeroing_composition(m, mobius_invert(m), lam, gamma))
    return ProbeReport(moved, corr)
