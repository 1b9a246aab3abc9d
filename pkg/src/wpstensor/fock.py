"""Truncated Fock representation of finite-space systems.

A :class:`FourierElement` stores one coefficient per degree, each a dict
keyed by vertex tuples (degree 0 uses 1-tuples ``(x,)``).  Its matrix acts
fibre by fibre on the paths of length ``<= N`` with a given source; norms
are taken after the diagonal change of basis ``D = diag(sqrt(w(path)))``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .correspondence import Multiplier, concat, path_edges, path_weight, paths
from .spaces import PreconditionError
from .wps import WPS


@dataclass
class FourierElement:
    sys: WPS
    N: int
    coeffs: dict = field(default_factory=dict)  # degree -> {path: value}

    def __post_init__(self):
        if not self.sys.is_finite:
            raise PreconditionError("Fock computations need a finite space")
        clean = {}
        for n, c in self.coeffs.items():
            if n > self.N:
                continue
            clean[n] = {(k if isinstance(k, tuple) else (k,)): v for k, v in c.items()}
            for mu in clean[n]:
                if len(mu) != n + 1:
                    raise ValueError(f"path {mu!r} does not have length {n}")
        self.coeffs = clean

    @classmethod
    def function(cls, sys: WPS, N: int, f: dict) -> "FourierElement":
        return cls(sys, N, {0: {(x,): v for x, v in f.items()}})

    @classmethod
    def shift(cls, sys: WPS, N: int, xi: dict, n: int | None = None) -> "FourierElement":
        """``S^{(n)}_ξ`` for ``ξ`` on paths (or on edges when keyed by pairs)."""
        n = len(next(iter(xi))) - 1 if n is None else n
        return cls(sys, N, {n: dict(xi)})

    def coefficient(self, n: int) -> dict:
        return self.coeffs.get(n, {})

    def degrees(self) -> list[int]:
        return sorted(n for n, c in self.coeffs.items() if any(v != 0 for v in c.values()))

    def __add__(self, other: "FourierElement") -> "FourierElement":
        out = {n: dict(c) for n, c in self.coeffs.items()}
        for n, c in other.coeffs.items():
            tgt = out.setdefault(n, {})
            for mu, v in c.items():
                tgt[mu] = tgt.get(mu, 0) + v
        return FourierElement(self.sys, min(self.N, other.N), out)

    def scale(self, lam) -> "FourierElement":
        return FourierElement(self.sys, self.N, {n: {mu: lam * v for mu, v in c.items()}
                                                 for n, c in self.coeffs.items()})


@dataclass
class FockMatrix:
    sys: WPS
    N: int
    bases: dict  # fibre -> list of paths
    blocks: dict  # fibre -> complex ndarray

    def degrees(self, x) -> np.ndarray:
        return np.array([len(p) - 1 for p in self.bases[x]])

    def weights(self, x) -> np.ndarray:
        return np.array([float(path_weight(self.sys, p)) for p in self.bases[x]])

    def __matmul__(self, other: "FockMatrix") -> "FockMatrix":
        return FockMatrix(self.sys, self.N, self.bases,
                          {x: self.blocks[x] @ other.blocks[x] for x in self.blocks})


@lru_cache(maxsize=64)
def _basis(sys: WPS, N: int):
    bases = {x: [] for x in sys.space.points}
    for n in range(N + 1):
        for mu in paths(sys, n):
            bases[mu[-1]].append(mu)
    by_source: dict = {}
    for n in range(N + 1):
        for mu in paths(sys, n):
            by_source.setdefault((n, mu[-1]), []).append(mu)
    return bases, by_source


def fock_basis(sys: WPS, N: int) -> dict:
    return _basis(sys, N)[0]


def matrix(T: FourierElement, N: int | None = None) -> FockMatrix:
    """Per-fibre matrices with ``M[μν, ν] = ξ_n(μ)``."""
    N = T.N if N is None else N
    bases, by_source = _basis(T.sys, N)
    blocks = {}
    for x, basis in bases.items():
        index = {p: k for k, p in enumerate(basis)}
        M = np.zeros((len(basis), len(basis)), dtype=complex)
        for col, nu in enumerate(basis):
            deg = len(nu) - 1
            for n, c in T.coeffs.items():
                if deg + n > N:
                    continue
                for mu in by_source.get((n, nu[0]), []):
                    v = c.get(mu, 0)
                    if v != 0:
                        M[index[concat(mu, nu)], col] += complex(v)
        blocks[x] = M
    return FockMatrix(T.sys, N, bases, blocks)


def shift_matrix(xi: dict, N: int, sys: WPS) -> FockMatrix:
    return matrix(FourierElement.shift(sys, N, xi))


def normalized_blocks(M: FockMatrix) -> dict:
    """``D M D^{-1}`` per fibre: the matrix in an orthonormal basis."""
    out = {}
    for x, B in M.blocks.items():
        d = np.sqrt(M.weights(x))
        out[x] = (d[:, None] * B) / d[None, :]
    return out


def op_norm(T: FourierElement | FockMatrix, N: int | None = None) -> float:
    """Maximum over fibres of the spectral norm in the weighted inner product."""
    M = T if isinstance(T, FockMatrix) else matrix(T, N)
    return max(float(np.linalg.norm(A, 2)) if A.size else 0.0 for A in normalized_blocks(M).values())


def gauge(T, lam):
    """``α_λ``: multiply degree ``n`` by ``λ^n``."""
    if isinstance(T, FourierElement):
        return FourierElement(T.sys, T.N, {n: {mu: (lam ** n) * v for mu, v in c.items()}
                                           for n, c in T.coeffs.items()})
    blocks = {}
    for x, B in T.blocks.items():
        w = np.array([complex(lam) ** d for d in T.degrees(x)])
        blocks[x] = (w[:, None] * B) * np.conj(w)[None, :]
    return FockMatrix(T.sys, T.N, T.bases, blocks)


def fourier_coeff(T, n: int):
    """``Φ_n``: lookup for series, discrete gauge average for matrices."""
    if isinstance(T, FourierElement):
        return FourierElement(T.sys, T.N, {n: dict(T.coefficient(n))} if n in T.coeffs else {})
    M = 2 * T.N + 1
    acc = {x: np.zeros_like(B) for x, B in T.blocks.items()}
    for j in range(M):
        om = cmath.exp(2j * cmath.pi * j / M)
        G = gauge(T, om)
        for x in acc:
            acc[x] += G.blocks[x] * om ** (-n)
    return FockMatrix(T.sys, T.N, T.bases, {x: A / M for x, A in acc.items()})


def element_from_matrix(M: FockMatrix, tol: float = 0.0) -> FourierElement:
    """Read coefficients off the degree-0 columns; inverse of :func:`matrix`."""
    coeffs: dict = {}
    for x, basis in M.bases.items():
        col = basis.index((x,))
        for row, mu in enumerate(basis):
            v = M.blocks[x][row, col]
            if abs(v) > tol:
                coeffs.setdefault(len(mu) - 1, {})[mu] = v
    return FourierElement(M.sys, M.N, coeffs)


def fejer_kernel(n: int, lam) -> complex:
    return sum((1 - Fraction(abs(j), n + 1)) * complex(lam) ** j for j in range(-n, n + 1))


def cesaro(T: FourierElement, N: int) -> FourierElement:
    """``σ_N(T) = Σ_{n<=N} (1 - n/(N+1)) Φ_n(T)`` with exact weights."""
    return FourierElement(T.sys, T.N, {n: {mu: (1 - Fraction(n, N + 1)) * v for mu, v in c.items()}
                                       for n, c in T.coeffs.items() if n <= N})


def min_degree(T: FourierElement) -> int:
    degs = T.degrees()
    if not degs:
        raise ValueError("the zero element has no minimal degree")
    return degs[0]


def series_product(T: FourierElement, U: FourierElement) -> FourierElement:
    """Coefficients ``ζ_n = Σ_k ξ_k ⊗ η_{n-k}``, truncated at ``N``."""
    if T.sys is not U.sys and T.sys != U.sys:
        raise ValueError("elements of different systems")
    N = min(T.N, U.N)
    out: dict = {}
    for k, ck in T.coeffs.items():
        for m, cm in U.coeffs.items():
            if k + m > N:
                continue
            by_range: dict = {}
            for nu, v in cm.items():
                by_range.setdefault(nu[0], []).append((nu, v))
            tgt = out.setdefault(k + m, {})
            for mu, a in ck.items():
                for nu, b in by_range.get(mu[-1], []):
                    p = concat(mu, nu)
                    tgt[p] = tgt.get(p, 0) + a * b
    return FourierElement(T.sys, N, out)


def ad_V(T: FourierElement, V: Multiplier, target: WPS) -> FourierElement:
    """Coefficientwise ``ξ_n ↦ V^{⊗n} ξ_n`` (floating point: ``ζ = sqrt(H)``)."""
    if target.edge_set != T.sys.edge_set:
        raise ValueError("target graph differs from the source graph")
    out = {}
    for n, c in T.coeffs.items():
        out[n] = {}
        for mu, v in c.items():
            z = complex(v)
            for e in path_edges(mu):
                z *= V.zeta(e)
            out[n][mu] = z
    return FourierElement(target, T.N, out)


def max_abs_diff(A: FourierElement, B: FourierElement) -> float:
    keys = {(n, mu) for n, c in A.coeffs.items() for mu in c} | {(n, mu) for n, c in B.coeffs.items() for mu in c}
    return max((abs(complex(A.coefficient(n).get(mu, 0)) - complex(B.coefficient(n).get(mu, 0)))
                for n, mu in keys), default=0.0)
