import cmath
import random
from fractions import Fraction as F

import numpy as np
import pytest

from oracles import matrix_product_series
from wpstensor.corpus import e1_pair
from wpstensor.correspondence import path_norm_sq, unit
from wpstensor.fock import (
    FourierElement,
    cesaro,
    element_from_matrix,
    fejer_kernel,
    fourier_coeff,
    gauge,
    matrix,
    min_degree,
    op_norm,
    series_product,
)
from wpstensor.randomized import random_element, random_finite_wps
from wpstensor.spaces import PreconditionError
from wpstensor.wps import matrix_system, normalize


def _small(rng):
    while True:
        s = random_finite_wps(rng, 3, 2)
        if s.edge_set.finite:
            return s


def _flat(T):
    return {(n, mu): v for n, c in T.coeffs.items() for mu, v in c.items() if v != 0}


def test_identity_norm_one():
    s = matrix_system([[0, 2], [3, 1]])
    T = FourierElement.function(s, 3, {0: 1, 1: 1})
    assert op_norm(T) == pytest.approx(1.0, abs=1e-12)


def test_w_on_normalized_system():
    s = normalize(matrix_system([[1, 2], [3, 1]]))
    W = FourierElement.shift(s, 4, unit(s))
    assert min_degree(W) == 1
    assert op_norm(W) == pytest.approx(1.0, abs=1e-12)


def test_interval_rejected():
    w, _ = e1_pair()
    with pytest.raises(PreconditionError):
        FourierElement(w, 2, {})


def test_band_norm_equals_module_norm():
    rng = random.Random(1)
    for _ in range(15):
        s = _small(rng)
        n = rng.randint(1, 2)
        T = random_element(rng, s, 4, density=1.0)
        band = T.coefficient(n)
        if not band:
            continue
        S = FourierElement(s, 4, {n: band})
        assert op_norm(S) == pytest.approx(float(path_norm_sq(s, band)) ** 0.5, abs=1e-9)


def test_matrix_roundtrip_and_exact_reassembly():
    rng = random.Random(2)
    for _ in range(10):
        s = _small(rng)
        T = random_element(rng, s, 3)
        back = element_from_matrix(matrix(T))
        for (n, mu), v in _flat(T).items():
            assert back.coefficient(n)[mu] == pytest.approx(complex(v), abs=1e-12)
        total = fourier_coeff(T, 0)
        for n in range(1, T.N + 1):
            total = total + fourier_coeff(T, n)
        assert _flat(total) == _flat(T)


def test_series_product_against_oracle_and_matrices():
    rng = random.Random(3)
    for _ in range(10):
        s = _small(rng)
        T, U = random_element(rng, s, 4, 2), random_element(rng, s, 4, 2)
        P = series_product(T, U)
        assert _flat(P) == matrix_product_series(_flat(T), _flat(U), 4)
        MP, MT, MU = matrix(P), matrix(T), matrix(U)
        for x in MP.blocks:
            assert np.allclose(MP.blocks[x], MT.blocks[x] @ MU.blocks[x], atol=1e-12)


def test_fourier_projection_and_gauge():
    rng = random.Random(4)
    s = _small(rng)
    M = matrix(random_element(rng, s, 4))
    lam = cmath.exp(0.7j)
    for n in range(-2, 3):
        P = fourier_coeff(M, n)
        PP = fourier_coeff(P, n)
        G = fourier_coeff(gauge(M, lam), n)
        for x in M.blocks:
            assert np.allclose(PP.blocks[x], P.blocks[x], atol=1e-12)
            assert np.allclose(G.blocks[x], lam ** n * P.blocks[x], atol=1e-12)


def test_cesaro_exact_and_fejer_average():
    rng = random.Random(5)
    s = _small(rng)
    T = random_element(rng, s, 4)
    K = 3
    C = cesaro(T, K)
    for (n, mu), v in _flat(T).items():
        expect = (1 - F(n, K + 1)) * v if n <= K else 0
        assert C.coefficient(n).get(mu, 0) == expect
    M = matrix(T)
    m = 2 * M.N + 1
    acc = {x: np.zeros_like(B) for x, B in M.blocks.items()}
    for j in range(m):
        om = cmath.exp(2j * cmath.pi * j / m)
        G = gauge(M, om)
        for x in acc:
            acc[x] += fejer_kernel(K, om.conjugate()) * G.blocks[x] / m
    MC = matrix(C)
    for x in acc:
        assert np.allclose(acc[x], MC.blocks[x], atol=1e-12)


def test_min_degree_of_zero_raises():
    s = matrix_system([[1]])
    with pytest.raises(ValueError):
        min_degree(FourierElement(s, 2, {}))

