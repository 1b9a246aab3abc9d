"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import cmath
import math
import random
import time
from fractions import Fraction as F

import numpy as np

import frozen
from oracles import edges_of_matrix, exhaustive_isomorphism, max_path_product, orbit_products
from wpstensor.characters import (
    DiscDatum,
    MobiusMap,
    disc_data,
    eval_character,
    mobius_invert,
    solve_zeroing_pair,
    verify_zeroing_composition,
)
from wpstensor.conjugacy import (
    FAILS,
    HOLDS,
    ConjugacyCertificate,
    EdgeFunction,
    check_branch_transition,
    check_graph_conjugacy,
    decide_finite,
    find_graph_conjugacy_finite,
    forced_H_values,
    replay_witness,
    transition_ratio,
    verify_weighted_orbit_certificate,
)
from wpstensor.corpus import (
    CORPUS,
    all_systems,
    corrected_H_certificate,
    different_invariants_pair,
    e1_pair,
    literal_H_certificate,
)
from wpstensor.correspondence import (
    Multiplier,
    ResourceError,
    concat,
    inner_product,
    is_tensor_power_bounded,
    module_action,
    odot,
    path_norm_sq,
    path_weight,
    paths,
    sup_norm_sq,
    tensor_power_norm_sq,
    tensor_power_norm_sq_bruteforce,
)
from wpstensor.fock import (
    FourierElement,
    ad_V,
    cesaro,
    fourier_coeff,
    gauge,
    matrix,
    op_norm,
    series_product,
)
from wpstensor.randomized import (
    degree_sequence,
    hierarchy_selfcheck,
    hierarchy_violation,
    permute_matrix,
    rand_rational,
    random_element,
    random_finite_wps,
    random_matrix,
    reweighted,
)
from wpstensor.rationals import QComplex, abs2, conj, real_part
from wpstensor.wps import edge_weight, matrix_system, positive_operator, weight_bounds

RESULTS: list[str] = []


def _run(k: int, title: str, body, limit: float | None = None):
    t0 = time.perf_counter()
    try:
        body()
        took = time.perf_counter() - t0
        if limit is not None:
            assert took < limit, f"took {took:.2f}s, limit {limit}s"
    except Exception as exc:
        line = f"FAIL criterion {k}: {title} ({type(exc).__name__}: {exc})"
        RESULTS.append(line)
        print(line)
        raise
    line = f"PASS criterion {k}: {title} [{took:.2f}s]"
    RESULTS.append(line)
    print(line)


def _qc(rng):
    return QComplex(rand_rational(rng, -5, 5), rand_rational(rng, -5, 5))


# 1


def _e1():
    w, u = e1_pair()
    tr = transition_ratio(w, u)
    at = F(1, 3)
    diag = [p.at(at) for p in tr.pieces if p.piece.is_diagonal()]
    vert = [p.at(at) for p in tr.pieces if not p.piece.is_diagonal()]
    assert diag == [frozen.E1_RATIO_DIAGONAL] and vert == [frozen.E1_RATIO_VERTICAL]
    assert tr.value((F(0), F(0))) == frozen.E1_RATIO_ORIGIN
    btc = check_branch_transition(w, u)
    assert btc.status == FAILS and btc.witness["edge"] == (0, 0)
    fh = forced_H_values(w, u)
    assert fh.values[(F(0), F(0))] == frozen.E1_FORCED_ORIGIN
    assert fh.values[(F(1), F(1))] == frozen.E1_FORCED_DIAGONAL
    wit = fh.verdict.witness
    assert fh.verdict.status == FAILS and wit["kind"] == "forced"
    assert wit["value"] == 1 and wit["limits"] == [F(2, 3)]


def test_criterion_1_e1_reproduction():
    _run(1, "E1 transition ratios, BTC failure and forced-H refutation", _e1, limit=1.0)


# 2


def _different_invariants():
    sig, tau = different_invariants_pair()
    assert check_graph_conjugacy(sig, tau).status == HOLDS
    btc = check_branch_transition(sig, tau)
    assert btc.status == FAILS and btc.witness["edge"] == frozen.DIFF_BRANCHING_EDGE
    assert sorted(btc.witness["limits"]) == frozen.DIFF_LIMITS and btc.witness["value"] == frozen.DIFF_VALUE

    literal = literal_H_certificate()
    v = verify_weighted_orbit_certificate(sig, tau, literal)
    assert v.status == FAILS
    assert (v.witness["source"], v.witness["repeat"]) == (F(2, 3), frozen.DIFF_LITERAL_REPEATS)
    rep = replay_witness(sig, tau, literal, v.witness)
    assert rep["violates"] and rep["product"] == frozen.DIFF_LITERAL_LOOP_FACTOR ** frozen.DIFF_LITERAL_REPEATS

    good = corrected_H_certificate()
    assert good.C == frozen.DIFF_CORRECTED_C
    assert verify_weighted_orbit_certificate(sig, tau, good).status == HOLDS
    lo, hi = orbit_products(sig, tau, good.H.branches, [F(k, 24) for k in range(25)], 7)
    assert 1 / good.C <= lo and hi <= good.C


def test_criterion_2_different_invariants():
    _run(2, "different-invariants: graph holds, BTC fails, literal H refuted, corrected H certified",
         _different_invariants, limit=10.0)


# 3


def _finite_collapse():
    rng = random.Random(2024)
    for _ in range(50):
        n = rng.randint(1, 7)
        A = random_matrix(rng, n)
        perm = list(range(n))
        rng.shuffle(perm)
        B = permute_matrix(A, perm, rng)
        a, b = matrix_system(A), matrix_system(B)
        found = find_graph_conjugacy_finite(a, b)
        assert found is not None
        Ea, Eb = edges_of_matrix(A), edges_of_matrix(B)
        assert {(found[r], found[s]) for r, s in Ea} == Eb
        assert exhaustive_isomorphism(Ea, Eb, n) is not None
        verdicts = [decide_finite(a, b, rel).status for rel in ("graph", "btc", "woc")]
        assert verdicts == [HOLDS] * 3
    made = 0
    while made < 50:
        n = rng.randint(1, 7)
        A, B = random_matrix(rng, n), random_matrix(rng, n)
        if degree_sequence(A) == degree_sequence(B):
            continue
        made += 1
        a, b = matrix_system(A), matrix_system(B)
        assert exhaustive_isomorphism(edges_of_matrix(A), edges_of_matrix(B), n) is None
        assert [decide_finite(a, b, rel).status for rel in ("graph", "btc", "woc")] == [FAILS] * 3


def test_criterion_3_finite_collapse():
    _run(3, "finite graphs: isomorphism recovery and coinciding verdicts", _finite_collapse, limit=30.0)


# 4


def _correspondence_identities():
    rng = random.Random(4)
    for _ in range(100):
        s = random_finite_wps(rng, 6, 4)
        pts, E = s.space.points, s.edge_set.finite
        f, g, f2, g2 = ({x: _qc(rng) for x in pts} for _ in range(4))

        # <f⊙g, f'⊙g'> = conj(g) g' P(conj(f) f')
        lhs = inner_product(s, odot(s, f, g), odot(s, f2, g2))
        P = positive_operator(s, {x: conj(f[x]) * f2[x] for x in pts})
        assert all(lhs[x] == conj(g[x]) * g2[x] * P[x] for x in pts)

        xi, eta = {e: _qc(rng) for e in E}, {e: _qc(rng) for e in E}
        ip, nx, ny = inner_product(s, xi, eta), inner_product(s, xi, xi), inner_product(s, eta, eta)
        assert all(abs2(ip[x]) <= real_part(nx[x]) * real_part(ny[x]) for x in pts)

        # left action is adjointable, right action is balanced
        left = inner_product(s, module_action(s, f, xi, None), eta)
        assert left == inner_product(s, xi, module_action(s, {x: conj(v) for x, v in f.items()}, eta, None))
        right = inner_product(s, xi, module_action(s, None, eta, g))
        assert all(right[x] == ip[x] * g[x] for x in pts)

        for n, m in ((1, 1), (1, 2), (2, 2)):
            for mu in paths(s, n)[:10]:
                for nu in [p for p in paths(s, m) if p[0] == mu[-1]][:5]:
                    assert path_weight(s, concat(mu, nu)) == path_weight(s, mu) * path_weight(s, nu)

        lo, hi = weight_bounds(s)
        for n in (1, 2, 3):
            X = {mu: _qc(rng) for mu in paths(s, n)}
            if not X:
                continue
            nsq, inf = path_norm_sq(s, X), sup_norm_sq(X)
            assert lo ** n * inf <= nsq <= hi ** n * inf


def test_criterion_4_correspondence_identities():
    _run(4, "correspondence identities hold exactly on 100 random systems", _correspondence_identities)


# 5


def _random_multiplier(rng, a, b):
    w, u = a.finite_edge_weights, b.finite_edge_weights
    if rng.random() < 0.5:
        phi = {x: rand_rational(rng) for x in a.space.points}
        return Multiplier({(r, s): phi[r] / phi[s] * w[(r, s)] / u[(r, s)] for r, s in w})
    return Multiplier({e: rand_rational(rng) for e in w})


def _tensor_power_cycles():
    rng = random.Random(5)
    bounded = 0
    for _ in range(20):
        a = random_finite_wps(rng, 5, 3)
        b = reweighted(rng, a)
        V = _random_multiplier(rng, a, b)
        g = {e: V.H[e] * b.finite_edge_weights[e] / a.finite_edge_weights[e] for e in V.H}
        dp = [tensor_power_norm_sq(V, a, b, n) for n in range(13)]
        for n in range(1, 13):
            try:
                assert dp[n] == tensor_power_norm_sq_bruteforce(V, a, b, n)
            except ResourceError:
                pass
            if n <= 6:
                assert dp[n] == max_path_product(g, a.space.points, n)
        fwd = is_tensor_power_bounded(V, a, b)
        back = is_tensor_power_bounded(V.inverse(), b, a)
        if fwd.holds:
            bounded += 1
            assert fwd.details["sup"] == max(dp[1:])
        else:
            p, L = fwd.witness["product"], len(fwd.witness["edges"])
            assert p > 1 and dp[L * (12 // L)] >= p ** (12 // L)

        sups = [fwd.details["sup"] if fwd.holds else None, back.details["sup"] if back.holds else None]
        cands = [F(1), F(2), F(7, 2)] + [max(1, x) for x in sups if x is not None]
        for C in cands:
            cert = ConjugacyCertificate({x: x for x in a.space.points}, EdgeFunction(table=dict(V.H)), C)
            certified = verify_weighted_orbit_certificate(a, b, cert).status == HOLDS
            both = fwd.holds and back.holds and sups[0] <= C and sups[1] <= C
            assert certified == both
    assert bounded >= 5


def test_criterion_5_tensor_powers_and_certificates():
    _run(5, "tensor-power DP, cycle verdicts and the certificate bridge agree", _tensor_power_cycles)


# 6


def _small_system(rng):
    while True:
        s = random_finite_wps(rng, 3, 2)
        if s.edge_set.finite:
            return s


def _with_N(T, N):
    return FourierElement(T.sys, N, dict(T.coeffs))


def _fock_suite():
    rng = random.Random(6)
    for _ in range(10):
        s = _small_system(rng)
        T = random_element(rng, s, 4)
        M = matrix(T)
        lam = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        for n in range(-3, 4):
            P = fourier_coeff(M, n)
            PP, G = fourier_coeff(P, n), fourier_coeff(gauge(M, lam), n)
            for x in M.blocks:
                assert np.abs(PP.blocks[x] - P.blocks[x]).max(initial=0) < 1e-12
                assert np.abs(G.blocks[x] - lam ** n * P.blocks[x]).max(initial=0) < 1e-12
        K = rng.randint(0, 4)
        Ces = cesaro(T, K)
        for n, c in T.coeffs.items():
            for mu, v in c.items():
                assert Ces.coefficient(n).get(mu, 0) == ((1 - F(n, K + 1)) * v if n <= K else 0)
        for n in range(1, 4):
            band = T.coefficient(n)
            if band:
                S = FourierElement(s, 4, {n: band})
                assert abs(op_norm(S) - float(path_norm_sq(s, band)) ** 0.5) < 1e-9

    for _ in range(20):
        a = _small_system(rng)
        b = reweighted(rng, a)
        V = _random_multiplier(rng, a, b)
        T = random_element(rng, a, 6)
        for N in (6, 8):
            TN = _with_N(T, N)
            fwd = max(float(tensor_power_norm_sq(V, a, b, n)) for n in range(N + 1)) ** 0.5
            back = max(float(tensor_power_norm_sq(V.inverse(), b, a, n)) for n in range(N + 1)) ** 0.5
            lhs = op_norm(ad_V(TN, V, b))
            assert lhs <= fwd * back * op_norm(TN) + 1e-9


def test_criterion_6_fock_suite():
    _run(6, "Fourier projections, Cesaro sums, band norms and the Ad_V bound", _fock_suite, limit=60.0)


# 7


def _characters_and_mobius():
    for name, s in all_systems():
        for d in disc_data(s):
            if isinstance(d, DiscDatum):
                assert d.radius_sq == edge_weight(s, (d.x, d.x)), name
            else:
                for t in (F(0), F(1, 3), F(1)):
                    x = d.lo + t * (d.hi - d.lo)
                    assert d.at(x).radius_sq == edge_weight(s, (x, x)), name

    rng = random.Random(7)
    checked = 0
    while checked < 20:
        s = random_finite_wps(rng, 4, 3)
        discs = disc_data(s)
        if not discs:
            continue
        checked += 1
        T, U = random_element(rng, s, 6, 3), random_element(rng, s, 6, 3)
        for d in discs:
            z = cmath.rect(0.9 * float(d.radius_sq) ** 0.5, rng.uniform(0, 2 * math.pi))
            prod = eval_character(series_product(T, U), d.x, z)
            assert abs(prod - eval_character(T, d.x, z) * eval_character(U, d.x, z)) < 1e-9

    maps = [MobiusMap(rng.uniform(0, 2 * math.pi), cmath.rect(rng.uniform(0, 0.99), rng.uniform(0, 2 * math.pi)))
            for _ in range(100)]
    maps += [MobiusMap(rng.uniform(0, 2 * math.pi), cmath.rect(math.sqrt(k / 100), rng.uniform(0, 2 * math.pi)))
             for k in range(100)]
    for m in maps:
        h = abs(m.center) ** 2
        lam, gam = solve_zeroing_pair(h)
        assert abs(abs(lam) - 1) < 1e-9 and abs(abs(gam) - 1) < 1e-9
        assert abs(lam * (gam - h) - (gam - 1)) < 1e-9
        assert verify_zeroing_composition(m, mobius_invert(m), lam, gam) < 1e-9


def test_criterion_7_characters_and_mobius():
    _run(7, "disc radii, character multiplicativity and zeroing pairs", _characters_and_mobius, limit=5.0)


# 8


def _hierarchy():
    for name, entry in CORPUS.items():
        systems = entry.systems()
        if len(systems) == 2:
            assert hierarchy_violation(*systems) is None, name
    assert hierarchy_selfcheck(seed=8, count=100) == []


def test_criterion_8_hierarchy():
    _run(8, "BTC implies WOC implies graph conjugacy on corpus and random pairs", _hierarchy)
