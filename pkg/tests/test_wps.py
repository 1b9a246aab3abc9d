import random
from fractions import Fraction as F

import pytest

import frozen
from wpstensor.corpus import SINK, different_invariants_pair, e1_pair, no_coinciding_pair
from wpstensor.correspondence import branch_words, paths
from wpstensor.randomized import random_finite_wps, random_interval_pair
from wpstensor.spaces import DomainError, PLFunc, PreconditionError
from wpstensor.wps import (
    branching_edges,
    branching_points,
    coinciding_set,
    edge_weight,
    eventual_finiteness_horizon,
    fixed_points,
    graph_system,
    index_set,
    interval_system,
    is_well_supported,
    matrix_system,
    normalize,
    positive_operator,
    weight_bounds,
    weight_discontinuities,
    weight_sum,
)

UNIT = ((F(0), F(1)),)


def test_e1_structure():
    w, _ = e1_pair()
    assert branching_points(w) == [F(0)]
    assert branching_edges(w) == [(F(0), F(0))]
    assert fixed_points(w).parts == ((F(0), F(1)),)
    assert index_set(w, (0, 0)) == {0, 1}
    assert edge_weight(w, (0, 0)) == 1
    assert edge_weight(w, (F(1, 2), F(1, 2))) == F(1, 3)


def test_e1_branch_words():
    w, _ = e1_pair()
    words = branch_words(w, 4, F(1, 2))
    assert len(words) == frozen.E1_WORDS_LEN4
    assert len({mu for _, mu in words}) == frozen.E1_DISTINCT_PATHS_LEN4_FROM_POSITIVE
    assert sorted(set(mu for _, mu in words)) == sorted(paths(w, 4, F(1, 2)))


def test_different_invariants_structure():
    sig, tau = different_invariants_pair()
    assert branching_edges(sig) == [frozen.DIFF_BRANCHING_EDGE]
    assert fixed_points(sig).isolated_points() == frozen.DIFF_FIXED
    assert coinciding_set(sig, (1, 2)).parts == ((F(0), F(1)),)
    assert sig.edge_set == tau.edge_set


def test_no_coinciding_has_no_branching():
    a, _ = no_coinciding_pair()
    assert branching_points(a) == []
    assert weight_discontinuities(a) == []


def test_weight_discontinuities_match_branching_edges():
    rng = random.Random(3)
    for _ in range(40):
        a, _ = random_interval_pair(rng)
        disc = sorted({d.edge for d in weight_discontinuities(a)}, key=lambda e: (e[1], e[0]))
        assert disc == branching_edges(a)


def test_sink_matrix_not_well_supported():
    s = matrix_system(SINK)
    assert not is_well_supported(s)
    assert is_well_supported(matrix_system([[0, 1], [1, 0]]))


def test_matrix_encoding():
    s = matrix_system([[0, 2], [3, 0]])
    assert s.finite_edge_weights == {(0, 1): 2, (1, 0): 3}
    with pytest.raises(ValueError):
        matrix_system([[1, -1], [0, 1]])


def test_graph_system_counts_edges():
    s = graph_system(3, [(1, 0), (2, 0), (0, 2)])
    assert s.finite_edge_weights == {(1, 0): 1, (2, 0): 1, (0, 2): 1}


def test_validation_rejects_bad_branches():
    with pytest.raises(ValueError):
        interval_system(UNIT, [({0}, PLFunc.affine(UNIT, 2, 0), PLFunc.constant(UNIT, 1))])
    with pytest.raises(ValueError):
        interval_system(UNIT, [({0}, PLFunc.identity(UNIT), PLFunc.from_points([(0, 0), (1, 1)]))])


def test_domain_errors():
    w, _ = e1_pair()
    with pytest.raises(DomainError):
        w.successors(F(3, 2))
    with pytest.raises(DomainError):
        index_set(w, (F(1, 2), F(1, 3)))


def test_weight_bounds_and_sum():
    w, _ = e1_pair()
    assert weight_bounds(w) == (F(1, 3), F(4, 3))
    assert weight_sum(w) == PLFunc.constant(UNIT, 1)


def test_normalize_finite_sums_to_one():
    rng = random.Random(5)
    for _ in range(20):
        s = random_finite_wps(rng)
        if not is_well_supported(s):
            with pytest.raises(PreconditionError):
                normalize(s)
            continue
        assert set(weight_sum(normalize(s)).values()) == {1}


def test_normalize_refuses_non_pl():
    s = interval_system(UNIT, [({0}, PLFunc.identity(UNIT), PLFunc.from_points([(0, 1), (1, 2)])),
                               ({0}, PLFunc.constant(UNIT, 0), PLFunc.constant(UNIT, 1))])
    with pytest.raises(PreconditionError):
        normalize(s)


def test_positive_operator():
    s = matrix_system([[0, 2], [3, 0]])
    assert positive_operator(s, {0: F(1), 1: F(5)}) == {0: 3 * 5, 1: 2 * 1}
    w, _ = e1_pair()
    Pf = positive_operator(w, PLFunc.identity(UNIT))
    assert Pf(F(1, 2)) == F(1, 3) * F(1, 2)


def test_eventual_finiteness():
    sig, _ = different_invariants_pair()
    assert eventual_finiteness_horizon(sig) is None  # the tent piece keeps an interval alive
    a = interval_system(UNIT, [({0}, PLFunc.constant(UNIT, F(1, 2)), PLFunc.constant(UNIT, 1))])
    assert eventual_finiteness_horizon(a) == 1
