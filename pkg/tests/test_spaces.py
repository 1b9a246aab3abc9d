from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wpstensor.rationals import QComplex, q, qstr
from wpstensor.spaces import (
    DomainError,
    FiniteSpace,
    IntervalSpace,
    IntervalUnion,
    PLFunc,
    PreconditionError,
    boundary_in,
    compose,
    invert,
    is_homeomorphism,
    solve_equal,
)

UNIT = ((F(0), F(1)),)
rats = st.fractions(min_value=0, max_value=1, max_denominator=12)


@st.composite
def pl_on_unit(draw, lo=0, hi=1):
    knots = sorted(set(draw(st.lists(rats, max_size=4))) - {F(0), F(1)})
    xs = [F(0)] + knots + [F(1)]
    ys = [draw(st.fractions(min_value=lo, max_value=hi, max_denominator=12)) for _ in xs]
    return PLFunc(((tuple(xs), tuple(ys)),))


def test_q_parses_and_rejects():
    assert q("3/4") == F(3, 4)
    assert q(2) == F(2)
    assert qstr(F(-6, 4)) == "-3/2"
    with pytest.raises(TypeError):
        q(0.5)
    with pytest.raises((TypeError, ValueError)):
        q(True)


def test_qcomplex_arithmetic():
    z = QComplex(1, 2)
    w = QComplex(F(1, 2), -1)
    assert z * w == QComplex(F(1, 2) + 2, -1 + 1)
    assert (z / w) * w == z
    assert z.conjugate().abs2() == 5
    assert z ** 3 == z * z * z


def test_finite_space_rejects_duplicates():
    with pytest.raises(ValueError):
        FiniteSpace((1, 1))


def test_interval_space_components():
    S = IntervalSpace(((0, F(1, 2)), (1, 2)))
    assert S.component_of(F(3, 2)) == 1
    assert S.component_of(F(3, 4)) is None
    with pytest.raises(ValueError):
        IntervalSpace(((0, 1), (F(1, 2), 2)))


def test_interval_union_ops():
    A = IntervalUnion(((0, F(1, 2)), (F(1, 2), 1)))
    assert A.parts == ((0, 1),)
    B = IntervalUnion(((F(1, 4), F(3, 4)),))
    assert (A & B).parts == B.parts
    assert (IntervalUnion(((0, F(1, 4)),)) & IntervalUnion(((F(1, 4), 1),))).isolated_points() == [F(1, 4)]


def test_boundary_of_point_and_interval():
    S = IntervalSpace(UNIT)
    assert boundary_in(IntervalUnion.points([0]), S) == [F(0)]
    assert boundary_in(IntervalUnion(((F(1, 3), 1),)), S) == [F(1, 3)]
    assert boundary_in(IntervalUnion(UNIT), S) == []


def test_plfunc_evaluation_and_simplify():
    f = PLFunc.from_points([(0, 0), (F(1, 2), F(1, 2)), (1, 1)])
    assert f.pieces == (((F(0), F(1)), (F(0), F(1))),)
    tent = PLFunc.from_points([(0, 1), (F(1, 2), 1), (1, 0)])
    assert tent(F(2, 3)) == F(2, 3)
    with pytest.raises(DomainError):
        tent(2)


def test_compose_known_value():
    f = PLFunc.from_points([(F(1, 2), 1), (1, 0)])
    g = PLFunc.from_points([(F(1, 2), 1), (F(3, 4), F(1, 2))])
    assert compose(f, g)(F(11, 16)) == f(g(F(11, 16)))


@settings(max_examples=60, deadline=None)
@given(pl_on_unit(), pl_on_unit(), st.lists(rats, min_size=1, max_size=5))
def test_compose_matches_pointwise(f, g, xs):
    h = compose(f, g)
    for x in xs:
        assert h(x) == f(g(x))


@settings(max_examples=60, deadline=None)
@given(pl_on_unit(), pl_on_unit())
def test_solve_equal_is_exact(f, g):
    S = solve_equal(f, g)
    for a, b in S:
        assert f(a) == g(a) and f(b) == g(b)
        assert f((a + b) / 2) == g((a + b) / 2)
    # between consecutive solution parts the difference keeps a sign
    edges = [F(0)] + [p for part in S for p in part] + [F(1)]
    for a, b in zip(edges, edges[1:]):
        if a < b and (a, b) not in S.parts:
            m = (a + b) / 2
            if m not in S:
                assert f(m) != g(m)


def test_homeomorphism_and_inverse():
    S = IntervalSpace(UNIT)
    g = PLFunc.from_points([(0, 0), (F(1, 3), F(2, 3)), (1, 1)])
    assert is_homeomorphism(g, S, S)
    gi = invert(g, S, S)
    for x in (F(0), F(1, 5), F(2, 3), F(1)):
        assert gi(g(x)) == x
    flip = PLFunc.affine(UNIT, -1, 1)
    assert compose(flip, flip) == PLFunc.identity(UNIT)
    with pytest.raises(PreconditionError):
        invert(PLFunc.from_points([(0, 0), (F(1, 2), 1), (1, 0)]), S, S)


def test_restrict_requires_whole_piece():
    f = PLFunc.identity(((0, 1), (2, 3)))
    assert f.restrict([(2, 3)]).spans() == [(2, 3)]
    with pytest.raises(DomainError):
        f.restrict([(0, F(1, 2))])
