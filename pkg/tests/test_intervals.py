from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nestkit.errors import PointOutsideUnion
from nestkit.intervals import (Family, Interval, OrderMap, approx_dominated, as_scalar,
                               components, dominates, format_scalar, interval, is_linked_list,
                               reach, refines, union_is)

F = Family.of

endpoints = st.fractions(min_value=-20, max_value=20, max_denominator=6)


@st.composite
def intervals(draw):
    a = draw(endpoints)
    b = draw(endpoints.filter(lambda x: x != a))
    return Interval(min(a, b), max(a, b))


families = st.lists(intervals(), max_size=7).map(lambda xs: Family(tuple(xs)))


def test_scalars():
    assert as_scalar("3/6") == Fraction(1, 2)
    assert as_scalar(4) == Fraction(4)
    assert format_scalar(Fraction(6, 3)) == "2"
    assert format_scalar(Fraction(-1, 3)) == "-1/3"
    with pytest.raises(TypeError):
        as_scalar(0.5)


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        interval(1, 1)
    with pytest.raises(ValueError):
        interval(2, 1)


def test_family_sorts_and_dedups():
    P = F((2, 3), (0, 1), (2, 3))
    assert P.intervals == (interval(0, 1), interval(2, 3))


def test_domination_examples():
    P = F((0, 2), (1, 3))
    assert dominates(interval(1, 2), P)
    assert not dominates(interval(0, 3), P)
    assert approx_dominated(interval(0, 2), P)
    assert not approx_dominated(interval("1/2", "5/2"), P)


def test_reach():
    P = F((0, 2), (1, 3))
    assert reach(P, "3/2") == (0, 3)
    # open intervals: 1 is not inside (1, 3)
    assert reach(P, 1) == (0, 2)
    with pytest.raises(PointOutsideUnion):
        reach(P, 3)


def test_components_keep_touching_intervals_apart():
    assert components(F((0, 1), (1, 2))) == [interval(0, 1), interval(1, 2)]
    assert components(F((0, 2), (1, 3), (5, 6))) == [interval(0, 3), interval(5, 6)]
    assert union_is(F((0, 2), (1, 3)), interval(0, 3))


def test_linked_list():
    assert is_linked_list([interval(0, 2), interval(1, 4), interval(3, 5)])
    assert not is_linked_list([interval(0, 2), interval(1, 4), interval("3/2", 5)])
    assert not is_linked_list([interval(0, 2), interval(0, 3)])


@given(families, endpoints)
def test_reach_matches_brute_force(P, x):
    holders = [E for E in P if E.lo < x < E.hi]
    if not holders:
        with pytest.raises(PointOutsideUnion):
            reach(P, x)
        return
    lo, hi = reach(P, x)
    assert lo < x < hi
    assert lo == min(E.lo for E in holders) and hi == max(E.hi for E in holders)


@given(families)
def test_components_match_point_membership(P):
    comps = components(P)
    # probe every endpoint and every midpoint between consecutive endpoints
    pts = sorted({e for E in P for e in (E.lo, E.hi)})
    probes = pts + [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    for x in probes:
        in_union = any(E.contains_point(x) for E in P)
        assert in_union == any(C.contains_point(x) for C in comps)
    for C, D in zip(comps, comps[1:]):
        assert C.hi <= D.lo


@given(families, families)
def test_refinement_is_transitive_with_union(P, Q):
    assert refines(P, P)
    assert refines(P, P.union(Q))
    if refines(P, Q) and refines(Q, P):
        assert all(dominates(E, Q) for E in P)


@given(st.lists(st.tuples(endpoints, endpoints), min_size=1, max_size=6), endpoints)
def test_order_map_is_increasing_with_inverse(raw, x):
    xs = sorted({a for a, _ in raw})
    ys = sorted({b for _, b in raw})[:len(xs)]
    xs = xs[:len(ys)]
    theta = OrderMap(tuple(zip(xs, ys)))
    y = x + Fraction(1, 7)
    assert theta(x) < theta(y)
    assert theta.inverse()(theta(x)) == x
    for a, b in theta.breakpoints:
        assert theta(a) == b


def test_order_map_rejects_decreasing():
    with pytest.raises(ValueError):
        OrderMap(((0, 1), (1, 0)))


def test_order_map_slope_one_outside():
    theta = OrderMap(((0, 10), (1, 12)))
    assert theta(-3) == 7
    assert theta(5) == 16
    assert theta(Fraction(1, 2)) == 11
    assert theta.image(interval(0, 1)) == interval(10, 12)
