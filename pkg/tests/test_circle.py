import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from rudin_sieve.circle import (
    CirclePoint,
    PointSet,
    admissible_moduli,
    circle_norm,
    delta_star,
    delta_star_arith,
    greedy_dissociate,
    is_dissociate,
    is_dissociate_group,
    min_gap,
    parse_point,
    parse_points,
    signed_sums,
    span,
)
from rudin_sieve.errors import ResourceLimitError


def pts(*fracs):
    return PointSet([CirclePoint(Fraction(f)) for f in fracs])


def over(q, *ks):
    return PointSet([CirclePoint.rational(k, q) for k in ks])


def test_points_reduce_mod_one():
    assert CirclePoint(Fraction(9, 4)).value == Fraction(1, 4)
    assert CirclePoint.rational(-1, 3).value == Fraction(2, 3)
    assert CirclePoint.real(1.25).value == 0.25


def test_mixed_arithmetic_promotes_to_real():
    s = CirclePoint.rational(1, 3) + CirclePoint.real(0.5)
    assert not s.exact
    assert s.value == pytest.approx(5 / 6)


def test_parse():
    assert parse_point("3/8").value == Fraction(3, 8)
    assert not parse_point("0.3").exact
    assert len(parse_points("1/8, 2/8,4/8")) == 3


def test_real_points_need_positive_tolerance():
    with pytest.raises(ValueError):
        CirclePoint(0.3, 0.0)


def test_circle_norm_examples():
    assert circle_norm(CirclePoint(0)) == 0
    assert circle_norm(Fraction(3, 4)) == Fraction(1, 4)
    assert circle_norm(0.3) == pytest.approx(0.3)


def test_min_gap_examples():
    assert min_gap(pts("1/5", "2/5")) == Fraction(1, 5)
    assert min_gap(pts(0, "1/2")) == Fraction(1, 2)
    assert min_gap(over(7, 1, 2, 4)) == Fraction(1, 7)
    with pytest.raises(ValueError):
        min_gap(pts("1/3"))


def test_signed_sums_examples():
    assert [(e, p.value) for e, p in signed_sums(PointSet([]))] == [((), 0)]
    assert {p.value for _, p in signed_sums(pts("1/4"))} == {0, Fraction(1, 4), Fraction(3, 4)}
    sums = signed_sums(over(8, 1, 2, 4))
    assert len(sums) == 27
    nonzero = {p.value for e, p in sums if any(e)}
    assert nonzero == {Fraction(k, 8) for k in range(1, 8)}


def test_signed_sums_cap():
    with pytest.raises(ResourceLimitError):
        signed_sums(PointSet([CirclePoint.rational(1, 2**k) for k in range(1, 30)], cap=24))


def test_is_dissociate_examples():
    U, H = 64, 5
    assert is_dissociate(over(U, *[2**j for j in range(H + 1)]))
    assert not is_dissociate(pts(0))
    assert not is_dissociate(over(7, 1, 2, 3))


def test_delta_star_examples():
    assert delta_star(over(8, 1, 2, 4)) == Fraction(1, 8)
    assert delta_star(pts("1/5", "2/5")) == Fraction(1, 5)
    assert delta_star(pts(0, "1/3")) == 0
    assert delta_star(PointSet([])) == math.inf


fractions_sets = st.lists(
    st.builds(Fraction, st.integers(0, 200), st.integers(1, 60)), min_size=1, max_size=5
)


@given(fractions_sets)
@settings(max_examples=150, deadline=None)
def test_delta_star_matches_brute_force(xs):
    xs = list(dict.fromkeys(x % 1 for x in xs))
    assert delta_star(pts(*xs)) == oracles.delta_star(xs)
    assert is_dissociate(pts(*xs)) == (oracles.delta_star(xs) > 0)


@given(fractions_sets, st.integers(1, 30), st.sampled_from([2, 3, 5]))
@settings(max_examples=150, deadline=None)
def test_delta_arith_matches_brute_force(xs, z, z0):
    xs = list(dict.fromkeys(x % 1 for x in xs))
    assert delta_star_arith(pts(*xs), z, z0) == oracles.delta_arith(xs, z, z0)
    if z0 == 2:
        assert delta_star_arith(pts(*xs), z, z0, method="cf") == oracles.delta_arith(xs, z, z0)


def test_delta_arith_examples():
    assert delta_star_arith(over(7, 1), 2, 2) == Fraction(1, 7)
    assert delta_star_arith(over(7, 1), 7, 2) == 0


def test_delta_arith_irrational():
    with mp.workdps(40):
        x = mp.sqrt(2) - 1
        ref = min(abs(q * x - mp.nint(q * x)) / q for q in (1, 2, 3))
    X = PointSet([CirclePoint.real(math.sqrt(2) - 1)])
    assert delta_star_arith(X, 3, 2) == pytest.approx(float(ref), abs=1e-12)
    assert float(ref) == pytest.approx(0.0808802, abs=1e-6)
    assert delta_star_arith(X, 3, 2, method="cf") == pytest.approx(float(ref), abs=1e-12)


def test_delta_arith_bounded_by_delta_star():
    X = over(97, 3, 10, 41)
    assert delta_star_arith(X, 1, 2) == delta_star(X)
    assert delta_star_arith(X, 10, 2) <= delta_star(X)


def test_admissible_moduli():
    assert admissible_moduli(10, 2) == list(range(1, 11))
    assert admissible_moduli(10, 3) == [1, 3, 5, 7, 9]
    assert admissible_moduli(10, 5) == [1, 5, 7]


def test_greedy_examples():
    assert greedy_dissociate(over(7, 1, 2, 3)) == over(7, 1, 2)
    assert len(greedy_dissociate(PointSet([]))) == 0
    C = over(64, 1, 2, 4, 8)
    assert greedy_dissociate(C) == C


@given(st.integers(2, 80), st.sets(st.integers(0, 79), max_size=12))
@settings(max_examples=100, deadline=None)
def test_greedy_is_maximal_dissociate(q, ks):
    C = over(q, *sorted({k % q for k in ks}))
    D = greedy_dissociate(C)
    assert is_dissociate(D)
    chosen = {p.value for p in D}
    for c in C:
        if c.value not in chosen:
            assert not is_dissociate(PointSet(list(D) + [c]))
    # every point of C lies in the signed span of D
    assert {c for c in C} <= span(D)


def test_span_examples():
    assert span(over(7, 1, 2)) == frozenset(CirclePoint.rational(k, 7) for k in range(7))
    assert span(PointSet([])) == frozenset({CirclePoint(0)})
    assert span(pts("1/2")) == frozenset({CirclePoint(0), CirclePoint(Fraction(1, 2))})


def test_real_mode_dissociate():
    X = PointSet([CirclePoint.real(math.sqrt(2) - 1), CirclePoint.real(math.sqrt(3) - 1)])
    assert is_dissociate(X)
    assert delta_star(X) > 0.01


def test_group_dissociate():
    assert is_dissociate_group([(1, 1), (1, 4), (3, 2), (3, 3)], (5, 6))
    assert not is_dissociate_group([(1, 0), (2, 0), (3, 0)], (5, 6))
