from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from rudin_sieve.arith import (
    ResidueSet,
    build_factor_table,
    iter_spf_segments,
    mult_eval,
    primes_upto,
    primorial,
    squares_mod,
)
from rudin_sieve.errors import OutOfRangeError, ResourceLimitError

TABLE = build_factor_table(5000)


def test_spf_small_table():
    t = build_factor_table(10)
    assert t.spf[2:].tolist() == [2, 3, 2, 5, 2, 7, 2, 3, 2]


def test_spf_limit_two():
    assert build_factor_table(2).spf[2] == 2


def test_prime_count_to_a_million():
    t = build_factor_table(10**6)
    idx = np.arange(t.limit + 1)
    assert int(np.count_nonzero((idx >= 2) & (t.spf == idx))) == 78498
    # independent count by trial division on a sub-range
    assert sum(oracles.is_prime(n) for n in range(2, 3001)) == len(primes_upto(3000))


def test_segmented_table_matches_plain():
    plain = build_factor_table(20000).spf
    pieces = np.concatenate([blk for _, blk in iter_spf_segments(20000, segment=777)])
    assert np.array_equal(plain, pieces)


def test_memory_budget():
    with pytest.raises(ResourceLimitError):
        build_factor_table(10**6, memory_budget=1000)


def test_h_values():
    assert mult_eval("h", 3, TABLE) == Fraction(1, 2)
    assert mult_eval("h", 5, TABLE) == Fraction(2, 3)
    assert mult_eval("h", 2, TABLE) == 0
    assert mult_eval("h", 15, TABLE) == Fraction(1, 3)
    assert mult_eval("h", 9, TABLE) == 0


def test_one_star_h_at_five():
    assert mult_eval("one_star_h", 5, TABLE) == Fraction(5, 3)
    assert Fraction(5, len(squares_mod(5))) == Fraction(5, 3)


def test_one_star_h_is_q_over_square_count():
    for q in oracles.odd_squarefree(300):
        assert mult_eval("one_star_h", q, TABLE) == Fraction(q, len(oracles.squares_mod(q)))


@given(st.integers(1, 5000))
@settings(max_examples=300, deadline=None)
def test_multiplicative_functions_against_trial_division(n):
    assert mult_eval("mu", n, TABLE) == oracles.mu(n)
    assert mult_eval("omega", n, TABLE) == len(oracles.factor(n))
    assert mult_eval("squarefree", n, TABLE) == (oracles.mu(n) != 0)
    assert mult_eval("h", n, TABLE) == oracles.h(n)
    assert TABLE.factorize(n) == oracles.factor(n)


@given(st.integers(1, 400))
@settings(max_examples=100, deadline=None)
def test_phi_against_gcd_count(n):
    assert mult_eval("phi", n, TABLE) == oracles.phi(n)


def test_out_of_range():
    with pytest.raises(OutOfRangeError):
        mult_eval("mu", 5001, TABLE)


def test_unknown_function():
    with pytest.raises(ValueError):
        mult_eval("sigma", 5, TABLE)


def test_primorial():
    assert primorial(2) == 1
    assert primorial(3) == 2
    assert primorial(10) == 210
    assert primorial(11) == 210
    with pytest.raises(ValueError):
        primorial(1)


def test_squares_mod_examples():
    assert squares_mod(3).members == (0, 1)
    assert squares_mod(1).members == (0,)
    assert len(squares_mod(15)) == 6
    assert len(squares_mod(15)) == len(squares_mod(3)) * len(squares_mod(5))


@given(st.integers(1, 2000))
@settings(max_examples=100, deadline=None)
def test_squares_mod_by_enumeration(q):
    assert list(squares_mod(q).members) == oracles.squares_mod(q)


def test_odd_prime_square_count():
    for p in primes_upto(500)[1:]:
        assert len(squares_mod(int(p))) == (p + 1) // 2


def test_residue_set_helpers():
    K = squares_mod(5)
    assert K.indicator().tolist() == [True, True, False, False, True]
    assert K.complement().members == (2, 3)
    assert 9 in K and 7 not in K
    with pytest.raises(ValueError):
        ResidueSet(5, (3, 1))
