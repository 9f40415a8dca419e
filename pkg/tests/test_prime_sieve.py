from fractions import Fraction

import pytest

import oracles
from rudin_sieve.arith import build_factor_table, primes_upto
from rudin_sieve.errors import OutOfRangeError
from rudin_sieve.prime_sieve import beta_prime, build_prime_sieve, g_prime, to_json

TABLE = build_factor_table(10**4)


def test_level_two():
    s = build_prime_sieve(2, 2, TABLE)
    assert s.support == [1, 2]
    assert s.lam[1] == 1


def test_empty_sieve():
    s = build_prime_sieve(1.5, 2, TABLE)
    assert s.support == [1]
    assert s.lam[1] == 1 and s.G == 1
    assert all(beta_prime(n, s) == 1 for n in range(1, 50))


def test_level_ten_odd():
    s = build_prime_sieve(10, 3, TABLE)
    assert all(d % 2 for d in s.support)
    assert s.lam[1] == 1
    assert all(abs(v) <= 1 for v in s.lam.values())


@pytest.mark.parametrize("z,z0", [(10, 3), (12, 2), (30, 5), (23, 2)])
def test_weights_minimise_quadratic_form(z, z0):
    lam, m = oracles.prime_sieve_oracle(z, z0)
    s = build_prime_sieve(z, z0, TABLE)
    assert s.lam == lam
    assert s.quadratic_form() == m == 1 / s.G


def test_g_prime_examples():
    assert g_prime(1, 2, TABLE) == 1
    assert g_prime(1, 7, TABLE) == 1
    assert g_prime(3, 2, TABLE) == Fraction(5, 2)
    assert g_prime(3, 3, TABLE) == Fraction(3, 2)


def test_beta_prime_large_prime():
    s = build_prime_sieve(30, 2, TABLE)
    assert beta_prime(9973, s) == 1


def test_beta_prime_semiprimes_nonnegative():
    s = build_prime_sieve(30, 3, TABLE)
    vals = [beta_prime(p * q, s) for p in (5, 7, 11) for q in (13, 17, 19)]
    assert all(v >= 0 for v in vals)


def test_beta_prime_majorizes_sifted_primes():
    s = build_prime_sieve(40, 5, TABLE)
    for p in primes_upto(2000):
        if p > 40:
            assert beta_prime(int(p), s) == 1


def test_out_of_range():
    with pytest.raises(OutOfRangeError):
        build_prime_sieve(2 * 10**4, 2, TABLE)


def test_float_shadow_close_to_exact():
    exact = build_prime_sieve(200, 3, TABLE)
    shadow = build_prime_sieve(200, 3, TABLE, exact=False)
    assert max(abs(float(exact.lam[d]) - shadow.lam[d]) for d in exact.lam) < 1e-12


def test_json():
    out = to_json(build_prime_sieve(3, 2, TABLE))
    assert out["G"] == "5/2"
    assert out["lambda"]["1"] == "1/1"
