import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from rudin_sieve.errors import AccuracyError
from rudin_sieve.majorant import beurling, construct, evaluate, fourier_mass_check, integer_sum


@pytest.mark.parametrize("z", [-37.3, -5.5, -1.25, -0.4, -1e-3, 1e-3, 0.3, 0.5, 2.75, 11.1, 250.6])
def test_beurling_against_trigamma_oracle(z):
    assert beurling(z)[0] == pytest.approx(float(oracles.beurling_reference(z)), abs=1e-12)


def test_beurling_at_integers_is_sign():
    z = np.array([-3.0, -1.0, 0.0, 1.0, 4.0])
    assert beurling(z).tolist() == pytest.approx([-1, -1, 1, 1, 1], abs=1e-14)


@given(st.floats(-200, 200, allow_nan=False))
@settings(max_examples=300, deadline=None)
def test_beurling_majorizes_sign(z):
    assert beurling(z)[0] >= (1.0 if z >= 0 else -1.0) - 1e-12


def test_mass():
    assert construct(0, 10, 0.5, 64).mass == 12
    assert construct(0, 1, 1, 64).mass == 2


def test_majorizes_interval_and_nonnegative():
    psi = construct(-5, 10, 0.25, 128)
    assert evaluate(psi, 0.0) >= 1
    assert evaluate(psi, -5 + 5.0) >= 1
    t = np.linspace(-5, 5, 2001)
    assert np.all(evaluate(psi, t) >= 1 - 1e-12)
    out = np.linspace(-200, 200, 4001)
    assert np.all(evaluate(psi, out) >= -1e-12)


def test_decay_outside():
    psi = construct(0, 10, 0.5)
    t = np.array([10 + 100 / 0.5 + 5, -300.0, 1e4])
    vals = evaluate(psi, t)
    env = psi.envelope(t)
    assert np.all(vals <= env + psi.tail_bound)
    C = psi.decay_constant(t)
    assert np.all(vals <= C / (1 + t**2) + psi.tail_bound)
    assert math.isfinite(C)


def test_fourier_mass_at_zero():
    psi = construct(0, 10, 0.5)
    val, err = fourier_mass_check(psi, 0.0, 1.0)
    assert abs(val - psi.mass) <= err
    assert err < 1e-4


@pytest.mark.parametrize("alpha", [0.5 * 2, -0.5 * 2, 0.75, 3.1])
def test_fourier_vanishes_outside_band(alpha):
    psi = construct(0, 10, 0.5)
    val, err = fourier_mass_check(psi, alpha, 0.9 / (0.5 + abs(alpha)))
    assert abs(val) <= err


def test_fourier_step_too_coarse():
    psi = construct(0, 10, 0.5)
    with pytest.raises(AccuracyError) as e:
        fourier_mass_check(psi, 1.0, 1.0)
    assert e.value.required == pytest.approx(1 / 1.5)


def test_integer_sum_matches_mass_when_delta_below_one():
    # band-limited to [-delta, delta] with delta < 1, so Poisson gives sum = mass
    psi = construct(0.3, 7, 0.5)
    total, err = integer_sum(psi)
    assert abs(total - psi.mass) <= err


def test_construct_rejects_bad_parameters():
    with pytest.raises(ValueError):
        construct(0, -1, 0.5)
    with pytest.raises(ValueError):
        construct(0, 1, 0)
