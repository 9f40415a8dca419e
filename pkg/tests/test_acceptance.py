"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed together at the end of the
pytest run.
"""

import json
import math
import os
import time
from fractions import Fraction

import numpy as np
import pytest

import oracles
from rudin_sieve.arith import build_factor_table, primes_upto
from rudin_sieve.chang import PRODUCT_EXAMPLE, chang_decompose, fibre_search
from rudin_sieve.circle import CirclePoint, PointSet, delta_star, is_dissociate
from rudin_sieve.cli import run
from rudin_sieve.constants import check_constants
from rudin_sieve.prime_sieve import beta_prime, build_prime_sieve
from rudin_sieve.square_sieve import (
    beta_square_many,
    build_square_sieve,
    fourier_weights,
    g_sharp,
    g_sharp_scan,
    main_term,
)
from rudin_sieve.verify import check_randomized

TABLE = build_factor_table(10**4)

# exact value of min G#(z)/z over z <= 10^6, attained at z = 28
SCAN_MIN_EXACT = g_sharp(28, TABLE) / 28

# worst ratios of 1000 seeded trials per kind, seed 20260101
WORST_RATIOS = {
    "hyp": 0.9895468614295158,
    "distrib": 0.29119717640966475,
    "rudin_moment": 0.12116577339229197,
    "ra": 0.06073328076621554,
    "interval": 0.07413136602800728,
    "interval_moment": 0.0852160044856863,
    "primes": 0.05398272782962436,
    "squares": 0.07086829820070052,
    "corollary": 0.00862263185434042,
}


def test_criterion_01_density_scan(tmp_path, criterion):
    out = tmp_path / "scan.json"
    t0 = time.perf_counter()
    code = run(["gsharp-scan", "--limit", "1000000", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    rep = json.loads(out.read_text())
    # the scanned minimum is the pinned exact value, within the certified bound
    assert abs(rep["min_ratio"] - float(SCAN_MIN_EXACT)) <= rep["ratio_error_bound"]
    ok = rep["min_ratio"] >= 0.304 and rep["argmin"] == 178 and elapsed < 30
    criterion(
        1,
        ok,
        f"min G#(z)/z = {rep['min_ratio']:.17g} at z = {rep['argmin']} "
        f"(needs >= 0.304 at 178; min over z >= 100 is "
        f"{rep['windowed_minima']['100']['min_ratio']:.6f} at {rep['windowed_minima']['100']['argmin']}), "
        f"{elapsed:.2f} s, exit {code}",
    )
    assert rep["min_ratio"] >= 0.304
    assert rep["argmin"] == 178
    assert elapsed < 30


@pytest.mark.slow
@pytest.mark.skipif(not os.environ.get("RUN_STRETCH"), reason="long run; set RUN_STRETCH=1")
def test_criterion_01_stretch_to_a_billion(criterion):
    s = g_sharp_scan(10**9, segment=1 << 22)
    ok = s.min_ratio >= 0.304 and s.large_z_min_ratio >= 0.326
    criterion(
        "1s",
        ok,
        f"limit 1e9: min {s.min_ratio:.12g} at {s.argmin}, min over z >= 1e8 {s.large_z_min_ratio:.12g}",
    )
    assert s.large_z_min_ratio >= 0.326
    assert s.min_ratio >= 0.304


def test_criterion_02_normalization_identities(criterion):
    bad = []
    for z in range(1, 201):
        s = build_square_sieve(z, TABLE)
        if sum(s.lambda_sharp.values()) != 1:
            bad.append((z, "sum"))
        if main_term(s) != 1 / s.G_sharp:
            bad.append((z, "main term"))
        if s.lambda_classical[1] != 1:
            bad.append((z, "lambda_1"))
        for l, v in s.lambda_classical.items():
            cross = oracles.mu(l) * sum((lam for q, lam in s.lambda_sharp.items() if q % l == 0), Fraction(0))
            if v != cross:
                bad.append((z, f"cross {l}"))
                break
    criterion(2, not bad, f"z <= 200, exact; violations: {bad[:5]}")
    assert not bad


def test_criterion_03_fourier_expansion(criterion):
    ns = np.arange(0, 10**4 + 1)
    worst = 0.0
    for z in (1, 3, 5, 15, 21, 33):
        s = build_square_sieve(z, TABLE)
        direct = np.array([float(v) for v in beta_square_many(ns, s)])
        err = float(np.max(np.abs(fourier_weights(s).evaluate(ns) - direct)))
        worst = max(worst, err)
    criterion(3, worst <= 1e-9, f"max |Fourier - direct| = {worst:.3e} (tolerance 1e-9)")
    assert worst <= 1e-9


def test_criterion_04_equality_on_squares(criterion):
    squares = np.arange(0, 1001) ** 2
    others = np.arange(0, 3001)
    bad = []
    for z in range(1, 101):
        s = build_square_sieve(z, TABLE)
        if any(v != 1 for v in beta_square_many(squares, s)):
            bad.append((z, "square"))
        if any(v < 0 for v in beta_square_many(others, s)):
            bad.append((z, "negative"))
    criterion(4, not bad, f"beta(n^2) = 1 for n <= 1000, z <= 100; beta >= 0 on [0, 3000]; violations: {bad[:5]}")
    assert not bad


def test_criterion_05_prime_sieve_diagonal(criterion):
    primes = [int(p) for p in primes_upto(10**4)]
    bad = []
    for z0 in (2, 3, 5):
        for z in range(1, 101):
            s = build_prime_sieve(z, z0, TABLE)
            if s.quadratic_form() != 1 / s.G:
                bad.append((z, z0, "diagonal"))
            if any(beta_prime(p, s) != 1 for p in primes if p > z):
                bad.append((z, z0, "beta"))
    criterion(5, not bad, f"z <= 100, z0 in (2, 3, 5), exact; violations: {bad[:5]}")
    assert not bad


def test_criterion_06_theorem_suite(criterion):
    summary, failures, drift = {}, 0, []
    for kind, pinned in WORST_RATIOS.items():
        rep = check_randomized(kind, trials=1000, seed=20260101)
        failures += rep.failures
        summary[kind] = rep.worst_ratio
        if rep.worst_ratio != pytest.approx(pinned, rel=1e-9):
            drift.append(kind)
    detail = ", ".join(f"{k} {v:.4f}" for k, v in summary.items())
    criterion(6, failures == 0 and not drift, f"1000 trials x 9 kinds, {failures} failures; worst ratios: {detail}")
    assert failures == 0
    assert not drift


def test_criterion_07_constants(criterion):
    chain = check_constants("gamma_chain")
    stir = check_constants("stirling")
    cosh = check_constants("cosh_bounds")
    ok = chain.holds and chain.min_margin > 0 and stir.holds and cosh.holds and cosh.points == 10**4
    criterion(
        7,
        ok,
        f"gamma_chain margin {chain.min_margin:.3e} over {chain.points} p; "
        f"theta in [{stir.details['theta_min']:.4f}, {stir.details['theta_max']:.10f}] over {stir.points} x; "
        f"cosh bounds min relative margin {cosh.min_margin:.3e} over {cosh.points} samples",
    )
    assert ok


def test_criterion_08_product_counterexample(criterion):
    t0 = time.perf_counter()
    res = fibre_search(*PRODUCT_EXAMPLE)
    elapsed = time.perf_counter() - t0
    ok = res["D_dissociate"] and res["projection"] == [1, 3] and not res["witnesses"] and elapsed < 1
    criterion(8, ok, f"{res['subsets_checked']} subsets of Z/6 checked, {len(res['witnesses'])} witnesses, {elapsed:.3f} s")
    assert ok


def test_criterion_09_chang_end_to_end(criterion):
    N = 10**4
    S = [int(p) for p in primes_upto(N) if p >= 10]
    parts, ok = [], True
    t0 = time.perf_counter()
    for A in (1.5, 2, 4):
        dec = chang_decompose(S, N, 101, 103, A)
        for c in dec.components:
            limit = min(dec.bound_value, math.log(c.modulus) / math.log(2))
            ok &= len(c.D) <= limit
        ok &= dec.containment_verified and dec.conforming
        parts.append(f"A={A}: |C|={len(dec.spectrum)} |D1|={len(dec.D1)} |D2|={len(dec.D2)}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 10
    criterion(9, ok, "; ".join(parts) + f"; {elapsed:.2f} s")
    assert ok


def test_criterion_10_dissociate_family(criterion):
    ok, parts = True, []
    for U, H in ((64, 5), (1024, 9)):
        X = PointSet([CirclePoint.rational(2**j, U) for j in range(H + 1)])
        ref = oracles.delta_star([Fraction(2**j, U) for j in range(H + 1)])
        d = delta_star(X)
        ok &= is_dissociate(X) and d == ref == Fraction(1, U)
        parts.append(f"U={U} H={H}: delta_star={d}")
    criterion(10, ok, "; ".join(parts))
    assert ok
