"""Selberg enveloping sieve for the primes with small primes left unsifted.

Only primes ``p >= z0`` are sifted.  The weights are the classical Selberg
ones for the density ``g(d) = 1/d``:

    lambda_d = mu(d) * d/phi(d) * G_d(z) / G(z; z0)
    G_d(z)   = sum_{m <= z/d, (m, d P(z0)) = 1} mu(m)^2 / phi(m)
    G(z; z0) = G_1(z)

supported on the squarefree ``d <= z`` coprime to ``P(z0)``, the product of
the primes below ``z0``.  They minimise ``sum lambda_d1 lambda_d2 / [d1, d2]``
under ``lambda_1 = 1`` and the minimum is ``1 / G(z; z0)``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import FactorTable, build_factor_table, primorial
from .errors import OutOfRangeError

FLOAT_SHADOW_ABOVE = 10**4


@dataclass(frozen=True)
class PrimeSieveSystem:
    z: float
    z0: int
    lam: dict  # d -> Fraction (or float on the shadow path)
    G: Fraction
    exact: bool = True

    @property
    def support(self) -> list[int]:
        return sorted(self.lam)

    def quadratic_form(self):
        """``sum_{d1, d2} lambda_d1 lambda_d2 / lcm(d1, d2)``."""
        ds = self.support
        zero = Fraction(0) if self.exact else 0.0
        total = zero
        for d1 in ds:
            row = sum((self.lam[d2] / math.lcm(d1, d2) for d2 in ds), zero)
            total += self.lam[d1] * row
        return total


def _squarefree_coprime(zq: int, P: int, table: FactorTable) -> list[int]:
    return [
        d
        for d in range(1, zq + 1)
        if math.gcd(d, P) == 1 and (d == 1 or table.is_squarefree(d))
    ]


def _phi_sqfree(d: int, table: FactorTable) -> int:
    return math.prod(p - 1 for p in table.prime_factors(d)) if d > 1 else 1


def _table_for(z, table):
    zq = math.floor(z)
    if table is None:
        table = build_factor_table(max(zq, 2))
    if zq > table.limit:
        raise OutOfRangeError(f"sieve level {z} exceeds table limit {table.limit}")
    return zq, table


def g_prime(z: float, z0: int, table: FactorTable | None = None) -> Fraction:
    """``G(z; z0) = sum_{q <= z, (q, P(z0)) = 1} mu(q)^2 / phi(q)``."""
    if z0 < 2:
        raise ValueError("z0 must be at least 2")
    zq, table = _table_for(z, table)
    P = primorial(z0)
    return sum(
        (Fraction(1, _phi_sqfree(q, table)) for q in _squarefree_coprime(zq, P, table)),
        Fraction(0),
    )


def build_prime_sieve(
    z: float, z0: int, table: FactorTable | None = None, exact: bool | None = None
) -> PrimeSieveSystem:
    """Selberg weights at level ``z`` sifting the primes ``>= z0``.

    Exact rationals by default; above ``FLOAT_SHADOW_ABOVE`` the weights are
    carried in floating point unless ``exact=True`` is forced.
    """
    if z0 < 2:
        raise ValueError("z0 must be at least 2")
    zq, table = _table_for(z, table)
    if exact is None:
        exact = zq <= FLOAT_SHADOW_ABOVE
    P = primorial(z0)
    ds = _squarefree_coprime(zq, P, table)
    one = Fraction(1) if exact else 1.0
    inv_phi = {d: one / _phi_sqfree(d, table) for d in ds}
    G = sum(inv_phi.values(), 0 * one)
    lam = {}
    for d in ds:
        # G_d: squarefree m <= z/d coprime to d and to P(z0)
        ms = ds[: bisect.bisect_right(ds, zq // d)]
        Gd = sum((inv_phi[m] for m in ms if math.gcd(m, d) == 1), 0 * one)
        mu = (-1) ** len(table.prime_factors(d)) if d > 1 else 1
        lam[d] = mu * d * inv_phi[d] * Gd / G
    return PrimeSieveSystem(z, z0, lam, G, exact)


def beta_prime(n: int, sys: PrimeSieveSystem) -> Fraction:
    """``(sum_{d | n} lambda_d)^2``."""
    if n < 1:
        raise ValueError("n must be positive")
    s = sum((l for d, l in sys.lam.items() if n % d == 0), Fraction(0) if sys.exact else 0.0)
    return s * s


def to_json(sys: PrimeSieveSystem) -> dict:
    fmt = (lambda v: f"{v.numerator}/{v.denominator}") if sys.exact else float
    return {
        "z": sys.z,
        "z0": sys.z0,
        "exact": sys.exact,
        "G": fmt(sys.G),
        "G_float": float(sys.G),
        "lambda": {str(d): fmt(v) for d, v in sorted(sys.lam.items())},
    }
