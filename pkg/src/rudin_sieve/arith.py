"""Number-theoretic primitives: smallest-prime-factor tables, multiplicative
functions evaluated exactly, primorials and squares modulo q.

Multiplicative function values are returned as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import OutOfRangeError, ResourceLimitError

BYTES_PER_ENTRY = 8
MEMORY_BUDGET = 2 << 30
SEGMENT_THRESHOLD = 10**8
DEFAULT_SEGMENT = 1 << 20

MULTIPLICATIVE = ("mu", "phi", "omega", "squarefree", "h", "one_star_h")


def primes_upto(n: int) -> np.ndarray:
    """All primes ``<= n`` as an int64 array (plain Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(n + 1, dtype=bool)
    mark[:2] = False
    mark[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if mark[p]:
            mark[p * p :: 2 * p] = False
    return np.flatnonzero(mark).astype(np.int64)


def _spf_dtype(limit):
    return np.int32 if limit < 2**31 - 1 else np.int64


def spf_segment(lo: int, hi: int, base_primes: np.ndarray) -> np.ndarray:
    """Smallest prime factors of ``lo <= n < hi``.

    ``base_primes`` must contain every prime ``<= isqrt(hi - 1)``.  Entries for
    n < 2 are 0.
    """
    seg = np.zeros(hi - lo, dtype=_spf_dtype(hi))
    for p in base_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, -(-lo // p) * p)
        view = seg[start - lo :: p]
        view[view == 0] = p
    rest = np.flatnonzero(seg == 0)
    seg[rest] = rest + lo
    if lo < 2:
        seg[: 2 - lo] = 0
    return seg


def iter_spf_segments(limit: int, segment: int = DEFAULT_SEGMENT) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(start, spf[start:start+len])`` blocks covering ``0..limit``."""
    base = primes_upto(math.isqrt(limit))
    for lo in range(0, limit + 1, segment):
        hi = min(lo + segment, limit + 1)
        yield lo, spf_segment(lo, hi, base)


@dataclass(frozen=True, eq=False)
class FactorTable:
    """Smallest-prime-factor table on ``[0, limit]``; immutable once built."""

    limit: int
    spf: np.ndarray

    def __post_init__(self):
        self.spf.setflags(write=False)

    def _check(self, n):
        if n < 1:
            raise ValueError(f"expected a positive integer, got {n}")
        if n > self.limit:
            raise OutOfRangeError(f"{n} exceeds factor table limit {self.limit}")

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of ``n`` as ``[(p, e), ...]`` with p ascending."""
        self._check(n)
        out = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def prime_factors(self, n: int) -> list[int]:
        return [p for p, _ in self.factorize(n)]

    def is_prime(self, n: int) -> bool:
        self._check(n)
        return n >= 2 and int(self.spf[n]) == n

    def is_squarefree(self, n: int) -> bool:
        return all(e == 1 for _, e in self.factorize(n))

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1)
        return idx[(idx >= 2) & (self.spf == idx)].astype(np.int64)


def build_factor_table(
    limit: int,
    memory_budget: int = MEMORY_BUDGET,
    segment: int = DEFAULT_SEGMENT,
) -> FactorTable:
    """Build the smallest-prime-factor table up to ``limit``.

    Tables above ``SEGMENT_THRESHOLD`` entries are filled segment by segment so
    that the marking pass stays cache resident.
    """
    if limit < 2:
        raise ValueError("limit must be at least 2")
    need = (limit + 1) * BYTES_PER_ENTRY
    if need > memory_budget:
        raise ResourceLimitError(
            f"factor table up to {limit} needs ~{need} bytes, budget is {memory_budget}"
        )
    if limit + 1 <= SEGMENT_THRESHOLD:
        spf = spf_segment(0, limit + 1, primes_upto(math.isqrt(limit)))
    else:
        spf = np.empty(limit + 1, dtype=_spf_dtype(limit + 1))
        for lo, block in iter_spf_segments(limit, segment):
            spf[lo : lo + len(block)] = block
    return FactorTable(limit, spf)


def _h_prime(p):
    return Fraction(0) if p == 2 else Fraction(p - 1, p + 1)


def mult_eval(fn: str, n: int, table: FactorTable) -> Fraction:
    """Exact value of a multiplicative function at ``n``.

    ``fn`` is one of ``mu``, ``phi``, ``omega``, ``squarefree``, ``h`` or
    ``one_star_h``.  Here ``h`` vanishes on even and non-squarefree integers
    and ``h(p) = (p-1)/(p+1)`` for odd primes; ``one_star_h`` is the divisor
    sum of ``h``.
    """
    fac = table.factorize(n)
    sqfree = all(e == 1 for _, e in fac)
    if fn == "mu":
        return Fraction((-1) ** len(fac) if sqfree else 0)
    if fn == "phi":
        return Fraction(math.prod((p - 1) * p ** (e - 1) for p, e in fac))
    if fn == "omega":
        return Fraction(len(fac))
    if fn == "squarefree":
        return Fraction(int(sqfree))
    if fn == "h":
        if not sqfree or n % 2 == 0:
            return Fraction(0)
        return math.prod((_h_prime(p) for p, _ in fac), start=Fraction(1))
    if fn == "one_star_h":
        # h vanishes on prime powers p^k with k >= 2
        return math.prod((1 + _h_prime(p) for p, _ in fac), start=Fraction(1))
    raise ValueError(f"unknown multiplicative function {fn!r}; expected one of {MULTIPLICATIVE}")


def primorial(z0: int) -> int:
    """Product of the primes strictly below ``z0``."""
    if z0 < 2:
        raise ValueError("z0 must be at least 2")
    return math.prod(int(p) for p in primes_upto(z0 - 1))


@dataclass(frozen=True)
class ResidueSet:
    modulus: int
    members: tuple[int, ...]

    def __post_init__(self):
        m = self.members
        if any(not 0 <= r < self.modulus for r in m):
            raise ValueError("residues must lie in [0, modulus)")
        if any(a >= b for a, b in zip(m, m[1:])):
            raise ValueError("residues must be sorted and distinct")

    def __len__(self):
        return len(self.members)

    def __contains__(self, n):
        return n % self.modulus in set(self.members)

    def indicator(self) -> np.ndarray:
        out = np.zeros(self.modulus, dtype=bool)
        out[list(self.members)] = True
        return out

    def complement(self) -> "ResidueSet":
        mine = set(self.members)
        return ResidueSet(self.modulus, tuple(r for r in range(self.modulus) if r not in mine))


def squares_mod(q: int) -> ResidueSet:
    """The set of squares modulo ``q``."""
    if q < 1:
        raise ValueError("modulus must be positive")
    k = np.arange(q, dtype=object if q > 3_000_000_000 else np.int64)
    vals = np.unique((k * k) % q)
    return ResidueSet(q, tuple(int(v) for v in vals))
