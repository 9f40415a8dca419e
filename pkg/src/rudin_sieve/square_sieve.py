"""Selberg sieve for the squares.

Moduli are odd and squarefree throughout.  With ``K_q`` the squares mod q and
``h`` the multiplicative function with ``h(2) = 0`` and
``h(p) = (p-1)/(p+1)``:

    G#(z)      = sum_{q <= z} h(q)
    lambda#_q  = (q/|K_q|) * sum_{d <= z, q | d} mu(d/q) / G#(z)
    lambda_l   = mu(l) (1*h)(l) sum_{m <= z/l, (m, l) = 1} h(m) / G#(z)

where ``d`` and ``m`` also run over odd squarefree integers.  Then
``sum_q lambda#_q = 1`` and

    beta_z(n) = (sum_{q : n in K_q} lambda#_q)^2 = (sum_l lambda_l 1_{Omega_l}(n))^2

is a non-negative majorant of the squares, equal to 1 on them.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .arith import FactorTable, build_factor_table, primes_upto, squares_mod
from .errors import OutOfRangeError, ResourceLimitError

FOURIER_CAP = 500
SCALE_BITS = 40
MAX_SEGMENT = 1 << 22
ASSERTED_RATIO_FLOOR = 0.304
LARGE_Z = 10**8
LARGE_Z_FLOOR = 0.326


def _odd_squarefree(zq: int, table: FactorTable) -> list[int]:
    return [q for q in range(1, zq + 1, 2) if q == 1 or table.is_squarefree(q)]


def _h(q: int, table: FactorTable) -> Fraction:
    return math.prod((Fraction(p - 1, p + 1) for p in table.prime_factors(q)), start=Fraction(1))


def _one_star_h(q: int, table: FactorTable) -> Fraction:
    return math.prod((Fraction(2 * p, p + 1) for p in table.prime_factors(q)), start=Fraction(1))


def _table_for(z, table):
    zq = math.floor(z)
    if zq < 1:
        raise ValueError("z must be at least 1")
    if table is None:
        table = build_factor_table(max(zq, 2))
    if zq > table.limit:
        raise OutOfRangeError(f"level {z} exceeds table limit {table.limit}")
    return zq, table


def g_sharp(z: float, table: FactorTable | None = None) -> Fraction:
    """``G#(z)``: sum of ``h(q)`` over odd squarefree ``q <= z``, exactly."""
    zq, table = _table_for(z, table)
    return sum((_h(q, table) for q in _odd_squarefree(zq, table)), Fraction(0))


# ---------------------------------------------------------------------------
# streaming scan of G#(z)/z


def _h_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Float64 ``h(n)`` for ``lo <= n < hi``, each correctly rounded.

    ``h(n) = prod(p-1) / prod(p+1)`` with both products exact in int64, so the
    single division is the only rounding.
    """
    n = np.arange(lo, hi, dtype=np.int64)
    rem = n.copy()
    num = np.ones(hi - lo, dtype=np.int64)
    den = np.ones(hi - lo, dtype=np.int64)
    ok = (n % 2 == 1) & (n >= 1)
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        if p == 2:
            continue
        s = (-lo) % p
        rem[s::p] //= p
        num[s::p] *= p - 1
        den[s::p] *= p + 1
        ok[(-lo) % (p * p) :: p * p] = False
    big = rem > 1
    num[big] *= rem[big] - 1
    den[big] *= rem[big] + 1
    return np.where(ok, num / den, 0.0)


@dataclass
class ScanSummary:
    limit: int
    min_ratio: float
    argmin: int
    min_g_fixed: int
    scale_bits: int
    error_bound: float  # on every G#(z)/z, hence on the minimum
    g_error_at_limit: float
    exact_arithmetic: bool
    g_at_limit: float
    large_z_min_ratio: float | None = None
    large_z_argmin: int | None = None
    windowed: dict = field(default_factory=dict)

    @property
    def claim_holds(self) -> bool:
        """The recorded bound ``G#(z)/z >= 0.304`` over the whole scan."""
        return self.min_ratio >= ASSERTED_RATIO_FLOOR

    @property
    def large_z_holds(self) -> bool | None:
        if self.large_z_min_ratio is None:
            return None
        return self.large_z_min_ratio >= LARGE_Z_FLOOR

    def to_json(self) -> dict:
        return {
            "limit": self.limit,
            "min_ratio": self.min_ratio,
            "argmin": self.argmin,
            "ratio_error_bound": self.error_bound,
            "g_sharp_error_at_limit": self.g_error_at_limit,
            "exact_arithmetic": self.exact_arithmetic,
            "g_sharp_at_limit": self.g_at_limit,
            "claim_min_ratio_ge_0_304": self.claim_holds,
            "large_z_min_ratio": self.large_z_min_ratio,
            "large_z_argmin": self.large_z_argmin,
            "large_z_ge_0_326": self.large_z_holds,
            "windowed_minima": {str(k): v for k, v in self.windowed.items()},
        }


def iter_g_sharp(
    limit: int, segment: int = 1 << 20, exact: bool = True
) -> Iterator[tuple[np.ndarray, np.ndarray, int]]:
    """Yield ``(z, G#(z), offset)`` blocks for ``1 <= z <= limit``.

    With ``exact`` each ``h(n)`` is truncated to a multiple of 2^-40 and
    accumulated in integers: the block carries int64 partial sums and
    ``offset`` (a Python int) must be added to obtain ``2^40 * G#``.  The
    truncation costs at most ``2^-40 + 2^-53`` per term.  Without ``exact`` the
    block holds float64 running sums and ``offset`` is 0.
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    segment = min(segment, MAX_SEGMENT)
    base = primes_upto(math.isqrt(limit) + 1)
    offset = 0
    fsum = 0.0
    for lo in range(1, limit + 1, segment):
        hi = min(lo + segment, limit + 1)
        h = _h_segment(lo, hi, base)
        z = np.arange(lo, hi, dtype=np.int64)
        if exact:
            fixed = np.floor(h * float(1 << SCALE_BITS)).astype(np.int64)
            cs = np.cumsum(fixed)
            yield z, cs, offset
            offset += int(cs[-1])
        else:
            cs = np.cumsum(h) + fsum
            yield z, cs, 0
            fsum = float(cs[-1])


def g_sharp_scan(
    limit: int,
    segment: int = 1 << 20,
    exact: bool = True,
    windows: tuple[int, ...] = (100,),
    on_block=None,
) -> ScanSummary:
    """Minimum of ``G#(z)/z`` over integers ``1 <= z <= limit``.

    Ties keep the first (smallest) ``z``.  ``windows`` lists extra lower
    cut-offs ``w`` for which the minimum over ``w <= z <= limit`` is reported.
    ``on_block(z, ratio, running_min, argmin_so_far, g)`` receives float rows.
    """
    scale = float(1 << SCALE_BITS)
    best = None  # (G_fixed or float, z)
    large = None
    win = {w: None for w in windows}
    running, run_arg = math.inf, 0
    count = 0
    last_g = 0.0

    def better(cand, cur):
        if cur is None:
            return True
        return cand[0] * cur[1] < cur[0] * cand[1]

    def exact_min(z, g_int, ratio, sel):
        # refine a float argmin over the rows in ``sel`` with exact comparisons
        if not sel.any():
            return None
        r = ratio[sel]
        close = np.flatnonzero(sel)[r <= r.min() * (1 + 1e-12)]
        out = None
        for i in close:
            cand = (g_int(i), int(z[i]))
            if better(cand, out):
                out = cand
        return out

    for z, cs, offset in iter_g_sharp(limit, segment, exact):
        count += z.size
        if exact:
            g_float = (float(offset) + cs.astype(float)) / scale
            g_int = lambda i, cs=cs, offset=offset: offset + int(cs[i])
        else:
            g_float = cs
            g_int = lambda i, cs=cs: float(cs[i])
        ratio = g_float / z
        cand = exact_min(z, g_int, ratio, np.ones(z.size, dtype=bool))
        if better(cand, best):
            best = cand
        if z[-1] >= LARGE_Z:
            c = exact_min(z, g_int, ratio, z >= LARGE_Z)
            if better(c, large):
                large = c
        for w in win:
            if z[-1] >= w:
                c = exact_min(z, g_int, ratio, z >= w)
                if better(c, win[w]):
                    win[w] = c
        if on_block is not None:
            prev = np.r_[running, np.minimum.accumulate(ratio)[:-1]]
            prev = np.minimum(prev, running)
            rec = ratio < prev
            arg = np.maximum.accumulate(np.where(rec, z, 0))
            arg = np.where(arg == 0, run_arg, arg)
            runmin = np.minimum(np.minimum.accumulate(ratio), running)
            on_block(z, ratio, runmin, arg, g_float)
            running, run_arg = float(runmin[-1]), int(arg[-1])
        last_g = float(g_float[-1])

    def as_ratio(pair):
        g, zz = pair
        return float(Fraction(g) / (zz * (1 << SCALE_BITS))) if exact else g / zz

    # |G#(z) - 2^-40 G_fixed(z)| <= z (2^-40 + 2^-53), so the ratio error is uniform
    step = 2.0**-SCALE_BITS + 2.0**-53
    err = step if exact else math.nan
    return ScanSummary(
        limit=limit,
        min_ratio=as_ratio(best),
        argmin=best[1],
        min_g_fixed=best[0] if exact else 0,
        scale_bits=SCALE_BITS,
        error_bound=err,
        g_error_at_limit=count * step if exact else math.nan,
        exact_arithmetic=exact,
        g_at_limit=last_g,
        large_z_min_ratio=None if large is None else as_ratio(large),
        large_z_argmin=None if large is None else large[1],
        windowed={w: None if v is None else {"min_ratio": as_ratio(v), "argmin": v[1]} for w, v in win.items()},
    )


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class SquareSieveSystem:
    z: float
    moduli: tuple[int, ...]
    lambda_sharp: dict
    lambda_classical: dict
    G_sharp: Fraction
    primes_of: dict  # q -> tuple of prime factors

    @property
    def odd_primes(self) -> list[int]:
        return sorted({p for ps in self.primes_of.values() for p in ps})


def build_square_sieve(z: float, table: FactorTable | None = None) -> SquareSieveSystem:
    zq, table = _table_for(z, table)
    qs = _odd_squarefree(zq, table)
    primes_of = {q: tuple(table.prime_factors(q)) if q > 1 else () for q in qs}
    h = {q: _h(q, table) for q in qs}
    G = sum(h.values(), Fraction(0))
    sharp = {}
    for q in qs:
        s = 0
        for d in qs[bisect.bisect_left(qs, q) :]:
            if d % q == 0:
                s += (-1) ** len(primes_of[d // q])
        sharp[q] = _one_star_h(q, table) * s / G
    classical = {}
    for l in qs:
        m_max = zq // l
        tail = sum((h[m] for m in qs[: bisect.bisect_right(qs, m_max)] if math.gcd(m, l) == 1), Fraction(0))
        classical[l] = (-1) ** len(primes_of[l]) * _one_star_h(l, table) * tail / G
    return SquareSieveSystem(z, tuple(qs), sharp, classical, G, primes_of)


def _residue_flags(ns: np.ndarray, primes: list[int]) -> np.ndarray:
    """``flags[i, j]`` is True when ``ns[i]`` is a square modulo ``primes[j]``."""
    flags = np.empty((ns.size, len(primes)), dtype=bool)
    for j, p in enumerate(primes):
        flags[:, j] = squares_mod(p).indicator()[ns % p]
    return flags


def beta_square_many(ns, sys: SquareSieveSystem, method: str = "sharp") -> list[Fraction]:
    """Exact ``beta_z(n)`` for each ``n`` in ``ns``.

    Both sums depend on ``n`` only through which primes ``p <= z`` have ``n``
    square mod p, so values are computed once per distinct pattern.
    """
    if method not in ("sharp", "classical"):
        raise ValueError(f"unknown method {method!r}")
    ns = np.asarray(list(ns), dtype=np.int64)
    if np.any(ns < 0):
        raise ValueError("n must be non-negative")
    primes = sys.odd_primes
    col = {p: j for j, p in enumerate(primes)}
    flags = _residue_flags(ns, primes)
    rows, inverse = np.unique(flags, axis=0, return_inverse=True) if primes else (np.zeros((1, 0), bool), np.zeros(ns.size, int))
    vals = []
    for row in rows:
        if method == "sharp":
            s = sum(
                (lam for q, lam in sys.lambda_sharp.items() if all(row[col[p]] for p in sys.primes_of[q])),
                Fraction(0),
            )
        else:
            s = sum(
                (lam for l, lam in sys.lambda_classical.items() if not any(row[col[p]] for p in sys.primes_of[l])),
                Fraction(0),
            )
        vals.append(s * s)
    return [vals[i] for i in np.ravel(inverse)]


def beta_square(n: int, sys: SquareSieveSystem, method: str = "sharp") -> Fraction:
    return beta_square_many([n], sys, method)[0]


def _check_modulus(q: int):
    if q < 1 or q % 2 == 0 or any(q % (p * p) == 0 for p in range(3, math.isqrt(q) + 1, 2)):
        raise ValueError(f"modulus {q} is not odd and squarefree")


def eta(q: int, a: int) -> complex:
    """``eta(q; a) = sum_{k in K_q} e(-k a / q)``."""
    _check_modulus(q)
    ks = np.array(squares_mod(q).members, dtype=np.int64)
    ph = ((ks * (a % q)) % q) / q
    z = np.exp(-2j * np.pi * ph)
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def eta_all(q: int) -> np.ndarray:
    """``[eta(q; a) for a in range(q)]`` as one DFT of the indicator of K_q."""
    _check_modulus(q)
    return np.fft.fft(squares_mod(q).indicator().astype(float))


def indicator_from_eta(q: int, normalized: bool = True) -> np.ndarray:
    """Rebuild ``1_{K_q}(n)``, n mod q, from the primitive-character display.

    ``1_{K_q}(n) = (1/q) sum_{d | q} sum_{b mod* d} eta(q; b q / d) e(n b / d)``.
    With ``normalized=False`` the ``1/q`` is dropped, which returns
    ``q * 1_{K_q}``.
    """
    et = eta_all(q)
    n = np.arange(q)
    out = np.zeros(q, dtype=complex)
    for d in (d for d in range(1, q + 1) if q % d == 0):
        for b in range(1, d + 1):
            if math.gcd(b, d) == 1:
                out += et[(b * (q // d)) % q] * np.exp(2j * np.pi * ((n * b) % d) / d)
    return out / q if normalized else out


@dataclass
class FourierWeightTable:
    """``w_d(K, b/d)`` stored per ``d`` as a length-d array indexed by ``b mod d``.

    Only ``b`` coprime to ``d`` carry weight; ``b = d`` is stored at index 0
    and only matters for ``d = 1``.
    """

    z: float
    weights: dict = field(default_factory=dict)

    def items(self):
        for d in sorted(self.weights):
            arr = self.weights[d]
            for b in range(1, d + 1):
                if math.gcd(b, d) == 1:
                    yield (d, b), complex(arr[b % d])

    def __len__(self):
        return sum(1 for _ in self.items())

    def evaluate(self, ns) -> np.ndarray:
        """``sum_d sum_{b mod* d} w_d(b) e(n b / d)`` for each ``n``."""
        ns = np.asarray(ns, dtype=np.int64)
        out = np.zeros(ns.size, dtype=complex)
        for d, w in self.weights.items():
            g = np.fft.ifft(w) * d  # g[r] = sum_b w[b] e(r b / d)
            out += g[ns % d]
        return out


def fourier_weights(sys: SquareSieveSystem, cap: float = FOURIER_CAP) -> FourierWeightTable:
    """Fourier expansion of ``beta_z`` over fractions ``b/d`` with ``d <= z^2``.

    ``w_d(b) = sum_{q1, q2 : d | [q1, q2]} lambda#_q1 lambda#_q2 / [q1, q2]
    * eta([q1, q2]; b [q1, q2] / d)``, grouped by the lcm ``L = [q1, q2]``.
    """
    if sys.z > cap:
        raise ResourceLimitError(f"Fourier weights limited to z <= {cap}")
    coef = {}
    lam = sys.lambda_sharp
    for q1 in sys.moduli:
        for q2 in sys.moduli:
            L = math.lcm(q1, q2)
            coef[L] = coef.get(L, Fraction(0)) + lam[q1] * lam[q2]
    weights = {}
    for L, c in coef.items():
        if c == 0:
            continue
        et = eta_all(L) * (float(c) / L)
        for d in (d for d in range(1, L + 1) if L % d == 0):
            acc = weights.setdefault(d, np.zeros(d, dtype=complex))
            acc += et[:: L // d]
    for d, acc in weights.items():
        b = np.arange(d)
        acc[np.gcd(b, d) != 1] = 0
    return FourierWeightTable(sys.z, weights)


def main_term(sys: SquareSieveSystem) -> Fraction:
    """``sum_{q1, q2} |K_[q1,q2]| / [q1, q2] * lambda#_q1 lambda#_q2``."""
    total = Fraction(0)
    size = {}
    for q1 in sys.moduli:
        for q2 in sys.moduli:
            L = math.lcm(q1, q2)
            if L not in size:
                size[L] = math.prod((p + 1) // 2 for p in set(sys.primes_of[q1]) | set(sys.primes_of[q2]))
            total += Fraction(size[L], L) * sys.lambda_sharp[q1] * sys.lambda_sharp[q2]
    return total


def _fmt(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def to_json(sys: SquareSieveSystem) -> dict:
    return {
        "z": sys.z,
        "G_sharp": _fmt(sys.G_sharp),
        "G_sharp_float": float(sys.G_sharp),
        "lambda_sharp": {str(q): _fmt(v) for q, v in sys.lambda_sharp.items()},
        "lambda_classical": {str(l): _fmt(v) for l, v in sys.lambda_classical.items()},
    }
