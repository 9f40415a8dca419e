"""Dissociate covers of the large spectrum of a set of primes.

For a set S of primes, two distinct primes U1, U2 and U = U1 U2, the large
spectrum

    C = {u mod U : |sum_{p in S} e(pu/U)| >= |S|/A}

is projected to each Z/U_i.  A maximal dissociate subset D_i of the
projection is extracted greedily.  By maximality every projected point lies in
the signed span of D_i, so C is covered by the CRT lift of
span(D1) x span(D2).  The size of D_i is compared with
``30 A^2 log(8K) e^(U/N)``, ``K = N/(|S| log N)``, and with ``log U_i / log 2``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .arith import primes_upto
from .circle import CirclePoint, PointSet, greedy_dissociate, is_dissociate, is_dissociate_group
from .errors import DomainError
from .expsum import SupportedFunction, spectrum

BOUND_FACTOR = 30
LOG_FACTOR = 8


def crt_lift(u1: int, u2: int, U1: int, U2: int) -> int:
    """The residue mod ``U1 U2`` congruent to ``u1`` mod U1 and ``u2`` mod U2."""
    if math.gcd(U1, U2) != 1:
        raise ValueError("moduli must be coprime")
    return (u1 * U2 * pow(U2, -1, U1) + u2 * U1 * pow(U1, -1, U2)) % (U1 * U2)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))


def _residues(D: PointSet, m: int) -> list[int]:
    return sorted(int(p.value * m) for p in D)


def span_residues(D: list[int], m: int) -> np.ndarray:
    """Boolean mask over Z/m of the signed span of ``D``."""
    mask = np.zeros(m, dtype=bool)
    mask[0] = True
    for d in D:
        mask = mask | np.roll(mask, d) | np.roll(mask, -d)
    return mask


@dataclass
class ComponentReport:
    modulus: int
    projection_size: int
    D: list
    span_size: int
    maximal: bool
    contains_projection: bool
    log_bound: float
    within_theorem_bound: bool
    within_log_bound: bool


@dataclass
class ChangDecomposition:
    N: int
    U1: int
    U2: int
    U: int
    A: float
    K: float
    spectrum: list
    components: list
    containment_verified: bool
    bound_value: float
    conforming: bool
    elapsed: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def D1(self):
        return self.components[0].D

    @property
    def D2(self):
        return self.components[1].D

    @property
    def bound_holds(self) -> tuple[bool, bool]:
        return tuple(c.within_theorem_bound for c in self.components)

    def to_json(self) -> dict:
        out = asdict(self)
        out["spectrum_size"] = len(self.spectrum)
        out["spectrum_size_reference"] = self.A**2 * self.K * math.log(2 * self.A)
        out["bound_holds"] = list(self.bound_holds)
        return out


def _component(C: list[int], m: int, bound: float) -> ComponentReport:
    proj = sorted({u % m for u in C})
    P = PointSet([CirclePoint(Fraction(r, m)) for r in proj], cap=64)
    D = _residues(greedy_dissociate(P), m) if proj else []
    sp = span_residues(D, m)
    # maximality: every rejected residue must break dissociativity
    maximal = all(
        not is_dissociate(PointSet([CirclePoint(Fraction(d, m)) for d in D + [r]]))
        for r in proj
        if r not in D
    )
    log_bound = math.log(m) / math.log(2)
    return ComponentReport(
        modulus=m,
        projection_size=len(proj),
        D=D,
        span_size=int(sp.sum()),
        maximal=maximal,
        contains_projection=bool(all(sp[r] for r in proj)),
        log_bound=log_bound,
        within_theorem_bound=len(D) <= bound,
        within_log_bound=len(D) <= log_bound,
    )


def chang_decompose(S, N: int, U1: int, U2: int, A: float, override_window: bool = False) -> ChangDecomposition:
    """Spectrum of ``S`` mod ``U1 U2`` and its greedy dissociate cover.

    Outside the window ``U1, U2 in [N^(1/4), N^(3/4)]`` or with ``U < N`` the
    run is refused unless ``override_window`` is set, in which case the
    report is marked non-conforming.
    """
    t0 = time.perf_counter()
    S = sorted(set(int(p) for p in S))
    if not S:
        raise ValueError("S must be non-empty")
    if A < 1:
        raise ValueError("A must be at least 1")
    if U1 == U2 or not _is_prime(U1) or not _is_prime(U2):
        raise ValueError("U1 and U2 must be distinct primes")
    lo, hi = N**0.25, N**0.75
    notes = []
    if not (lo - 1e-9 <= U1 <= hi + 1e-9 and lo - 1e-9 <= U2 <= hi + 1e-9):
        notes.append(f"U1, U2 outside [N^(1/4), N^(3/4)] = [{lo:.4g}, {hi:.4g}]")
    if U1 * U2 < N:
        notes.append("U = U1 U2 is below N")
    if notes and not override_window:
        raise ValueError("; ".join(notes) + " (use the override flag for exploratory runs)")
    conforming = not notes
    primes = set(primes_upto(N).tolist())
    bad = [p for p in S if p not in primes or p < lo - 1e-9]
    if bad:
        raise DomainError(f"{bad[0]} is not a prime in [N^(1/4), N]")

    U = U1 * U2
    K = N / (len(S) * math.log(N))
    bound = BOUND_FACTOR * A**2 * math.log(LOG_FACTOR * K) * math.exp(U / N)
    C = spectrum(SupportedFunction.indicator(S), U, A).frequencies()
    comps = [_component(C, m, bound) for m in (U1, U2)]
    if bound <= 0:
        notes.append("log(8K) <= 0: the cardinality bound is degenerate")
    return ChangDecomposition(
        N=N,
        U1=U1,
        U2=U2,
        U=U,
        A=A,
        K=K,
        spectrum=C,
        components=comps,
        containment_verified=all(c.contains_projection for c in comps),
        bound_value=bound,
        conforming=conforming,
        elapsed=time.perf_counter() - t0,
        notes=notes,
    )


def lifted_cover(dec: ChangDecomposition) -> np.ndarray:
    """Mask over Z/U of the CRT lift of span(D1) x span(D2)."""
    s1 = span_residues(dec.D1, dec.U1)
    s2 = span_residues(dec.D2, dec.U2)
    u = np.arange(dec.U)
    return s1[u % dec.U1] & s2[u % dec.U2]


# ---------------------------------------------------------------------------
# dissociate sets in products do not split


def fibre_search(D, moduli: tuple[int, int]) -> dict:
    """Look for a dissociate ``A`` in the second factor with ``D`` inside
    ``pi_1(D) x A``, by trying every subset of the second factor."""
    m1, m2 = moduli
    first = sorted({g[0] % m1 for g in D})
    need = {g[1] % m2 for g in D}
    witnesses = []
    checked = 0
    for r in range(m2 + 1):
        for A in itertools.combinations(range(m2), r):
            checked += 1
            if need <= set(A) and is_dissociate_group([(a,) for a in A], (m2,)):
                witnesses.append(list(A))
    return {
        "D": [list(g) for g in D],
        "D_dissociate": is_dissociate_group([tuple(g) for g in D], moduli),
        "projection": first,
        "projection_dissociate": is_dissociate_group([(a,) for a in first], (m1,)),
        "required_second_coordinates": sorted(need),
        "subsets_checked": checked,
        "witnesses": witnesses,
    }


PRODUCT_EXAMPLE = ([(1, 1), (1, 4), (3, 2), (3, 3)], (5, 6))
