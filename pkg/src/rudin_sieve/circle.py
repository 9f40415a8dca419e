"""Points of R/Z, circle distance, signed subset sums and dissociativity.

A point is either an exact rational in [0, 1) or a float in [0, 1) carrying an
absolute tolerance ``eps``.  Signed sums of a set X are the 3^|X| values
``sum(e[x] * x)`` with ``e[x]`` in {-1, 0, 1}; they are enumerated with the
first point varying slowest, so the all-zero pattern sits in the middle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .arith import primorial
from .errors import DomainError, ResourceLimitError

DEFAULT_EPS = 1e-12
DEFAULT_CAP = 24
_MASK_LIMIT = 1 << 24

Number = Union[Fraction, float]
SignPattern = tuple  # one entry in {-1, 0, 1} per point, aligned with the set


@dataclass(frozen=True, order=False)
class CirclePoint:
    """A point of R/Z.  ``eps is None`` marks the exact rational form."""

    value: Number
    eps: float | None = None

    def __post_init__(self):
        v = self.value
        if isinstance(v, (int, Fraction)) and self.eps is None:
            object.__setattr__(self, "value", Fraction(v) % 1)
        else:
            eps = DEFAULT_EPS if self.eps is None else float(self.eps)
            if eps <= 0:
                raise ValueError("real points need a positive tolerance")
            object.__setattr__(self, "value", float(v) % 1.0)
            object.__setattr__(self, "eps", eps)

    @classmethod
    def rational(cls, a: int, q: int = 1) -> "CirclePoint":
        if q <= 0:
            raise ValueError("denominator must be positive")
        return cls(Fraction(a, q))

    @classmethod
    def real(cls, x: float, eps: float = DEFAULT_EPS) -> "CirclePoint":
        return cls(float(x), eps)

    @property
    def exact(self) -> bool:
        return self.eps is None

    def __float__(self):
        return float(self.value)

    def _combine(self, other, value):
        if self.exact and other.exact:
            return CirclePoint(value)
        eps = max(e for e in (self.eps, other.eps) if e is not None)
        return CirclePoint(float(value), eps)

    def __add__(self, other):
        other = as_point(other)
        if self.exact and other.exact:
            return CirclePoint(self.value + other.value)
        return self._combine(other, float(self.value) + float(other.value))

    def __neg__(self):
        return CirclePoint(-self.value, self.eps)

    def __sub__(self, other):
        return self + (-as_point(other))

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return CirclePoint(self.value * k, self.eps)

    __rmul__ = __mul__

    def __str__(self):
        if self.exact:
            v = self.value
            return f"{v.numerator}/{v.denominator}"
        return repr(self.value)


def as_point(x) -> CirclePoint:
    if isinstance(x, CirclePoint):
        return x
    if isinstance(x, str):
        return parse_point(x)
    return CirclePoint(x)


def parse_point(text: str, eps: float = DEFAULT_EPS) -> CirclePoint:
    """Parse ``"a/q"`` (exact) or a decimal literal (real)."""
    s = text.strip()
    if "/" in s:
        a, q = s.split("/")
        return CirclePoint.rational(int(a), int(q))
    if s.lstrip("+-").isdigit():
        return CirclePoint.rational(int(s))
    return CirclePoint.real(float(s), eps)


def parse_points(text: str, eps: float = DEFAULT_EPS) -> "PointSet":
    return PointSet([parse_point(t, eps) for t in text.split(",") if t.strip()])


def circle_norm(u) -> Number:
    """Distance from ``u`` to the nearest integer; lies in [0, 1/2]."""
    if isinstance(u, CirclePoint):
        v = u.value
    elif isinstance(u, float):
        v = u % 1.0
    else:
        v = Fraction(u) % 1
    return min(v, 1 - v)


class PointSet(Sequence):
    """A finite set of distinct circle points sharing one representation mode.

    ``cap`` bounds the size accepted by the 3^|X| enumerations; it does not
    limit construction (candidate pools for greedy extraction may be large).
    """

    def __init__(self, points: Iterable = (), cap: int = DEFAULT_CAP):
        pts = tuple(as_point(p) for p in points)
        modes = {p.exact for p in pts}
        if len(modes) > 1:
            raise ValueError("points must share one representation mode")
        self.points = pts
        self.cap = cap
        self.exact = modes != {False}
        self.eps = max((p.eps for p in pts), default=None) if not self.exact else None
        if self.exact:
            if len(set(pts)) != len(pts):
                raise ValueError("duplicate points")
        elif len(pts) > 1:
            vals = np.sort(np.array([p.value for p in pts]))
            gaps = np.append(np.diff(vals), 1.0 - vals[-1] + vals[0])
            if gaps.min() <= self.eps:
                raise ValueError("duplicate points within tolerance")

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __repr__(self):
        return "PointSet([" + ", ".join(str(p) for p in self.points) + "])"

    def __eq__(self, other):
        if isinstance(other, PointSet):
            return self.points == other.points
        return NotImplemented

    def __hash__(self):
        return hash(self.points)

    def denominator(self) -> int:
        """Common denominator of an exact set (1 for the empty set)."""
        self._need_exact()
        return math.lcm(1, *(p.value.denominator for p in self.points))

    def numerators(self) -> tuple[int, list[int]]:
        """``(Q, [a_x])`` with each point equal to ``a_x / Q``."""
        q = self.denominator()
        return q, [p.value.numerator * (q // p.value.denominator) for p in self.points]

    def floats(self) -> np.ndarray:
        return np.array([float(p.value) for p in self.points], dtype=float)

    def _need_exact(self):
        if not self.exact:
            raise DomainError("operation requires exact rational points")

    def check_cap(self, n=None):
        n = len(self) if n is None else n
        if n > self.cap:
            raise ResourceLimitError(f"|X| = {n} exceeds the enumeration cap {self.cap}")


def _as_set(X) -> PointSet:
    return X if isinstance(X, PointSet) else PointSet(X)


def _signed_sum_ints(nums: Sequence[int], q: int) -> np.ndarray:
    """All 3^n signed sums of ``nums`` modulo ``q`` (first entry slowest)."""
    obj = q >= 1 << 62
    arr = np.zeros(1, dtype=object if obj else np.int64)
    for a in nums:
        step = np.array([-a, 0, a], dtype=arr.dtype)
        arr = ((arr[:, None] + step[None, :]) % q).ravel()
    return arr


def _signed_sum_floats(vals: np.ndarray) -> np.ndarray:
    arr = np.zeros(1)
    for a in vals:
        arr = ((arr[:, None] + np.array([-a, 0.0, a])[None, :]) % 1.0).ravel()
    return arr


def _nonzero_mask(n: int) -> np.ndarray:
    mask = np.ones(3**n, dtype=bool)
    mask[(3**n - 1) // 2] = False
    return mask


def signed_sums(X) -> list[tuple[SignPattern, CirclePoint]]:
    """Every signed sum of ``X`` with its sign pattern, lexicographic in the pattern."""
    X = _as_set(X)
    X.check_cap()
    patterns = itertools.product((-1, 0, 1), repeat=len(X))
    if X.exact:
        q, nums = X.numerators()
        vals = [CirclePoint(Fraction(int(v), q)) for v in _signed_sum_ints(nums, q)]
    else:
        vals = [CirclePoint(float(v), X.eps) for v in _signed_sum_floats(X.floats())]
    return list(zip(patterns, vals))


def min_gap(X) -> Number:
    """Smallest circle distance between two distinct points of ``X``."""
    X = _as_set(X)
    if len(X) < 2:
        raise ValueError("min_gap needs at least two points")
    vals = sorted(p.value for p in X)
    gaps = [b - a for a, b in zip(vals, vals[1:])]
    gaps.append(1 - vals[-1] + vals[0])
    return min(gaps)


def delta_star(X) -> Number:
    """Minimum of ``||sum_A x - sum_B x||`` over distinct subsets ``A != B``.

    Returns 0 exactly when ``X`` is not dissociate (exact mode) and ``inf``
    for the empty set, where the minimum is over nothing.
    """
    X = _as_set(X)
    if len(X) == 0:
        return math.inf
    X.check_cap()
    mask = _nonzero_mask(len(X))
    if X.exact:
        q, nums = X.numerators()
        r = _signed_sum_ints(nums, q)[mask]
        best = int(np.minimum(r, q - r).min())
        return Fraction(best, q)
    y = _signed_sum_floats(X.floats())[mask]
    d = float(np.minimum(y, 1.0 - y).min())
    return 0.0 if d <= X.eps else d


def is_dissociate(X) -> bool:
    """True iff no non-trivial {0, +-1} combination of ``X`` vanishes."""
    X = _as_set(X)
    return len(X) == 0 or delta_star(X) > 0


def admissible_moduli(z, z0: int) -> list[int]:
    """Positive integers ``q <= z`` coprime to every prime below ``z0``."""
    P = primorial(z0)
    return [q for q in range(1, math.floor(z) + 1) if math.gcd(q, P) == 1]


def delta_star_arith(X, z, z0: int, method: str = "brute") -> Number:
    """Minimum distance from a non-trivial signed sum of ``X`` to a rational
    ``a/q`` with ``q <= z`` and ``q`` coprime to the primorial of ``z0``.

    ``method="brute"`` scans every admissible ``q``.  ``method="cf"`` takes, for
    each sum, its best rational approximation with denominator ``<= z`` via
    continued fractions; that path is exact only when no coprimality
    condition applies (``z0 == 2``) and otherwise defers to the scan.
    """
    X = _as_set(X)
    if z < 1:
        raise ValueError("z must be at least 1")
    if z0 < 2:
        raise ValueError("z0 must be at least 2")
    if len(X) == 0:
        return math.inf
    X.check_cap()
    if method == "cf" and z0 == 2:
        return _delta_arith_cf(X, math.floor(z))
    if method not in ("brute", "cf"):
        raise ValueError(f"unknown method {method!r}")
    qs = admissible_moduli(z, z0)
    mask = _nonzero_mask(len(X))
    if X.exact:
        Q, nums = X.numerators()
        r = _signed_sum_ints(nums, Q)[mask]
        r = np.unique(np.minimum(r, Q - r))
        best = None
        for q in qs:
            m = (r * q) % Q if q * Q < 1 << 62 else np.array([(int(v) * q) % Q for v in r], dtype=object)
            cand = Fraction(int(np.minimum(m, Q - m).min()), q * Q)
            if best is None or cand < best:
                best = cand
                if best == 0:
                    break
        return best
    y = _signed_sum_floats(X.floats())[mask]
    best = math.inf
    for q in qs:
        t = q * y
        best = min(best, float((np.abs(t - np.rint(t)) / q).min()))
    return 0.0 if best <= X.eps else best


def _delta_arith_cf(X: PointSet, zq: int) -> Number:
    if X.exact:
        Q, nums = X.numerators()
        r = _signed_sum_ints(nums, Q)[_nonzero_mask(len(X))]
        values = {Fraction(int(v), Q) for v in np.unique(np.minimum(r, Q - r))}
    else:
        y = _signed_sum_floats(X.floats())[_nonzero_mask(len(X))]
        values = {Fraction(float(v)) for v in np.unique(np.minimum(y, 1.0 - y))}
    best = min(abs(y - y.limit_denominator(zq)) for y in values)
    if X.exact:
        return best
    best = float(best)
    return 0.0 if best <= X.eps else best


def greedy_dissociate(C, cap: int | None = None) -> PointSet:
    """Maximal dissociate subset of ``C`` by first-fit in ascending order.

    A candidate ``c`` joins ``D`` iff it lies outside the signed span of ``D``;
    the span is kept incrementally.
    """
    C = _as_set(C)
    C._need_exact()
    cap = C.cap if cap is None else cap
    Q = C.denominator()
    cand = sorted({p.value for p in C})
    chosen = []
    if Q <= _MASK_LIMIT:
        span = np.zeros(Q, dtype=bool)
        span[0] = True
        for v in cand:
            c = v.numerator * (Q // v.denominator)
            if span[c]:
                continue
            chosen.append(v)
            if len(chosen) > cap:
                raise ResourceLimitError(f"dissociate subset exceeds cap {cap}")
            span = span | np.roll(span, c) | np.roll(span, -c)
    else:
        spanset = {0}
        for v in cand:
            c = v.numerator * (Q // v.denominator)
            if c in spanset:
                continue
            chosen.append(v)
            if len(chosen) > cap:
                raise ResourceLimitError(f"dissociate subset exceeds cap {cap}")
            spanset = spanset | {(s + c) % Q for s in spanset} | {(s - c) % Q for s in spanset}
    return PointSet([CirclePoint(v) for v in chosen], cap=C.cap)


def span(D) -> frozenset:
    """All signed sums of ``D``, deduplicated."""
    D = _as_set(D)
    if D.exact:
        return frozenset(p for _, p in signed_sums(D))
    vals = np.sort(_signed_sum_floats(D.floats()))
    keep = [vals[0]]
    for v in vals[1:]:
        if v - keep[-1] > D.eps:
            keep.append(v)
    if len(keep) > 1 and keep[0] + 1.0 - keep[-1] <= D.eps:
        keep.pop()
    return frozenset(CirclePoint(float(v), D.eps) for v in keep)


# Finite abelian groups Z/m1 x ... x Z/mk, elements as integer tuples.

def group_signed_sums(elements: Sequence[tuple[int, ...]], moduli: tuple[int, ...]) -> list:
    """``[(pattern, sum)]`` over all sign patterns, sums reduced componentwise."""
    out = []
    for eps in itertools.product((-1, 0, 1), repeat=len(elements)):
        s = tuple(
            sum(e * g[i] for e, g in zip(eps, elements)) % m for i, m in enumerate(moduli)
        )
        out.append((eps, s))
    return out


def is_dissociate_group(elements: Sequence[tuple[int, ...]], moduli: tuple[int, ...]) -> bool:
    zero = tuple(0 for _ in moduli)
    return not any(any(eps) and s == zero for eps, s in group_signed_sums(elements, moduli))
