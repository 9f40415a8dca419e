"""Trigonometric polynomials T(f, x) = sum_n f(n) e(nx), bulk evaluation over
Z/UZ, large spectra, moments and empirical Lambda(p) constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .circle import as_point
from .errors import ResourceLimitError

MAX_DFT_LENGTH = 1 << 27
TIE_RTOL = 1e-12


class SupportedFunction:
    """A finitely supported complex function on the positive integers."""

    def __init__(self, weights: Mapping[int, complex]):
        items = sorted((int(n), complex(w)) for n, w in weights.items() if w != 0)
        if any(n < 1 for n, _ in items):
            raise ValueError("support must consist of positive integers")
        self.support = np.array([n for n, _ in items], dtype=np.int64)
        self.weights = np.array([w for _, w in items], dtype=complex)
        self.norm2sq = math.fsum(abs(w) ** 2 for _, w in items)
        self.norm1 = math.fsum(abs(w) for _, w in items)

    @classmethod
    def indicator(cls, S: Iterable[int]) -> "SupportedFunction":
        return cls({int(n): 1.0 for n in S})

    def __len__(self):
        return int(self.support.size)

    def __repr__(self):
        return f"SupportedFunction(|S|={len(self)}, norm2sq={self.norm2sq:.6g})"

    def as_dict(self) -> dict[int, complex]:
        return dict(zip(self.support.tolist(), self.weights.tolist()))

    def is_indicator(self) -> bool:
        return bool(np.all(self.weights == 1))


def _exact_phases(ns: np.ndarray, x: Fraction) -> np.ndarray:
    """``(n * x) mod 1`` as floats, reduced in exact integer arithmetic."""
    a, q = x.numerator, x.denominator
    if q < 1 << 31 and (ns.size == 0 or int(ns.max()) < 1 << 62):
        r = ((ns % q) * a) % q
        return r / q
    return np.array([((int(n) * a) % q) / q for n in ns], dtype=float)


def _point_fraction(x) -> Fraction:
    p = as_point(x)
    return p.value if p.exact else Fraction(p.value)


def _fsum_complex(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def trig_poly(f: SupportedFunction, x) -> complex:
    """``T(f, x)`` with exact phase reduction and compensated summation."""
    ph = _exact_phases(f.support, _point_fraction(x))
    return _fsum_complex(f.weights * np.exp(2j * np.pi * ph))


def trig_poly_all(f: SupportedFunction, U: int) -> np.ndarray:
    """``[T(f, u/U) for u in range(U)]`` by residue bucketing and one DFT."""
    if U < 1:
        raise ValueError("modulus must be positive")
    if U > MAX_DFT_LENGTH:
        raise ResourceLimitError(f"DFT length {U} exceeds {MAX_DFT_LENGTH}")
    r = f.support % U
    buckets = np.bincount(r, weights=f.weights.real, minlength=U) + 1j * np.bincount(
        r, weights=f.weights.imag, minlength=U
    )
    # sum_r b[r] e(ru/U) = U * ifft(b)[u]; numpy handles any length (Bluestein for primes)
    return np.fft.ifft(buckets) * U


@dataclass(frozen=True)
class SpectrumResult:
    modulus: int
    threshold: float
    entries: tuple[tuple[int, float], ...] = field(default=())

    def frequencies(self) -> list[int]:
        return [u for u, _ in self.entries]

    def __len__(self):
        return len(self.entries)


def spectrum(f: SupportedFunction, U: int, A: float, values: np.ndarray | None = None) -> SpectrumResult:
    """Frequencies ``u mod U`` with ``|T(f, u/U)| >= ||f||_1 / A``.

    Comparison is on squared moduli; values within ``TIE_RTOL`` of the
    threshold count as reaching it.
    """
    if A < 1:
        raise ValueError("A must be at least 1")
    T = trig_poly_all(f, U) if values is None else values
    thr = f.norm1 / A
    mod2 = T.real**2 + T.imag**2
    keep = np.flatnonzero(mod2 >= thr**2 * (1 - TIE_RTOL))
    return SpectrumResult(U, thr, tuple((int(u), float(math.sqrt(mod2[u]))) for u in keep))


def coefficient_sum(coeffs: Mapping, ns: np.ndarray) -> np.ndarray:
    """``g(n) = sum_x c(x) e(nx)`` for each integer ``n`` in ``ns``."""
    ns = np.asarray(ns, dtype=np.int64)
    out = np.zeros(ns.size, dtype=complex)
    for x, c in coeffs.items():
        out += complex(c) * np.exp(2j * np.pi * _exact_phases(ns, _point_fraction(x)))
    return out


def values_on_points(f: SupportedFunction, X) -> np.ndarray:
    return np.array([trig_poly(f, x) for x in X], dtype=complex)


def moment(obj, eval_set, p: float) -> float:
    """p-th moment of a trigonometric polynomial, by direct summation.

    * ``obj`` a :class:`SupportedFunction` and ``eval_set`` a point set:
      ``sum_x |T(f, x)|^p``.
    * ``obj`` a :class:`SupportedFunction` and ``eval_set`` an int ``U``:
      ``sum_{u mod U} |T(f, u/U)|^p``.
    * ``obj`` a mapping point -> coefficient and ``eval_set`` integers:
      ``sum_n |sum_x c(x) e(nx)|^p``.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if isinstance(obj, SupportedFunction):
        if isinstance(eval_set, (int, np.integer)):
            vals = np.abs(trig_poly_all(obj, int(eval_set)))
        else:
            vals = np.abs(values_on_points(obj, eval_set))
    else:
        vals = np.abs(coefficient_sum(obj, np.asarray(list(eval_set))))
    return math.fsum((vals**p).tolist())


def lambda_p_constant(f: SupportedFunction, U: int, p: float) -> float:
    """Empirical ratio ``||T||_p / ||T||_2`` with normalized counting on Z/UZ.

    The frequencies are the support of ``f`` reduced mod U and the
    coefficients its weights.
    """
    vals = np.abs(trig_poly_all(f, U))
    lp = (math.fsum((vals**p).tolist()) / U) ** (1 / p)
    l2 = math.sqrt(math.fsum((vals**2).tolist()) / U)
    return lp / l2
