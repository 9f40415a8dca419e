"""Selberg's band-limited majorant of an interval.

Beurling's entire function

    B(z) = (sin(pi z)/pi)^2 * ( sum_{n>=0} (z-n)^-2 - sum_{n>=1} (z+n)^-2 + 2/z )

satisfies B >= sgn, has Fourier transform supported in [-1, 1] and
``integral(B - sgn) = 1``.  For the interval [M, M+N] and bandwidth delta,

    psi(t) = (B(delta (t - M)) + B(delta (M + N - t))) / 2

is non-negative, at least 1 on the interval, band-limited to [-delta, delta]
and has mass ``N + 1/delta``.

Using ``sum_n (z-n)^-2 = pi^2 / sin^2(pi z)`` the series is folded so that
only a one-sided trigamma sum with a positive shift remains:

    B(z) =  1 + s(z) (2/z - 2 psi1(1 + z))    for z >= 0
    B(z) = -1 + s(z) (2/z + 2 psi1(-z))       for z < 0

with ``s(z) = sin(pi z)^2 / pi^2``; for z < 0 the first term of ``psi1(-z)``
is taken out as ``sinc(z)^2``.  ``psi1(a)`` is summed over its first K
terms and the remainder is replaced by its Euler-Maclaurin expansion to
order a^-3; the omitted part is at most ``1/(30 m^5)`` with ``m = K + a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError

DEFAULT_K = 256
_CHUNK = 1 << 13
# allowance for float64 rounding in one evaluation of psi
ROUNDING_SLACK = 1e-13


def _trigamma_shifted(a: np.ndarray, K: int) -> np.ndarray:
    """``sum_{n>=0} (n + a)^-2`` for ``a > 0``: K explicit terms plus tail."""
    n = np.arange(K, dtype=float)
    out = np.empty_like(a)
    for i in range(0, a.size, _CHUNK):
        blk = a[i : i + _CHUNK]
        head = (1.0 / (blk[:, None] + n[None, :]) ** 2).sum(axis=1)
        m = blk + K
        out[i : i + _CHUNK] = head + 1.0 / m + 0.5 / m**2 + 1.0 / (6.0 * m**3)
    return out


def beurling(z, K: int = DEFAULT_K) -> np.ndarray:
    """Beurling's function evaluated with a K-term series."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    s = np.sin(np.pi * z) ** 2 / np.pi**2
    # s/z written without the division, finite for subnormal z
    s_over_z = np.sinc(z) * np.sin(np.pi * z) / np.pi
    out = np.ones_like(z)
    pos = z > 0
    neg = z < 0
    if pos.any():
        zp = z[pos]
        out[pos] = 1.0 + 2.0 * s_over_z[pos] - 2.0 * s[pos] * _trigamma_shifted(1.0 + zp, K)
    if neg.any():
        zn = z[neg]
        # the n = 0 term s/z^2 is sinc(z)^2, split off to avoid overflow near 0
        out[neg] = -1.0 + 2.0 * np.sinc(zn) ** 2 + 2.0 * s_over_z[neg] + 2.0 * s[neg] * _trigamma_shifted(1.0 - zn, K)
    return out


@dataclass(frozen=True)
class SelbergMajorant:
    M: float
    N: float
    delta: float
    K: int = DEFAULT_K

    @property
    def mass(self) -> float:
        """Integral of psi, equal to ``N + 1/delta``."""
        return self.N + 1.0 / self.delta

    @property
    def tail_bound(self) -> float:
        """Bound on ``|computed psi - psi|`` at any point.

        Each B carries at most ``s * 2 / (30 K^5) <= 1/(15 pi^2 K^5)`` of
        truncation error; psi averages two of them.
        """
        return 1.0 / (15.0 * math.pi**2 * self.K**5) + ROUNDING_SLACK

    def __call__(self, t):
        return evaluate(self, t)

    def envelope(self, t) -> np.ndarray:
        """Explicit upper bound for psi at points outside [M, M+N].

        Uses ``B(u) - 1 <= s/u^2`` for u > 0 and
        ``B(u) + 1 <= s (1/w^2 + 1/(3 w^3))`` with ``w = -u > 0``, ``s <= 1/pi^2``.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a, b = self.M, self.M + self.N
        if np.any((t >= a) & (t <= b)):
            raise ValueError("envelope is only defined outside the interval")
        near = np.where(t > b, t - b, a - t) * self.delta
        far = np.where(t > b, t - a, b - t) * self.delta
        return (1.0 / far**2 + 1.0 / near**2 + 1.0 / (3.0 * near**3)) / (2.0 * math.pi**2)

    def decay_constant(self, t) -> float:
        """``max (1 + t^2) * envelope(t)`` over the given outside points."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return float(((1.0 + t**2) * self.envelope(t)).max())

    def envelope_integral(self, W: float) -> float:
        """Bound on ``integral_{|t - c| > W} psi`` with c the interval midpoint."""
        half = self.N / 2
        if W <= half:
            return math.inf
        near = (W - half) * self.delta
        far = (W + half) * self.delta
        one_side = (1.0 / far + 1.0 / near + 1.0 / (6.0 * near**2)) / (2.0 * math.pi**2 * self.delta)
        return 2.0 * one_side


def construct(M: float, N: float, delta: float, K: int = DEFAULT_K) -> SelbergMajorant:
    if N <= 0 or delta <= 0:
        raise ValueError("N and delta must be positive")
    if K < 8:
        raise ValueError("series cutoff K must be at least 8")
    return SelbergMajorant(float(M), float(N), float(delta), int(K))


def evaluate(psi: SelbergMajorant, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    u = psi.delta * (t - psi.M)
    v = psi.delta * (psi.M + psi.N - t)
    out = 0.5 * (beurling(u.ravel(), psi.K) + beurling(v.ravel(), psi.K))
    return out.reshape(t.shape) if t.shape else float(out[0])


def fourier_mass_check(
    psi: SelbergMajorant,
    alpha: float,
    quadrature_step: float,
    rel_tol: float = 1e-6,
    max_points: int = 1 << 24,
) -> tuple[complex, float]:
    """Numerical ``psi_hat(alpha) = integral psi(t) e(-alpha t) dt``.

    The trapezoid rule with step h on the whole line is exact for a function
    band-limited to [-delta, delta] as long as ``1/h > delta + |alpha|``
    (no aliasing), so the only error is the truncated window, bounded via
    :meth:`SelbergMajorant.envelope_integral`.  Returns ``(value, error_bound)``.
    """
    h = float(quadrature_step)
    need = 1.0 / (psi.delta + abs(alpha))
    if h <= 0 or h >= need:
        raise AccuracyError(f"quadrature step must be below {need:.6g} to avoid aliasing", required=need)
    budget = rel_tol * psi.mass
    W = psi.N / 2 + 1.0 / psi.delta
    while psi.envelope_integral(W) + 2 * W * psi.tail_bound > budget:
        W *= 1.5
        if 2 * W / h > max_points:
            raise AccuracyError(
                f"window {W:.3g} at step {h} exceeds {max_points} points", required=2 * W / max_points
            )
    c = psi.M + psi.N / 2
    k = np.arange(-math.ceil(W / h), math.ceil(W / h) + 1)
    total = 0j
    for i in range(0, k.size, 1 << 16):
        t = c + h * k[i : i + (1 << 16)]
        vals = evaluate(psi, t)
        ph = np.exp(-2j * np.pi * ((alpha * t) % 1.0))
        total += complex(np.sum(vals * ph))
    err = psi.envelope_integral(W) + 2 * W * psi.tail_bound + 1e-12 * psi.mass
    return h * total, err


def integer_sum(psi: SelbergMajorant, rel_tol: float = 1e-6) -> tuple[float, float]:
    """``sum_{n in Z} psi(n)`` with a certified truncation bound."""
    budget = rel_tol * psi.mass
    W = psi.N / 2 + 1.0 / psi.delta
    while psi.envelope_integral(W - 1) + 2 * W * psi.tail_bound > budget:
        W *= 1.5
    c = psi.M + psi.N / 2
    n = np.arange(math.floor(c - W), math.ceil(c + W) + 1)
    total = math.fsum(float(v) for v in np.atleast_1d(evaluate(psi, n)))
    # the envelope is decreasing outside the interval, so its integral from
    # one unit further in dominates the discrete tail
    return total, psi.envelope_integral(W - 1) + n.size * psi.tail_bound


def sample_csv_rows(psi: SelbergMajorant, t_min: float, t_max: float, samples: int):
    t = np.linspace(t_min, t_max, samples)
    return list(zip(t.tolist(), np.atleast_1d(evaluate(psi, t)).tolist()))
