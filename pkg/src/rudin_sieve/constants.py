"""Grid checks of the closed-form numerical inequalities used by the bounds.

* ``stirling``: the remainder ``theta(x)`` in
  ``Gamma(x+1) = sqrt(2 pi) x^(x+1/2) exp(-x + theta/(12x))`` lies in (0, 1).
* ``gamma_chain``: ``2^p Gamma(1 + p/2) <= sqrt(2 pi) 2^p (p/2)^((p+1)/2) e^(-p/2) e^(1/(6p))
  = sqrt(pi) 2^(p/2) p^((p+1)/2) e^(-p/2) e^(1/(6p)) <= (9/5 sqrt p)^p``.
* ``cosh_bounds``: ``e^(ty) <= ch y + t sh y`` for y >= 0, |t| <= 1, and ``ch y <= e^(y^2/2)``.
* ``corollary_c``: ``9 log(512 log(2) r K) / log(8K) <= 30 e^r`` for ``r = U/N >= 1``
  and ``K = N/(|S| log N) >= 1/1.25506``.

Margins are computed with mpmath at ``DPS`` digits, so the equality cases
(``y = 0``, ``t = +-1``, ``p`` where links coincide) are resolved exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import mpmath as mp
import numpy as np

DPS = 40
# equality cases are accepted when the margin is this small relative to the bound
EQUALITY_RTOL = mp.mpf(10) ** -30
# |S| <= pi(N) < 1.25506 N / log N
PI_BOUND = 1.25506

WHICH = ("stirling", "gamma_chain", "cosh_bounds", "corollary_c")


@dataclass
class ConstantsReport:
    which: str
    holds: bool
    min_margin: float
    worst_point: dict
    points: int
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


def stirling_theta(x) -> mp.mpf:
    """``theta(x) = 12x (log Gamma(x+1) - log sqrt(2 pi) - (x + 1/2) log x + x)``."""
    with mp.workdps(DPS):
        x = mp.mpf(x)
        return 12 * x * (mp.loggamma(x + 1) - mp.log(2 * mp.pi) / 2 - (x + mp.mpf(1) / 2) * mp.log(x) + x)


def gamma_chain_links(p) -> list:
    """Logarithms of the four quantities of the chain, in order."""
    with mp.workdps(DPS):
        p = mp.mpf(p)
        l0 = p * mp.log(2) + mp.loggamma(1 + p / 2)
        tail = -p / 2 + 1 / (6 * p)
        l1 = mp.log(2 * mp.pi) / 2 + p * mp.log(2) + (p + 1) / 2 * mp.log(p / 2) + tail
        l2 = mp.log(mp.pi) / 2 + p / 2 * mp.log(2) + (p + 1) / 2 * mp.log(p) + tail
        l3 = p * mp.log(mp.mpf(9) / 5 * mp.sqrt(p))
        return [l0, l1, l2, l3]


def gamma_integral(p) -> mp.mpf:
    """``integral_0^oo p e^(-t^2/4) t^(p-1) dt``, which equals ``2^p Gamma(1 + p/2)``."""
    with mp.workdps(DPS):
        p = mp.mpf(p)
        return mp.quad(lambda t: p * mp.exp(-t * t / 4) * t ** (p - 1), [0, 1, mp.inf])


def default_p_grid() -> list:
    return [1, 1.5] + list(range(2, 1001))


def corollary_c_value(r, K, log_factor: float = 512.0, literal_exp: bool = False):
    """Left side of the corollary constant bound at ``r = U/N`` and ``K``.

    ``log_factor = 512`` carries the ``1/kappa = 4`` of the prime-sieve
    constant at ``kappa = 1/4``; ``128`` drops it.  ``literal_exp`` reads the
    bound as ``9 exp(log(...)/log 8K)``.
    """
    with mp.workdps(DPS):
        q = mp.log(log_factor * mp.log(2) * mp.mpf(r) * mp.mpf(K)) / mp.log(8 * mp.mpf(K))
        return 9 * mp.exp(q) if literal_exp else 9 * q


def check_constants(which: str, **grid) -> ConstantsReport:
    if which not in WHICH:
        raise ValueError(f"unknown check {which!r}; choose from {', '.join(WHICH)}")
    return {
        "stirling": _stirling,
        "gamma_chain": _gamma_chain,
        "cosh_bounds": _cosh,
        "corollary_c": _corollary,
    }[which](**grid)


def _stirling(lo=0.1, hi=1e4, points=10**4):
    xs = np.geomspace(lo, hi, points)
    worst, wx, tmin, tmax = None, None, None, None
    for x in xs:
        th = stirling_theta(float(x))
        m = min(th, 1 - th)
        if worst is None or m < worst:
            worst, wx = m, float(x)
        tmin = th if tmin is None else min(tmin, th)
        tmax = th if tmax is None else max(tmax, th)
    return ConstantsReport(
        "stirling",
        bool(worst > 0),
        float(worst),
        {"x": wx},
        points,
        {"theta_min": float(tmin), "theta_max": float(tmax), "grid": [lo, hi]},
    )


def _gamma_chain(p_grid=None, integral_points=(1, 2, 3, 5, 10)):
    p_grid = default_p_grid() if p_grid is None else list(p_grid)
    worst, wp, link_gap = None, None, mp.mpf(0)
    first_margin, last_margin = [], []
    for p in p_grid:
        l0, l1, l2, l3 = gamma_chain_links(p)
        a, b = l1 - l0, l3 - l2
        first_margin.append(a)
        last_margin.append(b)
        link_gap = max(link_gap, abs(l1 - l2))
        m = min(a, b)
        if worst is None or m < worst:
            worst, wp = m, p
    resid = {}
    for p in integral_points:
        with mp.workdps(DPS):
            exact = mp.mpf(2) ** p * mp.gamma(1 + mp.mpf(p) / 2)
            resid[str(p)] = float(abs(gamma_integral(p) / exact - 1))
    return ConstantsReport(
        "gamma_chain",
        bool(worst > 0 and link_gap < EQUALITY_RTOL),
        float(worst),
        {"p": wp},
        len(p_grid),
        {
            "min_log_margin_stirling_link": float(min(first_margin)),
            "min_log_margin_final_link": float(min(last_margin)),
            "max_gap_between_equal_links": float(link_gap),
            "integral_identity_rel_residual": resid,
        },
    )


def _cosh(y_max=20.0, y_points=100, t_points=100):
    ys = np.linspace(0, y_max, y_points)
    ts = np.linspace(-1, 1, t_points)
    worst, wpt = None, None
    worst2, wy2 = None, None
    with mp.workdps(DPS):
        for y in ys:
            my = mp.mpf(float(y))
            ch = mp.cosh(my)
            ep, em = mp.exp(my), mp.exp(-my)
            m2 = (mp.exp(my * my / 2) - ch) / mp.exp(my * my / 2)
            if worst2 is None or m2 < worst2:
                worst2, wy2 = m2, float(y)
            for t in ts:
                mt = mp.mpf(float(t))
                # ch y + t sh y without cancellation near t = -1
                rhs = ((1 + mt) * ep + (1 - mt) * em) / 2
                m = (rhs - mp.exp(mt * my)) / rhs
                if worst is None or m < worst:
                    worst, wpt = m, {"y": float(y), "t": float(t)}
    ok = worst >= -EQUALITY_RTOL and worst2 >= -EQUALITY_RTOL
    return ConstantsReport(
        "cosh_bounds",
        bool(ok),
        float(min(worst, worst2)),
        wpt if worst <= worst2 else {"y": wy2},
        y_points * t_points,
        {"min_rel_margin_linear": float(worst), "min_rel_margin_gaussian": float(worst2)},
    )


def _corollary(r_grid=None, K_grid=None):
    r_grid = np.linspace(1, 10, 91) if r_grid is None else np.asarray(r_grid)
    K_grid = np.geomspace(1 / PI_BOUND, 1e8, 400) if K_grid is None else np.asarray(K_grid)
    worst, wpt = None, None
    variants = {"without_kappa_factor": (128.0, False), "literal_exp": (128.0, True)}
    variant_ok = {name: True for name in variants}
    variant_first_fail = {name: None for name in variants}
    for r in r_grid:
        bound = 30 * mp.e ** mp.mpf(float(r))
        for K in K_grid:
            m = (bound - corollary_c_value(r, K)) / bound
            if worst is None or m < worst:
                worst, wpt = m, {"r": float(r), "K": float(K)}
            for name, (lf, lit) in variants.items():
                if variant_ok[name] and corollary_c_value(r, K, lf, lit) > bound:
                    variant_ok[name] = False
                    variant_first_fail[name] = {"r": float(r), "K": float(K)}
    return ConstantsReport(
        "corollary_c",
        bool(worst >= 0),
        float(worst),
        wpt,
        len(r_grid) * len(K_grid),
        {
            "variants_hold": variant_ok,
            "variants_first_failure": variant_first_fail,
            "K_min": float(K_grid.min()),
        },
    )
