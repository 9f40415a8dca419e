"""Evaluate both sides of the large-sieve type inequalities on concrete data.

Each kind of check builds the left side by direct summation and the right
side from its closed form.  The exponential-moment hypothesis

    log sum_{n in Nodes} exp(Re sum_x c(x) e(xn)) <= (1/2) sum_x |c(x)|^2 + log H

is available in three frameworks, which fix the node set and H:

* ``interval``: nodes 1..N, ``H = N + 1/delta_star``
* ``primes``:   primes in (N^kappa, N], ``H = 8 (N + 1/delta_*) log z0 / (kappa log N)``
  with ``delta_* = delta_*(sqrt N, z0)``
* ``squares``:  squares up to N, ``H = 8 (N + 1/delta_*) / sqrt N`` with
  ``delta_* = delta_*(sqrt N, 2)``
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import primes_upto
from .circle import (
    CirclePoint,
    PointSet,
    delta_star,
    delta_star_arith,
    greedy_dissociate,
    is_dissociate,
    min_gap,
)
from .errors import DomainError
from .expsum import SupportedFunction, coefficient_sum, values_on_points

# Every numeric constant of the right-hand sides, with the formula it comes from.
CONSTANTS = {
    "distrib_factor": (4, "|{n : |sum c e(nx)| >= lambda sqrt(C)}| <= 4 H e^{-lambda^2/4}"),
    "rudin_factor": (4, "sum |sum c e(nx)|^p <= 4 (9/5 sqrt p)^p H C^{p/2}"),
    "rudin_base": (9 / 5, "sum |sum c e(nx)|^p <= 4 (9/5 sqrt p)^p H C^{p/2}"),
    "ra_factor": (9, "sum_x |T(f,x)|^2 <= 9 |S| ||f||^2 log(8H/|S|)"),
    "ra_log_factor": (8, "sum_x |T(f,x)|^2 <= 9 |S| ||f||^2 log(8H/|S|)"),
    "sieve_h_factor": (8, "H = 8 (N + 1/delta_*) (log z0) / (kappa log N), resp. 8 (N + 1/delta_*) / sqrt N"),
    "sieve_log_factor": (64, "c = 9 log(64 (N + 1/delta_*) ... ) / log(...)"),
    "corollary_factor": (30, "sum_u |sum_p f(p) e(up/U)|^2 <= 30 |S| ||f||^2 e^{U/N} log(8N/(|S| log N))"),
    "corollary_log_factor": (8, "log(8N/(|S| log N))"),
}


def const(name):
    return CONSTANTS[name][0]


KINDS = (
    "hyp",
    "distrib",
    "rudin_moment",
    "ra",
    "interval",
    "interval_moment",
    "lsi_baseline",
    "primes",
    "squares",
    "corollary",
)
SETTINGS = ("interval", "primes", "squares")

# fields each kind needs beyond ``kind``
REQUIRED = {
    "hyp": ("X", "c", "N"),
    "distrib": ("X", "c", "N", "lam"),
    "rudin_moment": ("X", "c", "N", "p"),
    "ra": ("X", "f", "N"),
    "interval": ("X", "f", "N"),
    "interval_moment": ("X", "f", "N", "ell"),
    "lsi_baseline": ("X", "f", "N"),
    "primes": ("X", "f", "N", "kappa", "z0"),
    "squares": ("X", "f", "N"),
    "corollary": ("X", "f", "N", "U", "U1"),
}

DEFAULT_TOLERANCE = 1e-9


@dataclass
class Instance:
    kind: str
    X: PointSet | None = None
    c: np.ndarray | None = None  # coefficients aligned with X
    f: SupportedFunction | None = None
    N: int | None = None
    setting: str = "interval"  # framework for hyp, distrib, rudin_moment, ra
    z0: int | None = 2
    kappa: float | None = 0.5
    ell: float | None = None
    lam: float | None = None
    p: float | None = None
    U: int | None = None
    U1: int | None = None
    H: float | None = None  # overrides the framework's H when given
    seed: int | None = None

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        for name in REQUIRED[self.kind]:
            if getattr(self, name) is None:
                raise ValueError(f"{self.kind} instance is missing field {name!r}")
        if self.setting not in SETTINGS:
            raise ValueError(f"unknown setting {self.setting!r}")
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.c is not None and self.X is not None and len(self.c) != len(self.X):
            raise ValueError("c must have one coefficient per point of X")
        if self.kind == "primes" and not 0 < self.kappa <= 0.5:
            raise ValueError("kappa must lie in (0, 1/2]")
        if self.kind in ("primes",) or self.setting == "primes":
            if self.z0 < 2 or self.N < self.z0:
                raise ValueError("need N >= z0 >= 2")

    def digest(self) -> str:
        payload = {
            "kind": self.kind,
            "setting": self.setting,
            "X": None if self.X is None else [str(p) for p in self.X],
            "c": None if self.c is None else [[complex(v).real, complex(v).imag] for v in self.c],
            "f": None
            if self.f is None
            else [[int(n), w.real, w.imag] for n, w in zip(self.f.support, self.f.weights)],
        }
        for k in ("N", "z0", "kappa", "ell", "lam", "p", "U", "U1", "H"):
            payload[k] = getattr(self, k)
        blob = json.dumps(payload, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class InequalityReport:
    kind: str
    lhs: float
    rhs: float
    ratio: float
    constants: dict
    holds: bool
    seed: int | None
    instance_digest: str
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# node sets and H


@lru_cache(maxsize=64)
def _primes_list(n: int) -> tuple:
    return tuple(int(p) for p in primes_upto(n))


def _power_floor(N: int, kappa: float) -> int:
    """``floor(N^kappa)``, guarding against float error at exact powers."""
    t = N**kappa
    r = round(t)
    return r if abs(t - r) < 1e-9 else math.floor(t)


def prime_nodes(N: int, kappa: float) -> np.ndarray:
    lo = _power_floor(N, kappa)
    return np.array([p for p in _primes_list(N) if p > lo], dtype=np.int64)


def square_nodes(N: int) -> np.ndarray:
    r = math.isqrt(N)
    return np.arange(1, r + 1, dtype=np.int64) ** 2


def _inv(d) -> float:
    return math.inf if d == 0 else float(1 / d)


def framework(inst: Instance, setting: str | None = None) -> tuple[np.ndarray, float, dict]:
    """Node set, hypothesis constant H and diagnostics for a framework."""
    setting = setting or inst.setting
    N = inst.N
    info = {"setting": setting}
    if setting == "interval":
        nodes = np.arange(1, N + 1, dtype=np.int64)
        ds = delta_star(inst.X)
        info["delta_star"] = ds
        H = N + _inv(ds)
    elif setting == "primes":
        nodes = prime_nodes(N, inst.kappa)
        d = delta_star_arith(inst.X, math.sqrt(N), inst.z0)
        info["delta_arith_sqrtN"] = d
        H = const("sieve_h_factor") * (N + _inv(d)) * math.log(inst.z0) / (inst.kappa * math.log(N))
    else:
        nodes = square_nodes(N)
        d = delta_star_arith(inst.X, math.sqrt(N), 2)
        info["delta_arith_sqrtN"] = d
        H = const("sieve_h_factor") * (N + _inv(d)) / math.sqrt(N)
    if inst.H is not None:
        info["framework_H"] = H
        H = float(inst.H)
    info["H"] = H
    info["node_count"] = int(nodes.size)
    info["H_ge_node_count"] = bool(H >= nodes.size)
    return nodes, H, info


# ---------------------------------------------------------------------------
# the checks


def _dual_values(inst: Instance, nodes: np.ndarray) -> np.ndarray:
    return coefficient_sum(dict(zip(inst.X, inst.c)), nodes)


def _logsumexp(v: np.ndarray) -> float:
    if v.size == 0:
        return -math.inf
    m = float(v.max())
    return m + math.log(math.fsum(np.exp(v - m).tolist()))


def _support_check(f: SupportedFunction, allowed: np.ndarray, what: str):
    bad = np.setdiff1d(f.support, allowed)
    if bad.size:
        raise DomainError(f"support of f contains {int(bad[0])}, which is not {what}")


def _rhs_ra(f: SupportedFunction, H: float) -> float:
    s = len(f)
    return const("ra_factor") * s * f.norm2sq * math.log(const("ra_log_factor") * H / s)


def _primes_window(N: int, kappa: float) -> np.ndarray:
    lo = math.ceil(N**kappa - 1e-9)
    return np.array([p for p in _primes_list(N) if p >= lo], dtype=np.int64)


def check(inst: Instance, tolerance: float = DEFAULT_TOLERANCE) -> InequalityReport:
    inst.validate()
    kind = inst.kind
    extras: dict = {}
    used: dict = {}

    if kind in ("hyp", "distrib", "rudin_moment"):
        nodes, H, extras = framework(inst)
        C = math.fsum(abs(complex(v)) ** 2 for v in inst.c)
        vals = _dual_values(inst, nodes)
        if kind == "hyp":
            lhs = _logsumexp(vals.real)
            rhs = 0.5 * C + math.log(H)
            ratio = math.exp(min(lhs - rhs, 700.0))
            holds = lhs <= rhs + tolerance * max(1.0, abs(rhs))
            extras["sum_abs_c_sq"] = C
            return _report(inst, lhs, rhs, ratio, holds, used, extras)
        if kind == "distrib":
            used = {"distrib_factor": const("distrib_factor")}
            lhs = float(np.count_nonzero(np.abs(vals) >= inst.lam * math.sqrt(C)))
            rhs = const("distrib_factor") * H * math.exp(-(inst.lam**2) / 4)
        else:
            used = {"rudin_factor": const("rudin_factor"), "rudin_base": const("rudin_base")}
            p = inst.p
            lhs = math.fsum((np.abs(vals) ** p).tolist())
            rhs = const("rudin_factor") * (const("rudin_base") * math.sqrt(p)) ** p * H * C ** (p / 2)
        return _finish(inst, lhs, rhs, tolerance, used, extras)

    f = inst.f
    if len(f) == 0:
        raise ValueError("f must have non-empty support")

    if kind == "ra":
        nodes, H, extras = framework(inst)
        _support_check(f, nodes, f"a node of the {inst.setting} framework")
        used = {"ra_factor": const("ra_factor"), "ra_log_factor": const("ra_log_factor")}
        T = values_on_points(f, inst.X)
        lhs = math.fsum((np.abs(T) ** 2).tolist())
        return _finish(inst, lhs, _rhs_ra(f, H), tolerance, used, extras)

    if kind in ("interval", "interval_moment"):
        _support_check(f, np.arange(1, inst.N + 1), f"in [1, {inst.N}]")
        ds = delta_star(inst.X)
        H = inst.N + _inv(ds)
        extras = {"delta_star": ds, "H": H}
        used = {"ra_factor": const("ra_factor"), "ra_log_factor": const("ra_log_factor")}
        A = np.abs(values_on_points(f, inst.X))
        if kind == "interval":
            lhs = math.fsum((A**2).tolist())
            rhs = _rhs_ra(f, H)
        else:
            ell = inst.ell
            if ell < 1:
                raise ValueError("ell must be at least 1")
            lhs = math.fsum((A ** (ell + 1)).tolist()) ** 2
            rhs = _rhs_ra(f, H) * math.fsum((A ** (2 * ell)).tolist())
        return _finish(inst, lhs, rhs, tolerance, used, extras)

    if kind == "lsi_baseline":
        _support_check(f, np.arange(1, inst.N + 1), f"in [1, {inst.N}]")
        gap = min_gap(inst.X) if len(inst.X) > 1 else None
        # a single point has no spacing constraint: the bound is N ||f||^2
        inv = 0.0 if gap is None else _inv(gap)
        extras = {"min_gap": gap}
        T = values_on_points(f, inst.X)
        lhs = math.fsum((np.abs(T) ** 2).tolist())
        return _finish(inst, lhs, (inst.N + inv) * f.norm2sq, tolerance, used, extras)

    if kind == "primes":
        N, kappa, z0 = inst.N, inst.kappa, inst.z0
        _support_check(f, _primes_window(N, kappa), f"a prime in [N^{kappa}, N]")
        d_sqrt = delta_star_arith(inst.X, math.sqrt(N), z0)
        d_kappa = delta_star_arith(inst.X, N**kappa, z0)
        d_half = delta_star_arith(inst.X, N ** (kappa / 2), z0)
        s, logN = len(f), math.log(N)
        used = {"ra_factor": const("ra_factor"), "sieve_log_factor": const("sieve_log_factor")}

        def rhs_at(d):
            inner = const("sieve_log_factor") * (N + _inv(d)) * math.log(z0) / (kappa * s * logN)
            return const("ra_factor") * s * f.norm2sq * math.log(inner)

        K_log = math.log(const("corollary_log_factor") * N / (s * logN))
        rhs = rhs_at(d_sqrt)
        extras = {
            "delta_arith_sqrtN": d_sqrt,
            "delta_arith_N_kappa": d_kappa,
            "delta_arith_N_half_kappa": d_half,
            "rhs_with_N_kappa": rhs_at(d_kappa),
            "rhs_with_N_half_kappa": rhs_at(d_half),
            "c_kappa": rhs / (s * f.norm2sq * K_log) if K_log > 0 else None,
        }
        T = values_on_points(f, inst.X)
        lhs = math.fsum((np.abs(T) ** 2).tolist())
        return _finish(inst, lhs, rhs, tolerance, used, extras)

    if kind == "squares":
        N = inst.N
        _support_check(f, square_nodes(N), f"a square up to {N}")
        d = delta_star_arith(inst.X, math.sqrt(N), 2)
        s, rN = len(f), math.sqrt(N)
        used = {"ra_factor": const("ra_factor"), "sieve_log_factor": const("sieve_log_factor")}
        rhs = const("ra_factor") * s * f.norm2sq * math.log(const("sieve_log_factor") * (N + _inv(d)) / (s * rN))
        K_log = math.log(8 * rN / s)
        extras = {"delta_arith_sqrtN": d, "c": rhs / (s * f.norm2sq * K_log) if K_log > 0 else None}
        T = values_on_points(f, inst.X)
        lhs = math.fsum((np.abs(T) ** 2).tolist())
        return _finish(inst, lhs, rhs, tolerance, used, extras)

    # corollary
    N, U = inst.N, inst.U
    extras = corollary_conditions(inst)
    _support_check(f, _primes_window(N, 0.25), "a prime in [N^(1/4), N]")
    s = len(f)
    used = {"corollary_factor": const("corollary_factor"), "corollary_log_factor": const("corollary_log_factor")}
    rhs = (
        const("corollary_factor")
        * s
        * f.norm2sq
        * math.exp(U / N)
        * math.log(const("corollary_log_factor") * N / (s * math.log(N)))
    )
    T = values_on_points(f, inst.X)
    lhs = math.fsum((np.abs(T) ** 2).tolist())
    return _finish(inst, lhs, rhs, tolerance, used, extras)


def corollary_conditions(inst: Instance) -> dict:
    """Validate U >= N, the prime U1 | U in [N^(1/4), N^(3/4)] and distinct
    subset sums of the frequencies modulo U1."""
    N, U, U1 = inst.N, inst.U, inst.U1
    if U < N:
        raise ValueError("need U >= N")
    if U % U1 or U1 not in _primes_list(max(U1, 2)):
        raise ValueError("U1 must be a prime divisor of U")
    if not N**0.25 - 1e-9 <= U1 <= N**0.75 + 1e-9:
        raise ValueError("U1 must lie in [N^(1/4), N^(3/4)]")
    us = []
    for x in inst.X:
        if not x.exact or U % x.value.denominator:
            raise ValueError("points must be exact fractions u/U")
        us.append(x.value.numerator * (U // x.value.denominator))
    reduced = [u % U1 for u in us]
    ok = len(set(reduced)) == len(reduced) and is_dissociate(PointSet([CirclePoint(Fraction(r, U1)) for r in reduced]))
    if not ok:
        raise DomainError("subset sums of the frequencies are not distinct modulo U1")
    return {"frequencies": us, "exp_U_over_N": math.exp(U / N)}


def _finish(inst, lhs, rhs, tolerance, used, extras) -> InequalityReport:
    ratio = lhs / rhs if rhs not in (0, math.inf) else (0.0 if rhs == math.inf else math.inf)
    holds = lhs <= rhs * (1 + tolerance)
    return _report(inst, lhs, rhs, ratio, holds, used, extras)


def _report(inst, lhs, rhs, ratio, holds, used, extras) -> InequalityReport:
    return InequalityReport(
        kind=inst.kind,
        lhs=float(lhs),
        rhs=float(rhs),
        ratio=float(ratio),
        constants=dict(used),
        holds=bool(holds),
        seed=inst.seed,
        instance_digest=inst.digest(),
        extras=extras,
    )


def hyp_remark(c0: float, H: float) -> tuple[float, float]:
    """Single-coefficient reduction of the hypothesis: ``-(1/2 - c)^2 + 1/4 <= log H``."""
    return -((0.5 - c0) ** 2) + 0.25, math.log(H)


# ---------------------------------------------------------------------------
# random instances


@dataclass
class GeneratorConfig:
    N: int = 512
    max_points: int = 8
    denominator: int | None = None  # common denominator of X; random when None
    coeff_scale: float = 3.0  # |c(x)| drawn from [0, coeff_scale]
    max_lambda: float = 5.0
    max_p: float = 8.0
    max_ell: float = 4.0
    settings: tuple = SETTINGS


def _random_dissociate(rng, cfg: GeneratorConfig, Q: int | None = None) -> PointSet:
    Q = Q or cfg.denominator or int(rng.integers(2 * cfg.N, 64 * cfg.N))
    k = int(rng.integers(1, cfg.max_points + 1))
    nums = rng.integers(1, Q, size=3 * k)
    D = greedy_dissociate(PointSet([CirclePoint(Fraction(int(a), Q)) for a in set(nums.tolist())], cap=64))
    pts = list(D)[:k]
    rng.shuffle(pts)
    return PointSet(pts)


def _random_points(rng, cfg: GeneratorConfig) -> PointSet:
    Q = cfg.denominator or int(rng.integers(2 * cfg.N, 64 * cfg.N))
    k = int(rng.integers(1, cfg.max_points + 1))
    nums = sorted(set(rng.integers(0, Q, size=k).tolist()))
    return PointSet([CirclePoint(Fraction(int(a), Q)) for a in nums])


def _random_weights(rng, pool: np.ndarray) -> SupportedFunction:
    size = int(rng.integers(1, pool.size + 1))
    S = rng.choice(pool, size=size, replace=False)
    mag = rng.uniform(0.05, 1.0, size=size)
    ph = rng.uniform(0, 1, size=size)
    if rng.random() < 0.3:  # indicator functions are the extremal case
        mag, ph = np.ones(size), np.zeros(size)
    return SupportedFunction(dict(zip(S.tolist(), (mag * np.exp(2j * np.pi * ph)).tolist())))


def _random_coeffs(rng, k: int, scale: float) -> np.ndarray:
    return rng.uniform(0, scale, size=k) * np.exp(2j * np.pi * rng.uniform(0, 1, size=k))


def random_instance(kind: str, cfg: GeneratorConfig, rng: np.random.Generator, seed=None) -> Instance:
    N = cfg.N
    inst = Instance(kind=kind, N=N, seed=seed)
    if kind in ("hyp", "distrib", "rudin_moment", "ra"):
        inst.setting = str(rng.choice(list(cfg.settings)))
        if inst.setting == "primes":
            inst.kappa = float(rng.choice([0.25, 1 / 3, 0.5]))
            inst.z0 = int(rng.choice([2, 3, 5]))
    if kind == "lsi_baseline":
        inst.X = _random_points(rng, cfg)
    elif kind == "corollary":
        lo, hi = math.ceil(N**0.25), math.floor(N**0.75)
        U1 = int(rng.choice([p for p in _primes_list(hi) if p >= lo]))
        U = U1 * int(rng.integers(math.ceil(N / U1), math.ceil(3 * N / U1) + 1))
        D = _random_dissociate(rng, cfg, Q=U1)
        us = [int(x.value.numerator * (U1 // x.value.denominator)) + U1 * int(rng.integers(0, U // U1)) for x in D]
        inst.U, inst.U1 = U, U1
        inst.X = PointSet([CirclePoint(Fraction(u, U)) for u in us])
    else:
        inst.X = _random_dissociate(rng, cfg)
    k = len(inst.X)
    if kind in ("hyp", "distrib", "rudin_moment"):
        inst.c = _random_coeffs(rng, k, cfg.coeff_scale)
        if kind == "distrib":
            inst.lam = float(rng.uniform(0, cfg.max_lambda))
        if kind == "rudin_moment":
            inst.p = float(rng.uniform(1, cfg.max_p))
        return inst
    if kind == "ra":
        pool, _, _ = framework(inst)
    elif kind == "primes":
        inst.kappa = float(rng.choice([0.25, 1 / 3, 0.5]))
        inst.z0 = int(rng.choice([2, 3, 5]))
        pool = prime_nodes(N, inst.kappa)
    elif kind == "squares":
        pool = square_nodes(N)
    elif kind == "corollary":
        pool = _primes_window(N, 0.25)
    else:
        pool = np.arange(1, N + 1, dtype=np.int64)
    if kind == "interval_moment":
        inst.ell = float(rng.uniform(1, cfg.max_ell))
    inst.f = _random_weights(rng, pool)
    return inst


@dataclass
class AggregateReport:
    kind: str
    trials: int
    seed: int
    failures: int
    worst_ratio: float
    worst_trial: int
    worst_report: dict
    failure_reports: list = field(default_factory=list)
    trial_ratios: list = field(default_factory=list)

    def rows(self):
        for i, r in enumerate(self.trial_ratios):
            yield {"trial": i, "ratio": r, "holds": r <= 1 + DEFAULT_TOLERANCE}

    def to_json(self) -> dict:
        return _jsonable(asdict(self))


def check_randomized(
    kind: str,
    cfg: GeneratorConfig | None = None,
    trials: int = 100,
    seed: int = 0,
    threads: int = 1,
    tolerance: float = DEFAULT_TOLERANCE,
) -> AggregateReport:
    """Run ``check`` on ``trials`` seeded random instances.

    Trial ``i`` draws from its own PCG64 stream spawned from ``seed``, so the
    result does not depend on ``threads``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    cfg = cfg or GeneratorConfig()
    children = np.random.SeedSequence(seed).spawn(trials)

    def one(i):
        rng = np.random.Generator(np.random.PCG64(children[i]))
        return check(random_instance(kind, cfg, rng, seed=seed), tolerance)

    if threads == 1:
        reports = [one(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads or None) as ex:
            reports = list(ex.map(one, range(trials)))
    ratios = [r.ratio for r in reports]
    worst = int(np.argmax(ratios))
    fails = [r.to_json() | {"trial": i} for i, r in enumerate(reports) if not r.holds]
    return AggregateReport(
        kind=kind,
        trials=trials,
        seed=seed,
        failures=len(fails),
        worst_ratio=ratios[worst],
        worst_trial=worst,
        worst_report=reports[worst].to_json(),
        failure_reports=fails,
        trial_ratios=ratios,
    )
