"""Command line driver.

Every subcommand writes one JSON object or one CSV table to ``--out`` (stdout
by default).  Exit status is 0 when every asserted check passes, 2 when one
fails and 1 on usage errors.  When an output file or ``--manifest`` is given, a
run manifest (parameters, seed, version, wall time, output digest) is written
next to it.
"""

from __future__ import annotations

import argparse
import csv
import difflib
import hashlib
import io
import json
import math
import re
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from . import chang as chang_mod
from . import majorant as majorant_mod
from . import prime_sieve, square_sieve, verify
from .arith import primes_upto
from .circle import delta_star, delta_star_arith, greedy_dissociate, is_dissociate, min_gap, parse_points
from .constants import WHICH, check_constants
from .errors import AccuracyError, DomainError, OutOfRangeError, ResourceLimitError
from .expsum import SupportedFunction, spectrum

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2
COMMANDS = (
    "gsharp-scan",
    "square-sieve",
    "prime-sieve",
    "spectrum",
    "dissociate",
    "verify",
    "chang",
    "majorant",
    "constants",
)


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """argparse with exit status 1 and close-match suggestions."""

    def error(self, message):
        hint = ""
        m = re.search(r"unrecognized arguments: (.*)", message)
        if m:
            known = [s for a in self._all_actions() for s in a.option_strings]
            for tok in m.group(1).split():
                close = difflib.get_close_matches(tok.split("=")[0], known, n=1)
                if close:
                    hint = f" (did you mean {close[0]}?)"
                    break
        m = re.search(r"invalid choice: '([^']*)'", message)
        if m:
            close = difflib.get_close_matches(m.group(1), COMMANDS + verify.KINDS + WHICH, n=1)
            if close:
                hint = f" (did you mean {close[0]}?)"
        raise UsageError(f"{self.prog}: error: {message}{hint}")

    def _all_actions(self):
        out = list(self._actions)
        for a in self._actions:
            if isinstance(a, argparse._SubParsersAction):
                for sp in a.choices.values():
                    out.extend(sp._actions)
        return out


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int
    tool_version: str
    wall_time: float
    output_digest: str


# ---------------------------------------------------------------------------
# config and output helpers


def read_config(path: str) -> dict:
    """``key=value`` lines, ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def read_set_file(path: str) -> SupportedFunction:
    """One integer per line, optionally followed by real and imaginary weights."""
    weights = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            parts = raw.split("#", 1)[0].split()
            if not parts:
                continue
            n = int(parts[0])
            re_w = float(parts[1]) if len(parts) > 1 else 1.0
            im_w = float(parts[2]) if len(parts) > 2 else 0.0
            weights[n] = complex(re_w, im_w)
    return SupportedFunction(weights)


def _json_text(obj) -> str:
    return json.dumps(verify._jsonable(obj), indent=2, sort_keys=True) + "\n"


def _csv_text(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\r\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k) for k in header})
    return buf.getvalue()


def _frac(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# subcommands; each returns (text, ok)


def cmd_gsharp_scan(args):
    if args.limit < 2:
        raise UsageError("--limit must be at least 2")
    windows = tuple(args.window or (100,))
    if args.emit == "csv":
        buf = io.StringIO()
        buf.write("z,g_sharp,ratio,running_min,argmin_so_far\r\n")

        def on_block(z, ratio, runmin, arg, g):
            for row in zip(z.tolist(), g.tolist(), ratio.tolist(), runmin.tolist(), arg.tolist()):
                buf.write("%d,%.17g,%.17g,%.17g,%d\r\n" % row)

        summary = square_sieve.g_sharp_scan(args.limit, args.segment, not args.fast, windows, on_block)
        text = buf.getvalue()
    else:
        summary = square_sieve.g_sharp_scan(args.limit, args.segment, not args.fast, windows)
        obj = summary.to_json()
        obj["floor_asserted"] = args.floor
        if args.limit <= 10**4:
            obj["g_sharp_at_limit_exact"] = _frac(square_sieve.g_sharp(args.limit))
        text = _json_text(obj)
    ok = args.floor is None or summary.min_ratio >= args.floor
    if summary.large_z_holds is False:
        ok = False
    return text, ok


def cmd_square_sieve(args):
    sys_ = square_sieve.build_square_sieve(args.z)
    ok = sum(sys_.lambda_sharp.values()) == 1 and sys_.lambda_classical[1] == 1
    if args.emit == "csv":
        rows = [
            {
                "q": q,
                "lambda_sharp": _frac(sys_.lambda_sharp[q]),
                "lambda_classical": _frac(sys_.lambda_classical[q]),
            }
            for q in sys_.moduli
        ]
        return _csv_text(rows, ["q", "lambda_sharp", "lambda_classical"]), ok
    obj = square_sieve.to_json(sys_)
    obj["sum_lambda_sharp_is_one"] = ok
    return _json_text(obj), ok


def cmd_prime_sieve(args):
    sys_ = prime_sieve.build_prime_sieve(args.z, args.z0)
    ok = True
    obj = prime_sieve.to_json(sys_)
    if sys_.exact and len(sys_.lam) <= 2000:
        ok = sys_.quadratic_form() == 1 / sys_.G
        obj["quadratic_form_equals_inverse_G"] = ok
    if args.emit == "csv":
        rows = [{"d": d, "lambda": obj["lambda"][str(d)]} for d in sys_.support]
        return _csv_text(rows, ["d", "lambda"]), ok
    return _json_text(obj), ok


def _support_from_args(args) -> SupportedFunction:
    if args.set_file:
        return read_set_file(args.set_file)
    if args.primes_upto:
        lo = args.primes_from or 1
        return SupportedFunction.indicator(p for p in primes_upto(args.primes_upto).tolist() if p >= lo)
    raise UsageError("give --set-file or --primes-upto")


def cmd_spectrum(args):
    f = _support_from_args(args)
    res = spectrum(f, args.modulus, args.alpha)
    if args.emit == "csv":
        rows = [{"u": u, "abs_value": v} for u, v in res.entries]
        return _csv_text(rows, ["u", "abs_value"]), True
    obj = {
        "modulus": res.modulus,
        "alpha": args.alpha,
        "threshold": res.threshold,
        "support_size": len(f),
        "size": len(res),
        "entries": [{"u": u, "abs_value": v} for u, v in res.entries],
    }
    return _json_text(obj), True


def cmd_dissociate(args):
    X = parse_points(args.points)
    obj = {"points": [str(p) for p in X]}
    if args.greedy:
        D = greedy_dissociate(X)
        obj["greedy"] = [str(p) for p in D]
        X = D
    obj["dissociate"] = is_dissociate(X)
    obj["delta_star"] = _num(delta_star(X))
    obj["min_gap"] = _num(min_gap(X)) if len(X) > 1 else None
    if args.z is not None:
        obj["delta_star_arith"] = _num(delta_star_arith(X, args.z, args.z0))
        obj["z"], obj["z0"] = args.z, args.z0
    return _json_text(obj), True


def _num(v):
    if isinstance(v, Fraction):
        return {"value": float(v), "exact": _frac(v)}
    return {"value": v}


def _int_list(text: str) -> list[int]:
    """``"1,4,9"`` or ranges such as ``"1-16"``, comma separated."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if re.fullmatch(r"\d+-\d+", tok):
            a, b = map(int, tok.split("-"))
            out.extend(range(a, b + 1))
        elif tok:
            out.append(int(tok))
    return out


def _instance_from_config(cfg: dict, kind: str | None, seed: int) -> verify.Instance:
    kind = kind or cfg.get("kind")
    if kind is None:
        raise UsageError("config needs kind (or pass --kind)")
    inst = verify.Instance(kind=kind, seed=seed)
    ints = ("N", "z0", "U", "U1")
    floats = ("kappa", "ell", "lam", "p", "H")
    for k in ints:
        if k in cfg:
            setattr(inst, k, int(cfg[k]))
    for k in floats:
        if k in cfg:
            setattr(inst, k, float(cfg[k]))
    if "setting" in cfg:
        inst.setting = cfg["setting"]
    if "X" in cfg:
        inst.X = parse_points(cfg["X"])
    if "c" in cfg:
        inst.c = np.array([complex(v.replace(" ", "")) for v in cfg["c"].split(",")])
    if "set_file" in cfg:
        inst.f = read_set_file(cfg["set_file"])
    elif "S" in cfg:
        S = _int_list(cfg["S"])
        if "f" in cfg:
            w = [complex(v.replace(" ", "")) for v in cfg["f"].split(",")]
            inst.f = SupportedFunction(dict(zip(S, w)))
        else:
            inst.f = SupportedFunction.indicator(S)
    return inst


GEN_KEYS = {
    "N": int,
    "max_points": int,
    "denominator": int,
    "coeff_scale": float,
    "max_lambda": float,
    "max_p": float,
    "max_ell": float,
}


def cmd_verify(args):
    cfg = read_config(args.config) if args.config else {}
    tol = args.tolerance if args.tolerance is not None else verify.DEFAULT_TOLERANCE
    if args.trials is None and "X" in cfg:
        rep = verify.check(_instance_from_config(cfg, args.kind, args.seed), tol)
        if args.emit == "csv":
            row = {k: v for k, v in rep.to_json().items() if k in ("kind", "lhs", "rhs", "ratio", "holds")}
            return _csv_text([row], ["kind", "lhs", "rhs", "ratio", "holds"]), rep.holds
        return _json_text(rep.to_json()), rep.holds
    kind = args.kind or cfg.get("kind")
    if kind is None:
        raise UsageError("--kind is required")
    if kind not in verify.KINDS:
        close = difflib.get_close_matches(kind, verify.KINDS, n=1)
        raise UsageError(f"unknown kind {kind!r}" + (f" (did you mean {close[0]}?)" if close else ""))
    gen = verify.GeneratorConfig(**{k: t(cfg[k]) for k, t in GEN_KEYS.items() if k in cfg})
    agg = verify.check_randomized(kind, gen, args.trials or 100, args.seed, args.threads, tol)
    if args.emit == "csv":
        return _csv_text(list(agg.rows()), ["trial", "ratio", "holds"]), agg.failures == 0
    obj = agg.to_json()
    obj["generator"] = asdict(gen)
    return _json_text(obj), agg.failures == 0


def cmd_chang(args):
    if args.set_file:
        S = read_set_file(args.set_file).support.tolist()
    else:
        lo = math.ceil(args.n**0.25 - 1e-9)
        S = [p for p in primes_upto(args.n).tolist() if p >= lo]
    dec = chang_mod.chang_decompose(S, args.n, args.u1, args.u2, args.alpha, args.override_window)
    obj = dec.to_json()
    obj.pop("elapsed")
    obj["spectrum"] = dec.spectrum
    ok = dec.containment_verified and all(c.maximal for c in dec.components)
    if dec.conforming:
        ok = ok and all(c.within_theorem_bound and c.within_log_bound for c in dec.components)
    if args.emit == "csv":
        rows = [
            {
                "component": i + 1,
                "modulus": c.modulus,
                "size": len(c.D),
                "D": " ".join(map(str, c.D)),
                "span_size": c.span_size,
                "bound": dec.bound_value,
                "log_bound": c.log_bound,
            }
            for i, c in enumerate(dec.components)
        ]
        return _csv_text(rows, ["component", "modulus", "size", "D", "span_size", "bound", "log_bound"]), ok
    return _json_text(obj), ok


def cmd_majorant(args):
    psi = majorant_mod.construct(args.M, args.N, args.delta, args.K)
    if args.emit == "csv":
        t_min = args.t_min if args.t_min is not None else args.M - 2 * args.N
        t_max = args.t_max if args.t_max is not None else args.M + 3 * args.N
        rows = [{"t": t, "psi": v} for t, v in majorant_mod.sample_csv_rows(psi, t_min, t_max, args.samples)]
        return _csv_text(rows, ["t", "psi"]), True
    h = 0.5 / args.delta
    val, err = majorant_mod.fourier_mass_check(psi, 0.0, h)
    isum, ierr = majorant_mod.integer_sum(psi)
    ok = abs(val.real - psi.mass) <= err
    obj = {
        "M": args.M,
        "N": args.N,
        "delta": args.delta,
        "K": args.K,
        "mass": psi.mass,
        "fourier_at_zero": val.real,
        "fourier_error_bound": err,
        "integer_sum": isum,
        "integer_sum_error_bound": ierr,
        "tail_bound": psi.tail_bound,
        "mass_matches": ok,
    }
    return _json_text(obj), ok


def cmd_constants(args):
    names = WHICH if args.which == "all" else (args.which,)
    reports = [check_constants(w) for w in names]
    ok = all(r.holds for r in reports)
    if args.emit == "csv":
        rows = [{"which": r.which, "holds": r.holds, "min_margin": r.min_margin, "points": r.points} for r in reports]
        return _csv_text(rows, ["which", "holds", "min_margin", "points"]), ok
    obj = reports[0].to_json() if len(reports) == 1 else {"reports": [r.to_json() for r in reports], "holds": ok}
    return _json_text(obj), ok


HANDLERS = {
    "gsharp-scan": cmd_gsharp_scan,
    "square-sieve": cmd_square_sieve,
    "prime-sieve": cmd_prime_sieve,
    "spectrum": cmd_spectrum,
    "dissociate": cmd_dissociate,
    "verify": cmd_verify,
    "chang": cmd_chang,
    "majorant": cmd_majorant,
    "constants": cmd_constants,
}


def build_parser() -> Parser:
    common = Parser(add_help=False)
    common.add_argument("--emit", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--manifest", help="run manifest path (default OUT.manifest.json)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="0 picks automatically")
    common.add_argument("--tolerance", type=float)
    common.add_argument("--config", help="key=value parameter file")

    p = Parser(prog="rudin-sieve", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    s = sub.add_parser("gsharp-scan", parents=[common], help="minimum of G#(z)/z")
    s.add_argument("--limit", type=int, required=True)
    s.add_argument("--segment", type=int, default=1 << 20)
    s.add_argument("--fast", action="store_true", help="float accumulation, no certified bound")
    s.add_argument("--floor", type=float, default=square_sieve.ASSERTED_RATIO_FLOOR, help="asserted lower bound")
    s.add_argument("--no-floor", dest="floor", action="store_const", const=None)
    s.add_argument("--window", type=int, action="append", help="also report the minimum over z >= W")

    s = sub.add_parser("square-sieve", parents=[common], help="sieve weights for squares")
    s.add_argument("--z", type=float, required=True)

    s = sub.add_parser("prime-sieve", parents=[common], help="sieve weights for primes")
    s.add_argument("--z", type=float, required=True)
    s.add_argument("--z0", type=int, default=2)

    s = sub.add_parser("spectrum", parents=[common], help="large spectrum of a set")
    s.add_argument("--modulus", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--set-file")
    s.add_argument("--primes-upto", type=int)
    s.add_argument("--primes-from", type=int)

    s = sub.add_parser("dissociate", parents=[common], help="separation of signed sums")
    s.add_argument("--points", required=True, help="comma separated, e.g. 1/8,1/4,1/2")
    s.add_argument("--greedy", action="store_true", help="first extract a maximal dissociate subset")
    s.add_argument("--z", type=float)
    s.add_argument("--z0", type=int, default=2)

    s = sub.add_parser("verify", parents=[common], help="check an inequality")
    s.add_argument("--kind")
    s.add_argument("--trials", type=int)

    s = sub.add_parser("chang", parents=[common], help="dissociate cover of a prime spectrum")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--u1", type=int, required=True)
    s.add_argument("--u2", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--primes-all", action="store_true")
    g.add_argument("--set-file")
    s.add_argument("--override-window", action="store_true")

    s = sub.add_parser("majorant", parents=[common], help="band-limited majorant of an interval")
    s.add_argument("--M", type=float, default=0.0)
    s.add_argument("--N", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--K", type=int, default=majorant_mod.DEFAULT_K)
    s.add_argument("--samples", type=int, default=201)
    s.add_argument("--t-min", type=float)
    s.add_argument("--t-max", type=float)

    s = sub.add_parser("constants", parents=[common], help="closed-form constant checks")
    s.add_argument("--which", choices=WHICH + ("all",), default="all")
    return p


def _apply_config(args, parser):
    """Fill options left at their defaults from ``--config`` keys of the same name."""
    if not args.config or args.command == "verify":
        return
    cfg = read_config(args.config)
    for k, v in cfg.items():
        dest = k.replace("-", "_")
        if not hasattr(args, dest):
            raise UsageError(f"unknown config key {k!r}")
        cur = getattr(args, dest)
        setattr(args, dest, type(cur)(v) if cur is not None and not isinstance(cur, bool) else _guess(v))


def _guess(v: str):
    for t in (int, float):
        try:
            return t(v)
        except ValueError:
            pass
    return {"true": True, "false": False}.get(v.lower(), v)


def run(argv=None) -> int:
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        _apply_config(args, parser)
        text, ok = HANDLERS[args.command](args)
    except UsageError as e:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, DomainError, OutOfRangeError, ResourceLimitError, AccuracyError, OSError) as e:
        print(f"rudin-sieve: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    data = text.encode()
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    manifest_path = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if manifest_path:
        params = {k: v for k, v in vars(args).items() if k not in ("out", "manifest")}
        man = RunManifest(
            subcommand=args.command,
            parameters=params,
            seed=args.seed,
            tool_version=__version__,
            wall_time=time.perf_counter() - t0,
            output_digest=hashlib.sha256(data).hexdigest(),
        )
        with open(manifest_path, "w", encoding="utf-8") as fh:
            fh.write(_json_text(asdict(man)))
    return EXIT_OK if ok else EXIT_CHECK


def main():
    sys.exit(run())


# JSON output schemas, keyed by subcommand
SCHEMAS = {
    "verify": {
        "type": "object",
        "required": ["kind", "lhs", "rhs", "ratio", "constants", "holds", "seed", "instance_digest"],
        "properties": {
            "kind": {"enum": list(verify.KINDS)},
            "lhs": {"type": "number"},
            "rhs": {"type": ["number", "string"]},
            "ratio": {"type": "number"},
            "constants": {"type": "object"},
            "holds": {"type": "boolean"},
            "seed": {"type": ["integer", "null"]},
            "instance_digest": {"type": "string"},
        },
    },
    "verify-randomized": {
        "type": "object",
        "required": ["kind", "trials", "seed", "failures", "worst_ratio", "worst_report", "failure_reports"],
        "properties": {
            "kind": {"enum": list(verify.KINDS)},
            "trials": {"type": "integer", "minimum": 1},
            "failures": {"type": "integer", "minimum": 0},
            "worst_ratio": {"type": "number"},
            "failure_reports": {"type": "array"},
        },
    },
    "gsharp-scan": {
        "type": "object",
        "required": ["limit", "min_ratio", "argmin", "ratio_error_bound", "claim_min_ratio_ge_0_304"],
        "properties": {
            "limit": {"type": "integer"},
            "min_ratio": {"type": "number"},
            "argmin": {"type": "integer"},
            "claim_min_ratio_ge_0_304": {"type": "boolean"},
        },
    },
    "square-sieve": {
        "type": "object",
        "required": ["z", "G_sharp", "lambda_sharp", "lambda_classical"],
        "properties": {
            "G_sharp": {"type": "string", "pattern": r"^-?\d+/\d+$"},
            "lambda_sharp": {"type": "object", "additionalProperties": {"type": "string"}},
            "lambda_classical": {"type": "object", "additionalProperties": {"type": "string"}},
        },
    },
    "prime-sieve": {
        "type": "object",
        "required": ["z", "z0", "G", "lambda"],
        "properties": {"lambda": {"type": "object"}},
    },
    "spectrum": {
        "type": "object",
        "required": ["modulus", "threshold", "entries"],
        "properties": {
            "entries": {
                "type": "array",
                "items": {"type": "object", "required": ["u", "abs_value"]},
            }
        },
    },
    "dissociate": {
        "type": "object",
        "required": ["points", "dissociate", "delta_star"],
        "properties": {"dissociate": {"type": "boolean"}},
    },
    "chang": {
        "type": "object",
        "required": ["N", "U1", "U2", "U", "A", "K", "spectrum_size", "components", "containment_verified", "bound_value", "bound_holds", "conforming"],
        "properties": {
            "containment_verified": {"type": "boolean"},
            "components": {"type": "array", "minItems": 2, "maxItems": 2},
        },
    },
    "majorant": {
        "type": "object",
        "required": ["mass", "fourier_at_zero", "fourier_error_bound", "integer_sum"],
    },
    "constants": {
        "type": "object",
        "required": ["holds"],
    },
}
