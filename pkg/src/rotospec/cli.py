"""Command line interface: ``rotospec <command> [options]``.

Exit codes: 0 decided, 1 usage error, 2 precision failure, 3 undetermined.
Precision comes from ``--precision``, then the config file, then the
``ROTOSPEC_PRECISION_BITS`` environment variable, then the library default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from . import jsonio
from .arith import DEFAULT_PRECISION, Interval, LogMagnitude, mpf_to_fraction
from .certificates import DiophantineCertificate, construct_liouville, derive_diophantine_certificate
from .contfrac import irrationality_exponent_estimate
from .descriptors import parse_lambda, parse_rotation
from .errors import (
    BitBudgetExceeded,
    DomainError,
    EigenCollision,
    FiniteExpansionExhausted,
    InsufficientConvergents,
    InsufficientPrecision,
)
from .rotation import CirclePoint, QuadraticSurd, RationalAngle, orbit_gaps, small_divisor_sequence
from .series import Finite, Geometric, Ones, radius_window_estimate, resolvent_apply, seminorm, to_csv, decimal_bound
from .spectrum import (
    CriterionConfig,
    SpaceTag,
    Undetermined,
    classify,
    criterion_check,
    half_way,
)

EXIT_OK, EXIT_USAGE, EXIT_PRECISION, EXIT_UNDETERMINED = 0, 1, 2, 3
ENV_PRECISION = "ROTOSPEC_PRECISION_BITS"

# config-file keys and the argparse destinations they fill
CONFIG_KEYS = {
    "precision": "precision", "precision_bits": "precision", "horizon": "horizon", "n": "horizon",
    "alpha_grid": "alpha_grid", "beta_rule": "beta_rule", "format": "format", "x": "x",
    "lambda": "lam", "space": "space",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().lower().replace("-", "_")
            if not sep or key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: expected 'key = value' with a known key")
            values[CONFIG_KEYS[key]] = value.strip()
    return values


def _fractions(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(t.strip()) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise UsageError(f"bad rational list {text!r}") from exc


def _beta_rule(text: Optional[str]):
    if text is None or text.replace(" ", "") in ("(1+alpha)/2", "half"):
        return half_way
    rule = {}
    for part in text.split(","):
        a, sep, b = part.partition(":")
        if not sep:
            raise UsageError("beta rule is '(1+alpha)/2' or 'a1:b1,a2:b2,...'")
        rule[Fraction(a.strip())] = Fraction(b.strip())
    return rule


def _common(p: argparse.ArgumentParser, x=True, lam=False, horizon=None):
    p.add_argument("--precision", type=int, help="working precision in bits")
    p.add_argument("--format", choices=["json", "csv", "text"])
    p.add_argument("--config", help="file of 'key = value' lines; flags override it")
    p.add_argument("--timing", action="store_true", help="record runtime_ms (breaks byte determinism)")
    if x:
        p.add_argument("--x", help="angle descriptor, e.g. surd:(-1+1*sqrt(5))/2")
    if lam:
        p.add_argument("--lambda", dest="lam", help="point descriptor, e.g. angle:rational:0/1")
        p.add_argument("--space", choices=["H0", "H"])
    if horizon is not None:
        p.add_argument("--horizon", "--n", dest="horizon", type=int, help=f"finite horizon (default {horizon})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rotospec", description="Spectra of rotation composition operators on H0.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("classify", help="classify lambda relative to the spectrum")
    _common(p, lam=True, horizon=10**4)
    p.add_argument("--alpha-grid", dest="alpha_grid")
    p.add_argument("--beta-rule", dest="beta_rule")
    p.add_argument("--cert-c", dest="cert_c", help="Diophantine constant c")
    p.add_argument("--cert-delta", dest="cert_delta", default="1")
    p.add_argument("--cert-q", dest="cert_q", type=int, default=10**6, help="verification horizon Q")
    p.add_argument("--lambda-grid", dest="lambda_grid", type=int,
                   help="classify the k points angle j/k concurrently instead of --lambda")
    p.add_argument("--workers", type=int, default=4)

    p = sub.add_parser("construct", help="exact Liouville construction with its witness")
    _common(p, x=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--alpha", help="witness alpha (default 1/m)")

    p = sub.add_parser("divisors", help="small divisors |r^n - lambda|")
    _common(p, lam=True, horizon=20)
    p.add_argument("--start", type=int, default=1)

    p = sub.add_parser("orbit", help="gap structure of the orbit n*x mod 1")
    _common(p, horizon=100)

    p = sub.add_parser("criterion", help="finite-horizon criterion sup (alpha/beta)^n/|r^n - lambda|")
    _common(p, lam=True, horizon=10**4)
    p.add_argument("--alpha-grid", dest="alpha_grid")
    p.add_argument("--beta-rule", dest="beta_rule")
    p.add_argument("--cert-c", dest="cert_c")
    p.add_argument("--cert-delta", dest="cert_delta", default="1")
    p.add_argument("--cert-q", dest="cert_q", type=int, default=10**6)

    p = sub.add_parser("resolvent", help="coefficientwise resolvent a_n/(r^n - lambda)")
    _common(p, lam=True, horizon=20)
    p.add_argument("--coeffs", default="ones", help="ones | geometric:<ratio> | finite:n=a,n=a")
    p.add_argument("--window", help="indices for the radius estimate, e.g. 256 or 10,20")
    p.add_argument("--alpha", help="also report the P_alpha seminorm of the transformed series")

    p = sub.add_parser("demo", help="the Diophantine / Liouville pair at lambda = 1")
    _common(p, x=False)
    return parser


# -- shared settings --------------------------------------------------------------

def _settle(args, defaults: dict) -> None:
    """Fill unset options from the config file, then the environment, then defaults."""
    file_values = read_config(args.config) if getattr(args, "config", None) else {}
    for dest, value in file_values.items():
        if hasattr(args, dest) and getattr(args, dest) is None:
            setattr(args, dest, value)
    if args.precision is None:
        env = os.environ.get(ENV_PRECISION)
        args.precision = env if env else DEFAULT_PRECISION
    try:
        args.precision = int(args.precision)
    except ValueError as exc:
        raise UsageError(f"precision must be an integer, got {args.precision!r}") from exc
    if args.precision < 16:
        raise UsageError("precision must be at least 16 bits")
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    if getattr(args, "horizon", None) is not None:
        args.horizon = int(args.horizon)


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) in (None, ""):
            flag = "--lambda" if name == "lam" else f"--{name.replace('_', '-')}"
            raise UsageError(f"{flag} is required")


def _cfg(args) -> CriterionConfig:
    grid = _fractions(args.alpha_grid) if args.alpha_grid else CriterionConfig().alpha_grid
    return CriterionConfig(grid, _beta_rule(args.beta_rule), args.horizon)


def _cert(args, x) -> Optional[DiophantineCertificate]:
    if not args.cert_c:
        return None
    just = "PeriodicCF" if isinstance(x, QuadraticSurd) else "AssertedByUser"
    return DiophantineCertificate(Fraction(args.cert_c), Fraction(args.cert_delta), args.cert_q, just)


def _emit(text: str, out) -> None:
    out.write(text if text.endswith("\n") else text + "\n")


def _num(value, spec: str = ".6g") -> str:
    if isinstance(value, Interval):
        try:
            return format(float(mpf_to_fraction(value.mid())), spec)
        except OverflowError:
            return _mag_text(LogMagnitude.from_interval(value))
    return str(value)


def _mag_text(m: LogMagnitude) -> str:
    if m.is_zero:
        return "0"
    return "2^" + format(float(mpf_to_fraction(m.log2_lo)), ".6g")


def _exit_for(verdicts) -> int:
    if any(isinstance(v, Undetermined) and v.precision_failure for v in verdicts):
        return EXIT_PRECISION
    if any(isinstance(v, Undetermined) for v in verdicts):
        return EXIT_UNDETERMINED
    return EXIT_OK


# -- commands ----------------------------------------------------------------------

def _verdict_line(v) -> str:
    line = f"{v.input.x} | {v.input.lam} | {v.input.space.value}: {v.kind}"
    if hasattr(v, "evidence"):
        line += f" ({v.evidence.kind})"
    elif hasattr(v, "n"):
        line += f" (n={v.n})"
    else:
        line += f" ({v.reason})"
    return line


def cmd_classify(args, out) -> int:
    _settle(args, {"format": "json", "space": "H0", "horizon": 10**4})
    _need(args, "x")
    x = parse_rotation(args.x)
    cfg = _cfg(args)
    cert = _cert(args, x)
    space = SpaceTag(args.space)
    if args.lambda_grid:
        k = args.lambda_grid
        if k < 1:
            raise UsageError("--lambda-grid needs k >= 1")
        points = [CirclePoint.at(RationalAngle(Fraction(j, k))) for j in range(k)]
    else:
        _need(args, "lam")
        points = [parse_lambda(args.lam)]

    def run(lam):
        start = time.perf_counter()
        v = classify(x, lam, space, cfg, diophantine=cert, precision_bits=args.precision)
        elapsed = round((time.perf_counter() - start) * 1000, 3) if args.timing else None
        return v, elapsed

    if len(points) > 1:
        with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
            results = list(pool.map(run, points))  # map keeps input order
    else:
        results = [run(points[0])]
    verdicts = [v for v, _ in results]
    if args.format == "text":
        for v in verdicts:
            _emit(_verdict_line(v), out)
    else:
        docs = [jsonio.verdict_to_dict(v, args.precision, cfg.N, ms) for v, ms in results]
        _emit(jsonio.dumps(docs if args.lambda_grid else docs[0]), out)
    return _exit_for(verdicts)


def _int_text(n) -> object:
    if isinstance(n, LogMagnitude):
        return {"log2": jsonio.enc_magnitude(n)}
    if n.bit_length() > 64 and n & (n - 1) == 0:
        return f"2^{n.bit_length() - 1}"
    return jsonio.enc_int(n)


def cmd_construct(args, out) -> int:
    _settle(args, {"format": "json"})
    alpha = Fraction(args.alpha) if args.alpha else None
    c = construct_liouville(args.m, args.depth, alpha=alpha)
    if args.format == "text":
        qs = ", ".join(_mag_text(q) if isinstance(q, LogMagnitude) else str(_int_text(q))
                       for q in c.q_sequence)
        sums = ", ".join(f"{s.numerator}/{s.denominator}" if s.denominator.bit_length() < 64
                         else f"p_{i + 1}/q_{i + 1}" for i, s in enumerate(c.partial_sums))
        _emit(f"q = {qs}", out)
        _emit(f"sums = {sums}", out)
        if c.truncated:
            _emit(f"note: {c.truncated}", out)
        return EXIT_OK
    doc = {
        "m": c.m, "J": c.J,
        "q_sequence": [_int_text(q) for q in c.q_sequence],
        "partial_sums": [jsonio.enc_fraction(s) for s in c.partial_sums],
        "chain": list(c.chain),
        "witness": jsonio.enc_witness(c.witness),
        "rotation": c.rotation.descriptor(),
        "truncated": c.truncated,
    }
    _emit(jsonio.dumps(doc), out)
    return EXIT_OK


def _divisor_doc(entry) -> dict:
    mag = entry.magnitude()
    d = {"n": entry.n, "divisor": jsonio.enc_magnitude(mag), "eigen": entry.is_eigen}
    if isinstance(entry.divisor, Interval):
        d["interval"] = jsonio.enc_interval(entry.divisor)
    return d


def cmd_divisors(args, out) -> int:
    _settle(args, {"format": "json", "horizon": 20, "lam": "angle:rational:0/1"})
    _need(args, "x")
    x = parse_rotation(args.x)
    lam = parse_lambda(args.lam)
    if not isinstance(lam, CirclePoint):
        raise UsageError("divisors needs a circle point (angle: or orbit:)")
    entries = list(small_divisor_sequence(x, lam, args.horizon, args.precision, start=max(1, args.start)))
    if args.format == "csv":
        _emit("n,divisor_log2_lo,divisor_log2_hi", out)
        for e in entries:
            m = e.magnitude()
            lo = "-inf" if m.is_zero else decimal_bound(m.log2_lo, upward=False)
            hi = "-inf" if m.is_zero else decimal_bound(m.log2_hi, upward=True)
            _emit(f"{e.n},{lo},{hi}", out)
    elif args.format == "text":
        for e in entries:
            _emit(f"n={e.n}: |r^n - lambda| = "
                  + (_num(e.divisor) if isinstance(e.divisor, Interval) else _mag_text(e.divisor)), out)
    else:
        _emit(jsonio.dumps({"x": x.descriptor(), "lambda": lam.descriptor(),
                            "precision_bits": args.precision,
                            "divisors": [_divisor_doc(e) for e in entries]}), out)
    return EXIT_OK


def cmd_orbit(args, out) -> int:
    _settle(args, {"format": "json", "horizon": 100})
    _need(args, "x")
    x = parse_rotation(args.x)
    rep = orbit_gaps(x, args.horizon, args.precision)
    if args.format == "text":
        gaps = ", ".join(f"{_num(g, '.5f')}×{k}" for g, k in rep.distinct_gaps)
        _emit(f"N={rep.N} points={rep.point_count} gaps {{{gaps}}} "
              f"max_gap={_num(rep.max_gap, '.5f')} three_gap={rep.three_gap_consistent()}", out)
    else:
        _emit(jsonio.dumps({
            "x": x.descriptor(), "N": rep.N, "point_count": rep.point_count, "exact": rep.exact,
            "gaps": [{"length": jsonio.enc_interval(g), "count": k} for g, k in rep.distinct_gaps],
            "max_gap": jsonio.enc_interval(rep.max_gap),
            "three_gap_consistent": rep.three_gap_consistent(),
        }), out)
    return EXIT_OK


def cmd_criterion(args, out) -> int:
    _settle(args, {"format": "json", "horizon": 10**4, "lam": "angle:rational:0/1"})
    _need(args, "x")
    x = parse_rotation(args.x)
    lam = parse_lambda(args.lam)
    cfg = _cfg(args)
    cert = _cert(args, x)
    try:
        rep = criterion_check(x, lam, cfg, cert, args.precision)
    except EigenCollision as exc:
        _emit(jsonio.dumps({"x": x.descriptor(), "lambda": lam.descriptor(), "eigen_collision": exc.n}), out)
        return EXIT_OK
    if args.format == "text":
        for r in rep.results:
            extra = f" witness n={r.witness_n} value {_mag_text(r.witness_value)}" if r.witness_n else ""
            _emit(f"alpha={r.alpha} beta={r.beta}: {r.overall}; finite sup "
                  f"{_num(r.finite_sup) if r.finite_sup else _mag_text(r.sup_log2)} at n={r.sup_argmax}; "
                  f"tail {r.tail.method}{extra}", out)
    else:
        _emit(jsonio.dumps({"x": x.descriptor(), "lambda": lam.descriptor(), "N": rep.N,
                            "precision_bits": args.precision,
                            "certificate": jsonio.enc_certificate(cert) if cert else None,
                            "results": [jsonio.enc_grid(r) for r in rep.results]}), out)
    return EXIT_OK if all(r.overall != "Inconclusive" for r in rep.results) else EXIT_UNDETERMINED


def _stream(text: str):
    kind, _, body = text.partition(":")
    if kind == "ones":
        return Ones()
    if kind == "geometric":
        return Geometric(Fraction(body))
    if kind == "finite":
        items = []
        for part in body.split(","):
            n, sep, a = part.partition("=")
            if not sep:
                raise UsageError("finite coefficients look like finite:1=3,4=1/2")
            items.append((int(n), Fraction(a)))
        return Finite(tuple(items))
    raise UsageError(f"unknown coefficient stream {text!r}")


def cmd_resolvent(args, out) -> int:
    _settle(args, {"format": "json", "horizon": 20})
    _need(args, "x", "lam")
    x = parse_rotation(args.x)
    lam = parse_lambda(args.lam)
    stream = _stream(args.coeffs)
    try:
        t = resolvent_apply(stream, x, lam, args.horizon, args.precision)
    except EigenCollision as exc:
        raise DomainError(f"eigen-collision at n={exc.n}: r^{exc.n} = lambda") from exc
    radius = None
    if args.window:
        window = [int(v) for v in args.window.split(",")]
        radius = radius_window_estimate(t, window, args.precision)
    if args.format == "csv":
        _emit(to_csv(t), out)
        return EXIT_OK
    if args.format == "text":
        for e in t.entries:
            _emit(f"n={e.n} tier={e.tier} |b_n| = {_mag_text(e.b_magnitude)}", out)
        if radius is not None:
            _emit(f"radius <= {_num(radius)}", out)
        return EXIT_OK
    doc = {
        "x": t.x, "lambda": t.lam, "coefficients": stream.describe(), "N": args.horizon,
        "precision_bits": args.precision,
        "off_circle_delta": jsonio.enc_interval(t.off_circle_delta),
        "uniform_bound_ok": t.uniform_bound_ok,
        "entries": [{"n": e.n, "tier": e.tier, "divisor": jsonio.enc_magnitude(e.divisor),
                     "b_magnitude": jsonio.enc_magnitude(e.b_magnitude),
                     "b_exact": None if e.b_exact is None else
                     [jsonio.enc_fraction(e.b_exact.re), jsonio.enc_fraction(e.b_exact.im)]}
                    for e in t.entries],
        "radius_upper_bound": jsonio.enc_interval(radius),
    }
    if args.alpha:
        # P_alpha of the transformed coefficients, in log2 form to survive huge values
        alpha = Fraction(args.alpha)
        best = max(t.entries, key=lambda e: (e.b_magnitude * (LogMagnitude.of(alpha) ** e.n)).log2_hi)
        doc["seminorm"] = {"alpha": jsonio.enc_fraction(alpha), "argmax": best.n,
                           "value": jsonio.enc_magnitude(best.b_magnitude * (LogMagnitude.of(alpha) ** best.n))}
        doc["base_seminorm"] = jsonio.enc_interval(seminorm(stream, alpha, args.horizon, args.precision).value)
    _emit(jsonio.dumps(doc), out)
    return EXIT_OK


def cmd_demo(args, out) -> int:
    _settle(args, {"format": "text"})
    prec = args.precision
    golden = parse_rotation("surd:(-1+1*sqrt(5))/2")
    liouville = parse_rotation("liouville:2,3")
    one = parse_lambda("angle:rational:0/1")
    cert = derive_diophantine_certificate(golden, precision_bits=prec)
    v1 = classify(golden, one, SpaceTag.H0, diophantine=cert, precision_bits=prec)
    v2 = classify(liouville, one, SpaceTag.H0, precision_bits=prec)
    if args.format == "json":
        _emit(jsonio.dumps([jsonio.verdict_to_dict(v, prec, None) for v in (v1, v2)]), out)
    else:
        sym1 = "1 ∉ σ" if v1.kind == "NotInSpectrum" else f"undecided ({v1.kind})"
        sym2 = "1 ∈ σ" if v2.kind == "InSpectrum" else f"undecided ({v2.kind})"
        _emit(f"r = e^(2πi·golden), golden = (√5-1)/2 is Diophantine (c={cert.c}, δ={cert.delta}, "
              f"checked to q={cert.verified_up_to_q}) ⇒ {sym1}(C_r, H0)", out)
        growth = v2.evidence.growth if v2.kind == "InSpectrum" else None
        detail = f"growth 2^{float(mpf_to_fraction(growth.log2_lo)):.2f} at j={v2.evidence.j}" if growth else ""
        _emit(f"s = e^(2πi·x(2)), x(2) = 1/2 + 1/4 + 1/256 + ... is Liouville ({detail}) "
              f"⇒ {sym2}(C_s, H0)", out)
    return _exit_for([v1, v2])


COMMANDS = {
    "classify": cmd_classify, "construct": cmd_construct, "divisors": cmd_divisors,
    "orbit": cmd_orbit, "criterion": cmd_criterion, "resolvent": cmd_resolvent, "demo": cmd_demo,
}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"rotospec: usage error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ValueError, BitBudgetExceeded, FiniteExpansionExhausted) as exc:
        err.write(f"rotospec: error: {exc}\n")
        return EXIT_USAGE
    except (InsufficientPrecision, InsufficientConvergents) as exc:
        err.write(f"rotospec: precision failure: {exc}\n")
        return EXIT_PRECISION
    except OSError as exc:
        err.write(f"rotospec: {exc}\n")
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
