"""Canonical JSON for certificates, witnesses, criterion reports and verdicts.

Rationals are written as ``"p/q"`` strings and interval or log2 endpoints as
exact binary floats (``"0x<hex mantissa>p<exponent>"``), so decoding gives
back equal objects and re-encoding gives identical bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from .arith import Interval, LogMagnitude, mpf_from_str, mpf_to_fraction, mpf_to_str
from .certificates import DiophantineCertificate, Justification, LiouvilleWitness
from .contfrac import Convergent
from .errors import DomainError
from .spectrum import (
    ContradictionScan,
    DiophantineTailBound,
    Eigenvalue,
    GridResult,
    InSpectrum,
    LiouvilleContradiction,
    NotInSpectrum,
    OffCircleResolvent,
    RootOfUnityGap,
    ScanEntry,
    SpaceTag,
    SpectralVerdict,
    TailBound,
    Undetermined,
    VerdictInput,
)

SCHEMA_VERSION = 1
_HEX_INT_BITS = 8192  # larger integers are written in hex (no decimal digit limit)


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- scalars ------------------------------------------------------------------

def enc_int(n: int):
    return n if n.bit_length() <= _HEX_INT_BITS else hex(n)


def dec_int(v) -> int:
    return int(v, 0) if isinstance(v, str) else int(v)


def enc_fraction(f: Fraction) -> str:
    f = Fraction(f)
    num, den = enc_int(f.numerator), enc_int(f.denominator)
    return f"{num}/{den}"


def dec_fraction(text: str) -> Fraction:
    num, _, den = str(text).partition("/")
    return Fraction(dec_int(num), dec_int(den) if den else 1)


def _approx(value) -> Optional[float]:
    try:
        return float(mpf_to_fraction(value))
    except (OverflowError, DomainError):
        return None


def enc_interval(iv: Optional[Interval]):
    if iv is None:
        return None
    return {"lo": mpf_to_str(iv.lo), "hi": mpf_to_str(iv.hi),
            "precision_bits": iv.precision_bits, "approx": _approx(iv.mid())}


def dec_interval(d) -> Optional[Interval]:
    if d is None:
        return None
    return Interval(mpf_from_str(d["lo"]), mpf_from_str(d["hi"]), d["precision_bits"])


def enc_magnitude(m: Optional[LogMagnitude]):
    if m is None:
        return None
    if m.is_zero:
        return {"zero": True, "log2_lo": "-inf", "log2_hi": "-inf", "log2_approx": None}
    mid = Interval(m.log2_lo, m.log2_hi).mid()
    return {"zero": False, "log2_lo": mpf_to_str(m.log2_lo), "log2_hi": mpf_to_str(m.log2_hi),
            "log2_approx": _approx(mid)}


def dec_magnitude(d) -> Optional[LogMagnitude]:
    if d is None:
        return None
    if d["zero"]:
        return LogMagnitude.zero()
    return LogMagnitude(mpf_from_str(d["log2_lo"]), mpf_from_str(d["log2_hi"]))


# -- certificates -----------------------------------------------------------------

def enc_certificate(c: DiophantineCertificate) -> dict:
    return {"type": "DiophantineCertificate", "c": enc_fraction(c.c), "delta": enc_fraction(c.delta),
            "verified_up_to_q": enc_int(c.verified_up_to_q),
            "asymptotic_justification": c.asymptotic_justification.value}


def dec_certificate(d) -> DiophantineCertificate:
    return DiophantineCertificate(dec_fraction(d["c"]), dec_fraction(d["delta"]),
                                  dec_int(d["verified_up_to_q"]),
                                  Justification(d["asymptotic_justification"]))


def enc_convergent(c: Convergent) -> dict:
    return {"p": enc_int(c.p), "q": enc_int(c.q), "index": c.index}


def dec_convergent(d) -> Convergent:
    return Convergent(dec_int(d["p"]), dec_int(d["q"]), d["index"])


def enc_witness(w: LiouvilleWitness) -> dict:
    return {"type": "LiouvilleWitness", "alpha": enc_fraction(w.alpha),
            "approximants": [enc_convergent(c) for c in w.approximants]}


def dec_witness(d) -> LiouvilleWitness:
    return LiouvilleWitness(dec_fraction(d["alpha"]), tuple(dec_convergent(c) for c in d["approximants"]))


# -- criterion pieces ---------------------------------------------------------------

def enc_tail(t: TailBound) -> dict:
    return {"method": t.method, "bound": enc_interval(t.bound), "detail": t.detail}


def dec_tail(d) -> TailBound:
    return TailBound(d["method"], dec_interval(d["bound"]), d["detail"])


def enc_grid(r: GridResult) -> dict:
    return {"alpha": enc_fraction(r.alpha), "beta": enc_fraction(r.beta), "horizon": r.horizon,
            "finite_sup": enc_interval(r.finite_sup), "sup_log2": enc_magnitude(r.sup_log2),
            "sup_argmax": r.sup_argmax, "tail": enc_tail(r.tail), "overall": r.overall,
            "bound": enc_interval(r.bound), "witness_n": r.witness_n,
            "witness_value": enc_magnitude(r.witness_value)}


def dec_grid(d) -> GridResult:
    return GridResult(dec_fraction(d["alpha"]), dec_fraction(d["beta"]), d["horizon"],
                      dec_interval(d["finite_sup"]), dec_magnitude(d["sup_log2"]), d["sup_argmax"],
                      dec_tail(d["tail"]), d["overall"], dec_interval(d["bound"]), d["witness_n"],
                      dec_magnitude(d["witness_value"]))


def enc_scan(s: ContradictionScan) -> dict:
    return {"alpha": enc_fraction(s.alpha), "beta": enc_fraction(s.beta), "verdict": s.verdict,
            "entries": [{"j": e.j, "q": enc_int(e.q), "growth": enc_magnitude(e.growth)} for e in s.entries]}


def dec_scan(d) -> ContradictionScan:
    entries = tuple(ScanEntry(e["j"], dec_int(e["q"]), dec_magnitude(e["growth"])) for e in d["entries"])
    return ContradictionScan(dec_fraction(d["alpha"]), dec_fraction(d["beta"]), entries, d["verdict"])


# -- verdicts -------------------------------------------------------------------------

def enc_evidence(ev) -> dict:
    if isinstance(ev, OffCircleResolvent):
        return {"type": ev.kind, "delta": enc_interval(ev.delta)}
    if isinstance(ev, RootOfUnityGap):
        return {"type": ev.kind, "min_gap": enc_interval(ev.min_gap), "argmin": ev.argmin, "order": ev.order}
    if isinstance(ev, DiophantineTailBound):
        return {"type": ev.kind, "cert": enc_certificate(ev.cert), "horizon_sup": enc_interval(ev.horizon_sup),
                "tail_bound": enc_interval(ev.tail_bound), "grid": [enc_grid(r) for r in ev.grid],
                "coverage": ev.coverage}
    if isinstance(ev, LiouvilleContradiction):
        return {"type": ev.kind, "j": ev.j, "growth": enc_magnitude(ev.growth),
                "witness": enc_witness(ev.witness), "scan": enc_scan(ev.scan)}
    raise TypeError(f"cannot encode evidence {type(ev).__name__}")


def dec_evidence(d):
    kind = d["type"]
    if kind == "OffCircleResolvent":
        return OffCircleResolvent(dec_interval(d["delta"]))
    if kind == "RootOfUnityGap":
        return RootOfUnityGap(dec_interval(d["min_gap"]), d["argmin"], d["order"])
    if kind == "DiophantineTailBound":
        return DiophantineTailBound(dec_certificate(d["cert"]), dec_interval(d["horizon_sup"]),
                                    dec_interval(d["tail_bound"]), tuple(dec_grid(r) for r in d["grid"]),
                                    d["coverage"])
    if kind == "LiouvilleContradiction":
        return LiouvilleContradiction(d["j"], dec_magnitude(d["growth"]), dec_witness(d["witness"]),
                                      dec_scan(d["scan"]))
    raise ValueError(f"unknown evidence type {kind!r}")


def verdict_to_dict(v: SpectralVerdict, precision_bits: int, horizon: Optional[int] = None,
                    runtime_ms: Optional[float] = None) -> dict:
    """The stable verdict document: input, verdict, evidence, horizon, precision, runtime."""
    if isinstance(v, Eigenvalue):
        evidence = {"type": "Eigenvalue", "n": v.n, "eigenvector_note": v.eigenvector_note}
    elif isinstance(v, Undetermined):
        evidence = {"type": "Undetermined", "finite_horizon_sup": enc_interval(v.finite_horizon_sup),
                    "N": v.N, "reason": v.reason, "precision_failure": v.precision_failure}
        horizon = v.N if horizon is None else horizon
    else:
        evidence = enc_evidence(v.evidence)
    return {
        "schema": SCHEMA_VERSION,
        "input": {"x": v.input.x, "lambda": v.input.lam, "space": v.input.space.value},
        "verdict": v.kind,
        "evidence": evidence,
        "horizon": horizon,
        "precision_bits": precision_bits,
        "runtime_ms": runtime_ms,
    }


def verdict_from_dict(d) -> SpectralVerdict:
    inp = VerdictInput(d["input"]["x"], d["input"]["lambda"], SpaceTag(d["input"]["space"]))
    ev = d["evidence"]
    kind = d["verdict"]
    if kind == "Eigenvalue":
        return Eigenvalue(inp, ev["n"], ev["eigenvector_note"])
    if kind == "Undetermined":
        return Undetermined(inp, dec_interval(ev["finite_horizon_sup"]), ev["N"], ev["reason"],
                            ev["precision_failure"])
    if kind == "InSpectrum":
        return InSpectrum(inp, dec_evidence(ev))
    if kind == "NotInSpectrum":
        return NotInSpectrum(inp, dec_evidence(ev))
    raise ValueError(f"unknown verdict {kind!r}")


def verdict_to_json(v: SpectralVerdict, precision_bits: int, **kw) -> str:
    return dumps(verdict_to_dict(v, precision_bits, **kw))


def verdict_from_json(text: str) -> SpectralVerdict:
    return verdict_from_dict(json.loads(text))


def certificate_to_json(c: DiophantineCertificate) -> str:
    return dumps(enc_certificate(c))


def certificate_from_json(text: str) -> DiophantineCertificate:
    return dec_certificate(json.loads(text))


def witness_to_json(w: LiouvilleWitness) -> str:
    return dumps(enc_witness(w))


def witness_from_json(text: str) -> LiouvilleWitness:
    return dec_witness(json.loads(text))
