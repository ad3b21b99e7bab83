"""Continued fractions, convergents and best-approximation bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .arith import DEFAULT_PRECISION, Interval, LogMagnitude, as_fraction, refine
from .errors import (
    DomainError,
    FiniteExpansionExhausted,
    InsufficientConvergents,
    InsufficientPrecision,
)
from .rotation import (
    LiouvilleSymbolic,
    QuadraticSurd,
    RationalAngle,
    RotationNumber,
    angle_distance,
    floor_surd,
    next_q_log2,
)


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients ``[a0; a1, a2, ...]``.

    ``finite_flag`` is True when the quotients are the complete (canonical)
    expansion of a rational; otherwise they are a prefix of an infinite one.
    """

    partial_quotients: tuple[int, ...]
    finite_flag: bool = True

    def __post_init__(self):
        q = tuple(int(a) for a in self.partial_quotients)
        object.__setattr__(self, "partial_quotients", q)
        if not q:
            raise DomainError("a continued fraction needs at least one quotient")
        if any(a < 1 for a in q[1:]):
            raise DomainError("partial quotients after a0 must be >= 1")
        if self.finite_flag and len(q) > 1 and q[-1] < 2:
            raise DomainError("canonical finite expansions end with a quotient >= 2")

    def __len__(self):
        return len(self.partial_quotients)

    def value(self) -> Fraction:
        """Rational value of the (possibly truncated) expansion."""
        return reconstruct(self.partial_quotients)

    def __str__(self):
        a0, *rest = self.partial_quotients
        tail = ", ".join(map(str, rest))
        more = "" if self.finite_flag else ", ..."
        return f"[{a0}; {tail}{more}]" if rest else f"[{a0}]"


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


def reconstruct(quotients: Sequence[int]) -> Fraction:
    value = Fraction(quotients[-1])
    for a in reversed(quotients[:-1]):
        value = a + 1 / value
    return value


def cf_expand(x) -> ContinuedFraction:
    """Canonical expansion of a rational in ``[0, 1)`` by the Euclidean algorithm."""
    x = as_fraction(x.exact if isinstance(x, RotationNumber) else x)
    if not 0 <= x < 1:
        raise DomainError(f"cf_expand needs 0 <= x < 1, got {x}")
    num, den = x.numerator, x.denominator
    quotients = []
    while den:
        a, r = divmod(num, den)
        quotients.append(a)
        num, den = den, r
    return ContinuedFraction(tuple(quotients), True)


def surd_expansion(x: QuadraticSurd, limit: Optional[int] = None) -> Iterator[int]:
    """Exact partial quotients of a quadratic surd via the (P + sqrt(D))/Q recurrence."""
    # rewrite (a + b*sqrt(d))/c as (P + sqrt(D))/Q with Q | D - P**2
    a, b, c, d = x.a, x.b, x.c, x.d
    if b < 0:
        a, b, c = -a, -b, -c
    P, D, Q = a * abs(c), b * b * d * c * c, c * abs(c)
    count = 0
    while limit is None or count < limit:
        a_k = floor_surd(P, 1, D, Q)
        yield a_k
        count += 1
        P = a_k * Q - P
        Q = (D - P * P) // Q


def surd_period(x: QuadraticSurd, max_steps: int = 100000) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(pre-period, period) of the expansion of a quadratic surd."""
    a, b, c, d = x.a, x.b, x.c, x.d
    if b < 0:
        a, b, c = -a, -b, -c
    P, D, Q = a * abs(c), b * b * d * c * c, c * abs(c)
    seen: dict[tuple[int, int], int] = {}
    quotients: list[int] = []
    for step in range(max_steps):
        state = (P, Q)
        if state in seen:
            start = seen[state]
            return tuple(quotients[:start]), tuple(quotients[start:])
        seen[state] = step
        a_k = floor_surd(P, 1, D, Q)
        quotients.append(a_k)
        P = a_k * Q - P
        Q = (D - P * P) // Q
    raise InsufficientPrecision("no period found within the step limit")


def interval_quotients(lo: Fraction, hi: Fraction, k: int) -> list[int]:
    """Quotients shared by every real in ``(lo, hi]`` (at most k of them)."""
    out: list[int] = []
    while len(out) < k:
        a = math.floor(lo)
        if math.floor(hi) != a or hi == a + 1:
            break
        out.append(a)
        if lo == a:
            # the next quotient is unbounded over the enclosure
            break
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    return out


def cf_stream(x: RotationNumber, k: int, precision_bits: int = DEFAULT_PRECISION) -> ContinuedFraction:
    """The first k partial quotients of the true expansion of x."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if x.is_rational:
        full = cf_expand(x.exact)
        if k > len(full):
            raise FiniteExpansionExhausted(f"finite expansion exhausted after {full}")
        return ContinuedFraction(full.partial_quotients[:k], k == len(full))
    if isinstance(x, QuadraticSurd):
        return ContinuedFraction(tuple(surd_expansion(x, k)), False)

    def attempt(bits):
        lo, hi = x.enclosure(bits)
        qs = interval_quotients(lo, hi, k)
        if len(qs) < k:
            raise InsufficientPrecision(
                f"insufficient precision: only {len(qs)} of {k} quotients certified")
        return qs

    if isinstance(x, LiouvilleSymbolic):
        qs = attempt(precision_bits)
    else:
        qs = refine(attempt, precision_bits, max_refinements=0)
    return ContinuedFraction(tuple(qs), False)


def convergents(cf: ContinuedFraction, k: Optional[int] = None) -> list[Convergent]:
    """Convergents ``p_i/q_i`` for the first k quotients (all when k is None)."""
    quotients = cf.partial_quotients if k is None else cf.partial_quotients[:k]
    if k is not None and k > len(cf):
        raise DomainError(f"need {k} quotients, have {len(cf)}")
    out = []
    p_prev, q_prev, p, q = 1, 0, quotients[0], 1
    out.append(Convergent(p, q, 0))
    for i, a in enumerate(quotients[1:], start=1):
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        out.append(Convergent(p, q, i))
    return out


def max_certified_quotients(x: RotationNumber, cap: int = 4096) -> int:
    """How many quotients the representation can certify (capped)."""
    if x.is_rational:
        return len(cf_expand(x.exact))
    if isinstance(x, QuadraticSurd):
        return cap
    lo, hi = x.enclosure(DEFAULT_PRECISION)
    return len(interval_quotients(lo, hi, cap))


def convergents_until(x: RotationNumber, bound: int) -> list[Convergent]:
    """Convergents of x up to and including the first with ``q > bound``."""
    if isinstance(x, QuadraticSurd):
        out, p_prev, q_prev = [], 1, 0
        p = q = None
        for i, a in enumerate(surd_expansion(x)):
            if i == 0:
                p, q = a, 1
            else:
                p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
            out.append(Convergent(p, q, i))
            if q > bound:
                return out
    available = max_certified_quotients(x)
    cf = cf_stream(x, available) if not x.is_rational else cf_expand(x.exact)
    out = []
    for conv in convergents(cf):
        out.append(conv)
        if conv.q > bound:
            return out
    raise InsufficientConvergents(
        f"{x.descriptor()}: certified convergents stop at q={out[-1].q} <= {bound}")


@dataclass(frozen=True)
class ApproxBound:
    """``||n*x|| >= bound`` for every ``n_lo <= n <= n_hi`` (certified)."""

    n_lo: int
    n_hi: int
    q: int
    q_next: int
    bound: LogMagnitude


def best_approx_lower_bound(x: RotationNumber, N: int,
                            precision_bits: int = DEFAULT_PRECISION) -> list[ApproxBound]:
    """Lower bounds on ``||n*x||`` for ``1 <= n <= N`` grouped by convergent ranges.

    For ``q_k <= n < q_{k+1}``, ``||n*x|| >= ||q_k*x|| > 1/(q_k + q_{k+1})``;
    the reported bound is the larger of the two certified quantities.
    """
    if x.is_rational:
        v = x.exact
        values = sorted({min(Fraction(j * v.numerator % v.denominator, v.denominator),
                             1 - Fraction(j * v.numerator % v.denominator, v.denominator))
                         for j in range(v.denominator)})
        raise DomainError(f"rational angle {v}: ||n*x|| is periodic with period "
                          f"{v.denominator} and takes values {values}")
    convs = convergents_until(x, N)
    out = []
    for cur, nxt in zip(convs, convs[1:]):
        lo_n, hi_n = max(cur.q, 1), min(nxt.q - 1, N)
        if lo_n > hi_n:
            continue
        classic = LogMagnitude.of(Fraction(1, cur.q + nxt.q))
        dist = refine(lambda bits: angle_distance(x, cur.q, 0, bits), precision_bits)
        measured = dist.magnitude()
        bound = measured if measured.log2_lo > classic.log2_lo else classic
        out.append(ApproxBound(lo_n, hi_n, cur.q, nxt.q, bound))
    return out


@dataclass(frozen=True)
class ExponentEstimate:
    """Growth of approximation denominators, ``log q_{k+1} / log q_k``.

    ``estimate`` is the largest ratio over the later half of the sequence, a
    finite stand-in for the limsup; the irrationality exponent is about
    ``1 + estimate``.
    """

    estimate: Interval
    trend: str
    ratios: tuple[Interval, ...]
    denominators_log2: tuple[LogMagnitude, ...]


def _approximation_logs(x: RotationNumber, K: int) -> list[Interval]:
    if isinstance(x, LiouvilleSymbolic):
        qs = x.levels[0]
        logs = [LogMagnitude.of(q).log2_interval() for q in qs[:K]]
        if len(logs) < K and len(qs) < K:
            logs.append(next_q_log2(qs[-1]).log2_interval())
        if len(logs) < K:
            raise InsufficientPrecision(f"only {len(logs)} construction levels are representable")
        return logs
    if x.is_rational:
        raise DomainError("rational numbers have no irrationality exponent")
    if isinstance(x, QuadraticSurd):
        qs = []
        for conv in convergents_until(x, 1 << 4096):
            if conv.q >= 2:
                qs.append(conv.q)
            if len(qs) == K:
                break
    else:
        qs = [c.q for c in convergents(cf_stream(x, max_certified_quotients(x))) if c.q >= 2][:K]
        if len(qs) < K:
            raise InsufficientPrecision(f"insufficient precision: only {len(qs)} convergents")
    return [LogMagnitude.of(q).log2_interval() for q in qs]


def irrationality_exponent_estimate(x: RotationNumber, K: int) -> ExponentEstimate:
    """Estimate ``1 + delta`` growth from the first K approximation denominators."""
    if K < 3:
        raise DomainError("need K >= 3 denominators")
    logs = _approximation_logs(x, K)
    ratios = tuple(b / a for a, b in zip(logs, logs[1:]))
    tail = ratios[len(ratios) // 2:]
    estimate = max(tail, key=lambda r: r.hi)
    recent = ratios[-3:]
    increasing = all(a.hi < b.lo for a, b in zip(recent, recent[1:]))
    trend = "increasing" if increasing else "bounded"
    return ExponentEstimate(estimate, trend, ratios,
                            tuple(LogMagnitude.from_log2_interval(v) for v in logs))
