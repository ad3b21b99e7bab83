"""Diophantine certificates, Liouville witnesses and the explicit construction.

A Diophantine certificate claims ``|x - p/q| >= c / q**(1+delta)`` for every
rational p/q.  It is checked on convergents only: every q with
``q_k <= q < q_{k+1}`` satisfies ``||q x|| >= ||q_k x||`` (best approximation),
so ``q**delta * ||q x|| >= q_k**delta * ||q_k x||`` and the convergent checks
cover all denominators up to the horizon.

A Liouville witness records approximants with ``|x - p_j/q_j| <= alpha**q_j``;
for the numbers ``x(m) = sum 1/q_j`` with ``q_{j+1} = q_j**q_j`` the witness is
built directly from the partial sums.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .arith import DEFAULT_PRECISION, LogMagnitude, as_fraction, mpf_to_fraction, refine
from .contfrac import Convergent, convergents_until, surd_period
from .errors import DomainError, InsufficientPrecision
from .rotation import (
    DEFAULT_BIT_BUDGET,
    LiouvilleSymbolic,
    QuadraticSurd,
    RotationNumber,
    angle_distance,
    liouville_levels,
    next_q_log2,
    offset_magnitude,
)


class Justification(str, enum.Enum):
    PERIODIC_CF = "PeriodicCF"
    BOUNDED_QUOTIENTS = "BoundedQuotients"
    ASSERTED_BY_USER = "AssertedByUser"


@dataclass(frozen=True)
class DiophantineCertificate:
    c: Fraction
    delta: Fraction = Fraction(1)
    verified_up_to_q: int = 0
    asymptotic_justification: Justification = Justification.ASSERTED_BY_USER

    def __post_init__(self):
        c, delta = as_fraction(self.c), as_fraction(self.delta)
        if c <= 0:
            raise DomainError("certificate constant c must be positive")
        if delta < 1:
            raise DomainError("certificate exponent delta must be >= 1")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "asymptotic_justification",
                           Justification(self.asymptotic_justification))


@dataclass(frozen=True)
class LiouvilleWitness:
    alpha: Fraction
    approximants: tuple[Convergent, ...] = ()

    def __post_init__(self):
        alpha = as_fraction(self.alpha)
        if not 0 < alpha < 1:
            raise DomainError("witness alpha must lie in (0, 1)")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "approximants", tuple(self.approximants))


@dataclass(frozen=True)
class LiouvilleConstruction:
    """Exact data of ``x(m)``: ``q_1 = m``, ``q_{j+1} = q_j**q_j``, partial sums ``p_j/q_j``.

    ``q_sequence`` holds exact integers, followed by a LogMagnitude entry when
    the requested depth runs past the bit budget.  ``chain`` records, per
    exact level j, the certified inequality ``2/q_{j+1} <= (1/m)**q_j``; it
    fails at j = 1 (``q_2 = m**m``), so the witness starts at level 2.
    """

    m: int
    J: int
    q_sequence: tuple[Union[int, LogMagnitude], ...]
    partial_sums: tuple[Fraction, ...]
    rotation: LiouvilleSymbolic
    witness: LiouvilleWitness
    chain: tuple[bool, ...]
    truncated: Optional[str] = None


def construct_liouville(m: int, J: int, bit_budget: int = DEFAULT_BIT_BUDGET,
                        alpha: Optional[Fraction] = None) -> LiouvilleConstruction:
    """Build ``x(m)`` to depth J together with its witness (alpha = 1/m by default)."""
    if m < 2:
        raise DomainError("construction needs m >= 2")
    if J < 1:
        raise DomainError("construction needs depth J >= 1")
    qs, sums = liouville_levels(m, bit_budget)
    depth = min(J, len(qs))
    q_seq: list[Union[int, LogMagnitude]] = list(qs[:depth])
    truncated = None
    if J > len(qs):
        q_seq.append(next_q_log2(qs[-1]))
        truncated = (f"q_{len(qs) + 1} exceeds the {bit_budget}-bit budget; exact depth "
                     f"truncated to {len(qs)}, q_{len(qs) + 1} kept in log2 form")
    alpha = Fraction(1, m) if alpha is None else as_fraction(alpha)
    # level 1 is left out: |x(m) - 1/m| > m**-m since q_2 = m**m < 2*m**m
    approximants = tuple(Convergent(sums[j].numerator, qs[j], j + 1) for j in range(1, depth))
    for conv in approximants:
        if sums[conv.index - 1].denominator != conv.q:
            raise AssertionError("partial sum denominator is not q_j")
    chain = []
    for j in range(depth):
        # 2/q_{j+1} <= (1/m)**q_j, compared in log2 space
        lhs = next_q_log2(qs[j]).reciprocal() * 2
        rhs = LogMagnitude.of(Fraction(1, m)) ** qs[j]
        chain.append(lhs.certainly_le(rhs))
    rotation = LiouvilleSymbolic(m, depth=depth, bit_budget=bit_budget)
    return LiouvilleConstruction(m, J, tuple(q_seq), tuple(sums[:depth]), rotation,
                                 LiouvilleWitness(alpha, approximants), tuple(chain), truncated)


@dataclass(frozen=True)
class ApproximantCheck:
    index: int
    q: int
    status: str  # "pass", "fail" or "precision"
    error: Optional[LogMagnitude]
    target: LogMagnitude


@dataclass(frozen=True)
class WitnessReport:
    checks: tuple[ApproximantCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def failures(self) -> list[int]:
        return [c.index for c in self.checks if c.status == "fail"]

    @property
    def precision_failures(self) -> list[int]:
        return [c.index for c in self.checks if c.status == "precision"]


_EXACT_TARGET_BITS = 1 << 17


def _exact_offset_check(x: RotationNumber, conv: Convergent, alpha: Fraction):
    """Decide ``|x - p/q| <= alpha**q`` with rational bounds when they are cheap.

    Covers the case where both sides agree to far more bits than interval
    refinement can reach (e.g. ``|x(5) - 1/5|`` against ``5**-5``).
    """
    if not isinstance(x, LiouvilleSymbolic):
        return None
    if conv.q * max(alpha.numerator.bit_length(), alpha.denominator.bit_length()) > _EXACT_TARGET_BITS:
        return None
    s, t_hi, _ = x.split()
    base = s - Fraction(conv.p, conv.q)
    if base <= 0:
        return None
    bound = alpha ** conv.q
    if base > bound:
        return "fail", LogMagnitude.of(base)
    if base + t_hi <= bound:
        return "pass", LogMagnitude.of(base + t_hi)
    return None


def verify_liouville_witness(x: RotationNumber, w: LiouvilleWitness,
                             precision_bits: int = DEFAULT_PRECISION) -> WitnessReport:
    """Check ``|x - p_j/q_j| <= alpha**q_j`` for every approximant, in log2 space."""
    checks = []
    for conv in w.approximants:
        target = LogMagnitude.of(w.alpha) ** conv.q
        exact = _exact_offset_check(x, conv, w.alpha)
        if exact is not None:
            checks.append(ApproximantCheck(conv.index, conv.q, exact[0], exact[1], target))
            continue

        def decide(bits, conv=conv, target=target):
            err = offset_magnitude(x, Fraction(conv.p, conv.q), bits)
            if err.certainly_le(target):
                return "pass", err
            if err.certainly_gt(target):
                return "fail", err
            raise InsufficientPrecision("cannot separate |x - p/q| from alpha**q")

        try:
            status, err = refine(decide, precision_bits)
        except InsufficientPrecision:
            status, err = "precision", None
        checks.append(ApproximantCheck(conv.index, conv.q, status, err, target))
    return WitnessReport(tuple(checks))


# -- Diophantine certificates ---------------------------------------------------

@dataclass(frozen=True)
class ConvergentCheck:
    q: int
    p: int
    value: LogMagnitude  # q**delta * ||q x||, i.e. q**(1+delta) * |x - p/q|
    ok: bool


@dataclass(frozen=True)
class DiophantineReport:
    certificate: DiophantineCertificate
    passed: bool
    checks: tuple[ConvergentCheck, ...]
    first_violation: Optional[ConvergentCheck] = None

    @property
    def tightest(self) -> ConvergentCheck:
        return min(self.checks, key=lambda c: c.value.log2_lo)


def _justification(x: RotationNumber, claimed: Justification) -> Justification:
    if isinstance(x, QuadraticSurd):
        surd_period(x)
        return Justification.PERIODIC_CF
    return claimed


def verify_diophantine(x: RotationNumber, cert: DiophantineCertificate, Q: int,
                       precision_bits: int = DEFAULT_PRECISION) -> DiophantineReport:
    """Verify ``q**delta * ||q x|| >= c`` on every convergent with ``q <= Q``."""
    if x.is_rational:
        raise DomainError("rationals are never Diophantine under this definition")
    target = LogMagnitude.of(cert.c)
    checks = []
    violation = None
    for conv in convergents_until(x, Q):
        if conv.q > Q:
            break

        def decide(bits, q=conv.q):
            dist = angle_distance(x, q, 0, bits).magnitude()
            value = (LogMagnitude.of(q) ** cert.delta) * dist
            if value.certainly_ge(target):
                return value, True
            if value.certainly_lt(target):
                return value, False
            raise InsufficientPrecision("cannot compare q**delta*||q x|| with c")

        value, ok = refine(decide, precision_bits)
        check = ConvergentCheck(conv.q, conv.p, value, ok)
        checks.append(check)
        if not ok:
            violation = check
            break
    verified = DiophantineCertificate(
        cert.c, cert.delta, Q if violation is None else 0,
        _justification(x, cert.asymptotic_justification))
    return DiophantineReport(verified, violation is None, tuple(checks), violation)


def max_partial_quotient(x: QuadraticSurd) -> int:
    pre, period = surd_period(x)
    return max(pre[1:] + period)


def asymptotic_constant(x: RotationNumber, cert: DiophantineCertificate) -> Fraction:
    """Constant usable for every q beyond the verified horizon.

    With partial quotients bounded by A, ``|x - p/q| > 1/((A+2) q**2)`` holds
    for all q, so periodic expansions get ``min(c, 1/(A+2))`` rigorously;
    otherwise the certificate's own constant is taken on its stated grounds.
    """
    if isinstance(x, QuadraticSurd):
        return min(cert.c, Fraction(1, max_partial_quotient(x) + 2))
    return cert.c


def derive_diophantine_certificate(x: RotationNumber, Q: int = 10**6, delta=1,
                                   digits: int = 2,
                                   precision_bits: int = DEFAULT_PRECISION) -> DiophantineCertificate:
    """Largest ``c`` (rounded down to ``digits`` decimals) passing the scan up to Q."""
    if x.is_rational:
        raise DomainError("rationals are never Diophantine under this definition")
    delta = as_fraction(delta)
    lowest = None
    for conv in convergents_until(x, Q):
        if conv.q > Q:
            break
        dist = refine(lambda bits: angle_distance(x, conv.q, 0, bits), precision_bits)
        value = (LogMagnitude.of(conv.q) ** delta) * dist.magnitude()
        if lowest is None or value.log2_lo < lowest.log2_lo:
            lowest = value
    scale = 10 ** digits
    if lowest.log2_hi < -60:
        raise DomainError("no useful Diophantine constant: approximations are too good")
    floor_c = mpf_to_fraction(lowest.to_interval().lo) * scale
    c = Fraction(math.floor(floor_c), scale)
    if c <= 0:
        c = Fraction(1, scale * 10)
    just = Justification.PERIODIC_CF if isinstance(x, QuadraticSurd) else Justification.ASSERTED_BY_USER
    return DiophantineCertificate(c, delta, Q, just)
