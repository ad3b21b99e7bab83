"""Rotation numbers, certified small divisors ``|r**n - lambda|`` and orbit gaps.

A rotation number ``x`` is an angle in turns, ``r = exp(2*pi*i*x)``.  Four
representations are supported; each can produce rational bounds on ``x`` at
any requested precision, and the divisor code picks the most exact route
available for the pair ``(x, y)`` where ``lambda = exp(2*pi*i*y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Union

from .arith import (
    DEFAULT_PRECISION,
    Interval,
    LogMagnitude,
    as_fraction,
    interval_sin_pi,
    nearest_int_distance,
    refine,
)
from .errors import BitBudgetExceeded, DomainError, InsufficientPrecision

# divisors below this switch from Interval to LogMagnitude
LOG_DOMAIN_THRESHOLD_LOG2 = -64
DEFAULT_BIT_BUDGET = 1 << 17


class RotationNumber:
    """Common interface of the angle representations."""

    kind = "abstract"

    @property
    def exact(self) -> Optional[Fraction]:
        """The exact rational value, or None for irrational representations."""
        return None

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def enclosure(self, bits: int = DEFAULT_PRECISION) -> tuple[Fraction, Fraction]:
        raise NotImplementedError

    def interval(self, bits: int = DEFAULT_PRECISION) -> Interval:
        lo, hi = self.enclosure(bits)
        return Interval.from_fractions(lo, hi, bits)

    def descriptor(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.descriptor()


@dataclass(frozen=True)
class RationalAngle(RotationNumber):
    value: Fraction

    kind = "rational"

    def __post_init__(self):
        v = as_fraction(self.value)
        object.__setattr__(self, "value", v - math.floor(v))

    @property
    def exact(self) -> Fraction:
        return self.value

    @property
    def order(self) -> int:
        """Smallest m >= 1 with r**m = 1."""
        return self.value.denominator

    def enclosure(self, bits=DEFAULT_PRECISION):
        return self.value, self.value

    def descriptor(self):
        return f"rational:{self.value.numerator}/{self.value.denominator}"


def _squarefree_split(d: int) -> tuple[int, int]:
    """Return (s, e) with d = s*s*e and e squarefree."""
    s, e, p = 1, d, 2
    while p * p <= e:
        while e % (p * p) == 0:
            e //= p * p
            s *= p
        p += 1
    return s, e


def floor_surd(a: int, b: int, d: int, c: int) -> int:
    """Exact floor of ``(a + b*sqrt(d)) / c`` for non-square d and c != 0."""
    if c < 0:
        a, b, c = -a, -b, -c
    if b >= 0:
        fb = math.isqrt(b * b * d)
    else:
        fb = -math.isqrt(b * b * d) - 1
    # a + b*sqrt(d) is irrational when b != 0, so flooring the numerator first is exact
    return (a + fb) // c


@lru_cache(maxsize=256)
def _sqrt_bounds(d: int, bits: int) -> tuple[int, int]:
    s = math.isqrt(d << (2 * bits))
    return s, s + 1


def surd_bounds(a: int, b: int, d: int, c: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure of ``(a + b*sqrt(d))/c`` with width about ``|b/c|*2**-bits``."""
    if b == 0:
        v = Fraction(a, c)
        return v, v
    s_lo, s_hi = _sqrt_bounds(d, bits)
    scale = 1 << bits
    x1 = Fraction(a * scale + b * s_lo, c * scale)
    x2 = Fraction(a * scale + b * s_hi, c * scale)
    return (x1, x2) if x1 <= x2 else (x2, x1)


@dataclass(frozen=True)
class QuadraticSurd(RotationNumber):
    """The angle ``(a + b*sqrt(d))/c`` reduced mod 1, with d > 1 not a square."""

    a: int
    b: int
    c: int
    d: int

    kind = "surd"

    def __post_init__(self):
        a, b, c, d = (int(v) for v in (self.a, self.b, self.c, self.d))
        if c == 0:
            raise DomainError("surd denominator must be non-zero")
        if d <= 1 or math.isqrt(d) ** 2 == d:
            raise DomainError(f"d={d} must be a positive non-square")
        if b == 0:
            raise DomainError("surd with b=0 is rational; use RationalAngle")
        s, d = _squarefree_split(d)
        b *= s
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        a, b, c = a // g, b // g, c // g
        a -= floor_surd(a, b, d, c) * c
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v)

    def enclosure(self, bits=DEFAULT_PRECISION):
        extra = abs(self.b).bit_length() + 4
        return surd_bounds(self.a, self.b, self.d, self.c, bits + extra)

    def descriptor(self):
        return f"surd:({self.a}{self.b:+d}*sqrt({self.d}))/{self.c}"


@lru_cache(maxsize=64)
def liouville_levels(m: int, bit_budget: int = DEFAULT_BIT_BUDGET) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
    """Exact ``q_1 = m, q_{j+1} = q_j**q_j`` and partial sums, within ``bit_budget`` bits."""
    if m < 2:
        raise DomainError("Liouville construction needs m >= 2")
    qs = [m]
    while True:
        q = qs[-1]
        # q**q has at most q*bit_length(q) bits
        if q.bit_length() > 64 or q * q.bit_length() > bit_budget:
            break
        qs.append(q ** q)
    if len(qs) < 2:
        raise BitBudgetExceeded(f"bit budget {bit_budget} cannot hold q_2 = m**m for m={m}")
    sums, total = [], Fraction(0)
    for q in qs:
        total += Fraction(1, q)
        sums.append(total)
    return tuple(qs), tuple(sums)


def next_q_log2(q: int) -> LogMagnitude:
    """Enclosure of ``q**q`` in log space, usable when the integer itself is not."""
    return LogMagnitude.of(q) ** q


@dataclass(frozen=True)
class LiouvilleSymbolic(RotationNumber):
    """``x(m) = sum_j 1/q_j`` with ``q_1 = m`` and ``q_{j+1} = q_j**q_j``.

    ``depth`` is the number of approximants exposed to witnesses; enclosures
    use every level that fits in ``bit_budget``.
    """

    m: int
    depth: int = 3
    bit_budget: int = DEFAULT_BIT_BUDGET

    kind = "liouville"

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("Liouville construction needs m >= 2")
        if self.depth < 1:
            raise DomainError("depth must be >= 1")

    @property
    def levels(self):
        return liouville_levels(self.m, self.bit_budget)

    @property
    def exact_depth(self) -> int:
        return len(self.levels[0])

    def tail_log2(self, j: int) -> LogMagnitude:
        """Enclosure of ``sum_{i>j} 1/q_i`` for ``1 <= j <= exact_depth``.

        The tail lies between ``1/q_{j+1}`` and ``2/q_{j+1}``.
        """
        qs, _ = self.levels
        if not 1 <= j <= len(qs):
            raise DomainError(f"tail index {j} outside 1..{len(qs)}")
        if j < len(qs):
            inv = LogMagnitude.of(Fraction(1, qs[j]))
        else:
            inv = next_q_log2(qs[j - 1]).reciprocal()
        upper = inv * 2
        return LogMagnitude(inv.log2_lo, upper.log2_hi)

    def split(self) -> tuple[Fraction, Fraction, LogMagnitude]:
        """``x = S_E + T`` with exact S_E, rational upper bound on T, and T's log enclosure."""
        qs, sums = self.levels
        qe = qs[-1]
        # 2/q_{E+1} <= 1/q_E**2 because q_E >= 3 at every materialized level E >= 2
        return sums[-1], Fraction(1, qe * qe), self.tail_log2(len(qs))

    def enclosure(self, bits=DEFAULT_PRECISION):
        s, t_hi, _ = self.split()
        return s, s + t_hi

    def descriptor(self):
        return f"liouville:{self.m},{self.depth}"


@dataclass(frozen=True)
class DecimalBall(RotationNumber):
    """An angle known only to lie within ``radius`` of ``center``."""

    center: Fraction
    radius: Fraction

    kind = "ball"

    def __post_init__(self):
        c, r = as_fraction(self.center), as_fraction(self.radius)
        if r <= 0:
            raise DomainError("ball radius must be positive")
        object.__setattr__(self, "center", c - math.floor(c))
        object.__setattr__(self, "radius", r)

    def enclosure(self, bits=DEFAULT_PRECISION):
        return self.center - self.radius, self.center + self.radius

    def descriptor(self):
        return f"ball:{_fraction_text(self.center)}±{_fraction_text(self.radius)}"


def _fraction_text(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


AngleLike = Union[RotationNumber, Fraction, int]


def as_rotation(value: AngleLike) -> RotationNumber:
    if isinstance(value, RotationNumber):
        return value
    return RationalAngle(as_fraction(value))


@dataclass(frozen=True)
class CirclePoint:
    """A point ``lambda`` on the unit circle: an angle, or ``r**n`` for an orbit index."""

    angle: Optional[RotationNumber] = None
    orbit_index: Optional[int] = None

    def __post_init__(self):
        if (self.angle is None) == (self.orbit_index is None):
            raise DomainError("CirclePoint needs exactly one of angle / orbit_index")
        if self.orbit_index is not None and self.orbit_index < 0:
            raise DomainError("orbit index must be >= 0")
        if self.angle is not None:
            object.__setattr__(self, "angle", as_rotation(self.angle))

    @classmethod
    def at(cls, angle: AngleLike) -> "CirclePoint":
        return cls(angle=as_rotation(angle))

    @classmethod
    def orbit(cls, n: int) -> "CirclePoint":
        return cls(orbit_index=n)

    def resolve(self, x: RotationNumber) -> RotationNumber:
        """The angle of lambda given the rotation x."""
        if self.angle is not None:
            return self.angle
        n = self.orbit_index
        if x.is_rational:
            return RationalAngle(n * x.exact)
        if isinstance(x, QuadraticSurd):
            if n == 0:
                return RationalAngle(0)
            return QuadraticSurd(n * x.a, n * x.b, x.c, x.d)
        if n == 0:
            return RationalAngle(0)
        raise DomainError("orbit points of this representation have no closed angle form")

    def descriptor(self) -> str:
        if self.orbit_index is not None:
            return f"orbit:{self.orbit_index}"
        return f"angle:{self.angle.descriptor()}"


# -- ||n*x - y|| --------------------------------------------------------------

@dataclass(frozen=True)
class AngleDistance:
    """Enclosure of ``||n*x - y||`` (distance to the nearest integer).

    Rational bounds ``lo``/``hi`` are given when available; ``log`` carries a
    log2 enclosure when the value is too small for rational bounds to be useful.
    """

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    log: Optional[LogMagnitude] = None

    @property
    def is_exact(self) -> bool:
        return self.lo is not None and self.lo == self.hi

    @property
    def is_zero(self) -> bool:
        return self.is_exact and self.lo == 0

    def magnitude(self) -> LogMagnitude:
        if self.log is not None:
            return self.log
        if self.hi == 0:
            return LogMagnitude.zero()
        return LogMagnitude.from_interval(Interval.from_fractions(self.lo, self.hi))


def distance_bounds(lo: Fraction, hi: Fraction) -> AngleDistance:
    """Rational enclosure of ``||v||`` given ``lo <= v <= hi``."""
    if lo == hi:
        return AngleDistance(nearest_int_distance(lo), nearest_int_distance(lo))
    k = math.floor(lo)
    if lo == k or hi >= k + 1:
        raise InsufficientPrecision("enclosure of n*x - y straddles an integer")
    d_lo, d_hi = nearest_int_distance(lo), nearest_int_distance(hi)
    top = Fraction(1, 2) if lo <= k + Fraction(1, 2) <= hi else max(d_lo, d_hi)
    return AngleDistance(min(d_lo, d_hi), top)


def _surd_parts(v: RotationNumber) -> Optional[tuple[Fraction, Fraction, int]]:
    """(rational part, sqrt coefficient, radicand) for rationals and surds."""
    if v.is_rational:
        return v.exact, Fraction(0), 0
    if isinstance(v, QuadraticSurd):
        return Fraction(v.a, v.c), Fraction(v.b, v.c), v.d
    return None


def angle_distance(x: RotationNumber, n: int, y: AngleLike = 0,
                   bits: int = DEFAULT_PRECISION) -> AngleDistance:
    """Certified enclosure of ``||n*x - y||`` at ``bits`` of working precision."""
    y = as_rotation(y)
    if x.is_rational and y.is_rational:
        return distance_bounds(n * x.exact - y.exact, n * x.exact - y.exact)

    px, py = _surd_parts(x), _surd_parts(y)
    if px is not None and py is not None and (px[2] == py[2] or 0 in (px[2], py[2])):
        d = px[2] or py[2]
        rat = n * px[0] - py[0]
        irr = n * px[1] - py[1]
        if irr == 0:
            return distance_bounds(rat, rat)
        den = rat.denominator * irr.denominator
        a = rat.numerator * irr.denominator
        b = irr.numerator * rat.denominator
        extra = abs(b).bit_length() + 8
        return distance_bounds(*surd_bounds(a, b, d, den, bits + extra))

    if isinstance(x, LiouvilleSymbolic) and (y.is_rational or y == x):
        k = n - 1 if y == x else n
        shift = Fraction(0) if y == x else y.exact
        if k == 0:
            return distance_bounds(-shift, -shift)
        s, t_hi, t_log = x.split()
        base = k * s - shift
        if nearest_int_distance(base) == 0:
            value = t_log * k
            if not value.log2_at_most(-2):
                raise InsufficientPrecision("n*tail is not certifiably below 1/2")
            return AngleDistance(None, None, value)
        return distance_bounds(base, base + k * t_hi)

    xl, xh = x.enclosure(bits + n.bit_length() + 8)
    yl, yh = y.enclosure(bits + 8)
    return distance_bounds(n * xl - yh, n * xh - yl)


def offset_magnitude(x: RotationNumber, target, bits: int = DEFAULT_PRECISION) -> LogMagnitude:
    """Certified enclosure of ``|x - target|`` for a rational target."""
    target = as_fraction(target)
    if x.is_rational:
        return LogMagnitude.of(abs(x.exact - target))
    if isinstance(x, QuadraticSurd):
        u, v = target.numerator, target.denominator
        # (a + b*sqrt(d))/c - u/v = (a*v - u*c + b*v*sqrt(d)) / (c*v)
        lo, hi = surd_bounds(x.a * v - u * x.c, x.b * v, x.d, x.c * v,
                             bits + abs(x.b * v).bit_length() + 8)
    elif isinstance(x, LiouvilleSymbolic):
        s, t_hi, t_log = x.split()
        base = s - target
        if base == 0:
            return t_log
        lo, hi = base, base + t_hi
    else:
        xl, xh = x.enclosure(bits)
        lo, hi = xl - target, xh - target
    if lo <= 0 <= hi:
        raise InsufficientPrecision("enclosure of x - target contains zero")
    if hi < 0:
        lo, hi = -hi, -lo
    return LogMagnitude.from_interval(Interval.from_fractions(lo, hi, bits))


def _divisor_from_distance(dist: AngleDistance, prec: int) -> Union[Interval, LogMagnitude]:
    if dist.is_exact:
        t = dist.lo
        if t == 0:
            return Interval.point(0, prec)
        if t == Fraction(1, 6):
            return Interval.point(1, prec)
        if t == Fraction(1, 2):
            return Interval.point(2, prec)
    tiny_cut = Fraction(1, 1 << -LOG_DOMAIN_THRESHOLD_LOG2)
    if dist.log is None and dist.hi >= tiny_cut:
        return interval_sin_pi(Interval.from_fractions(dist.lo, dist.hi, prec)) * 2
    # 2*pi*t*(1 - (pi*t)**2/6) <= 2*sin(pi*t) <= 2*pi*t, and the correction is
    # below 2**-120 in log2 once t < 2**-64
    t = dist.magnitude()
    two_pi = LogMagnitude.of(Interval.pi(prec) * 2)
    upper = two_pi * t
    lower = LogMagnitude.exact_log2(Fraction(-1, 1 << 120)) * upper
    return LogMagnitude(lower.log2_lo, upper.log2_hi)


def small_divisor(x: RotationNumber, n: int, y: AngleLike = 0,
                  precision_bits: int = DEFAULT_PRECISION) -> Union[Interval, LogMagnitude]:
    """Certified enclosure of ``|r**n - lambda| = 2*sin(pi*||n*x - y||)``.

    Returns an exact zero Interval when ``n*x = y (mod 1)`` is provable, a
    LogMagnitude when the divisor is below ``2**-64``, else an Interval.
    """
    if n < 1:
        raise DomainError("small_divisor needs n >= 1")
    if isinstance(y, CirclePoint):
        y = y.resolve(x)
    dist = refine(lambda bits: angle_distance(x, n, y, bits), precision_bits)
    return _divisor_from_distance(dist, precision_bits)


@dataclass(frozen=True)
class DivisorEntry:
    n: int
    divisor: Union[Interval, LogMagnitude]
    distance: AngleDistance

    @property
    def is_eigen(self) -> bool:
        """True when ``r**n = lambda`` exactly."""
        return self.distance.is_zero

    def magnitude(self) -> LogMagnitude:
        if isinstance(self.divisor, LogMagnitude):
            return self.divisor
        return LogMagnitude.from_interval(self.divisor)


def small_divisor_sequence(x: RotationNumber, y: AngleLike, N: int,
                           precision_bits: int = DEFAULT_PRECISION,
                           start: int = 1) -> Iterator[DivisorEntry]:
    """Lazily yield divisor enclosures for ``n = start..N``.

    Rational pairs use exact residues, so each distinct residue class is
    evaluated once.
    """
    if isinstance(y, CirclePoint):
        y = y.resolve(x)
    y = as_rotation(y)
    if x.is_rational and y.is_rational:
        cache: dict[Fraction, DivisorEntry] = {}
        for n in range(start, N + 1):
            t = nearest_int_distance(n * x.exact - y.exact)
            if t not in cache:
                dist = AngleDistance(t, t)
                cache[t] = DivisorEntry(n, _divisor_from_distance(dist, precision_bits), dist)
            hit = cache[t]
            yield DivisorEntry(n, hit.divisor, hit.distance)
        return
    for n in range(start, N + 1):
        dist = refine(lambda bits: angle_distance(x, n, y, bits), precision_bits)
        yield DivisorEntry(n, _divisor_from_distance(dist, precision_bits), dist)


# -- orbit gaps ---------------------------------------------------------------

@dataclass(frozen=True)
class GapReport:
    """Gaps between the sorted points ``{n*x mod 1 : 1 <= n <= N}`` on the circle.

    ``point_count`` is the number of distinct points; it equals N unless x is
    rational with denominator below N.  Multiplicities sum to ``point_count``.
    """

    N: int
    point_count: int
    distinct_gaps: tuple[tuple[Interval, int], ...]
    max_gap: Interval
    exact: bool = False

    def three_gap_consistent(self) -> bool:
        """At most three lengths, and when three, the largest is the sum of the others."""
        if len(self.distinct_gaps) > 3:
            return False
        if len(self.distinct_gaps) < 3:
            return True
        ordered = sorted((g for g, _ in self.distinct_gaps), key=lambda g: g.mid())
        return ordered[2].overlaps(ordered[0] + ordered[1])


def _cluster(gaps: list[tuple[int, int]]) -> list[tuple[int, int, int]]:
    """Merge overlapping integer ranges; returns (lo, hi, count)."""
    gaps = sorted(gaps)
    out: list[list[int]] = []
    for lo, hi in gaps:
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
            out[-1][2] += 1
        else:
            out.append([lo, hi, 1])
    return [tuple(c) for c in out]


def _orbit_exact(x: Fraction, N: int, prec: int) -> GapReport:
    q, p = x.denominator, x.numerator
    points = sorted({(n * p) % q for n in range(1, N + 1)})
    gaps = [b - a for a, b in zip(points, points[1:])] + [q - points[-1] + points[0]]
    counts: dict[int, int] = {}
    for g in gaps:
        counts[g] = counts.get(g, 0) + 1
    distinct = tuple((Interval.point(Fraction(g, q), prec), c) for g, c in sorted(counts.items()))
    return GapReport(N, len(points), distinct, distinct[-1][0], exact=True)


def _orbit_fixed_point(x: RotationNumber, N: int, prec: int) -> GapReport:
    lo, hi = x.enclosure(prec + N.bit_length() + 8)
    P = prec
    M = 1 << P
    X = math.floor(lo * M)
    w = math.ceil(hi * M) - X
    # true frac(n*x)*M lies in [a_n, a_n + n*w]
    pts = []
    for n in range(1, N + 1):
        a = (n * X) % M
        if a + n * w >= M:
            raise InsufficientPrecision("orbit point too close to 0 mod 1")
        pts.append((a, n * w))
    pts.sort()
    for (a, e), (b, _) in zip(pts, pts[1:]):
        if a + e >= b:
            raise InsufficientPrecision("orbit points not separated at this precision")
    ranges = []
    for (a, ea), (b, eb) in zip(pts, pts[1:]):
        ranges.append((b - a - ea, b + eb - a))
    a0, e0 = pts[0]
    al, el = pts[-1]
    ranges.append((M - al - el + a0, M - al + a0 + e0))
    clusters = _cluster(ranges)
    distinct = tuple((Interval.from_fractions(Fraction(c_lo, M), Fraction(c_hi, M), prec), c)
                     for c_lo, c_hi, c in clusters)
    biggest = max(distinct, key=lambda gc: gc[0].hi)[0]
    return GapReport(N, N, distinct, biggest)


def orbit_gaps(x: RotationNumber, N: int, precision_bits: int = DEFAULT_PRECISION) -> GapReport:
    """Circle gaps of the first N orbit points, with the three-distance structure."""
    if N < 2:
        raise DomainError("orbit_gaps needs N >= 2")
    if x.is_rational:
        return _orbit_exact(x.exact, N, precision_bits)
    return refine(lambda prec: _orbit_fixed_point(x, N, prec), precision_bits)


# -- Moebius utility ------------------------------------------------------------

def moebius(a: complex, z: complex) -> complex:
    """``psi_a(z) = (a - z) / (1 - conj(a) z)``; an involution swapping a and 0."""
    if abs(a) >= 1:
        raise DomainError("moebius needs |a| < 1")
    if abs(z) > 1:
        raise DomainError("moebius needs |z| <= 1")
    return (a - z) / (1 - a.conjugate() * z)
