"""Power-series coefficients, the coefficientwise resolvent and P_alpha seminorms.

On H0 the resolvent of ``f -> f(r z)`` acts on ``g = sum a_n z**n`` by
``b_n = a_n / (r**n - lambda)``.  Values degrade from exact rationals to
intervals to log2 magnitudes as the divisors get small; each entry records
which tier it is in.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

from .arith import (
    DEFAULT_PRECISION,
    Interval,
    LogMagnitude,
    as_fraction,
    interval_cos_sin_2pi,
    mpf_from_str,
    mpf_to_fraction,
)
from .errors import DomainError, EigenCollision
from .rotation import CirclePoint, RotationNumber, as_rotation, small_divisor
from .spectrum import ComplexPoint, LambdaLike, _lambda_angle


@dataclass(frozen=True)
class ExactComplex:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    @classmethod
    def of(cls, value) -> "ExactComplex":
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(as_fraction(value))

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __sub__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.re * other.re - self.im * other.im,
                            self.re * other.im + self.im * other.re)

    def __truediv__(self, other: "ExactComplex") -> "ExactComplex":
        d = other.abs2()
        if d == 0:
            raise ZeroDivisionError("complex division by zero")
        return ExactComplex((self.re * other.re + self.im * other.im) / d,
                            (self.im * other.re - self.re * other.im) / d)

    def magnitude(self) -> LogMagnitude:
        return LogMagnitude.of(self.abs2()).root(2)


@dataclass(frozen=True)
class ComplexInterval:
    re: Interval
    im: Interval

    @classmethod
    def of(cls, z: ExactComplex, prec: int = DEFAULT_PRECISION) -> "ComplexInterval":
        return cls(Interval.point(z.re, prec), Interval.point(z.im, prec))

    def __sub__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    def abs2(self) -> Interval:
        return self.re.square() + self.im.square()

    def __truediv__(self, other: "ComplexInterval") -> "ComplexInterval":
        d = other.abs2()
        if not d.certainly_positive():
            raise ZeroDivisionError("divisor enclosure contains zero")
        return ComplexInterval((self.re * other.re + self.im * other.im) / d,
                               (self.im * other.re - self.re * other.im) / d)

    def contains(self, z: ExactComplex) -> bool:
        return self.re.contains(z.re) and self.im.contains(z.im)


# -- coefficient streams ------------------------------------------------------------

class CoefficientStream:
    """Coefficients ``a_n`` for ``n >= start`` (start 1 on H0, 0 allowed on H)."""

    start: int = 1

    def coefficient(self, n: int) -> ExactComplex:
        raise NotImplementedError

    def indices(self, N: int) -> range:
        return range(self.start, N + 1)

    def ratio_bound(self) -> Optional[Fraction]:
        """rho with ``|a_(n+1)| <= rho |a_n|`` for every n, when provable."""
        return None

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Finite(CoefficientStream):
    items: tuple[tuple[int, ExactComplex], ...]
    start: int = 1

    def __post_init__(self):
        table = tuple(sorted((int(n), ExactComplex.of(a)) for n, a in self.items))
        if any(n < self.start for n, _ in table):
            raise DomainError(f"coefficient index below {self.start}")
        object.__setattr__(self, "items", table)

    def coefficient(self, n):
        return dict(self.items).get(n, ExactComplex(0))

    def describe(self):
        return "finite:" + ",".join(f"{n}:{a.re}{'+' if a.im >= 0 else ''}{a.im}i" for n, a in self.items)


@dataclass(frozen=True)
class Ones(CoefficientStream):
    start: int = 1

    def coefficient(self, n):
        return ExactComplex(1)

    def ratio_bound(self):
        return Fraction(1)

    def describe(self):
        return "ones"


@dataclass(frozen=True)
class Geometric(CoefficientStream):
    ratio: Fraction
    start: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ratio", as_fraction(self.ratio))

    def coefficient(self, n):
        return ExactComplex(self.ratio ** n)

    def ratio_bound(self):
        return abs(self.ratio)

    def describe(self):
        return f"geometric:{self.ratio}"


@dataclass(frozen=True)
class Tabulated(CoefficientStream):
    generator: Callable[[int], object]
    N: int
    start: int = 1

    def coefficient(self, n):
        if n > self.N:
            raise DomainError(f"tabulated stream ends at n={self.N}")
        return ExactComplex.of(self.generator(n))

    def indices(self, N):
        return range(self.start, min(N, self.N) + 1)

    def describe(self):
        return f"tabulated:{getattr(self.generator, '__name__', 'generator')}:{self.N}"


def _abs_interval(a: ExactComplex, prec: int) -> Interval:
    if a.im == 0:
        return Interval.point(abs(a.re), prec)
    return Interval.point(a.abs2(), prec).sqrt()


@dataclass(frozen=True)
class SeminormResult:
    value: Interval
    argmax: int
    tail_note: str


def seminorm(f: CoefficientStream, alpha, N: int, prec: int = DEFAULT_PRECISION) -> SeminormResult:
    """``P_alpha(f)`` restricted to ``n <= N``: ``sup |a_n| alpha**n``."""
    alpha = as_fraction(alpha)
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    power = Interval.point(1, prec)
    a_iv = Interval.point(alpha, prec)
    best = None
    n_prev = 0
    for n in f.indices(N):
        power = power * (a_iv ** (n - n_prev)) if n > n_prev else power
        n_prev = n
        term = _abs_interval(f.coefficient(n), prec) * power
        if best is None or term.hi > best[1].hi:
            best = (n, term)
    if best is None:
        return SeminormResult(Interval.point(0, prec), 0, "no coefficients in range")
    rho = f.ratio_bound()
    if isinstance(f, Finite) and (not f.items or f.items[-1][0] <= N):
        note = "finite support: no terms beyond the horizon"
    elif rho is not None and rho * alpha < 1:
        note = f"eventually decreasing: |a_(n+1)/a_n| <= {rho} < 1/alpha"
    else:
        note = "no decay certificate beyond the horizon"
    return SeminormResult(best[1], best[0], note)


# -- resolvent ----------------------------------------------------------------------

_EXACT_COS = {Fraction(0): Fraction(1), Fraction(1, 6): Fraction(1, 2), Fraction(1, 4): Fraction(0),
              Fraction(1, 3): Fraction(-1, 2), Fraction(1, 2): Fraction(-1), Fraction(2, 3): Fraction(-1, 2),
              Fraction(3, 4): Fraction(0), Fraction(5, 6): Fraction(1, 2)}
_EXACT_SIN = {Fraction(0): Fraction(0), Fraction(1, 12): Fraction(1, 2), Fraction(1, 4): Fraction(1),
              Fraction(5, 12): Fraction(1, 2), Fraction(1, 2): Fraction(0), Fraction(7, 12): Fraction(-1, 2),
              Fraction(3, 4): Fraction(-1), Fraction(11, 12): Fraction(-1, 2)}


def exact_cos_sin_2pi(t: Fraction) -> tuple[Optional[Fraction], Optional[Fraction]]:
    """Rational values of ``cos(2 pi t)``, ``sin(2 pi t)`` when they are rational."""
    t = t % 1
    return _EXACT_COS.get(t), _EXACT_SIN.get(t)


@dataclass(frozen=True)
class TransformedEntry:
    n: int
    a: ExactComplex
    divisor: LogMagnitude  # |r**n - lambda|
    b_magnitude: LogMagnitude  # |b_n|
    tier: str  # "exact", "interval" or "log"
    b_exact: Optional[ExactComplex] = None
    b_interval: Optional[ComplexInterval] = None
    difference: Optional[ComplexInterval] = None  # r**n - lambda
    divisor_sq_exact: Optional[Fraction] = None


@dataclass(frozen=True)
class TransformedStream:
    base: CoefficientStream
    x: str
    lam: str
    entries: tuple[TransformedEntry, ...]
    off_circle_delta: Optional[Interval] = None
    uniform_bound_ok: Optional[bool] = None

    def entry(self, n: int) -> TransformedEntry:
        for e in self.entries:
            if e.n == n:
                return e
        raise KeyError(n)


def _lambda_parts(lam: LambdaLike, x: RotationNumber):
    """(exact complex or None, angle or None) describing lambda."""
    if isinstance(lam, ComplexPoint) and lam.modulus_squared != 1:
        return ExactComplex(lam.re, lam.im), None
    return None, _lambda_angle(lam, x)


def _rn_values(x: RotationNumber, n: int, prec: int):
    """(exact cos, exact sin, interval pair) for ``r**n``."""
    if x.is_rational:
        t = n * x.exact
        c, s = exact_cos_sin_2pi(t)
        return c, s, interval_cos_sin_2pi(t, None, prec)
    lo, hi = x.enclosure(prec + n.bit_length() + 8)
    return None, None, interval_cos_sin_2pi(n * lo, n * hi, prec)


def _pair_interval(c, s, ivs, prec) -> ComplexInterval:
    ci = Interval.point(c, prec) if c is not None else ivs[0]
    si = Interval.point(s, prec) if s is not None else ivs[1]
    return ComplexInterval(ci, si)


def resolvent_apply(f: CoefficientStream, x: RotationNumber, lam: LambdaLike, N: int,
                    prec: int = DEFAULT_PRECISION) -> TransformedStream:
    """``b_n = a_n / (r**n - lambda)`` for the indices of f up to N.

    Raises EigenCollision at the first n with ``r**n = lambda``.
    """
    x = as_rotation(x)
    lam_exact, y = _lambda_parts(lam, x)
    y_vals = None
    if y is not None and y.is_rational:
        yc, ys = exact_cos_sin_2pi(y.exact)
        y_vals = (yc, ys, interval_cos_sin_2pi(y.exact, None, prec))
    elif y is not None:
        ylo, yhi = y.enclosure(prec + 8)
        y_vals = (None, None, interval_cos_sin_2pi(ylo, yhi, prec))

    delta = None
    if lam_exact is not None:
        delta = ComplexPoint(lam_exact.re, lam_exact.im).distance_to_circle(prec)

    entries = []
    uniform_ok = True if delta is not None else None
    for n in f.indices(N):
        a = f.coefficient(n)
        c, s, ivs = _rn_values(x, n, prec)
        rn = _pair_interval(c, s, ivs, prec)
        rn_exact = ExactComplex(c, s) if c is not None and s is not None else None
        if lam_exact is not None:
            lam_iv = ComplexInterval.of(lam_exact, prec)
            lam_ex = lam_exact
            # |r**n - lambda|**2 = 1 + |lambda|**2 - 2 Re(conj(lambda) r**n)
            sq = None
            if c is not None and (lam_exact.im == 0 or s is not None):
                sq = 1 + lam_exact.abs2() - 2 * (lam_exact.re * c + lam_exact.im * (s or 0))
            diff = rn - lam_iv
            div_sq = Interval.point(sq, prec) if sq is not None else diff.abs2()
            if not div_sq.certainly_positive():
                raise EigenCollision(n)
            divisor = LogMagnitude.of(div_sq).root(2)
        else:
            lam_iv = _pair_interval(*y_vals, prec)
            lam_ex = ExactComplex(y_vals[0], y_vals[1]) if None not in y_vals[:2] else None
            d = small_divisor(x, n, y, prec)
            divisor = LogMagnitude.of(d)
            if divisor.is_zero:
                raise EigenCollision(n)
            diff = rn - lam_iv
            sq = None
            if isinstance(d, Interval) and d.is_point:
                sq = mpf_to_fraction(d.lo) ** 2
        a_mag = a.magnitude()
        b_mag = a_mag / divisor if not a_mag.is_zero else LogMagnitude.zero()

        if rn_exact is not None and lam_ex is not None:
            b = a / (rn_exact - lam_ex)
            entry = TransformedEntry(n, a, divisor, b.magnitude(), "exact", b_exact=b,
                                     difference=ComplexInterval.of(rn_exact - lam_ex, prec),
                                     divisor_sq_exact=(rn_exact - lam_ex).abs2())
        elif divisor.log2_lo > -64 and diff.abs2().certainly_positive():
            b_iv = ComplexInterval.of(a, prec) / diff
            entry = TransformedEntry(n, a, divisor, b_mag, "interval", b_interval=b_iv,
                                     difference=diff, divisor_sq_exact=sq)
        else:
            entry = TransformedEntry(n, a, divisor, b_mag, "log", divisor_sq_exact=sq)
        if delta is not None:
            uniform_ok = uniform_ok and _uniform_ok(entry, delta)
        entries.append(entry)
    return TransformedStream(f, x.descriptor(), lam.descriptor(), tuple(entries), delta, uniform_ok)


def _uniform_ok(entry: TransformedEntry, delta: Interval) -> bool:
    """``|b_n| <= |a_n| / delta``, i.e. ``|r**n - lambda| >= delta``."""
    if entry.divisor_sq_exact is not None and delta.is_point:
        d = mpf_to_fraction(delta.lo)
        return entry.divisor_sq_exact >= d * d
    return LogMagnitude.of(delta).certainly_le(entry.divisor)


def radius_window_estimate(t: Union[TransformedStream, CoefficientStream], window: Iterable[int],
                           prec: int = DEFAULT_PRECISION) -> Interval:
    """``min over the window of |b_n|**(-1/n)``.

    This is what the finite evidence says about the radius of convergence: a
    series whose coefficients reach these sizes infinitely often cannot
    converge beyond it.  It is not a statement about the limsup itself.
    """
    window = sorted(set(window))
    if not window:
        raise DomainError("window must be non-empty")
    best = None
    for n in window:
        if n < 1:
            raise DomainError("window indices must be >= 1")
        if isinstance(t, TransformedStream):
            mag = t.entry(n).b_magnitude
        else:
            mag = t.coefficient(n).magnitude()
        if mag.is_zero:
            continue
        r = mag.root(n).reciprocal()
        if best is None or r.log2_hi < best.log2_hi:
            best = r
    if best is None:
        # only zero coefficients: nothing limits the radius
        inf = mpf_from_str("inf")
        return Interval(inf, inf, prec)
    return best.to_interval(prec)


def decimal_bound(value, upward: bool, places: int = 12) -> str:
    if value in (math.inf, -math.inf):
        return str(value)
    f = mpf_to_fraction(value) * 10**places
    k = math.ceil(f) if upward else math.floor(f)
    sign = "-" if k < 0 else ""
    whole, frac = divmod(abs(k), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def to_csv(t: TransformedStream) -> str:
    """CSV with columns n, re, im, divisor_log2_lo, divisor_log2_hi, b_n_log2_magnitude.

    Log2 columns are rounded outward; the last column is a lower bound.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "re", "im", "divisor_log2_lo", "divisor_log2_hi", "b_n_log2_magnitude"])
    for e in t.entries:
        b = "-inf" if e.b_magnitude.is_zero else decimal_bound(e.b_magnitude.log2_lo, False)
        writer.writerow([e.n, str(e.a.re), str(e.a.im), decimal_bound(e.divisor.log2_lo, False),
                         decimal_bound(e.divisor.log2_hi, True), b])
    return out.getvalue()
