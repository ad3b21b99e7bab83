"""Exact rationals, outward-rounded intervals and log2-domain magnitudes.

Rationals are :class:`fractions.Fraction`.  Interval endpoints are
:class:`mpmath.mpf` values, but every arithmetic step goes through the
pure functions of :mod:`mpmath.libmp` with an explicit precision and a
directed rounding mode, so the global ``mpmath.mp`` context is never read
or modified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, TypeVar, Union

import mpmath
from mpmath import libmp as _lm

from .errors import DomainError, InsufficientPrecision

__all__ = [
    "DEFAULT_PRECISION",
    "MAX_REFINEMENTS",
    "Interval",
    "LogMagnitude",
    "as_fraction",
    "nearest_int_distance",
    "log2_of_product",
    "interval_sin_pi",
    "interval_cos_sin_2pi",
    "refine",
    "mpf_to_fraction",
    "mpf_to_str",
    "mpf_from_str",
]

DEFAULT_PRECISION = 128
MAX_REFINEMENTS = 8
# refinement stops once an enclosure is narrower than 2**TARGET_WIDTH_LOG2
TARGET_WIDTH_LOG2 = -32

_FLOOR = _lm.round_floor
_CEIL = _lm.round_ceiling
_NEAR = _lm.round_nearest

Real = Union[int, Fraction]
T = TypeVar("T")


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, decimal strings and floats to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a number here")
    if isinstance(value, (int, str, float)):
        return Fraction(value)
    if isinstance(value, mpmath.mpf):
        return mpf_to_fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def nearest_int_distance(x) -> Fraction:
    """Distance from ``x`` to the nearest integer, in ``[0, 1/2]``."""
    x = as_fraction(x)
    frac = x - math.floor(x)
    return min(frac, 1 - frac)


# -- raw mpf helpers ---------------------------------------------------------

def _wrap(raw) -> mpmath.mpf:
    # make_mpf keeps every bit; mpmath.mpf(raw) would round to the global context
    return mpmath.mp.make_mpf(raw)


def _neg(v: mpmath.mpf) -> mpmath.mpf:
    return _wrap(_lm.mpf_neg(v._mpf_))


def _raw(value) -> tuple:
    if isinstance(value, mpmath.mpf):
        return value._mpf_
    if isinstance(value, int):
        return _lm.from_int(value)
    raise TypeError(type(value))


def mpf_to_fraction(value: mpmath.mpf) -> Fraction:
    sign, man, exp, bc = value._mpf_
    if not man and value._mpf_ != _lm.fzero:
        raise DomainError(f"non-finite value {value} has no rational form")
    n = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(n << exp)
    return Fraction(n, 1 << -exp)


def mpf_to_str(value: mpmath.mpf) -> str:
    """Exact, deterministic text form (hex mantissa, binary exponent)."""
    raw = value._mpf_
    if raw == _lm.fzero:
        return "0x0p+0"
    if raw == _lm.finf:
        return "inf"
    if raw == _lm.fninf:
        return "-inf"
    sign, man, exp, _ = raw
    if not man:
        raise DomainError("nan cannot be serialized")
    return f"{'-' if sign else ''}0x{int(man):x}p{exp:+d}"


def mpf_from_str(text: str) -> mpmath.mpf:
    if text == "inf":
        return _wrap(_lm.finf)
    if text == "-inf":
        return _wrap(_lm.fninf)
    sign = text.startswith("-")
    body = text[1:] if sign else text
    if not body.startswith("0x") or "p" not in body:
        raise DomainError(f"malformed exact float {text!r}")
    mant, exp = body[2:].split("p")
    man = int(mant, 16)
    raw = _lm.from_man_exp(-man if sign else man, int(exp))
    return _wrap(raw)


def _from_fraction(value: Fraction, prec: int, rnd) -> tuple:
    return _lm.from_rational(value.numerator, value.denominator, prec, rnd)


def _widen(raw, prec: int, upward: bool) -> tuple:
    """Round a nearly-correct value (error a few ulps at prec+20 bits) outward."""
    if raw == _lm.fzero:
        return raw
    slack = _lm.from_man_exp(1, -(prec + 10))
    positive = not raw[0]
    grow = upward == positive
    factor = _lm.mpf_add(_lm.fone, slack if grow else _lm.mpf_neg(slack), prec + 30)
    return _lm.mpf_mul(raw, factor, prec, _CEIL if upward else _FLOOR)


def _cmp_fraction(raw, value: Fraction) -> int:
    if raw == _lm.finf:
        return 1
    if raw == _lm.fninf:
        return -1
    f = mpf_to_fraction(_wrap(raw))
    return (f > value) - (f < value)


# -- intervals ---------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with outward-rounded arithmetic."""

    lo: mpmath.mpf
    hi: mpmath.mpf
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not isinstance(self.lo, mpmath.mpf):
            object.__setattr__(self, "lo", _wrap(_raw(self.lo)))
        if not isinstance(self.hi, mpmath.mpf):
            object.__setattr__(self, "hi", _wrap(_raw(self.hi)))
        if _lm.mpf_gt(self.lo._mpf_, self.hi._mpf_):
            raise DomainError(f"interval with lo > hi: {self.lo} > {self.hi}")

    # construction

    @classmethod
    def point(cls, value, prec: int = DEFAULT_PRECISION) -> "Interval":
        value = as_fraction(value)
        return cls(_wrap(_from_fraction(value, prec, _FLOOR)),
                   _wrap(_from_fraction(value, prec, _CEIL)), prec)

    @classmethod
    def from_fractions(cls, lo, hi, prec: int = DEFAULT_PRECISION) -> "Interval":
        lo, hi = as_fraction(lo), as_fraction(hi)
        if lo > hi:
            raise DomainError(f"interval with lo > hi: {lo} > {hi}")
        return cls(_wrap(_from_fraction(lo, prec, _FLOOR)),
                   _wrap(_from_fraction(hi, prec, _CEIL)), prec)

    @classmethod
    def pi(cls, prec: int = DEFAULT_PRECISION) -> "Interval":
        return cls(_wrap(_lm.mpf_pi(prec, _FLOOR)), _wrap(_lm.mpf_pi(prec, _CEIL)), prec)

    @classmethod
    def _coerce(cls, other, prec) -> "Interval":
        if isinstance(other, Interval):
            return other
        return cls.point(other, prec)

    # inspection

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def width(self) -> mpmath.mpf:
        return _wrap(_lm.mpf_sub(self.hi._mpf_, self.lo._mpf_, self.precision_bits, _CEIL))

    def mid(self) -> mpmath.mpf:
        s = _lm.mpf_add(self.lo._mpf_, self.hi._mpf_, self.precision_bits + 1, _NEAR)
        return _wrap(_lm.mpf_shift(s, -1))

    def contains(self, value) -> bool:
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        if isinstance(value, float):
            if math.isnan(value):
                return False
            value = Fraction(value)
        value = as_fraction(value)
        return _cmp_fraction(self.lo._mpf_, value) <= 0 <= _cmp_fraction(self.hi._mpf_, value)

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def certainly_lt(self, other) -> bool:
        other = self._coerce(other, self.precision_bits)
        return self.hi < other.lo

    def certainly_le(self, other) -> bool:
        other = self._coerce(other, self.precision_bits)
        return self.hi <= other.lo

    def certainly_positive(self) -> bool:
        return self.lo > 0

    def fractions(self) -> tuple[Fraction, Fraction]:
        return mpf_to_fraction(self.lo), mpf_to_fraction(self.hi)

    def __float__(self) -> float:
        return float(self.mid())

    def __repr__(self):
        return (f"Interval([{mpmath.nstr(self.lo, 17)}, {mpmath.nstr(self.hi, 17)}], "
                f"prec={self.precision_bits})")

    # arithmetic

    def _prec(self, other: "Interval") -> int:
        return max(self.precision_bits, other.precision_bits)

    def __neg__(self) -> "Interval":
        return Interval(_neg(self.hi), _neg(self.lo), self.precision_bits)

    def __add__(self, other) -> "Interval":
        other = self._coerce(other, self.precision_bits)
        p = self._prec(other)
        return Interval(_wrap(_lm.mpf_add(self.lo._mpf_, other.lo._mpf_, p, _FLOOR)),
                        _wrap(_lm.mpf_add(self.hi._mpf_, other.hi._mpf_, p, _CEIL)), p)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        other = self._coerce(other, self.precision_bits)
        return self + (-other)

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other, self.precision_bits) - self

    def __mul__(self, other) -> "Interval":
        other = self._coerce(other, self.precision_bits)
        p = self._prec(other)
        a = (self.lo._mpf_, self.hi._mpf_)
        b = (other.lo._mpf_, other.hi._mpf_)
        lows = [_lm.mpf_mul(x, y, p, _FLOOR) for x in a for y in b]
        highs = [_lm.mpf_mul(x, y, p, _CEIL) for x in a for y in b]
        return Interval(_wrap(min(lows, key=_wrap)), _wrap(max(highs, key=_wrap)), p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = self._coerce(other, self.precision_bits)
        if other.lo <= 0 <= other.hi:
            raise InsufficientPrecision("division by an interval containing zero")
        p = self._prec(other)
        a = (self.lo._mpf_, self.hi._mpf_)
        b = (other.lo._mpf_, other.hi._mpf_)
        lows = [_lm.mpf_div(x, y, p, _FLOOR) for x in a for y in b]
        highs = [_lm.mpf_div(x, y, p, _CEIL) for x in a for y in b]
        return Interval(_wrap(min(lows, key=_wrap)), _wrap(max(highs, key=_wrap)), p)

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other, self.precision_bits) / self

    def __pow__(self, n: int) -> "Interval":
        if not isinstance(n, int) or n < 0:
            raise DomainError("only non-negative integer powers are supported")
        result = Interval.point(1, self.precision_bits)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(_wrap(_lm.fzero), max(_neg(self.lo), self.hi), self.precision_bits)

    def square(self) -> "Interval":
        a = self.abs()
        return a * a

    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise DomainError("sqrt of an interval with negative part")
        p = self.precision_bits
        return Interval(_wrap(_lm.mpf_sqrt(self.lo._mpf_, p, _FLOOR)),
                        _wrap(_lm.mpf_sqrt(self.hi._mpf_, p, _CEIL)), p)

    def log2(self) -> "Interval":
        if self.lo <= 0:
            raise DomainError("log2 of an interval that is not strictly positive")
        p = self.precision_bits
        return Interval(_wrap(_log2_raw(self.lo._mpf_, p, False)),
                        _wrap(_log2_raw(self.hi._mpf_, p, True)), p)

    def exp2(self) -> "Interval":
        p = self.precision_bits
        return Interval(_wrap(_exp2_raw(self.lo._mpf_, p, False)),
                        _wrap(_exp2_raw(self.hi._mpf_, p, True)), p)

    def with_precision(self, prec: int) -> "Interval":
        return Interval(_wrap(_lm.mpf_pos(self.lo._mpf_, prec, _FLOOR)),
                        _wrap(_lm.mpf_pos(self.hi._mpf_, prec, _CEIL)), prec)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi), self._prec(other))


def _log2_raw(x, prec: int, upward: bool):
    sign, man, exp, bc = x
    if man == 1 and not sign:
        return _lm.from_int(exp)
    wp = prec + 20
    value = _lm.mpf_div(_lm.mpf_log(x, wp, _NEAR), _lm.mpf_ln2(wp, _NEAR), wp, _NEAR)
    return _widen(value, prec, upward)


def _exp2_raw(x, prec: int, upward: bool):
    if x == _lm.fninf:
        return _lm.fzero
    if x == _lm.finf:
        return _lm.finf
    sign, man, exp, bc = x
    if exp >= 0:
        n = -(int(man) << exp) if sign else int(man) << exp
        return _lm.from_man_exp(1, n)
    # split off the integer part so the transcendental step sees |frac| < 1
    whole = _lm.to_int(x, _FLOOR)
    frac = _lm.mpf_sub(x, _lm.from_int(whole), 0)
    wp = prec + 20
    ln2 = _lm.mpf_ln2(wp + 10, _NEAR)
    value = _lm.mpf_exp(_lm.mpf_mul(frac, ln2, wp + 10, _NEAR), wp, _NEAR)
    return _lm.mpf_shift(_widen(value, prec, upward), whole)


def interval_sin_pi(t: Interval) -> Interval:
    """Enclosure of ``sin(pi*t)`` for ``t`` inside ``[0, 1/2]``."""
    if t.lo < 0 or _cmp_fraction(t.hi._mpf_, Fraction(1, 2)) > 0:
        raise DomainError("interval_sin_pi needs t within [0, 1/2]; "
                          "reduce with nearest_int_distance first")
    p = t.precision_bits
    wp = p + 20

    def bound(raw, upward):
        if raw == _lm.fzero:
            return raw
        if _cmp_fraction(raw, Fraction(1, 2)) == 0:
            return _lm.fone
        v = _widen(_lm.mpf_sin_pi(raw, wp, _NEAR), p, upward)
        if _lm.mpf_gt(v, _lm.fone):
            return _lm.fone
        return v

    return Interval(_wrap(bound(t.lo._mpf_, False)), _wrap(bound(t.hi._mpf_, True)), p)


def interval_cos_sin_2pi(lo, hi=None, prec: int = DEFAULT_PRECISION) -> tuple[Interval, Interval]:
    """Enclosures of ``cos(2 pi t)`` and ``sin(2 pi t)`` for every t in ``[lo, hi]``.

    Evaluates at a representable midpoint and adds ``7 * radius`` (the
    functions are 2*pi-Lipschitz); meant for narrow ranges.
    """
    lo = as_fraction(lo)
    hi = lo if hi is None else as_fraction(hi)
    shift = math.floor(lo)
    lo, hi = lo - shift, hi - shift
    wp = prec + 20
    mid = (lo + hi) / 2
    mid_raw = _from_fraction(mid, wp, _NEAR)
    radius = (hi - lo) / 2 + abs(mid - mpf_to_fraction(_wrap(mid_raw)))
    c, s = _lm.mpf_cos_sin_pi(_lm.mpf_shift(mid_raw, 1), wp, _NEAR)
    slack = _from_fraction(7 * radius, prec, _CEIL)

    def enclose(raw):
        low = _lm.mpf_sub(_widen(raw, prec, False), slack, prec, _FLOOR)
        high = _lm.mpf_add(_widen(raw, prec, True), slack, prec, _CEIL)
        if _lm.mpf_lt(low, _lm.fnone):
            low = _lm.fnone
        if _lm.mpf_gt(high, _lm.fone):
            high = _lm.fone
        return Interval(_wrap(low), _wrap(high), prec)

    return enclose(c), enclose(s)


# -- log2-domain magnitudes --------------------------------------------------

@dataclass(frozen=True)
class LogMagnitude:
    """Enclosure of a non-negative quantity ``v`` via ``log2(v) in [log2_lo, log2_hi]``.

    ``zero_flag`` marks a quantity known to be exactly zero; both log bounds
    are then ``-inf``.  A finite ``log2_hi`` with ``log2_lo == -inf`` means the
    quantity is bounded above but possibly zero.
    """

    log2_lo: mpmath.mpf
    log2_hi: mpmath.mpf
    zero_flag: bool = False

    def __post_init__(self):
        for name in ("log2_lo", "log2_hi"):
            v = getattr(self, name)
            if not isinstance(v, mpmath.mpf):
                object.__setattr__(self, name, _wrap(_raw(v)))
        if self.zero_flag:
            if self.log2_hi != mpmath.mpf("-inf"):
                raise DomainError("zero magnitude must have log2 bounds -inf")
        elif self.log2_lo > self.log2_hi:
            raise DomainError(f"log2_lo > log2_hi: {self.log2_lo} > {self.log2_hi}")

    @classmethod
    def zero(cls) -> "LogMagnitude":
        ninf = _wrap(_lm.fninf)
        return cls(ninf, ninf, True)

    @classmethod
    def exact_log2(cls, value) -> "LogMagnitude":
        """Magnitude ``2**value`` for an exactly known exponent."""
        if isinstance(value, mpmath.mpf):
            return cls(value, value)
        iv = Interval.point(value, DEFAULT_PRECISION)
        return cls(iv.lo, iv.hi)

    @classmethod
    def from_log2_interval(cls, iv: Interval) -> "LogMagnitude":
        return cls(iv.lo, iv.hi)

    @classmethod
    def of(cls, value, prec: int = DEFAULT_PRECISION) -> "LogMagnitude":
        """Magnitude of a positive rational, an Interval, or an existing LogMagnitude."""
        if isinstance(value, LogMagnitude):
            return value
        if isinstance(value, Interval):
            return cls.from_interval(value)
        value = as_fraction(value)
        if value < 0:
            raise DomainError("LogMagnitude needs a non-negative value")
        if value == 0:
            return cls.zero()
        lo = _lm.mpf_sub(_log2_int(value.numerator, prec, False),
                         _log2_int(value.denominator, prec, True), prec, _FLOOR)
        hi = _lm.mpf_sub(_log2_int(value.numerator, prec, True),
                         _log2_int(value.denominator, prec, False), prec, _CEIL)
        return cls(_wrap(lo), _wrap(hi))

    @classmethod
    def from_interval(cls, iv: Interval) -> "LogMagnitude":
        if iv.lo < 0:
            raise DomainError("LogMagnitude of an interval with negative part")
        if iv.hi == 0:
            return cls.zero()
        lo = _lm.fninf if iv.lo == 0 else _log2_raw(iv.lo._mpf_, iv.precision_bits, False)
        return cls(_wrap(lo), _wrap(_log2_raw(iv.hi._mpf_, iv.precision_bits, True)))

    # inspection

    @property
    def is_zero(self) -> bool:
        return self.zero_flag

    def log2_interval(self, prec: int = DEFAULT_PRECISION) -> Interval:
        return Interval(self.log2_lo, self.log2_hi, prec)

    def to_interval(self, prec: int = DEFAULT_PRECISION) -> Interval:
        """Linear-scale enclosure; raises if the magnitude is absurdly large."""
        if self.zero_flag:
            return Interval.point(0, prec)
        if self.log2_hi > 2**40:
            raise InsufficientPrecision("magnitude beyond linear representable range")
        lo = _lm.fzero if self.log2_lo == mpmath.mpf("-inf") else _exp2_raw(self.log2_lo._mpf_, prec, False)
        return Interval(_wrap(lo), _wrap(_exp2_raw(self.log2_hi._mpf_, prec, True)), prec)

    def __repr__(self):
        if self.zero_flag:
            return "LogMagnitude(0)"
        return f"LogMagnitude(log2 in [{mpmath.nstr(self.log2_lo, 12)}, {mpmath.nstr(self.log2_hi, 12)}])"

    # arithmetic

    def __mul__(self, other) -> "LogMagnitude":
        other = LogMagnitude.of(other)
        if self.zero_flag or other.zero_flag:
            return LogMagnitude.zero()
        p = DEFAULT_PRECISION
        return LogMagnitude(_wrap(_lm.mpf_add(self.log2_lo._mpf_, other.log2_lo._mpf_, p, _FLOOR)),
                            _wrap(_lm.mpf_add(self.log2_hi._mpf_, other.log2_hi._mpf_, p, _CEIL)))

    __rmul__ = __mul__

    def reciprocal(self) -> "LogMagnitude":
        if self.zero_flag or self.log2_lo == mpmath.mpf("-inf"):
            raise DomainError("reciprocal of a magnitude that may be zero")
        return LogMagnitude(_neg(self.log2_hi), _neg(self.log2_lo))

    def __truediv__(self, other) -> "LogMagnitude":
        return self * LogMagnitude.of(other).reciprocal()

    def __rtruediv__(self, other) -> "LogMagnitude":
        return LogMagnitude.of(other) * self.reciprocal()

    def __pow__(self, exponent) -> "LogMagnitude":
        """Raise to an integer or rational power (integers may be huge)."""
        exponent = as_fraction(exponent)
        if self.zero_flag:
            if exponent <= 0:
                raise DomainError("0 raised to a non-positive power")
            return self
        if exponent == 0:
            return LogMagnitude.exact_log2(0)
        p = DEFAULT_PRECISION

        def scale(raw, rnd):
            if raw in (_lm.finf, _lm.fninf):
                return raw if exponent > 0 else _lm.mpf_neg(raw)
            num = _lm.mpf_mul(raw, _lm.from_int(exponent.numerator), p, rnd)
            return _lm.mpf_div(num, _lm.from_int(exponent.denominator), p, rnd)

        if exponent > 0:
            return LogMagnitude(_wrap(scale(self.log2_lo._mpf_, _FLOOR)),
                                _wrap(scale(self.log2_hi._mpf_, _CEIL)))
        if self.log2_lo == mpmath.mpf("-inf"):
            raise DomainError("negative power of a magnitude that may be zero")
        return LogMagnitude(_wrap(scale(self.log2_hi._mpf_, _FLOOR)),
                            _wrap(scale(self.log2_lo._mpf_, _CEIL)))

    def root(self, n: int) -> "LogMagnitude":
        return self ** Fraction(1, n)

    def __add__(self, other) -> "LogMagnitude":
        """Magnitude of the sum of two non-negative quantities."""
        other = LogMagnitude.of(other)
        if self.zero_flag:
            return other
        if other.zero_flag:
            return self
        return LogMagnitude(_wrap(_log2_sum(self.log2_lo._mpf_, other.log2_lo._mpf_, False)),
                            _wrap(_log2_sum(self.log2_hi._mpf_, other.log2_hi._mpf_, True)))

    __radd__ = __add__

    # certified comparisons

    def certainly_lt(self, other) -> bool:
        other = LogMagnitude.of(other)
        if other.zero_flag:
            return False
        if self.zero_flag:
            return other.log2_lo > mpmath.mpf("-inf")
        return self.log2_hi < other.log2_lo

    def certainly_le(self, other) -> bool:
        other = LogMagnitude.of(other)
        if self.zero_flag:
            return True
        if other.zero_flag:
            return False
        return self.log2_hi <= other.log2_lo

    def certainly_gt(self, other) -> bool:
        return LogMagnitude.of(other).certainly_lt(self)

    def certainly_ge(self, other) -> bool:
        return LogMagnitude.of(other).certainly_le(self)

    def log2_at_least(self, bound) -> bool:
        """True when ``log2(v) >= bound`` is certified."""
        return not self.zero_flag and _cmp_fraction(self.log2_lo._mpf_, as_fraction(bound)) >= 0

    def log2_at_most(self, bound) -> bool:
        return self.zero_flag or _cmp_fraction(self.log2_hi._mpf_, as_fraction(bound)) <= 0


def _log2_int(n: int, prec: int, upward: bool):
    if n <= 0:
        raise DomainError("log2 of a non-positive integer")
    if n & (n - 1) == 0:
        return _lm.from_int(n.bit_length() - 1)
    raw = _lm.from_int(n, prec + 20, _CEIL if upward else _FLOOR)
    return _log2_raw(raw, prec, upward)


def _log2_sum(a, b, upward: bool):
    """Directed bound on log2(2**a + 2**b)."""
    p = DEFAULT_PRECISION
    if a == _lm.fninf:
        return b
    if b == _lm.fninf:
        return a
    hi, lo = (a, b) if _lm.mpf_ge(a, b) else (b, a)
    gap = _lm.mpf_sub(hi, lo, p, _FLOOR if upward else _CEIL)
    if _lm.mpf_gt(gap, _lm.from_int(p + 16)):
        if not upward:
            return hi
        # log2(1 + 2**-g) <= 2**-g / ln 2 < 2**(1-g)
        g = _lm.to_int(gap, _FLOOR)
        return _lm.mpf_add(hi, _lm.from_man_exp(1, 1 - g), p, _CEIL)
    one_plus = _lm.mpf_add(_lm.fone, _exp2_raw(_lm.mpf_neg(gap), p, upward), p + 20,
                           _CEIL if upward else _FLOOR)
    return _lm.mpf_add(hi, _log2_raw(one_plus, p, upward), p, _CEIL if upward else _FLOOR)


def log2_of_product(factors: Iterable[tuple[object, object]]) -> LogMagnitude:
    """Enclose ``sum(exponent * log2(base))`` for ``(base, exponent)`` pairs.

    Bases may be ints, Fractions, Intervals or LogMagnitudes and must be
    strictly positive; exponents are (possibly huge) integers or Fractions.
    """
    total = LogMagnitude.exact_log2(0)
    for base, exponent in factors:
        if isinstance(base, Interval):
            if base.lo <= 0:
                raise DomainError(f"log2_of_product needs positive bases, got {base}")
        elif isinstance(base, LogMagnitude):
            if base.zero_flag or base.log2_lo == mpmath.mpf("-inf"):
                raise DomainError("log2_of_product needs positive bases")
        elif as_fraction(base) <= 0:
            raise DomainError(f"log2_of_product needs positive bases, got {base}")
        total = total * (LogMagnitude.of(base) ** exponent)
    return total


def refine(compute: Callable[[int], T], precision_bits: int = DEFAULT_PRECISION,
           max_refinements: int = MAX_REFINEMENTS) -> T:
    """Run ``compute(prec)``, doubling ``prec`` on InsufficientPrecision."""
    prec = precision_bits
    for attempt in range(max_refinements + 1):
        try:
            return compute(prec)
        except InsufficientPrecision:
            if attempt == max_refinements:
                raise
            prec *= 2
    raise AssertionError("unreachable")
