from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from rotospec.arith import (
    Interval,
    LogMagnitude,
    as_fraction,
    interval_cos_sin_2pi,
    interval_sin_pi,
    log2_of_product,
    mpf_from_str,
    mpf_to_fraction,
    mpf_to_str,
    nearest_int_distance,
    refine,
)
from rotospec.errors import DomainError, InsufficientPrecision

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
positive = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6, max_denominator=10**6)


def encloses(iv, value):
    lo, hi = iv.fractions()
    return lo <= value <= hi


@given(fractions, fractions)
def test_interval_arithmetic_encloses_exact_result(a, b):
    A, B = Interval.point(a, 64), Interval.point(b, 64)
    assert encloses(A + B, a + b)
    assert encloses(A - B, a - b)
    assert encloses(A * B, a * b)
    if b != 0:
        assert encloses(A / B, a / b)


@given(fractions)
def test_point_interval_is_tight(a):
    iv = Interval.point(a, 128)
    lo, hi = iv.fractions()
    assert lo <= a <= hi
    assert hi - lo <= abs(a) * Fraction(1, 2**126) + Fraction(1, 2**1000)


def test_sin_pi_rejects_unreduced_argument():
    with pytest.raises(DomainError):
        interval_sin_pi(Interval.point(1))


def test_division_by_interval_through_zero():
    with pytest.raises(InsufficientPrecision):
        Interval.point(1) / Interval.from_fractions(-1, 1)


def test_lo_above_hi_rejected():
    with pytest.raises(DomainError):
        Interval.from_fractions(2, 1)


@given(st.fractions(min_value=0, max_value=Fraction(1, 2), max_denominator=10**5))
def test_sin_pi_matches_mpmath(t):
    iv = interval_sin_pi(Interval.point(t, 96))
    with mpmath.workdps(60):
        ref = mpmath.sinpi(mpmath.mpf(t.numerator) / t.denominator)
        assert iv.lo <= ref <= iv.hi
    assert mpf_to_fraction(iv.width()) < Fraction(1, 2**80)


@given(st.fractions(min_value=-3, max_value=3, max_denominator=10**5))
def test_cos_sin_2pi_matches_mpmath(t):
    c, s = interval_cos_sin_2pi(t, prec=96)
    with mpmath.workdps(60):
        u = 2 * mpmath.mpf(t.numerator) / t.denominator
        assert c.lo <= mpmath.cospi(u) <= c.hi
        assert s.lo <= mpmath.sinpi(u) <= s.hi


def test_pi_enclosure():
    iv = Interval.pi(200)
    with mpmath.workdps(80):
        assert iv.lo <= mpmath.pi <= iv.hi


@given(positive)
def test_log2_exp2_roundtrip(a):
    iv = Interval.point(a, 96)
    back = iv.log2().exp2()
    assert encloses(back, a)


@given(fractions)
def test_mpf_string_roundtrip(a):
    v = Interval.point(a, 128).lo
    assert mpf_from_str(mpf_to_str(v)) == v
    assert mpf_to_fraction(mpf_from_str(mpf_to_str(v))) == mpf_to_fraction(v)


def test_mpf_roundtrip_keeps_all_bits():
    # a 300-bit mantissa must survive; rounding to 53 bits would be a soundness bug
    v = Interval.point(Fraction(1, 3), 300).lo
    assert mpf_to_fraction(mpf_from_str(mpf_to_str(v))) == mpf_to_fraction(v)
    assert Fraction(1, 3) - mpf_to_fraction(v) < Fraction(1, 2**290)


def test_nearest_int_distance_and_as_fraction():
    assert nearest_int_distance(Fraction(7, 3)) == Fraction(1, 3)
    assert nearest_int_distance(Fraction(5, 2)) == Fraction(1, 2)
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(2) == 2


@given(positive, positive)
def test_logmagnitude_product_quotient(a, b):
    A, B = LogMagnitude.of(a), LogMagnitude.of(b)
    assert encloses((A * B).to_interval(), a * b)
    assert encloses((A / B).to_interval(), a / b)
    assert encloses(A.reciprocal().to_interval(), 1 / a)
    assert encloses((A + B).to_interval(), a + b)


@given(positive, st.integers(min_value=0, max_value=300))
def test_logmagnitude_integer_power(a, k):
    p = LogMagnitude.of(a) ** k
    with mpmath.workdps(80):
        ref = k * mpmath.log(mpmath.mpf(a.numerator) / a.denominator, 2)
        slack = mpmath.mpf(10) ** -60
        assert p.log2_lo <= ref + slack
        assert ref - slack <= p.log2_hi


def test_logmagnitude_beyond_float_range():
    # (1/2)**(2**2048) has log2 exactly -2**2048
    q = LogMagnitude.of(Fraction(1, 2)) ** (2**2048)
    assert q.log2_at_most(-(2**2047))
    assert not q.is_zero
    with pytest.raises(InsufficientPrecision):
        LogMagnitude.exact_log2(2**4000).to_interval()


def test_logmagnitude_zero_rules():
    z = LogMagnitude.zero()
    assert z.is_zero
    assert z.certainly_lt(LogMagnitude.of(Fraction(1, 10**100)))
    with pytest.raises(DomainError):
        z.reciprocal()


def test_logmagnitude_root():
    r = LogMagnitude.of(2**256).root(256)
    assert r.certainly_ge(LogMagnitude.of(Fraction(1999, 1000)))
    assert r.certainly_le(LogMagnitude.of(Fraction(2001, 1000)))


def test_log2_of_product():
    m = log2_of_product([(Fraction(3), 2), (Fraction(1, 2), 10)])
    assert encloses(m.to_interval(), Fraction(9, 1024))


def test_refine_doubles_then_gives_up():
    seen = []

    def compute(bits):
        seen.append(bits)
        if bits < 500:
            raise InsufficientPrecision("more bits")
        return bits

    assert refine(compute, 64) == 512
    assert seen == [64, 128, 256, 512]
    with pytest.raises(InsufficientPrecision):
        refine(compute, 16, max_refinements=2)
