import csv
import io
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from rotospec.errors import DomainError, EigenCollision
from rotospec.rotation import CirclePoint, LiouvilleSymbolic, QuadraticSurd, RationalAngle
from rotospec.series import (
    ComplexInterval,
    ExactComplex,
    Finite,
    Geometric,
    Ones,
    Tabulated,
    exact_cos_sin_2pi,
    radius_window_estimate,
    resolvent_apply,
    seminorm,
    to_csv,
)
from rotospec.spectrum import ComplexPoint

from oracles import golden

small = st.fractions(min_value=-20, max_value=20, max_denominator=50)


@given(small, small, small, small)
def test_exact_complex_field_ops(a, b, c, d):
    z, w = ExactComplex(a, b), ExactComplex(c, d)
    ref_z, ref_w = complex(a, b), complex(c, d)
    prod = z * w
    assert abs(complex(float(prod.re), float(prod.im)) - ref_z * ref_w) < 1e-9
    if w.abs2() != 0:
        q = z / w
        assert q * w == z
    zi = ComplexInterval.of(z)
    assert (zi * ComplexInterval.of(w)).contains(prod)


def test_seminorm_values():
    assert float(seminorm(Ones(), Fraction(1, 2), 50).value) == 0.5
    r = seminorm(Geometric(Fraction(2)), Fraction(1, 2), 50)
    assert r.value.contains(1) and "decreasing" not in r.tail_note
    f = seminorm(Finite(((1, 3), (4, Fraction(1, 2)))), Fraction(1, 10), 10)
    assert f.value.contains(Fraction(3, 10)) and f.argmax == 1
    assert f.tail_note == "finite support: no terms beyond the horizon"
    with pytest.raises(DomainError):
        seminorm(Ones(), 1, 5)


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100))
def test_seminorm_matches_brute_force(alpha):
    g = Geometric(Fraction(3, 2))
    r = seminorm(g, alpha, 40)
    ref = max(Fraction(3, 2) ** n * alpha**n for n in range(1, 41))
    assert r.value.contains(ref)


def test_exact_trig_table():
    with mpmath.workdps(30):
        for k in range(24):
            t = Fraction(k, 24)
            c, s = exact_cos_sin_2pi(t)
            if c is not None:
                assert abs(mpmath.cospi(2 * mpmath.mpf(k) / 24) - c) < 1e-25
            if s is not None:
                assert abs(mpmath.sinpi(2 * mpmath.mpf(k) / 24) - s) < 1e-25


def test_resolvent_exact_half_turn():
    t = resolvent_apply(Ones(), RationalAngle(Fraction(1, 2)), ComplexPoint(Fraction(3)), 3)
    assert [e.b_exact for e in t.entries] == [ExactComplex(Fraction(-1, 4)), ExactComplex(Fraction(-1, 2)),
                                              ExactComplex(Fraction(-1, 4))]
    assert all(e.tier == "exact" for e in t.entries)
    assert t.uniform_bound_ok


def test_resolvent_roundtrip_multiplies_back():
    x = RationalAngle(Fraction(1, 5))
    lam = ComplexPoint(Fraction(1, 2), Fraction(1, 3))
    t = resolvent_apply(Geometric(Fraction(1, 2)), x, lam, 12)
    for e in t.entries:
        prod = (e.b_interval or ComplexInterval.of(e.b_exact)) * e.difference
        assert prod.contains(e.a)


def test_resolvent_golden_interval_tier_against_oracle():
    t = resolvent_apply(Ones(), QuadraticSurd(-1, 1, 2, 5), CirclePoint.at(0), 30)
    with mpmath.workdps(50):
        g = golden()
        for e in t.entries:
            ref = 1 / abs(2 * mpmath.sin(mpmath.pi * e.n * g))
            assert e.b_magnitude.log2_lo <= mpmath.log(ref, 2) <= e.b_magnitude.log2_hi


def test_resolvent_zero_point():
    t = resolvent_apply(Ones(), RationalAngle(Fraction(1, 3)), ComplexPoint(Fraction(0)), 6)
    # |r^n - 0|^2 = 1 exactly, even where sin(2 pi n/3) is irrational
    assert all(e.divisor_sq_exact == 1 for e in t.entries)
    assert all(e.b_magnitude.log2_lo <= 0 <= e.b_magnitude.log2_hi for e in t.entries)


def test_resolvent_eigen_collision():
    with pytest.raises(EigenCollision):
        resolvent_apply(Ones(), RationalAngle(Fraction(1, 3)), CirclePoint.at(0), 5)


def test_liouville_coefficient_blowup_and_radius():
    t = resolvent_apply(Finite(((256, 1),)), LiouvilleSymbolic(2), CirclePoint.at(0), 256)
    e = t.entry(256)
    assert e.tier == "log"
    assert e.b_magnitude.log2_at_least(2037) and e.b_magnitude.log2_at_most(2038)
    radius = radius_window_estimate(t, [256])
    assert radius.hi <= 0.00403 and radius.lo >= 0.00401
    assert radius_window_estimate(t, [3]).lo == float("inf")


def test_radius_of_plain_streams():
    assert radius_window_estimate(Geometric(Fraction(2)), [10, 20]).contains(Fraction(1, 2))
    with pytest.raises(DomainError):
        radius_window_estimate(Ones(), [])


def test_tabulated_stream_and_csv():
    tab = Tabulated(lambda n: Fraction(1, n), 5)
    assert list(tab.indices(100)) == [1, 2, 3, 4, 5]
    t = resolvent_apply(tab, RationalAngle(Fraction(1, 3)), ComplexPoint(Fraction(2)), 5)
    rows = list(csv.reader(io.StringIO(to_csv(t))))
    assert rows[0] == ["n", "re", "im", "divisor_log2_lo", "divisor_log2_hi", "b_n_log2_magnitude"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4", "5"]
    # n = 3: r^3 = 1, so |1 - 2| = 1 and log2 is 0 on both sides
    assert rows[3][3] == rows[3][4] == "0.000000000000"
    for r in rows[1:]:
        assert float(r[3]) <= float(r[4])
