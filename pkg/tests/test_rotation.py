from fractions import Fraction
import random

import mpmath
import pytest
from hypothesis import given, strategies as st

from rotospec.arith import Interval, LogMagnitude, mpf_to_fraction
from rotospec.errors import DomainError
from rotospec.rotation import (
    CirclePoint,
    DecimalBall,
    LiouvilleSymbolic,
    QuadraticSurd,
    RationalAngle,
    angle_distance,
    liouville_levels,
    moebius,
    orbit_gaps,
    small_divisor,
    small_divisor_sequence,
)

from oracles import circle_gaps, cluster, divisor, golden, liouville_partial_sums

GOLDEN = QuadraticSurd(-1, 1, 2, 5)


def contains(div, ref):
    if isinstance(div, LogMagnitude):
        with mpmath.workdps(80):
            return div.log2_lo <= mpmath.log(ref, 2) <= div.log2_hi
    return div.lo <= ref <= div.hi


@given(st.fractions(min_value=0, max_value=Fraction(63, 64), max_denominator=64),
       st.integers(min_value=1, max_value=200))
def test_rational_divisor_matches_sine_oracle(x, n):
    div = small_divisor(RationalAngle(x), n, Fraction(1, 7))
    assert contains(div, divisor(x, n, Fraction(1, 7)))


@given(st.integers(min_value=1, max_value=5000))
def test_golden_divisor_matches_sine_oracle(n):
    assert contains(small_divisor(GOLDEN, n), divisor(golden(), n))


def test_exact_zero_divisor_on_orbit():
    x = RationalAngle(Fraction(2, 5))
    div = small_divisor(x, 5)
    assert isinstance(div, Interval) and div.lo == 0 and div.hi == 0
    assert small_divisor(x, 3, CirclePoint.orbit(3)).hi == 0
    # irrational orbit points are exact too
    assert small_divisor(GOLDEN, 7, CirclePoint.orbit(7)).hi == 0


def test_log_domain_divisor_for_liouville():
    # |r^256 - 1| for x(2) is about 2^-2037, far below the linear cut-off
    div = small_divisor(LiouvilleSymbolic(2), 256)
    assert isinstance(div, LogMagnitude)
    assert div.log2_at_least(-2038) and div.log2_at_most(-2037)


def test_sequence_is_lazy_and_matches_pointwise():
    seq = small_divisor_sequence(GOLDEN, CirclePoint.at(0), 10**9)
    first = [next(seq) for _ in range(20)]
    for e in first:
        assert contains(e.divisor, divisor(golden(), e.n))
    assert [e.n for e in first] == list(range(1, 21))


def test_angle_distance_exact_for_rationals():
    d = angle_distance(RationalAngle(Fraction(1, 3)), 2, Fraction(1, 2))
    assert d.is_exact and not d.is_zero
    assert mpf_to_fraction(d.magnitude().to_interval().lo) <= Fraction(1, 6)


def test_liouville_levels_exact_evaluation():
    qs, sums = liouville_levels(2)
    ref_q, ref_s = liouville_partial_sums(2, 4)
    assert qs == tuple(ref_q) and sums == tuple(ref_s)
    assert sums[:3] == (Fraction(1, 2), Fraction(3, 4), Fraction(193, 256))
    assert LiouvilleSymbolic(2).exact_depth == 4
    assert LiouvilleSymbolic(3).exact_depth == 3


def test_liouville_enclosure_contains_deeper_sum():
    x = LiouvilleSymbolic(3)
    lo, hi = x.enclosure()
    qs, sums = liouville_partial_sums(3, 3)
    assert lo == sums[-1] < hi
    assert hi - lo <= Fraction(1, qs[-1] ** 2)


def test_surd_normalisation_and_validation():
    assert GOLDEN.descriptor() == "surd:(-1+1*sqrt(5))/2"
    assert QuadraticSurd(0, 2, 1, 8).d == 2  # sqrt(8) = 2 sqrt(2)
    for bad in ((1, 1, 0, 5), (1, 1, 1, 4), (1, 0, 1, 5)):
        with pytest.raises(DomainError):
            QuadraticSurd(*bad)


def test_decimal_ball():
    b = DecimalBall(Fraction(5, 4), Fraction(1, 100))
    assert b.center == Fraction(1, 4)
    assert b.descriptor() == "ball:1/4±1/100"
    with pytest.raises(DomainError):
        DecimalBall(Fraction(1, 2), 0)


def _check_against_sort_oracle(x_ref, rep):
    groups = cluster(circle_gaps(x_ref, rep.N))
    assert rep.point_count == sum(k for _, k in groups)
    assert len(rep.distinct_gaps) == len(groups)
    for (iv, k), (ref, k_ref) in zip(sorted(rep.distinct_gaps, key=lambda g: g[0].mid()), groups):
        assert k == k_ref
        assert iv.lo <= ref <= iv.hi


def test_orbit_gaps_golden_small():
    rep = orbit_gaps(GOLDEN, 5)
    _check_against_sort_oracle(golden(), rep)
    counts = sorted((float(g), k) for g, k in rep.distinct_gaps)
    assert [k for _, k in counts] == [2, 3]
    assert abs(counts[0][0] - 0.1458980337503155) < 1e-12
    assert abs(counts[1][0] - 0.2360679774997897) < 1e-12


@pytest.mark.parametrize("N", [10, 97, 500])
def test_orbit_gaps_random_surds_and_rationals(N):
    rng = random.Random(N)
    for _ in range(4):
        x = Fraction(rng.randrange(1, 997), 997)
        rep = orbit_gaps(RationalAngle(x), N)
        assert rep.exact and rep.three_gap_consistent()
        _check_against_sort_oracle(x, rep)
    d = rng.choice([2, 3, 5, 6, 7, 10, 11])
    rep = orbit_gaps(QuadraticSurd(0, 1, 1, d), N)
    with mpmath.workdps(80):
        ref = mpmath.sqrt(d)
    _check_against_sort_oracle(ref, rep)
    assert rep.three_gap_consistent()


def test_rational_orbit_collapses_to_one_gap():
    rep = orbit_gaps(RationalAngle(Fraction(3, 7)), 100)
    assert rep.point_count == 7
    assert [k for _, k in rep.distinct_gaps] == [7]
    assert rep.distinct_gaps[0][0].contains(Fraction(1, 7))


def test_moebius_involution():
    a = 0.3 + 0.2j
    z = -0.5 + 0.1j
    assert abs(moebius(a, moebius(a, z)) - z) < 1e-12
    assert abs(moebius(a, a)) < 1e-15
    with pytest.raises(DomainError):
        moebius(1.0 + 0j, 0j)
