from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from rotospec.arith import LogMagnitude
from rotospec.certificates import (
    DiophantineCertificate,
    Justification,
    LiouvilleWitness,
    asymptotic_constant,
    construct_liouville,
    derive_diophantine_certificate,
    max_partial_quotient,
    verify_diophantine,
    verify_liouville_witness,
)
from rotospec.contfrac import Convergent
from rotospec.errors import DomainError
from rotospec.rotation import LiouvilleSymbolic, QuadraticSurd, RationalAngle

from oracles import golden, liouville_partial_sums, sqrt2_minus_1

GOLDEN = QuadraticSurd(-1, 1, 2, 5)
SQRT2 = QuadraticSurd(-1, 1, 1, 2)


def brute_min_q_norm(x_ref, Q):
    """min over every q <= Q of q * ||q x||, by scanning."""
    with mpmath.workdps(60):
        return min((q * abs(q * x_ref - mpmath.nint(q * x_ref)), q) for q in range(1, Q + 1))


def test_construct_m2_exact_values():
    c = construct_liouville(2, 3)
    qs, sums = liouville_partial_sums(2, 3)
    assert c.q_sequence == (2, 4, 256) == tuple(qs)
    assert c.partial_sums == (Fraction(1, 2), Fraction(3, 4), Fraction(193, 256)) == tuple(sums)
    assert c.truncated is None
    assert [a.q for a in c.witness.approximants] == [4, 256]
    assert c.chain == (False, True, True)


def test_construct_past_budget_keeps_log_level():
    c = construct_liouville(3, 4)
    assert len(c.q_sequence) == 4
    assert isinstance(c.q_sequence[-1], LogMagnitude)
    assert "budget" in c.truncated
    # q_4 = q_3**q_3 with q_3 = 27**27 = 3**81
    with mpmath.workdps(80):
        ref = 3**81 * 81 * mpmath.log(3, 2)
        assert c.q_sequence[-1].log2_lo <= ref <= c.q_sequence[-1].log2_hi


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_witness_passes_from_level_two(m):
    c = construct_liouville(m, 4)
    rep = verify_liouville_witness(c.rotation, c.witness)
    assert rep.passed, rep.checks
    assert [k.index for k in rep.checks] == list(range(2, c.rotation.exact_depth + 1))


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_level_one_fails_exactly(m):
    # x(m) - 1/m = m**-m + (positive tail), so the bound (1/m)**m is exceeded
    x = LiouvilleSymbolic(m)
    w = LiouvilleWitness(Fraction(1, m), (Convergent(1, m, 1),))
    rep = verify_liouville_witness(x, w)
    assert [k.status for k in rep.checks] == ["fail"]
    _, sums = liouville_partial_sums(m, 2)
    assert sums[1] - Fraction(1, m) == Fraction(1, m) ** m


def test_witness_against_high_precision_oracle():
    with mpmath.workdps(1200):
        x = sum(mpmath.mpf(1) / q for q in (2, 4, 256, mpmath.mpf(2) ** 2048))
        for p, q in ((3, 4), (193, 256)):
            err = abs(x - mpmath.mpf(p) / q)
            assert err <= mpmath.mpf(2) ** -q
    rep = verify_liouville_witness(LiouvilleSymbolic(2), construct_liouville(2, 3).witness)
    assert rep.passed


def test_golden_is_not_liouville():
    w = LiouvilleWitness(Fraction(1, 2), (Convergent(2, 3, 3), Convergent(5, 8, 5)))
    rep = verify_liouville_witness(GOLDEN, w)
    assert [k.status for k in rep.checks] == ["pass", "fail"]
    with mpmath.workdps(40):
        assert abs(golden() - mpmath.mpf(5) / 8) > mpmath.mpf(2) ** -8


def test_diophantine_golden_pass_and_fail():
    ref, q_ref = brute_min_q_norm(golden(), 10**4)
    assert q_ref == 1 and abs(ref - mpmath.mpf("0.38196601125010515")) < 1e-15
    ok = verify_diophantine(GOLDEN, DiophantineCertificate(Fraction(35, 100)), 10**4)
    assert ok.passed and ok.tightest.q == 1
    assert ok.certificate.verified_up_to_q == 10**4
    assert ok.certificate.asymptotic_justification is Justification.PERIODIC_CF
    bad = verify_diophantine(GOLDEN, DiophantineCertificate(Fraction(40, 100)), 10**4)
    assert not bad.passed and bad.first_violation.q == 1


@pytest.mark.parametrize("c, first_bad", [(Fraction(1, 10), 4), (Fraction(1, 100), 256)])
def test_diophantine_fails_for_liouville(c, first_bad):
    rep = verify_diophantine(LiouvilleSymbolic(2), DiophantineCertificate(c), 256)
    assert not rep.passed and rep.first_violation.q == first_bad
    with mpmath.workdps(700):
        x = sum(mpmath.mpf(1) / q for q in (2, 4, 256, mpmath.mpf(2) ** 2048))
        # the brute-force scan agrees on the first denominator below c
        first = next(q for q in range(1, 257) if q * abs(q * x - mpmath.nint(q * x)) < c.numerator / mpmath.mpf(c.denominator))
    assert first == first_bad


def test_derived_certificates_match_brute_force():
    for x, ref in ((GOLDEN, golden()), (SQRT2, sqrt2_minus_1())):
        cert = derive_diophantine_certificate(x, Q=10**4)
        low, _ = brute_min_q_norm(ref, 10**4)
        assert Fraction(cert.c) <= Fraction(str(mpmath.nstr(low, 20)))
        assert Fraction(str(mpmath.nstr(low, 20))) - cert.c < Fraction(1, 100)
    assert derive_diophantine_certificate(GOLDEN).c == Fraction(19, 50)
    assert derive_diophantine_certificate(SQRT2).c == Fraction(17, 50)


def test_asymptotic_constant_uses_quotient_bound():
    assert max_partial_quotient(SQRT2) == 2
    assert asymptotic_constant(SQRT2, DiophantineCertificate(Fraction(1, 2))) == Fraction(1, 4)
    assert asymptotic_constant(GOLDEN, DiophantineCertificate(Fraction(1, 10))) == Fraction(1, 10)


def test_validation():
    with pytest.raises(DomainError):
        DiophantineCertificate(0)
    with pytest.raises(DomainError):
        DiophantineCertificate(Fraction(1, 2), Fraction(1, 2))
    with pytest.raises(DomainError):
        LiouvilleWitness(Fraction(1))
    with pytest.raises(DomainError):
        verify_diophantine(RationalAngle(Fraction(1, 3)), DiophantineCertificate(1), 10)
    with pytest.raises(DomainError):
        construct_liouville(1, 3)


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(38, 100), max_denominator=1000))
def test_any_smaller_constant_also_passes(c):
    assert verify_diophantine(GOLDEN, DiophantineCertificate(c), 1000).passed
