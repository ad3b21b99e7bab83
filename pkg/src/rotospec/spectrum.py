"""Classification of points relative to the spectrum of ``C_r f = f(r z)`` on H0.

The finite-horizon criterion scans

    sup_n (alpha/beta)**n / |r**n - lambda|

which is finite for every alpha in (0, 1) with some beta in (alpha, 1) exactly
when lambda lies outside the spectrum on H0.  Verdicts carry the evidence used
so that :func:`verify_verdict` can re-check them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Union

from .arith import (
    DEFAULT_PRECISION,
    Interval,
    LogMagnitude,
    as_fraction,
    refine,
)
from .certificates import (
    DiophantineCertificate,
    LiouvilleWitness,
    asymptotic_constant,
    construct_liouville,
    derive_diophantine_certificate,
    verify_diophantine,
    verify_liouville_witness,
)
from .errors import DomainError, EigenCollision, InsufficientConvergents, InsufficientPrecision
from .rotation import (
    AngleLike,
    CirclePoint,
    LiouvilleSymbolic,
    QuadraticSurd,
    RationalAngle,
    RotationNumber,
    angle_distance,
    as_rotation,
    small_divisor,
    small_divisor_sequence,
    _divisor_from_distance,
)

BLOWUP_LOG2 = 64
DEFAULT_HORIZON = 10**4


class SpaceTag(str, enum.Enum):
    H0 = "H0"  # analytic functions vanishing at 0, monomials z**n with n >= 1
    H = "H"  # all analytic functions, n >= 0

    @property
    def first_index(self) -> int:
        return 1 if self is SpaceTag.H0 else 0


@dataclass(frozen=True)
class ComplexPoint:
    """A complex number with rational coordinates (used for off-circle lambdas)."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    @property
    def modulus_squared(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def circle_angle(self) -> Optional[Fraction]:
        """Exact angle in turns when the point is one of 1, i, -1, -i."""
        table = {(1, 0): Fraction(0), (0, 1): Fraction(1, 4),
                 (-1, 0): Fraction(1, 2), (0, -1): Fraction(3, 4)}
        return table.get((self.re, self.im))

    def distance_to_circle(self, prec: int = DEFAULT_PRECISION) -> Interval:
        s = self.modulus_squared
        num, den = s.numerator, s.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Interval.point(abs(1 - Fraction(rn, rd)), prec)
        mod = Interval.point(s, prec).sqrt()
        return (mod - 1) if s > 1 else (1 - mod)

    def descriptor(self) -> str:
        return f"complex:{self.re},{self.im}"


LambdaLike = Union[CirclePoint, ComplexPoint]


def half_way(alpha: Fraction) -> Fraction:
    return (1 + alpha) / 2


class TailStrategy(str, enum.Enum):
    DIOPHANTINE_BOUND = "DiophantineBound"
    NONE = "None"


@dataclass(frozen=True)
class CriterionConfig:
    alpha_grid: tuple[Fraction, ...] = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(9, 10))
    beta_rule: Union[Callable[[Fraction], Fraction], Mapping[Fraction, Fraction]] = half_way
    N: int = DEFAULT_HORIZON
    tail_strategy: TailStrategy = TailStrategy.DIOPHANTINE_BOUND
    blowup_log2: int = BLOWUP_LOG2

    def __post_init__(self):
        grid = tuple(as_fraction(a) for a in self.alpha_grid)
        if not grid:
            raise DomainError("alpha grid is empty")
        object.__setattr__(self, "alpha_grid", grid)
        object.__setattr__(self, "tail_strategy", TailStrategy(self.tail_strategy))
        if self.N < 1:
            raise DomainError("horizon N must be >= 1")
        self.pairs()

    @classmethod
    def single(cls, alpha, beta, N: int = DEFAULT_HORIZON, **kw) -> "CriterionConfig":
        alpha, beta = as_fraction(alpha), as_fraction(beta)
        return cls((alpha,), {alpha: beta}, N, **kw)

    def beta(self, alpha: Fraction) -> Fraction:
        rule = self.beta_rule
        beta = as_fraction(rule[alpha] if isinstance(rule, Mapping) else rule(alpha))
        if not 0 < alpha < beta < 1:
            raise DomainError(f"need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}")
        return beta

    def pairs(self) -> list[tuple[Fraction, Fraction]]:
        return [(a, self.beta(a)) for a in self.alpha_grid]

    def beta_rule_text(self) -> str:
        if isinstance(self.beta_rule, Mapping):
            return ",".join(f"{a}:{b}" for a, b in sorted(self.beta_rule.items()))
        if self.beta_rule is half_way:
            return "(1+alpha)/2"
        return getattr(self.beta_rule, "__name__", "custom")


# -- point spectrum -------------------------------------------------------------

@dataclass(frozen=True)
class EigenPair:
    n: int
    angle: Optional[Fraction]  # exact angle of r**n in turns when x is rational
    eigenvector: str


@dataclass(frozen=True)
class PointSpectrum:
    eigenpairs: tuple[EigenPair, ...]
    finite: bool
    note: str

    @property
    def angles(self) -> set[Fraction]:
        return {e.angle for e in self.eigenpairs}


def point_spectrum(x: RotationNumber, space: SpaceTag = SpaceTag.H0, count: int = 5) -> PointSpectrum:
    """Eigenvalues ``r**n`` with monomial eigenvectors ``z**n``."""
    space = SpaceTag(space)
    x = as_rotation(x)
    if x.is_rational:
        m = x.order
        pairs = []
        for j in range(m):
            # on H0 the eigenvalue 1 comes from z**m, z**(2m), ...
            n = m if (j == 0 and space is SpaceTag.H0) else j
            pairs.append(EigenPair(n, (j * x.exact) % 1, f"z^({n}+{m}k), k>=0"))
        note = (f"root of unity of order {m}: finite point spectrum, each kernel "
                f"infinite dimensional (spanned by z^(j+{m}k))")
        return PointSpectrum(tuple(pairs), True, note)
    start = space.first_index
    pairs = tuple(EigenPair(n, None, f"z^{n}") for n in range(start, start + count))
    note = "irrational angle: eigenvalues r^n are pairwise distinct and dense in the circle"
    if space is SpaceTag.H0:
        note += "; 1 is not an eigenvalue on H0"
    return PointSpectrum(pairs, False, note)


# -- criterion --------------------------------------------------------------------

@dataclass(frozen=True)
class TailBound:
    method: str  # "diophantine", "periodic" or "unknown"
    bound: Optional[Interval] = None
    detail: str = ""

    @property
    def bounded(self) -> bool:
        return self.bound is not None


@dataclass(frozen=True)
class GridResult:
    alpha: Fraction
    beta: Fraction
    horizon: int  # last n scanned
    finite_sup: Optional[Interval]
    sup_log2: LogMagnitude
    sup_argmax: int
    tail: TailBound
    overall: str  # "Bounded", "UnboundedWitness" or "Inconclusive"
    bound: Optional[Interval] = None
    witness_n: Optional[int] = None
    witness_value: Optional[LogMagnitude] = None


@dataclass(frozen=True)
class CriterionReport:
    results: tuple[GridResult, ...]
    N: int

    @property
    def all_bounded(self) -> bool:
        return all(r.overall == "Bounded" for r in self.results)

    @property
    def witness(self) -> Optional[GridResult]:
        return next((r for r in self.results if r.overall == "UnboundedWitness"), None)


def _lambda_angle(lam: LambdaLike, x: RotationNumber) -> RotationNumber:
    if isinstance(lam, ComplexPoint):
        angle = lam.circle_angle()
        if angle is None:
            raise DomainError(f"{lam.descriptor()} is not a circle point with a known angle")
        return RationalAngle(angle)
    if isinstance(lam, CirclePoint):
        return lam.resolve(x)
    return as_rotation(lam)


def _as_interval(mag: LogMagnitude) -> Optional[Interval]:
    try:
        return mag.to_interval()
    except (DomainError, OverflowError):
        return None


def _periodic_tail(x: RotationNumber, y: RotationNumber, rho: Fraction, N: int, prec: int) -> TailBound:
    """Exact-period tail ``sup_{n > N} rho**n / |r**n - lambda| <= rho**(N+1) / min_gap``."""
    gap = root_of_unity_gap(x, y, prec)
    bound = Interval.point(rho, prec) ** (N + 1) / gap.min_gap
    return TailBound("periodic", bound, f"period {x.order}, min divisor {gap.min_gap}")


def diophantine_tail(x: RotationNumber, cert: DiophantineCertificate, rho: Fraction, N: int,
                     prec: int = DEFAULT_PRECISION) -> TailBound:
    """``sup_{n > N} n**delta * rho**n / (4 c')`` using ``|r**n - 1| >= 4 ||n x||``.

    ``c'`` is the certificate constant, tightened for periodic expansions so it
    holds for every n.  ``n**delta * rho**n`` decreases once
    ``n >= delta / ln(1/rho)``; below that point the few terms are evaluated.
    """
    c = asymptotic_constant(x, cert)
    delta = cert.delta
    log_rho = LogMagnitude.of(rho)
    peak = int(delta / (-math.log(float(rho)))) + 2
    last = max(N + 1, peak)
    best = None
    for n in range(N + 1, last + 1):
        value = (LogMagnitude.of(n) ** delta) * (log_rho ** n) / LogMagnitude.of(4 * c)
        if best is None or value.log2_hi > best.log2_hi:
            best = value
    bound = _as_interval(best)
    if bound is None:
        return TailBound("unknown", None, "tail bound outside representable range")
    return TailBound("diophantine", bound,
                     f"c'={c}, delta={delta}, decreasing beyond n={last}")


def criterion_check(x: RotationNumber, lam: LambdaLike, cfg: Optional[CriterionConfig] = None,
                    cert: Optional[DiophantineCertificate] = None,
                    precision_bits: int = DEFAULT_PRECISION) -> CriterionReport:
    """Finite-horizon evaluation of ``sup_n (alpha/beta)**n / |r**n - lambda|`` on an alpha grid.

    Raises EigenCollision when ``r**n = lambda`` exactly for some ``n <= N``.
    """
    cfg = cfg or CriterionConfig()
    x = as_rotation(x)
    y = _lambda_angle(lam, x)
    pairs = cfg.pairs()
    rhos = [LogMagnitude.of(a / b) for a, b in pairs]
    best: list[Optional[tuple[int, LogMagnitude]]] = [None] * len(pairs)
    witness: list[Optional[tuple[int, LogMagnitude]]] = [None] * len(pairs)
    horizon = 0
    for entry in small_divisor_sequence(x, y, cfg.N, precision_bits):
        if entry.is_eigen:
            raise EigenCollision(entry.n)
        horizon = entry.n
        inv = entry.magnitude().reciprocal()
        for i, rho in enumerate(rhos):
            if witness[i] is not None:
                continue
            term = (rho ** entry.n) * inv
            if best[i] is None or term.log2_hi > best[i][1].log2_hi:
                best[i] = (entry.n, term)
            if term.log2_at_least(cfg.blowup_log2):
                witness[i] = (entry.n, term)
        if all(w is not None for w in witness):
            break

    results = []
    for i, (alpha, beta) in enumerate(pairs):
        rho = alpha / beta
        argmax, sup = best[i]
        if witness[i] is not None:
            n, value = witness[i]
            results.append(GridResult(alpha, beta, horizon, _as_interval(sup), sup, argmax,
                                      TailBound("unknown", None, "not needed"),
                                      "UnboundedWitness", None, n, value))
            continue
        if x.is_rational and y.is_rational:
            tail = _periodic_tail(x, y, rho, cfg.N, precision_bits)
        elif (cert is not None and cfg.tail_strategy is TailStrategy.DIOPHANTINE_BOUND
              and y.is_rational and y.exact == 0):
            tail = diophantine_tail(x, cert, rho, cfg.N, precision_bits)
        else:
            tail = TailBound("unknown", None, "no tail argument for this (x, lambda)")
        sup_iv = _as_interval(sup)
        if tail.bounded and sup_iv is not None:
            overall, bound = "Bounded", Interval(max(sup_iv.lo, tail.bound.lo),
                                                 max(sup_iv.hi, tail.bound.hi), precision_bits)
        else:
            overall, bound = "Inconclusive", None
        results.append(GridResult(alpha, beta, horizon, sup_iv, sup, argmax, tail, overall, bound))
    return CriterionReport(tuple(results), cfg.N)


# -- roots of unity -----------------------------------------------------------------

@dataclass(frozen=True)
class RootOfUnityGapResult:
    min_gap: Interval
    argmin: int
    order: int


def root_of_unity_gap(x: RotationNumber, y: AngleLike, prec: int = DEFAULT_PRECISION) -> RootOfUnityGapResult:
    """``min_j |r**j - lambda|`` over one period of a rational rotation."""
    y = as_rotation(y)
    m = x.order
    best = None
    for j in range(1, m + 1):
        dist = refine(lambda bits: angle_distance(x, j, y, bits), prec)
        div = _divisor_from_distance(dist, prec)
        if isinstance(div, LogMagnitude):
            div = div.to_interval(prec)
        if best is None or div.hi < best[1].hi:
            best = (j, div)
    return RootOfUnityGapResult(best[1], best[0] % m, m)


# -- Liouville scan -------------------------------------------------------------------

@dataclass(frozen=True)
class ScanEntry:
    j: int
    q: int
    growth: LogMagnitude  # (beta/alpha)**q / (2*pi*q)


@dataclass(frozen=True)
class ContradictionScan:
    alpha: Fraction
    beta: Fraction
    entries: tuple[ScanEntry, ...]
    verdict: str  # "Diverges" or "Inconclusive"

    def growth_at(self, j: int) -> LogMagnitude:
        return next(e.growth for e in self.entries if e.j == j)


def liouville_growth(q: int, alpha: Fraction, beta: Fraction, prec: int = DEFAULT_PRECISION) -> LogMagnitude:
    two_pi_q = LogMagnitude.of(Interval.pi(prec) * (2 * q))
    return LogMagnitude.of(beta / alpha) ** q / two_pi_q


def liouville_contradiction_scan(x: RotationNumber, w: LiouvilleWitness, beta,
                                 precision_bits: int = DEFAULT_PRECISION) -> ContradictionScan:
    """Growth of ``(beta/alpha)**q_j / (2 pi q_j)`` over the witness approximants.

    A bound ``M`` on the resolvent forces ``(beta/alpha)**q_j <= 2 pi M q_j``
    for every approximant; divergent growth rules out every M.
    """
    beta = as_fraction(beta)
    alpha = w.alpha
    if not alpha < beta < 1:
        raise DomainError(f"need alpha < beta < 1, got alpha={alpha}, beta={beta}")
    entries = tuple(ScanEntry(c.index, c.q, liouville_growth(c.q, alpha, beta, precision_bits))
                    for c in w.approximants)
    increasing = all(a.growth.certainly_lt(b.growth) for a, b in zip(entries, entries[1:]))
    diverges = bool(entries) and increasing and entries[-1].growth.log2_at_least(BLOWUP_LOG2)
    return ContradictionScan(alpha, beta, entries, "Diverges" if diverges else "Inconclusive")


# -- verdicts ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OffCircleResolvent:
    delta: Interval
    kind: str = "OffCircleResolvent"


@dataclass(frozen=True)
class RootOfUnityGap:
    min_gap: Interval
    argmin: int
    order: int
    kind: str = "RootOfUnityGap"


@dataclass(frozen=True)
class DiophantineTailBound:
    cert: DiophantineCertificate
    horizon_sup: Interval
    tail_bound: Interval
    grid: tuple[GridResult, ...] = ()
    coverage: str = "criterion passed on grid + Diophantine tail"
    kind: str = "DiophantineTailBound"


@dataclass(frozen=True)
class LiouvilleContradiction:
    j: int
    growth: LogMagnitude
    witness: LiouvilleWitness
    scan: ContradictionScan
    kind: str = "LiouvilleContradiction"


Evidence = Union[OffCircleResolvent, RootOfUnityGap, DiophantineTailBound, LiouvilleContradiction]


@dataclass(frozen=True)
class VerdictInput:
    x: str
    lam: str
    space: SpaceTag


@dataclass(frozen=True)
class Eigenvalue:
    input: VerdictInput
    n: int
    eigenvector_note: str
    kind: str = "Eigenvalue"

    @property
    def decided(self) -> bool:
        return True


@dataclass(frozen=True)
class InSpectrum:
    input: VerdictInput
    evidence: LiouvilleContradiction
    kind: str = "InSpectrum"

    @property
    def decided(self) -> bool:
        return True


@dataclass(frozen=True)
class NotInSpectrum:
    input: VerdictInput
    evidence: Evidence
    kind: str = "NotInSpectrum"

    @property
    def decided(self) -> bool:
        return True


@dataclass(frozen=True)
class Undetermined:
    input: VerdictInput
    finite_horizon_sup: Optional[Interval]
    N: int
    reason: str
    precision_failure: bool = False
    kind: str = "Undetermined"

    @property
    def decided(self) -> bool:
        return False


SpectralVerdict = Union[Eigenvalue, InSpectrum, NotInSpectrum, Undetermined]


def _eigen_index(x: RotationNumber, y: RotationNumber, space: SpaceTag) -> Optional[int]:
    """Index n with ``n*x = y (mod 1)`` when it can be proved exactly, else None."""
    start = space.first_index
    if y.is_rational and y.exact == 0 and start == 0:
        return 0
    if x.is_rational:
        # handled with the exact period scan
        return None
    if isinstance(x, QuadraticSurd) and isinstance(y, QuadraticSurd) and x.d == y.d:
        ratio = Fraction(y.b * x.c, y.c * x.b)
        if ratio.denominator == 1 and ratio >= 1:
            n = int(ratio)
            if angle_distance(x, n, y).is_zero:
                return n
        return None
    if isinstance(x, LiouvilleSymbolic) and y == x:
        return 1
    return None


def _undetermined(inp: VerdictInput, x, y, cfg: CriterionConfig, reason: str,
                  precision_failure: bool = False, prec: int = DEFAULT_PRECISION) -> Undetermined:
    sup = None
    if y is not None and not precision_failure:
        try:
            alpha = cfg.alpha_grid[0]
            probe = CriterionConfig.single(alpha, cfg.beta(alpha), cfg.N, tail_strategy=TailStrategy.NONE)
            sup = criterion_check(x, CirclePoint.at(y), probe, None, prec).results[0].finite_sup
        except (InsufficientPrecision, EigenCollision, DomainError):
            sup = None
    return Undetermined(inp, sup, cfg.N, reason, precision_failure)


def classify(x: RotationNumber, lam: LambdaLike, space: SpaceTag = SpaceTag.H0,
             cfg: Optional[CriterionConfig] = None,
             diophantine: Optional[DiophantineCertificate] = None,
             witness: Optional[LiouvilleWitness] = None,
             precision_bits: int = DEFAULT_PRECISION) -> SpectralVerdict:
    """Decide whether lambda lies in the spectrum, with evidence.

    Order: off-circle points, provable eigenvalues, rational rotations,
    Liouville witnesses at lambda = 1, Diophantine certificates at lambda = 1,
    and otherwise an Undetermined report with finite-horizon data.
    """
    cfg = cfg or CriterionConfig()
    space = SpaceTag(space)
    x = as_rotation(x)
    lam_text = lam.descriptor()
    inp = VerdictInput(x.descriptor(), lam_text, space)

    # (a) off the circle
    if isinstance(lam, ComplexPoint) and lam.modulus_squared != 1:
        return NotInSpectrum(inp, OffCircleResolvent(lam.distance_to_circle(precision_bits)))

    # (b) eigenvalues r**n
    if isinstance(lam, CirclePoint) and lam.orbit_index is not None:
        n = lam.orbit_index
        if n >= space.first_index:
            return Eigenvalue(inp, n, f"C(z^{n}) = r^{n} z^{n}")
    try:
        y = _lambda_angle(lam, x)
    except DomainError as exc:
        return Undetermined(inp, None, cfg.N, str(exc))
    try:
        n = _eigen_index(x, y, space)
        if n is not None:
            return Eigenvalue(inp, n, f"C(z^{n}) = r^{n} z^{n}")

        # (c) roots of unity
        if x.is_rational:
            gap = root_of_unity_gap(x, y, precision_bits)
            if gap.min_gap.hi == 0:
                j = gap.argmin or x.order
                return Eigenvalue(inp, j, f"C(z^({j}+{x.order}k)) = r^{j} z^({j}+{x.order}k)")
            return NotInSpectrum(inp, RootOfUnityGap(gap.min_gap, gap.argmin, gap.order))

        lambda_is_one = y.is_rational and y.exact == 0
        if space is not SpaceTag.H0:
            return _undetermined(inp, x, y, cfg, "criterion classification is only offered on H0",
                                 prec=precision_bits)
        if not lambda_is_one:
            return _undetermined(inp, x, y, cfg,
                                 "no certificate argument for lambda != 1 at an irrational rotation",
                                 prec=precision_bits)

        # (d) Liouville witness
        if witness is None and isinstance(x, LiouvilleSymbolic):
            witness = construct_liouville(x.m, x.depth, x.bit_budget).witness
        if witness is not None:
            report = verify_liouville_witness(x, witness, precision_bits)
            if report.passed and witness.approximants:
                scan = liouville_contradiction_scan(x, witness, half_way(witness.alpha), precision_bits)
                if scan.verdict == "Diverges":
                    last = scan.entries[-1]
                    return InSpectrum(inp, LiouvilleContradiction(last.j, last.growth, witness, scan))
            elif report.failures:
                return _undetermined(inp, x, y, cfg,
                                     f"Liouville witness fails at j={report.failures}",
                                     prec=precision_bits)

        # (e) Diophantine certificate; periodic expansions get one derived automatically
        if diophantine is None and isinstance(x, QuadraticSurd):
            diophantine = derive_diophantine_certificate(x, precision_bits=precision_bits)
        if diophantine is not None:
            horizon = diophantine.verified_up_to_q or 10**6
            try:
                check = verify_diophantine(x, diophantine, horizon, precision_bits)
            except InsufficientConvergents as exc:
                return _undetermined(inp, x, y, cfg, str(exc), prec=precision_bits)
            if not check.passed:
                return _undetermined(inp, x, y, cfg,
                                     f"Diophantine certificate fails at q={check.first_violation.q}",
                                     prec=precision_bits)
            report = criterion_check(x, CirclePoint.at(y), cfg, check.certificate, precision_bits)
            if report.all_bounded:
                sup = report.results[0].finite_sup
                tail = report.results[0].tail.bound
                for r in report.results[1:]:
                    sup = sup.hull(r.finite_sup)
                    tail = tail.hull(r.tail.bound)
                return NotInSpectrum(inp, DiophantineTailBound(check.certificate, sup, tail, report.results))
            return _undetermined(inp, x, y, cfg, "criterion not bounded on the whole grid",
                                 prec=precision_bits)
        return _undetermined(inp, x, y, cfg, "no certificate or witness available",
                             prec=precision_bits)
    except EigenCollision as exc:
        return Eigenvalue(inp, exc.n, f"C(z^{exc.n}) = r^{exc.n} z^{exc.n}")
    except InsufficientPrecision as exc:
        return Undetermined(inp, None, cfg.N, f"precision failure: {exc}", True)


def verify_verdict(verdict: SpectralVerdict, x: RotationNumber, lam: LambdaLike,
                   precision_bits: int = DEFAULT_PRECISION) -> bool:
    """Re-check a verdict's evidence with the independent verifiers."""
    x = as_rotation(x)
    if isinstance(verdict, Undetermined):
        return True
    if isinstance(verdict, Eigenvalue):
        if isinstance(lam, CirclePoint) and lam.orbit_index == verdict.n:
            return True
        y = _lambda_angle(lam, x)
        if verdict.n == 0:
            return y.is_rational and y.exact == 0
        return angle_distance(x, verdict.n, y, precision_bits).is_zero
    ev = verdict.evidence
    if isinstance(ev, OffCircleResolvent):
        fresh = lam.distance_to_circle(precision_bits)
        return fresh.overlaps(ev.delta) and ev.delta.certainly_positive()
    if isinstance(ev, RootOfUnityGap):
        y = _lambda_angle(lam, x)
        fresh = root_of_unity_gap(x, y, precision_bits)
        return fresh.min_gap.overlaps(ev.min_gap) and ev.min_gap.certainly_positive()
    if isinstance(ev, DiophantineTailBound):
        check = verify_diophantine(x, ev.cert, ev.cert.verified_up_to_q, precision_bits)
        if not check.passed:
            return False
        for r in ev.grid:
            rho = r.alpha / r.beta
            tail = diophantine_tail(x, check.certificate, rho, r.horizon, precision_bits)
            if not tail.bound.overlaps(r.tail.bound):
                return False
            div = small_divisor(x, r.sup_argmax, _lambda_angle(lam, x), precision_bits)
            term = (LogMagnitude.of(rho) ** r.sup_argmax) * LogMagnitude.of(div).reciprocal()
            if not (term.log2_lo <= r.sup_log2.log2_hi and r.sup_log2.log2_lo <= term.log2_hi):
                return False
        return True
    if isinstance(ev, LiouvilleContradiction):
        if not verify_liouville_witness(x, ev.witness, precision_bits).passed:
            return False
        scan = liouville_contradiction_scan(x, ev.witness, ev.scan.beta, precision_bits)
        g = scan.growth_at(ev.j)
        return scan.verdict == "Diverges" and g.log2_lo <= ev.growth.log2_hi and ev.growth.log2_lo <= g.log2_hi
    raise DomainError(f"unknown evidence {type(ev).__name__}")
