"""Rigorous spectral classification for rotation composition operators.

``C_r f(z) = f(r z)`` with ``r = e^(2 pi i x)`` acting on germs at the origin.
The public entry point is :func:`classify`; the submodules expose the exact
arithmetic, continued fractions, orbit geometry and certificates it uses.
"""

from .arith import DEFAULT_PRECISION, Interval, LogMagnitude
from .certificates import (
    DiophantineCertificate,
    LiouvilleWitness,
    construct_liouville,
    derive_diophantine_certificate,
    verify_diophantine,
    verify_liouville_witness,
)
from .contfrac import cf_expand, convergents, irrationality_exponent_estimate
from .descriptors import parse_lambda, parse_rotation
from .errors import (
    BitBudgetExceeded,
    DomainError,
    EigenCollision,
    FiniteExpansionExhausted,
    InsufficientConvergents,
    InsufficientPrecision,
    RotospecError,
)
from .rotation import (
    CirclePoint,
    DecimalBall,
    LiouvilleSymbolic,
    QuadraticSurd,
    RationalAngle,
    orbit_gaps,
    small_divisor,
    small_divisor_sequence,
)
from .spectrum import (
    ComplexPoint,
    CriterionConfig,
    SpaceTag,
    classify,
    criterion_check,
    point_spectrum,
    verify_verdict,
)

__version__ = "0.1.0"
