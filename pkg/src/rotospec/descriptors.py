"""Text forms for angles and circle points.

Angles (turns)::

    rational:p/q             surd:(a+b*sqrt(d))/c
    liouville:m[,J]          ball:center±radius   (also center+-radius)

Points lambda::

    angle:<angle form>       orbit:n        complex:re,im
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import DomainError
from .rotation import (
    CirclePoint,
    DecimalBall,
    LiouvilleSymbolic,
    QuadraticSurd,
    RationalAngle,
    RotationNumber,
)
from .spectrum import ComplexPoint, LambdaLike

_SURD = re.compile(
    r"^\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*?\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*(\d+)$")
_BALL = re.compile(r"^(.+?)\s*(?:±|\+-|\+/-)\s*(.+)$")


def _number(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a number: {text!r}") from exc


def parse_rotation(text: str) -> RotationNumber:
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise DomainError(f"angle descriptor needs a kind prefix: {text!r}")
    kind = kind.lower()
    if kind == "rational":
        return RationalAngle(_number(body))
    if kind == "surd":
        m = _SURD.match(body.replace(" ", ""))
        if not m:
            raise DomainError(f"surd must look like (a+b*sqrt(d))/c, got {body!r}")
        a, sign, b, d, c = m.groups()
        b_val = int(b) if sign == "+" else -int(b)
        if int(c) == 0:
            raise DomainError("surd denominator is zero")
        return QuadraticSurd(int(a), b_val, int(c), int(d))
    if kind == "liouville":
        parts = [p.strip() for p in body.split(",")]
        if not 1 <= len(parts) <= 2 or not all(p.isdigit() for p in parts):
            raise DomainError(f"liouville descriptor is m[,J], got {body!r}")
        m = int(parts[0])
        depth = int(parts[1]) if len(parts) == 2 else 3
        return LiouvilleSymbolic(m, depth=depth)
    if kind == "ball":
        m = _BALL.match(body.strip())
        if not m:
            raise DomainError(f"ball descriptor is center±radius, got {body!r}")
        return DecimalBall(_number(m.group(1)), _number(m.group(2)))
    raise DomainError(f"unknown angle kind {kind!r}")


def parse_lambda(text: str) -> LambdaLike:
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise DomainError(f"lambda descriptor needs a kind prefix: {text!r}")
    kind = kind.lower()
    if kind == "angle":
        return CirclePoint.at(parse_rotation(body))
    if kind == "orbit":
        if not body.strip().isdigit():
            raise DomainError(f"orbit index must be a non-negative integer, got {body!r}")
        return CirclePoint.orbit(int(body))
    if kind == "complex":
        parts = body.split(",")
        if len(parts) != 2:
            raise DomainError(f"complex descriptor is re,im, got {body!r}")
        return ComplexPoint(_number(parts[0]), _number(parts[1]))
    raise DomainError(f"unknown lambda kind {kind!r}")
