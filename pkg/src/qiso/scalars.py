"""Scalar arithmetic shared by the exact and floating-point modes.

Every quantity in the metric/transport/feasibility layers is either a
``fractions.Fraction`` (rational mode: comparisons are exact, tolerance 0)
or a ``float`` (float mode: comparisons use a single run-wide tolerance,
default 1e-9).  Mixing modes inside one computation is not supported; the
mode is fixed by the inputs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float, int]

RATIONAL = "rational"
FLOAT = "float"
DEFAULT_TOL = 1e-9


def tol_for(mode: str, tol: float = DEFAULT_TOL) -> Scalar:
    return Fraction(0) if mode == RATIONAL else tol


def is_rational(x: Scalar) -> bool:
    return isinstance(x, (Fraction, int))


def mode_of(x: Scalar) -> str:
    return RATIONAL if is_rational(x) else FLOAT


def close(a: Scalar, b: Scalar, tol: Scalar) -> bool:
    return abs(a - b) <= tol


def leq(a: Scalar, b: Scalar, tol: Scalar) -> bool:
    """a <= b up to tolerance."""
    return a - b <= tol


def parse_scalar(value, mode: str = RATIONAL) -> Scalar:
    """Read a JSON scalar: a number, or a rational written as "p/q"."""
    if isinstance(value, str):
        frac = Fraction(value)
        return frac if mode == RATIONAL else float(frac)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"not a scalar: {value!r}")
    if mode == RATIONAL:
        if isinstance(value, float) and not float(value).is_integer():
            # Floats in rational input files are accepted verbatim; they are
            # exact binary rationals by definition.
            return Fraction(value)
        return Fraction(value)
    return float(value)


def format_scalar(x: Scalar):
    """Inverse of parse_scalar, for writing JSON."""
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, int):
        return x
    return float(x)


def as_float(x: Scalar) -> float:
    return float(x)
