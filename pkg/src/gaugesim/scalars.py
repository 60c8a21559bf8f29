"""Scalar backends for probability values.

Table-defined systems use exact rationals (``fractions.Fraction``), so
normalization, feasibility and fixture comparisons are decided without
rounding.  Trigonometric systems use floats compared at an absolute
tolerance of ``EPS_NUM``.
"""

from __future__ import annotations

from fractions import Fraction

RATIONAL = "rational"
FLOAT = "float"

# Absolute tolerance for float comparisons.  Tabulated reference values
# carry at most 3 decimals; 1e-9 separates genuine zeros from rounding noise.
EPS_NUM = 1e-9

# Denominator bound when snapping float tables to rationals for the solver.
SNAP_DENOMINATOR = 10**6


def coerce(value, backend):
    """Coerce a raw table value to the given backend type."""
    if backend == RATIONAL:
        if isinstance(value, float):
            raise TypeError(f"rational backend cannot hold float {value!r}")
        return Fraction(value)
    return float(value)


def infer_backend(values):
    """Rational unless any value is a float."""
    for v in values:
        if isinstance(v, float):
            return FLOAT
    return RATIONAL


def deviation(a, b):
    """Absolute difference as a float (0.0 means exactly equal for rationals)."""
    if isinstance(a, Fraction) and isinstance(b, (Fraction, int)):
        return abs(float(a - b))
    return abs(float(a) - float(b))


def is_zero(value, backend):
    if backend == RATIONAL:
        return value == 0
    return abs(value) <= EPS_NUM


def is_close(a, b, backend):
    if backend == RATIONAL:
        return a == b
    return abs(float(a) - float(b)) <= EPS_NUM


def snap(value):
    """Nearest small-denominator rational to a float table entry."""
    if isinstance(value, Fraction):
        return value
    return Fraction(value).limit_denominator(SNAP_DENOMINATOR)


def parse_value(raw, backend):
    """Parse a JSON table value: 'num/den' strings for rationals, numbers for floats."""
    if backend == RATIONAL:
        if isinstance(raw, str):
            return Fraction(raw)
        if isinstance(raw, int):
            return Fraction(raw)
        raise TypeError(f"rational table entry must be a string or integer, got {raw!r}")
    return float(raw)


def format_value(value):
    """Serialize a scalar for JSON: rationals as 'num/den' strings."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return float(value)
