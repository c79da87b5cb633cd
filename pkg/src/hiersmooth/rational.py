"""Exact rational arithmetic backbone.

gmpy2's mpq is used when available because it is much faster; fractions.Fraction
is a drop-in fallback with the same constructor and string form ("p" or "p/q").
All solver arithmetic outside the bilayer approximation internals goes through
this type, so equality tests against the LP oracle are exact.
"""

try:
    from gmpy2 import mpq as Rat
    BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only where gmpy2 is absent
    from fractions import Fraction as Rat
    BACKEND = "fractions"

ZERO = Rat(0)
ONE = Rat(1)


def to_rat(value):
    """Coerce an int, a 'p/q' or integer string, or a rational to Rat."""
    if isinstance(value, str):
        return Rat(value.strip())
    return Rat(value)


def rat_str(q) -> str:
    """Canonical text form: 'p' for integers, 'p/q' otherwise."""
    return str(q)


def is_integral(q) -> bool:
    return q.denominator == 1


def lcm_of_denominators(values) -> int:
    """lcm of the denominators of an iterable of rationals (1 for empty)."""
    from math import lcm

    out = 1
    for v in values:
        out = lcm(out, int(v.denominator))
    return out
