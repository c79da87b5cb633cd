import pytest
from hypothesis import given, strategies as st

from hiersmooth.rational import Rat, is_integral, lcm_of_denominators, rat_str, to_rat


def test_to_rat_forms():
    assert to_rat(3) == Rat(3)
    assert to_rat("7/2") == Rat(7, 2)
    assert to_rat("-4") == Rat(-4)
    assert to_rat(Rat(5, 3)) == Rat(5, 3)


def test_to_rat_float_is_exact():
    # floats convert by exact binary value, not by decimal guesswork
    assert to_rat(0.5) == Rat(1, 2)
    assert to_rat(0.1) != Rat(1, 10)


def test_rat_str_round_trip():
    for s in ("0", "5", "7/2", "-3/4"):
        assert rat_str(to_rat(s)) == s


def test_is_integral():
    assert is_integral(Rat(4))
    assert is_integral(Rat(8, 2))
    assert not is_integral(Rat(1, 3))


def test_lcm_of_denominators():
    assert lcm_of_denominators([Rat(1, 2), Rat(1, 3), Rat(5)]) == 6
    assert lcm_of_denominators([Rat(2), Rat(7)]) == 1


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_round_trip_property(p, q):
    r = Rat(p, q)
    assert to_rat(rat_str(r)) == r
