import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holderdecay.dioph import (
    HALF_INTEGER_MODE,
    bounded_quotients,
    continued_fraction,
    convergent_bounds_hold,
    liouville_constant,
    parse_location,
    recurrence_holds,
    require_irrational,
    signed_sines,
    sine_sequence,
    two_product,
)
from holderdecay.exceptions import InvalidInputError, RationalLocationError

E_MINUS_2 = "0.71828182845904523536028747135266249775724709369995"


def test_golden_quotients():
    cf = continued_fraction("golden", 20)
    assert cf.a0 == 0 and cf.quotients == (1,) * 20
    assert not cf.terminated
    assert convergent_bounds_hold("golden", cf)
    assert recurrence_holds(cf)


def test_sqrt2_quotients():
    cf = continued_fraction("sqrt2m1", 30)
    assert cf.quotients == (2,) * 30
    assert convergent_bounds_hold("sqrt2m1", cf)


@pytest.mark.parametrize("a,quotients", [("0.25", (4,)), ("1/3", (3,)), (1 / 3, (3,)),
                                         (Fraction(7, 16), (2, 3, 2))])
def test_rationals_terminate(a, quotients):
    cf = continued_fraction(a)
    assert cf.terminated and cf.quotients == quotients
    p, q = cf.convergents[-1]
    assert Fraction(p, q) == Fraction(a) if not isinstance(a, float) else abs(p / q - a) < 1e-15


def test_e_minus_two_pattern():
    cf = continued_fraction(E_MINUS_2, 30)
    assert cf.quotients[:11] == (1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8)
    rep = bounded_quotients(cf, 20)
    assert not rep.bounded and rep.max_quotient == 14


def test_bounded_golden_and_errors():
    rep = bounded_quotients(continued_fraction("golden", 64), 20)
    assert rep.bounded and rep.max_quotient == 1
    with pytest.raises(RationalLocationError):
        bounded_quotients(continued_fraction("0.25"), 20)
    with pytest.raises(InvalidInputError):
        bounded_quotients(continued_fraction("golden", 5), 20)


def test_float_expansion_is_precision_limited():
    cf = continued_fraction(math.pi - 3, 64)
    assert cf.precision_limited
    assert cf.quotients[:4] == (7, 15, 1, 292)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10**6), st.integers(2, 10**6))
def test_convergents_of_rationals(p, q):
    if p >= q:
        return
    cf = continued_fraction(Fraction(p, q), 64)
    assert cf.terminated
    assert Fraction(*cf.convergents[-1]) == Fraction(p, q)
    assert recurrence_holds(cf)


@pytest.mark.parametrize("bad", ["0", "1", "1.5", "-0.2", "abc", "1/0", math.nan])
def test_parse_rejects(bad):
    with pytest.raises(InvalidInputError):
        parse_location(bad)


def test_sine_examples():
    assert np.allclose(sine_sequence("1/2", 4).values, [1, 0, 1, 0], atol=0)
    assert np.allclose(sine_sequence("1/3", 3).values, [0.75, 0.75, 0.0], atol=1e-15)


def test_golden_scaled_minimum():
    seq = sine_sequence("golden", 10_000)
    assert np.min(seq.n.astype(float) ** 2 * seq.values) > 0.8


def test_sines_against_mpmath():
    mpmath.mp.dps = 60
    a_mp = (mpmath.sqrt(5) - 1) / 2
    n = np.array([1, 7, 89, 1597, 46368, 999_983, 1_346_269])
    s, bound = signed_sines(parse_location("golden"), n)
    for k, v in zip(n.tolist(), s.tolist()):
        exact = float(mpmath.sin(k * mpmath.pi * a_mp))
        assert abs(v - exact) <= 4e-16 + 1e-15 * abs(exact)
    assert bound < 1e-12


def test_half_integer_sines_against_mpmath():
    mpmath.mp.dps = 60
    a_mp = mpmath.sqrt(2) - 1
    n = np.array([0, 1, 5, 12345])
    s, _ = signed_sines(parse_location("sqrt2m1"), n, HALF_INTEGER_MODE)
    for k, v in zip(n.tolist(), s.tolist()):
        assert v == pytest.approx(float(mpmath.sin((k + mpmath.mpf(1) / 2) * mpmath.pi * a_mp)),
                                  abs=1e-15)


def test_two_product_exact():
    rng = np.random.default_rng(3)
    a, b = rng.uniform(0, 1e6, 50), rng.uniform(0, 1, 50)
    hi, lo = two_product(a, b)
    for x, y, h, l in zip(a, b, hi, lo):
        assert Fraction(float(h)) + Fraction(float(l)) == Fraction(float(x)) * Fraction(float(y))


def test_liouville():
    c2, n2 = liouville_constant("golden", 1000, 2.0)
    c3, _ = liouville_constant("golden", 1000, 3.0)
    assert c2 >= 0.9 and c3 >= c2
    assert 1 <= n2 <= 1000
    with pytest.raises(RationalLocationError):
        liouville_constant("1/2", 100)
    with pytest.raises(RationalLocationError):
        require_irrational(0.5 + 2.0**-45)
    with pytest.raises(RationalLocationError):
        require_irrational(Fraction(1, 2) + Fraction(1, 10**9))
