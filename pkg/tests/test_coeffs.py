import math

import pytest
from hypothesis import given, settings, strategies as st

from torsorext.coeffs import CoeffScalar, PrimeField, check_prime
from torsorext.errors import DivisionByZero, InputError, NegativeValuation
from torsorext.poly import parse_scalar

P = 3


def scalars(p=P):
    poly = st.lists(st.integers(0, p - 1), min_size=0, max_size=4).map(tuple)
    nonzero = poly.filter(lambda t: any(t))
    return st.builds(lambda n, d: CoeffScalar(n, d, p), poly, nonzero)


def test_prime_checks():
    for p in (2, 3, 5, 97):
        check_prime(p)
    for bad in (0, 1, 4, 9, 101, "2"):
        with pytest.raises(InputError):
            check_prime(bad)


def test_prime_field_inverse():
    F = PrimeField(7)
    assert all(F.mul(a, F.inv(a)) == 1 for a in range(1, 7))
    with pytest.raises(DivisionByZero):
        F.inv(0)


def test_valuations():
    p = 2
    pi = CoeffScalar.pi(p)
    assert pi.valuation() == 1
    assert (pi ** -3).valuation() == -3
    assert CoeffScalar.zero(p).valuation() == math.inf
    unit = CoeffScalar((1, 1), (1,), p)
    assert unit.valuation() == 0
    assert pi * unit / (pi ** 2 + pi) == CoeffScalar.one(p)


def test_residue():
    p = 5
    x = CoeffScalar((3, 1), (1, 1), p)
    assert x.residue() == 3
    with pytest.raises(NegativeValuation):
        CoeffScalar.pi(p, -1).residue()
    assert CoeffScalar.pi(p, 2).residue() == 0


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        CoeffScalar.one(2) / CoeffScalar.zero(2)
    with pytest.raises(ZeroDivisionError):
        CoeffScalar.zero(3).inverse()


def test_mixed_characteristic():
    with pytest.raises(InputError):
        CoeffScalar.one(2) + CoeffScalar.one(3)


def test_printing_is_parseable():
    p = 3
    for x in (CoeffScalar.pi(p, -1), CoeffScalar((1, 2), (0, 1, 1), p), CoeffScalar.from_int(2, p),
              CoeffScalar.pi(p, 4)):
        assert parse_scalar(str(x), p) == x


@settings(max_examples=60, deadline=None)
@given(scalars(), scalars(), scalars())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    if b:
        assert (a / b) * b == a


@settings(max_examples=60, deadline=None)
@given(scalars(), scalars())
def test_valuation_is_multiplicative(a, b):
    if a and b:
        assert (a * b).valuation() == a.valuation() + b.valuation()
        assert (a + b).valuation() >= min(a.valuation(), b.valuation())


@settings(max_examples=40, deadline=None)
@given(scalars(), st.integers(-3, 3))
def test_shift_matches_multiplication(a, k):
    assert a.shift(k) == a * CoeffScalar.pi(P, k)


@settings(max_examples=40, deadline=None)
@given(scalars())
def test_string_round_trip(a):
    assert parse_scalar(str(a), P) == a
