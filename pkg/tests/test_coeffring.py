from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twisted_steinberg.coeffring import CoeffRing, is_unit, unit_inverse, units_of
from twisted_steinberg.errors import NotAUnit


def totient(n: int) -> int:
    """Euler's product formula over the prime factors of n."""
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@pytest.mark.parametrize("n, r, expected", [(5, 2, True), (6, 2, False), (2, 1, True)])
def test_is_unit_examples(n, r, expected):
    assert is_unit(CoeffRing(n)(r)) is expected


@pytest.mark.parametrize("n, r, expected", [(5, 2, 3), (3, 2, 2), (7, 3, 5)])
def test_unit_inverse_examples(n, r, expected):
    assert unit_inverse(CoeffRing(n)(r)) == expected


def test_unit_inverse_rejects_non_units():
    with pytest.raises(NotAUnit):
        unit_inverse(CoeffRing(6)(2))


@pytest.mark.parametrize("n, expected", [(2, {1}), (3, {1, 2}), (12, {1, 5, 7, 11})])
def test_units_of_examples(n, expected):
    assert {int(u) for u in units_of(CoeffRing(n))} == expected


def test_units_ascending_with_one_first():
    assert CoeffRing(12).units == (1, 5, 7, 11)


def test_residues_are_canonical():
    R = CoeffRing(7)
    assert R(-1).value == 6
    assert R(15) == 1
    assert int(R(3) * R(5)) == 1


@given(st.integers(min_value=2, max_value=10**4))
def test_unit_count_is_totient(n):
    assert len(CoeffRing(n).units) == totient(n)


@given(st.integers(min_value=2, max_value=200), st.data())
def test_inverse_is_an_involution(n, data):
    R = CoeffRing(n)
    t = R(data.draw(st.sampled_from(R.units)))
    assert unit_inverse(unit_inverse(t)) == t
    assert t * unit_inverse(t) == 1


@pytest.mark.parametrize("n", range(2, 13))
def test_units_closed_under_products_and_inverses(n):
    U = units_of(CoeffRing(n))
    assert all(a * b in U for a in U for b in U)
    assert all(unit_inverse(a) in U for a in U)


@pytest.mark.parametrize("n", range(2, 13))
def test_commutative_ring_axioms_exhaustive(n):
    R = CoeffRing(n)
    elems = [R(v) for v in range(n)]
    zero, one = R(0), R(1)
    for a in elems:
        assert a + zero == a and a * one == a and a + (-a) == zero
    for a, b, c in itertools.product(elems, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a, b in itertools.product(elems, repeat=2):
        assert a + b == b + a and a * b == b * a


def test_power_handles_negative_exponents():
    R = CoeffRing(7)
    assert R.power(3, -1) == 5
    assert R.power(3, -2) == 25 % 7
    assert R.power(2, 0) == 1


def test_bad_modulus():
    with pytest.raises(ValueError):
        CoeffRing(1)
    assert math.gcd(CoeffRing(9).inv(2) * 2, 9) == 1
