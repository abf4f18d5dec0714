"""Residue arithmetic, valuations, and Hensel lifting."""
from __future__ import annotations

import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from padicdyn.core import (
    IntPolynomial,
    NonUnitError,
    NotSimpleRootError,
    Prime,
    Residue,
    Valuation,
    hensel_lift,
    mod_pow,
    unit_inverse,
    valuation,
)

PRIMES = st.sampled_from([2, 3, 5, 7, 11])


def test_prime_rejects_composites():
    for bad in (0, 1, 4, 6, 9, 15):
        with pytest.raises(ValueError):
            Prime(bad)
    assert Prime(2).value == 2
    assert int(Prime(13)) == 13


def test_residue_canonicalizes():
    r = Residue.of(-3, 5, 2)
    assert r.value == 22
    assert r.modulus == 25
    assert Residue.of(50, 5, 2).value == 0


def test_residue_reduce_only_downward():
    r = Residue.of(22, 5, 3)
    assert r.reduce_to(1).value == 2
    with pytest.raises(ValueError):
        r.reduce_to(4)


def test_valuation_frozen_cases():
    assert valuation(Residue.of(50, 5, 4)) == Valuation(True, 2)
    assert valuation(Residue.of(18, 3, 4)) == Valuation(True, 2)
    # an exact zero residue only bounds the valuation from below
    assert valuation(Residue.of(0, 2, 6)) == Valuation(False, 6)


def test_mixed_prime_arithmetic_rejected():
    with pytest.raises(ValueError):
        Residue.of(1, 2, 3) + Residue.of(1, 3, 3)


def test_arithmetic_coerces_to_min_level():
    a = Residue.of(7, 2, 5)
    b = Residue.of(3, 2, 3)
    assert (a + b).level.value == 3
    assert (a + b).value == 2
    assert (a * b).value == 21 % 8
    assert (-b).value == 5


def test_mod_pow_small():
    assert mod_pow(Residue.of(2, 3, 3), 5).value == 5
    assert mod_pow(Residue.of(57, 5, 3), 2).value == 124
    with pytest.raises(ValueError):
        mod_pow(Residue.of(2, 3, 3), -1)


def test_unit_inverse_values():
    assert unit_inverse(Residue.of(3, 2, 5)).value == 11
    assert unit_inverse(Residue.of(7, 5, 2)).value == 18
    with pytest.raises(NonUnitError):
        unit_inverse(Residue.of(10, 5, 3))


def test_polynomial_shapes():
    f = IntPolynomial.monomial(5)
    assert f.degree == 5
    assert f.monomial_exponent == 5
    assert f.derivative().coefficients == (0, 0, 0, 0, 5)
    g = IntPolynomial((1, 0, 1))
    assert g.monomial_exponent is None
    assert g(3, 100) == 10
    assert IntPolynomial((2, 0, 0)).coefficients == (2,)


def test_hensel_sqrt_minus_one():
    f = IntPolynomial((1, 0, 1))
    r = hensel_lift(f, Residue.of(2, 5, 1), 3)
    assert r.value == 57
    assert (r.value * r.value) % 125 == 124
    s = hensel_lift(f, Residue.of(3, 5, 1), 2)
    assert s.value == 18


def test_hensel_rejects_non_roots_and_double_roots():
    with pytest.raises(ValueError):
        hensel_lift(IntPolynomial((1, 0, 1)), Residue.of(1, 5, 1), 3)
    with pytest.raises(NotSimpleRootError):
        hensel_lift(IntPolynomial((0, 0, 1)), Residue.of(0, 5, 1), 3)


def test_hensel_fixed_root_stays():
    f = IntPolynomial((-1, 1))
    r = hensel_lift(f, Residue.of(1, 7, 1), 6)
    assert r.value == 1 and r.level.value == 6


# ---------------------------------------------------------------------------
# properties


@given(PRIMES, st.integers(min_value=1, max_value=10**6), st.integers(min_value=1, max_value=10**6))
def test_valuation_is_multiplicative(p, x, y):
    level = 30
    vx = valuation(Residue.of(x, p, level))
    vy = valuation(Residue.of(y, p, level))
    vxy = valuation(Residue.of(x * y, p, level))
    if vx.exact and vy.exact and vx.value + vy.value < level:
        assert vxy == Valuation(True, vx.value + vy.value)


@given(PRIMES, st.integers(min_value=1, max_value=10**6), st.integers(min_value=1, max_value=10**6))
@example(3, 9, 18)
@example(2, 12, 4)
def test_valuation_ultrametric(p, x, y):
    level = 30
    vx = valuation(Residue.of(x, p, level))
    vy = valuation(Residue.of(y, p, level))
    vs = valuation(Residue.of(x + y, p, level))
    if vx.exact and vy.exact:
        assert vs.value >= min(vx.value, vy.value)
        if vx.value != vy.value:
            assert vs == Valuation(True, min(vx.value, vy.value))


@given(PRIMES, st.integers(min_value=1, max_value=10**9), st.integers(min_value=1, max_value=12))
def test_unit_inverse_really_inverts(p, u, k):
    if u % p == 0:
        u += 1
    r = Residue.of(u, p, k)
    assert (unit_inverse(r) * r).value == 1 % p**k


@given(
    PRIMES,
    st.integers(min_value=0, max_value=10**6),
    st.integers(min_value=0, max_value=40),
    st.integers(min_value=1, max_value=10),
)
def test_mod_pow_matches_builtin(p, b, e, k):
    r = Residue.of(b, p, k)
    assert mod_pow(r, e).value == pow(b, e, p**k)


@given(PRIMES, st.integers(min_value=2, max_value=20), st.integers(min_value=2, max_value=8))
def test_hensel_coherent_across_precision(p, m, k):
    # roots of x^m - x with nonzero derivative lift level by level
    coeffs = [0] * (m + 1)
    coeffs[1] = -1
    coeffs[m] = 1
    f = IntPolynomial(tuple(coeffs))
    df = f.derivative()
    for r0 in range(p):
        if f(r0, p) % p == 0 and df(r0, p) % p != 0:
            deep = hensel_lift(f, Residue.of(r0, p, 1), k)
            shallow = hensel_lift(f, Residue.of(r0, p, 1), k - 1)
            assert deep.value % p ** (k - 1) == shallow.value
            assert f(deep.value, p**k) % p**k == 0
