import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polycauchy.clifford import gp
from polycauchy.multiindex import (
    Polynomial,
    apply_expansion,
    check_parity,
    dirac_power_expansion,
    enumerate_indices,
    even_weight,
    expansion_operator,
    factorial,
    indices_of_order,
    sign_c,
)


def test_enumeration_counts():
    # number of multi-indices of order <= k in m variables is C(m + k, k)
    for m in (2, 3):
        for k in range(5):
            assert len(enumerate_indices(m, k)) == math.comb(m + k, k)
    assert indices_of_order(3, 2) == ((0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1), (1, 1, 0), (2, 0, 0))
    assert factorial((2, 3)) == 12


def test_sign_pattern():
    assert [sign_c(s) for s in range(8)] == [1, 1, -1, -1, 1, 1, -1, -1]
    with pytest.raises(ValueError):
        sign_c(-1)


def test_even_weights():
    assert even_weight((2, 0, 0)) == 1
    assert even_weight((2, 2, 0)) == 2
    assert even_weight((2, 2, 2)) == 6
    assert even_weight((4, 0)) == 1


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("s", range(6))
def test_expansion_structure(m, s):
    exp = dirac_power_expansion(s, m)
    assert check_parity(exp)
    assert exp.sign == sign_c(s)
    if s <= 3:
        assert all(w == 1 for *_, w in exp.terms)


def test_low_order_expansions():
    # D^2 = -Laplacian and D^1 = sum e_i d_i
    exp2 = dirac_power_expansion(2, 3)
    assert exp2.sign == -1
    assert {idx for _, idx, _ in exp2.terms} == {(2, 0, 0), (0, 2, 0), (0, 0, 2)}
    exp1 = dirac_power_expansion(1, 2)
    assert {(b, idx) for b, idx, _ in exp1.terms} == {(1, (1, 0)), (2, (0, 1))}


@given(st.sampled_from([2, 3]), st.integers(0, 4), st.integers(0, 2**31 - 1))
def test_expansion_matches_iterated_dirac(m, s, seed):
    P = Polynomial.random(m, 5, np.random.default_rng(seed))
    assert expansion_operator(dirac_power_expansion(s, m), P) == P.dirac_power(s)


def test_numeric_expansion_agrees_with_exact():
    rng = np.random.default_rng(3)
    P = Polynomial.random(3, 4, rng)
    x = rng.standard_normal((6, 3))
    for s in range(4):
        num = apply_expansion(dirac_power_expansion(s, 3), P, x)
        assert np.allclose(num, P.dirac_power(s)(x), atol=1e-9)


def test_polynomial_arithmetic():
    rng = np.random.default_rng(8)
    P = Polynomial.random(2, 3, rng)
    Q = Polynomial.random(2, 2, rng)
    assert (P - P).is_zero()
    assert P + Q == Q + P
    x = np.array([0.3, -0.7])
    assert np.allclose(P.mul_poly(Q)(x), gp(P(x), Q(x)))
    assert P.derivative((0, 0)) == P
    assert P.derivative((4, 0)).is_zero()
    y = [Fraction(1, 3), Fraction(-2, 5)]
    assert np.allclose(P.exact_at(y).astype(float), P(np.array([1 / 3, -2 / 5])))


def test_laplacian_of_harmonic_polynomial_vanishes():
    # x^2 - y^2 is harmonic, so D^2 kills it
    one = [1, 0, 0, 0]
    P = Polynomial(2, {(2, 0): one, (0, 2): [-1, 0, 0, 0]})
    assert P.dirac_power(2).is_zero()
    assert not P.dirac().is_zero()
