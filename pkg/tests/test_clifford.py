from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polycauchy.clifford import (
    DimensionMismatch,
    Multivector,
    cayley,
    embed,
    generator,
    gp,
    left_matrix,
    norm,
    reorder_sign,
)

dims = st.sampled_from([2, 3, 4])
seeds = st.integers(0, 2**31 - 1)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_generators_square_to_minus_one_and_anticommute(m):
    one = Multivector.scalar(m)
    for i in range(1, m + 1):
        ei = Multivector.e(m, i)
        assert ei * ei == -one
        for j in range(i + 1, m + 1):
            ej = Multivector.e(m, j)
            assert ei * ej == -(ej * ei)


def test_bivector_and_pseudoscalar_squares():
    e12 = Multivector.e(3, 1, 2)
    assert e12 * e12 == -Multivector.scalar(3)
    e123 = Multivector.e(3, 1, 2, 3)
    # (e1 e2 e3)^2 = +1 in R_{0,3}
    assert e123 * e123 == Multivector.scalar(3)


def test_reorder_sign_table():
    # e1 * e2 = e12, e2 * e1 = -e12, e12 * e1 = e2
    assert reorder_sign(0b01, 0b10) == 1
    assert reorder_sign(0b10, 0b01) == -1
    assert reorder_sign(0b11, 0b01) == 1
    sign, index = cayley(3)
    assert np.all(index == np.arange(8)[:, None] ^ np.arange(8)[None, :])
    assert np.all(sign[0] == 1) and np.all(sign[:, 0] == 1)


@given(dims, seeds)
def test_product_is_associative(m, seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.standard_normal((3, 1 << m))
    assert np.allclose(gp(gp(a, b), c), gp(a, gp(b, c)), atol=1e-10)


@given(dims, seeds)
def test_product_distributes_over_addition(m, seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.standard_normal((3, 1 << m))
    assert np.allclose(gp(a, b + c), gp(a, b) + gp(a, c), atol=1e-12)


@given(dims, seeds)
def test_vector_squares_to_minus_norm(m, seed):
    x = np.random.default_rng(seed).standard_normal(m)
    v = embed(x)
    expect = np.zeros(1 << m)
    expect[0] = -x @ x
    assert np.allclose(gp(v, v), expect, atol=1e-12)


def test_exact_product_matches_float():
    rng = np.random.default_rng(5)
    a = [Fraction(int(v), 3) for v in rng.integers(-5, 6, 8)]
    b = [Fraction(int(v), 7) for v in rng.integers(-5, 6, 8)]
    exact = gp(np.array(a, dtype=object), np.array(b, dtype=object))
    assert all(isinstance(c, Fraction) for c in exact)
    assert np.allclose(exact.astype(float), gp(np.array(a, dtype=float), np.array(b, dtype=float)))


def test_gp_broadcasts_batches():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 8))
    b = rng.standard_normal(8)
    out = gp(a, b)
    assert out.shape == (5, 8)
    assert np.allclose(out[2], gp(a[2], b))


def test_left_matrix_reproduces_product():
    rng = np.random.default_rng(1)
    a, b = rng.standard_normal((2, 8))
    assert np.allclose(left_matrix(a) @ b, gp(a, b))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Multivector.scalar(2) + Multivector.scalar(3)
    with pytest.raises(DimensionMismatch):
        gp(np.zeros(4), np.zeros(8))
    with pytest.raises(ValueError):
        Multivector(3, [1.0, 2.0])
    with pytest.raises(ValueError):
        generator(3, 4)


def test_multivector_helpers():
    v = Multivector.vector([3.0, 4.0, 0.0])
    assert v.norm() == pytest.approx(5.0)
    assert v.grade_part(1) == v
    assert v.grade_part(0) == Multivector(3)
    assert (2 * v).isclose(v + v)
    assert float(norm(embed(np.array([1.0, 2.0, 2.0])))) == pytest.approx(3.0)
    assert "e12" in repr(Multivector.e(3, 1, 2))
