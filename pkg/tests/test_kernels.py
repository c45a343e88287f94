import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polycauchy.clifford import Multivector, norm
from polycauchy.kernels import (
    SingularPoint,
    UnsupportedOrder,
    build_family,
    derivative_fd_residual,
    eval_E,
    eval_E_deriv,
    fd_dirac,
    monogenicity_residual,
    random_shell_points,
    sigma,
    validate_recursion,
)


def test_sphere_areas():
    assert sigma(2) == pytest.approx(2 * math.pi)
    assert sigma(3) == pytest.approx(4 * math.pi)
    assert sigma(4) == pytest.approx(2 * math.pi**2)


def test_cauchy_kernel_closed_form():
    # E_0(x) = -x / (sigma_m |x|^m)
    fam = build_family(3, 0)
    x = np.array([0.3, -0.4, 1.2])
    r = np.linalg.norm(x)
    expect = np.zeros(8)
    expect[[1, 2, 4]] = -x / (4 * math.pi * r**3)
    assert np.allclose(fam.E(0, x), expect)
    assert isinstance(eval_E(fam, 0, x), Multivector)
    assert eval_E(fam, 0, np.stack([x, x])).shape == (2, 8)


@pytest.mark.parametrize("m,K", [(3, 3), (2, 0), (4, 2)])
def test_recursion_and_monogenicity(m, K):
    fam = build_family(m, K)
    assert max(validate_recursion(fam, samples=60).values(), default=0.0) < 1e-6
    assert monogenicity_residual(fam, samples=60) < 1e-6


def test_symbolic_derivatives_match_differences():
    assert derivative_fd_residual(build_family(3, 2), 2, samples=20) < 1e-6


def test_parity_structure():
    fam = build_family(3, 3)
    x = random_shell_points(np.random.default_rng(0), 3, 10)
    for u in range(4):
        E = fam.E(u, x)
        grades = [1, 2, 4] if u % 2 == 0 else [0]
        mask = np.ones(8, bool)
        mask[grades] = False
        assert np.all(E[:, mask] == 0)


@given(st.integers(0, 3), st.floats(0.2, 5.0), st.integers(0, 2**31 - 1))
def test_homogeneity(u, lam, seed):
    fam = build_family(3, 3)
    x = random_shell_points(np.random.default_rng(seed), 3, 5)
    assert np.allclose(fam.E(u, lam * x), lam ** fam.exponent(u) * fam.E(u, x), rtol=1e-12, atol=0)


def test_deriv_order_zero_is_kernel():
    fam = build_family(3, 2)
    x = random_shell_points(np.random.default_rng(2), 3, 8)
    for u in range(3):
        assert np.allclose(fam.deriv(u, (0, 0, 0), x), fam.E(u, x))
    d = eval_E_deriv(fam, 1, (1, 0, 0), x[0])
    assert isinstance(d, Multivector)


def test_fd_dirac_of_linear_vector():
    # D x = -m for the embedded vector x
    from polycauchy.clifford import embed

    x = np.random.default_rng(0).standard_normal((4, 3))
    out = fd_dirac(embed, x)
    assert np.allclose(out[:, 0], -3.0) and np.allclose(out[:, 1:], 0.0, atol=1e-9)


def test_rejections():
    with pytest.raises(UnsupportedOrder):
        build_family(2, 1)
    with pytest.raises(UnsupportedOrder):
        build_family(4, 3)
    fam = build_family(3, 1)
    with pytest.raises(SingularPoint):
        fam.E(0, np.zeros(3))
    with pytest.raises(ValueError):
        fam.E(2, np.ones(3))
    with pytest.raises(ValueError):
        fam.deriv(0, (1, 0), np.ones(3))


def test_norm_decay_rate():
    fam = build_family(3, 1)
    x = np.array([1.0, 2.0, 2.0]) / 3
    ratio = float(norm(fam.E(0, 10 * x)) / norm(fam.E(0, x)))
    assert ratio == pytest.approx(1e-2)
