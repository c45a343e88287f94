import numpy as np
import pytest

from polycauchy.clifford import norm
from polycauchy.fields import (
    ExpField,
    HolderField,
    KernelField,
    PolynomialField,
    VanishingField,
    harmonic_field,
    sample,
    taylor_polynomial,
    trig_field,
)
from polycauchy.kernels import build_family
from polycauchy.multiindex import Polynomial
from polycauchy.surface import sphere_mesh


def _fd(field, j_axis, x, h=1e-6):
    e = np.zeros(len(x))
    e[j_axis] = h
    return (field(x + e) - field(x - e)) / (2 * h)


@pytest.mark.parametrize(
    "field",
    [
        trig_field(3, np.random.default_rng(0)),
        harmonic_field(3, np.random.default_rng(1)),
        KernelField(build_family(3, 1), 1, np.array([0.1, 0.0, -0.2]), np.random.default_rng(2).uniform(-1, 1, 8)),
        HolderField(3, 1, 0.5),
    ],
)
def test_first_derivatives_match_differences(field):
    x = np.array([0.4, -0.5, 0.7])
    for i in range(3):
        j = tuple(1 if t == i else 0 for t in range(3))
        assert np.allclose(field.jet(j, x), _fd(field, i, x), atol=1e-6)


def test_harmonic_field_has_zero_laplacian():
    f = harmonic_field(3, np.random.default_rng(5))
    x = np.random.default_rng(6).standard_normal((4, 3))
    lap = sum(f.jet(tuple(2 if t == i else 0 for t in range(3)), x) for i in range(3))
    assert np.max(np.abs(lap)) < 1e-10


def test_sum_field_and_sampling():
    a = trig_field(2, np.random.default_rng(0))
    b = trig_field(2, np.random.default_rng(1))
    mesh = sphere_mesh(2, 1.0, 4)
    d = sample(a + b, mesh, 2)
    assert d.values.shape == (6, mesh.size, 4)
    assert np.allclose(d.primary, a(mesh.nodes) + b(mesh.nodes))
    with pytest.raises(ValueError):
        sample(a, sphere_mesh(3, 1.0, 2), 1)


def test_vanishing_field_jets_vanish_on_sphere():
    h = Polynomial.random(3, 1, np.random.default_rng(3))
    g = VanishingField.build(h, 1, 1.0)
    mesh = sphere_mesh(3, 1.0, 4)
    d = sample(g, mesh, 1)
    assert d.sup_norm() < 1e-12
    assert float(norm(g(np.zeros(3)))) > 0 or h.is_zero()


def test_taylor_polynomial_of_polynomial_is_exact():
    P = Polynomial.random(3, 2, np.random.default_rng(4))
    T = taylor_polynomial(PolynomialField(P), np.array([0.2, 0.1, -0.3]), 2)
    x = np.random.default_rng(5).standard_normal((5, 3))
    assert np.allclose(T(x), P(x))


def test_exp_field_is_real_part():
    f = ExpField(np.array([[1j, 0.0]]), np.array([0.0]), np.array([[1.0, 0.0, 0.0, 0.0]]))
    x = np.array([[0.3, 0.0]])
    assert f(x)[0, 0] == pytest.approx(np.cos(0.3))
