import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polycauchy.clifford import norm
from polycauchy.fields import HolderField, PolynomialField, sample, trig_field
from polycauchy.multiindex import Polynomial
from polycauchy.surface import save_mesh, sphere_mesh
from polycauchy.whitney import (
    LipschitzData,
    ValidationError,
    derivative_bound_check,
    eval_extension,
    extend,
    fd_derivative,
    load_data,
    oblique_probes,
    remainder,
    remainder_ratios,
    save_data,
    validate,
)


@pytest.fixture(scope="module")
def mesh():
    return sphere_mesh(3, 1.0, 3)


@pytest.fixture(scope="module")
def data(mesh):
    return sample(trig_field(3, np.random.default_rng(0)), mesh, 1)


def test_shape_checks(mesh):
    with pytest.raises(ValueError):
        LipschitzData(1, 0.5, mesh, np.zeros((3, mesh.size, 8)))
    with pytest.raises(ValueError):
        LipschitzData.zeros(mesh, 1, alpha=1.0)


def test_jets_and_sub_collections(data):
    assert np.array_equal(data.jet((0, 0, 0)), data.primary)
    sub = data.sub_collection((1, 0, 0))
    assert sub.k == 0 and np.array_equal(sub.primary, data.jet((1, 0, 0)))
    with pytest.raises(IndexError):
        data.jet((2, 0, 0))
    with pytest.raises(IndexError):
        data.sub_collection((1, 1, 0))


def test_polynomial_remainders_vanish(mesh):
    P = Polynomial.random(3, 1, np.random.default_rng(2))
    d = sample(PolynomialField(P), mesh, 1)
    assert float(norm(remainder(d, (0, 0, 0), 3, 11))) < 1e-13
    assert max(remainder_ratios(d).values()) < 1e-12


def test_validate_scales_linearly(data):
    M, ok = validate(data)
    M2, _ = validate(data.scaled(3.0))
    assert ok and M2 == pytest.approx(3 * M)
    assert not validate(data, bound=0.5 * M)[1]


@given(st.integers(0, 2**31 - 1))
def test_sub_collections_validate(seed):
    mesh = sphere_mesh(3, 1.0, 2)
    d = sample(trig_field(3, np.random.default_rng(seed)), mesh, 2)
    for j in d.indices:
        assert validate(d.sub_collection(j))[1]


def test_invalid_data_rejected(mesh):
    bad = LipschitzData.zeros(mesh, 0)
    values = bad.values.copy()
    values[0, 0, 0] = np.nan
    with pytest.raises(ValidationError):
        extend(bad.with_values(values))


def test_restriction_is_bit_exact(data, mesh):
    ext = extend(data)
    for i in range(0, mesh.size, 5):
        assert np.array_equal(eval_extension(ext, mesh.nodes[i]), data.primary[i])


def test_partition_of_unity_and_support(data):
    ext = extend(data)
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = rng.standard_normal(3)
        p *= rng.uniform(0.8, 1.2) / np.linalg.norm(p)
        parts = ext.partition(p)
        assert sum(w for _, w in parts) == pytest.approx(1.0, abs=1e-12)
        assert all(w > 0 for _, w in parts)
    assert np.all(eval_extension(ext, np.array([0.0, 0.0, 3.0])) == 0)


def test_cube_sandwich(data):
    ext = extend(data)
    cubes = ext.emit_cubes(ext.root_side / 8)
    assert cubes
    assert all(q.diam <= ext.dist_to_set(q) <= 4 * q.diam for q in cubes)


def test_linear_data_reproduced_near_surface(mesh):
    lin = Polynomial.monomial(3, (0, 1, 0), [1, 0, 0, 0, 0, 0, 0, 0])
    ext = extend(sample(PolynomialField(lin), mesh, 1))
    p = np.array([0.1, 0.75, 0.4])
    p *= 0.97 / np.linalg.norm(p)
    assert float(norm(ext(p) - lin(p))) < 1e-10


def test_fd_derivative_of_polynomial():
    f = lambda x: np.array([x[0] ** 3 * x[1]])  # noqa: E731
    x = np.array([0.5, -1.0])
    assert fd_derivative(f, x, (2, 1), 1e-3)[0] == pytest.approx(6 * 0.5, rel=1e-5)


def test_derivative_exponent_on_circle():
    circle = sphere_mesh(2, 1.0, 128)
    d = sample(HolderField(2, 0, 0.5), circle, 0)
    ext = extend(d, check=False)
    top = np.array([0.0, 1.0])
    probes = oblique_probes(top, top, np.array([1.0, 0.0]), np.geomspace(4 * circle.spacing, 0.3, 10), np.linspace(-1.2, 1.2, 41))
    assert probes.shape == (10, 41, 2)
    rep = derivative_bound_check(ext, (1, 0), probes)
    assert rep.passed
    assert abs(rep.exponent + 0.5) < 0.2


def test_data_roundtrip(tmp_path, data, mesh):
    save_mesh(mesh, tmp_path / "mesh.txt")
    save_data(data, tmp_path / "data.txt")
    back = load_data(tmp_path / "data.txt", tmp_path / "mesh.txt")
    assert back.k == data.k and back.alpha == data.alpha
    assert np.array_equal(back.values, data.values)
    with pytest.raises(ValueError):
        load_data(tmp_path / "data.txt", sphere_mesh(3, 1.0, 2))
