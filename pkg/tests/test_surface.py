import math

import numpy as np
import pytest

from polycauchy.clifford import embed, gp, norm
from polycauchy.kernels import build_family
from polycauchy.surface import (
    Interpolant,
    UnsupportedSurface,
    gauss_identity,
    gl_radial,
    graded_radial,
    integrate,
    load_mesh,
    polar_rule,
    probe_points,
    pv_integrate,
    save_mesh,
    sphere_mesh,
)


@pytest.mark.parametrize("m,area", [(2, 2 * math.pi), (3, 4 * math.pi)])
def test_mesh_area_and_normals(m, area):
    mesh = sphere_mesh(m, 1.0, 6)
    assert mesh.area == pytest.approx(area, rel=1e-13)
    assert np.allclose(np.linalg.norm(mesh.normals, axis=1), 1.0)
    assert np.allclose(mesh.nodes, mesh.normals)
    assert mesh.n_rings * mesh.ring_size == mesh.size


def test_radius_scaling():
    mesh = sphere_mesh(3, 2.0, 4)
    assert mesh.area == pytest.approx(16 * math.pi)
    assert np.allclose(mesh.distance(mesh.nodes), 0.0)
    assert mesh.contains(np.zeros(3)) and not mesh.contains(np.array([0, 0, 3.0]))


def test_rotation_maps_rings():
    mesh = sphere_mesh(3, 1.0, 4)
    ring = mesh.ring(2)
    R = mesh.rotation(np.array(2 * math.pi / mesh.ring_size))
    assert np.allclose(mesh.nodes[ring[0]] @ R.T, mesh.nodes[ring[1]])
    assert mesh.ring_of(ring[3]) == (2, 3)


def test_node_rule_integrates_polynomials():
    mesh = sphere_mesh(3, 1.0, 4)
    x = mesh.nodes
    assert integrate(mesh, x[:, 2] ** 2) == pytest.approx(4 * math.pi / 3)
    assert integrate(mesh, x[:, 0] ** 4) == pytest.approx(4 * math.pi / 5)


@pytest.mark.parametrize("m", [2, 3])
def test_gauss_identity(m):
    mesh = sphere_mesh(m, 1.0, 8)
    fam = build_family(m, 0)
    inside = gauss_identity(mesh, fam, 0.3 * np.ones(m))[0]
    outside = gauss_identity(mesh, fam, 1.8 * np.ones(m))[0]
    one = np.eye(1 << m)[0]
    assert float(norm(inside - one)) < 1e-8
    assert float(norm(outside)) < 1e-8


@pytest.mark.parametrize("m", [2, 3])
def test_principal_value_is_one_half(m):
    mesh = sphere_mesh(m, 1.0, 4)
    fam = build_family(m, 0)
    z = mesh.size // 3
    pv = pv_integrate(mesh, z, lambda y, n: gp(fam.E(0, y - mesh.nodes[z]), embed(n)))
    assert float(norm(pv - 0.5 * np.eye(1 << m)[0])) < 1e-10


def test_node_exclusion_has_first_order_bias():
    fam = build_family(3, 0)
    errs = []
    for lvl in (4, 8):
        mesh = sphere_mesh(3, 1.0, lvl)
        z = mesh.size // 3
        dens = gp(fam.E(0, np.where((np.arange(mesh.size) == z)[:, None], 1.0, mesh.nodes - mesh.nodes[z])), embed(mesh.normals))
        pv = pv_integrate(mesh, z, dens, method="exclude")
        errs.append(float(norm(pv - 0.5 * np.eye(8)[0])))
    assert errs[1] < errs[0] and errs[1] > 1e-3


def test_polar_rule_integrates_smooth_functions():
    mesh = sphere_mesh(3, 1.0, 4)
    c = mesh.nodes[7]
    grid = polar_rule(mesh, c, gl_radial(24), 32)
    assert np.sum(grid.weights) == pytest.approx(4 * math.pi, rel=1e-12)
    assert np.sum(grid.weights * grid.points[:, 0] ** 2) == pytest.approx(4 * math.pi / 3, rel=1e-12)
    r, w = graded_radial(0.01)
    assert np.sum(w) == pytest.approx(math.pi, rel=1e-12)


@pytest.mark.parametrize("m", [2, 3])
def test_spectral_interpolation_is_exact_for_low_degree(m):
    mesh = sphere_mesh(m, 1.0, 6)
    f = lambda p: p[..., :1] ** 2 * p[..., -1:] + p[..., :1]  # noqa: E731
    interp = Interpolant(mesh, f(mesh.nodes))
    pts = np.random.default_rng(0).standard_normal((10, m))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    assert np.allclose(interp(pts), f(pts), atol=1e-12)


def test_probe_points():
    mesh = sphere_mesh(3, 1.0, 4)
    path = probe_points(mesh, 5, "exterior", count=3, scale=2.0)
    d = np.linalg.norm(path.points, axis=1) - 1.0
    assert np.allclose(d, 2.0 * mesh.spacing / 2.0 ** np.arange(3))
    inner = probe_points(mesh, 5, "interior")
    assert np.all(np.linalg.norm(inner.points, axis=1) < 1.0)
    with pytest.raises(ValueError):
        probe_points(mesh, 5, "above")


def test_mesh_roundtrip(tmp_path):
    mesh = sphere_mesh(3, 1.5, 4)
    save_mesh(mesh, tmp_path / "m.txt")
    back = load_mesh(tmp_path / "m.txt")
    assert np.array_equal(back.nodes, mesh.nodes)
    assert np.array_equal(back.weights, mesh.weights)
    assert back.shape == mesh.shape and back.radius == mesh.radius


def test_unsupported_inputs():
    with pytest.raises(UnsupportedSurface):
        sphere_mesh(4, 1.0, 4)
    with pytest.raises(ValueError):
        sphere_mesh(3, -1.0, 4)
