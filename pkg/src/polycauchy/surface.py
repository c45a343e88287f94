"""Closed surfaces (circle, sphere), quadrature and spectral interpolation.

Node layout
-----------
* circle (m = 2): ``8 * level`` equispaced nodes, node ``k`` at angle
  ``2 pi k / N``.
* sphere (m = 3): ``2 * level`` Gauss-Legendre colatitudes times ``4 * level``
  uniform longitudes; node ``(i, k)`` has index ``i * nphi + k``.

In both cases every node is a rotation of the first node of its ring about
the polar axis, which the operator engine exploits: a quadrature rule built
around one target is reused for the whole ring by rotation, and nodal data
is evaluated at the rotated points spectrally (Fourier on the circle,
spherical harmonics on the sphere).

Singular integrals use a polar rule centred on the singular point: radial
Gauss-Legendre in the geodesic angle and a uniform angular rule that is
symmetric under ``phi -> phi + pi``, so odd leading singular terms cancel
exactly and the surface Jacobian absorbs one power of ``1/r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .clifford import embed, norm


class UnsupportedSurface(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Quadrature nodes, unit outward normals and weights of a closed surface."""

    dim: int
    nodes: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    refinement_level: int
    kind: str = "sphere"
    radius: float = 1.0
    shape: tuple[int, ...] = ()

    def __post_init__(self):
        for arr in (self.nodes, self.normals, self.weights):
            arr.flags.writeable = False

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def area(self) -> float:
        return float(np.sum(self.weights))

    @property
    def spacing(self) -> float:
        """Typical node spacing ``h``: ``sqrt(area / N)`` on a sphere, ``length / N`` on a circle."""
        if self.dim == 2:
            return self.area / self.size
        return math.sqrt(self.area / self.size)

    @property
    def ring_size(self) -> int:
        """Number of nodes related by rotation about the polar axis."""
        return self.shape[-1]

    @property
    def n_rings(self) -> int:
        return self.size // self.ring_size

    def ring(self, p: int) -> np.ndarray:
        n = self.ring_size
        return np.arange(p * n, (p + 1) * n)

    def ring_of(self, node: int) -> tuple[int, int]:
        """``(ring, position)`` of a node; position ``k`` means rotation ``2 pi k / ring_size``."""
        return divmod(int(node), self.ring_size)

    def rotation(self, phi: np.ndarray) -> np.ndarray:
        """Rotation matrices about the polar axis, shape ``phi.shape + (m, m)``."""
        phi = np.asarray(phi, dtype=float)
        c, s = np.cos(phi), np.sin(phi)
        m = self.dim
        out = np.zeros(phi.shape + (m, m))
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
        if m == 3:
            out[..., 2, 2] = 1.0
        return out

    def contains(self, x: np.ndarray) -> np.ndarray:
        """True for points of the open interior ``Omega_+``."""
        return np.linalg.norm(np.asarray(x, dtype=float), axis=-1) < self.radius

    def distance(self, x: np.ndarray) -> np.ndarray:
        return np.abs(np.linalg.norm(np.asarray(x, dtype=float), axis=-1) - self.radius)

    def project(self, x: np.ndarray) -> np.ndarray:
        """Closest surface point (radial projection)."""
        x = np.asarray(x, dtype=float)
        return self.radius * x / np.linalg.norm(x, axis=-1, keepdims=True)


def sphere_mesh(m: int, radius: float = 1.0, level: int = 4) -> SurfaceMesh:
    """Unit-normal quadrature mesh of the circle (``m = 2``) or sphere (``m = 3``).

    Weights are exact for the parametrisation: the circle rule is the
    trapezoid rule, the sphere rule is Gauss-Legendre in ``cos(theta)``
    times the trapezoid rule in longitude.
    """
    if radius <= 0 or level < 1:
        raise ValueError("need radius > 0 and level >= 1")
    if m == 2:
        n = 8 * level
        phi = 2 * np.pi * np.arange(n) / n
        normals = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        weights = np.full(n, 2 * np.pi * radius / n)
        return SurfaceMesh(2, radius * normals, normals, weights, level, "circle", radius, (n,))
    if m == 3:
        nt, nphi = 2 * level, 4 * level
        x, w = np.polynomial.legendre.leggauss(nt)
        # north pole first
        x, w = x[::-1], w[::-1]
        st = np.sqrt(1 - x * x)
        phi = 2 * np.pi * np.arange(nphi) / nphi
        normals = np.stack(
            [
                np.outer(st, np.cos(phi)).ravel(),
                np.outer(st, np.sin(phi)).ravel(),
                np.repeat(x, nphi),
            ],
            axis=1,
        )
        weights = np.repeat(w, nphi) * (2 * np.pi / nphi) * radius**2
        return SurfaceMesh(3, radius * normals, normals, weights, level, "sphere", radius, (nt, nphi))
    raise UnsupportedSurface(f"sphere meshes exist for m in (2, 3), got m={m}")


def _as_density(density) -> np.ndarray:
    if isinstance(density, np.ndarray):
        return density
    try:
        from .clifford import Multivector

        if len(density) and isinstance(density[0], Multivector):
            return np.stack([np.asarray(d.coeffs, dtype=float) for d in density])
    except TypeError:
        pass
    return np.asarray(density, dtype=float)


def fold_sum(values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Sequential left-to-right sum along ``axis`` (bit-stable, no pairwise reduction)."""
    values = np.asarray(values, dtype=float)
    if values.shape[axis] == 0:
        return np.zeros(np.delete(values.shape, axis))
    return np.take(np.cumsum(values, axis=axis), -1, axis=axis)


def integrate(mesh: SurfaceMesh, density) -> np.ndarray:
    """``sum_i w_i density_i`` with deterministic left-fold summation."""
    d = _as_density(density)
    if d.shape[0] != mesh.size:
        raise ValueError(f"density has {d.shape[0]} rows for a mesh of {mesh.size} nodes")
    w = mesh.weights.reshape((-1,) + (1,) * (d.ndim - 1))
    return fold_sum(w * d, axis=0)


# --------------------------------------------------------------------------
# Polar rules around a surface point


@dataclass(frozen=True)
class PolarGrid:
    """Quadrature points around ``center``; ``theta`` is the geodesic angle."""

    center: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    theta: np.ndarray


def gl_radial(n: int, a: float = 0.0, b: float = np.pi) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def graded_radial(
    delta: float, n_panel: int = 12, ratio: float = 2.0, start: float = 0.25
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre on ``[0, pi]`` with panels growing geometrically from
    ``start * delta``, resolving features of size ``delta`` near zero."""
    edges = [0.0]
    e = start * delta
    while e < np.pi:
        edges.append(e)
        e *= ratio
    if np.pi - edges[-1] < 0.5 * (edges[-1] - edges[-2] if len(edges) > 2 else edges[-1]):
        edges[-1] = np.pi
    else:
        edges.append(np.pi)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gl_radial(n_panel, a, b)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _tangent_frame(c: np.ndarray) -> tuple[np.ndarray, ...]:
    if len(c) == 2:
        return (np.array([-c[1], c[0]]),)
    helper = np.array([1.0, 0.0, 0.0]) if abs(c[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    t1 = np.cross(c, helper)
    t1 /= np.linalg.norm(t1)
    return t1, np.cross(c, t1)


def polar_rule(
    mesh: SurfaceMesh,
    center: np.ndarray,
    radial: tuple[np.ndarray, np.ndarray],
    n_angle: int,
) -> PolarGrid:
    """Polar product rule on the circle/sphere centred at the surface point ``center``.

    The sphere uses ``n_angle`` (even) uniform angles; the circle uses the two
    directions ``+-`` the tangent.  Weights include the surface Jacobian.
    """
    R = mesh.radius
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    th, wt = radial
    if mesh.dim == 2:
        (t,) = _tangent_frame(c)
        sgn = np.array([1.0, -1.0])
        theta = np.repeat(th, 2)
        dirs = np.cos(theta)[:, None] * c + (np.sin(theta) * np.tile(sgn, len(th)))[:, None] * t
        weights = np.repeat(wt, 2) * R
    else:
        if n_angle % 2:
            raise ValueError("n_angle must be even so the rule is symmetric")
        t1, t2 = _tangent_frame(c)
        phi = 2 * np.pi * np.arange(n_angle) / n_angle
        theta = np.repeat(th, n_angle)
        ph = np.tile(phi, len(th))
        dirs = (
            np.cos(theta)[:, None] * c
            + (np.sin(theta) * np.cos(ph))[:, None] * t1
            + (np.sin(theta) * np.sin(ph))[:, None] * t2
        )
        weights = np.repeat(wt * np.sin(th), n_angle) * (2 * np.pi / n_angle) * R**2
    return PolarGrid(R * c, R * dirs, dirs, weights, theta)


def default_orders(mesh: SurfaceMesh, k: int = 0) -> tuple[int, int]:
    """Radial and angular counts of the on-surface polar rule for a mesh level."""
    band = spectral_basis(mesh).band
    if mesh.dim == 2:
        return band // 2 + 12, 2
    n_r = band + 8
    n_a = band + 2 * k + 9
    return n_r, n_a + (n_a % 2)


# --------------------------------------------------------------------------
# Spectral interpolation of nodal data


def legendre_table(L: int, t: np.ndarray) -> np.ndarray:
    """Orthonormal associated Legendre values ``[point, l, m]`` (no Condon-Shortley phase).

    ``Y_lm = table[l, m] * exp(i m phi)`` is orthonormal on the unit sphere.
    """
    t = np.asarray(t, dtype=float)
    s = np.sqrt(np.clip(1 - t * t, 0.0, None))
    out = np.zeros(t.shape + (L + 1, L + 1))
    pmm = np.full(t.shape, math.sqrt(1 / (4 * math.pi)))
    for m in range(L + 1):
        if m:
            pmm = pmm * math.sqrt((2 * m + 1) / (2 * m)) * s
        out[..., m, m] = pmm
        if m < L:
            out[..., m + 1, m] = math.sqrt(2 * m + 3) * t * pmm
    for l in range(2, L + 1):
        m = np.arange(l - 1)
        a = np.sqrt((4 * l * l - 1) / (l * l - m * m))
        b = np.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
        out[..., l, : l - 1] = a * (t[..., None] * out[..., l - 1, : l - 1] - b * out[..., l - 2, : l - 1])
    return out


class SpectralBasis:
    """Band-limited interpolation of nodal data, exact on the mesh's band."""

    band: int

    def analyze(self, values: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def ring(self, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Values at ``R(2 pi k / n) points`` for every rotation ``k``: shape ``(n, Q, F)``."""
        raise NotImplementedError


class FourierBasis(SpectralBasis):
    def __init__(self, mesh: SurfaceMesh):
        self.n = mesh.size
        self.band = self.n // 2
        eps = np.full(self.band + 1, 2.0)
        eps[0] = 1.0
        if self.n % 2 == 0:
            eps[-1] = 1.0  # Nyquist term split symmetrically
        self.eps = eps

    def analyze(self, values):
        v = np.asarray(values, dtype=float).reshape(self.n, -1)
        return np.fft.rfft(v, axis=0) / self.n

    def _modes(self, coeffs, ang):
        m = np.arange(self.band + 1)
        phase = np.exp(1j * np.outer(ang, m)) * self.eps
        return phase, coeffs

    def evaluate(self, coeffs, points):
        pts = np.asarray(points, dtype=float)
        ang = np.arctan2(pts[..., 1], pts[..., 0]).ravel()
        phase, c = self._modes(coeffs, ang)
        if self.n % 2 == 0:
            # Nyquist mode enters as cos(N psi / 2)
            phase[:, -1] = np.cos(self.band * ang)
        out = (phase @ c).real
        return out.reshape(pts.shape[:-1] + (c.shape[1],))

    def ring(self, coeffs, points):
        pts = np.asarray(points, dtype=float)
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        m = np.arange(self.band + 1)
        B = np.exp(1j * np.outer(ang, m))[:, :, None] * (self.eps[:, None] * coeffs)[None]
        if self.n % 2 == 0:
            # split cos(N/2 psi) into two half-weight exponentials so the rotation
            # by 2 pi k / N stays exact
            nyq = self.band
            B[:, nyq, :] = coeffs[nyq][None, :] * np.cos(nyq * ang)[:, None]
        full = np.zeros((self.n, B.shape[0], B.shape[2]), dtype=complex)
        full[: self.band + 1] = np.transpose(B, (1, 0, 2))
        return (np.fft.ifft(full, axis=0) * self.n).real


class SphericalHarmonicBasis(SpectralBasis):
    def __init__(self, mesh: SurfaceMesh):
        nt, nphi = mesh.shape
        self.nt, self.nphi = nt, nphi
        self.band = nt - 1
        self.radius = mesh.radius
        x, w = np.polynomial.legendre.leggauss(nt)
        self.ct, self.wt = x[::-1], w[::-1]
        self.table = legendre_table(self.band, self.ct)
        eps = np.full(self.band + 1, 2.0)
        eps[0] = 1.0
        self.eps = eps

    def analyze(self, values):
        L = self.band
        v = np.asarray(values, dtype=float).reshape(self.nt, self.nphi, -1)
        fm = np.fft.fft(v, axis=1)[:, : L + 1, :] * (2 * np.pi / self.nphi)
        # c[l, m, f] = sum_i w_i P_lm(t_i) F_m(t_i)
        return np.einsum("i,ilm,imf->lmf", self.wt, self.table, fm)

    def evaluate(self, coeffs, points):
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 3)
        r = np.linalg.norm(flat, axis=1)
        t = flat[:, 2] / r
        phi = np.arctan2(flat[:, 1], flat[:, 0])
        P = legendre_table(self.band, t)
        m = np.arange(self.band + 1)
        phase = np.exp(1j * np.outer(phi, m)) * self.eps
        # B[p, m, f] = sum_l P[p, l, m] c[l, m, f], one matmul per order m
        B = np.matmul(P.transpose(2, 0, 1), coeffs.transpose(1, 0, 2))  # (m, p, f)
        out = np.einsum("mpf,pm->pf", B, phase, optimize=True).real
        return out.reshape(pts.shape[:-1] + (coeffs.shape[2],))

    def ring(self, coeffs, points):
        pts = np.asarray(points, dtype=float)
        r = np.linalg.norm(pts, axis=1)
        P = legendre_table(self.band, pts[:, 2] / r)
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        m = np.arange(self.band + 1)
        # B[q, m, f] = eps_m exp(i m psi_q) sum_l c_lmf P_lm(t_q)
        B = np.matmul(P.transpose(2, 0, 1), coeffs.transpose(1, 0, 2)).transpose(1, 0, 2)
        B *= (np.exp(1j * np.outer(phi, m)) * self.eps)[:, :, None]
        full = np.zeros((self.nphi, B.shape[0], B.shape[2]), dtype=complex)
        full[: self.band + 1] = np.transpose(B, (1, 0, 2))
        return (np.fft.ifft(full, axis=0) * self.nphi).real


_BASES: dict[int, SpectralBasis] = {}


def spectral_basis(mesh: SurfaceMesh) -> SpectralBasis:
    key = id(mesh)
    basis = _BASES.get(key)
    if basis is None or getattr(basis, "_mesh", None) is not mesh:
        basis = FourierBasis(mesh) if mesh.dim == 2 else SphericalHarmonicBasis(mesh)
        basis._mesh = mesh
        _BASES[key] = basis
    return basis


@dataclass
class Interpolant:
    """Spectral interpolant of node-indexed (possibly multivector) values."""

    mesh: SurfaceMesh
    values: np.ndarray
    coeffs: np.ndarray = field(init=False)
    trailing: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        self.trailing = v.shape[1:]
        self.coeffs = spectral_basis(self.mesh).analyze(v.reshape(v.shape[0], -1))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        out = spectral_basis(self.mesh).evaluate(self.coeffs, pts)
        return out.reshape(pts.shape[:-1] + self.trailing)

    def ring(self, points: np.ndarray) -> np.ndarray:
        out = spectral_basis(self.mesh).ring(self.coeffs, points)
        return out.reshape(out.shape[:2] + self.trailing)


# --------------------------------------------------------------------------
# Principal values


def pv_integrate(
    mesh: SurfaceMesh,
    z: int,
    density: np.ndarray | Callable[[np.ndarray, np.ndarray], np.ndarray],
    method: str = "polar",
    orders: tuple[int, int] | None = None,
) -> np.ndarray:
    """Principal value of ``int_Gamma density`` with the singularity at node ``z``.

    ``method="exclude"`` drops every node within ``2 h`` of ``z`` from the
    node rule (``density`` is node-indexed).  ``method="polar"`` evaluates a
    callable ``density(points, normals)`` on the symmetric polar rule centred
    at ``z``; its error is spectral for smooth angular dependence, while
    node exclusion leaves an ``O(h)`` bias.
    """
    if method == "exclude":
        dist = np.linalg.norm(mesh.nodes - mesh.nodes[z], axis=1)
        keep = np.flatnonzero(dist > 2 * mesh.spacing)
        if callable(density):
            d = np.asarray(density(mesh.nodes[keep], mesh.normals[keep]), dtype=float)
        else:
            d = _as_density(density)[keep]
        w = mesh.weights[keep].reshape((-1,) + (1,) * (d.ndim - 1))
        return fold_sum(w * d, axis=0)
    if method != "polar":
        raise ValueError(f"unknown method {method!r}")
    if not callable(density):
        raise TypeError("the polar rule needs a callable density(points, normals)")
    n_r, n_a = orders or default_orders(mesh)
    grid = polar_rule(mesh, mesh.nodes[z], gl_radial(n_r), n_a)
    vals = np.asarray(density(grid.points, grid.normals), dtype=float)
    w = grid.weights.reshape((-1,) + (1,) * (vals.ndim - 1))
    return fold_sum(w * vals, axis=0)


# --------------------------------------------------------------------------
# Probes


@dataclass(frozen=True)
class ProbePath:
    base: np.ndarray
    normal: np.ndarray
    side: str
    offsets: np.ndarray

    @property
    def points(self) -> np.ndarray:
        sgn = -1.0 if self.side == "interior" else 1.0
        return self.base + sgn * self.offsets[:, None] * self.normal


def probe_points(mesh: SurfaceMesh, z: int, side: str, count: int = 4, scale: float = 4.0) -> ProbePath:
    """Points ``z -+ delta_i n(z)`` with ``delta_i = scale * h / 2**i``."""
    if side not in ("interior", "exterior"):
        raise ValueError("side must be 'interior' or 'exterior'")
    offsets = scale * mesh.spacing / 2.0 ** np.arange(count)
    return ProbePath(mesh.nodes[z].copy(), mesh.normals[z].copy(), side, offsets)


# --------------------------------------------------------------------------
# Text format: one node per line, "x_1 .. x_m n_1 .. n_m w"


def save_mesh(mesh: SurfaceMesh, path: str | Path) -> None:
    header = (
        f"kind={mesh.kind} dim={mesh.dim} radius={mesh.radius!r} level={mesh.refinement_level} "
        f"shape={','.join(map(str, mesh.shape))}"
    )
    table = np.hstack([mesh.nodes, mesh.normals, mesh.weights[:, None]])
    np.savetxt(path, table, fmt="%.17g", header=header)


def load_mesh(path: str | Path) -> SurfaceMesh:
    with open(path) as fh:
        first = fh.readline().lstrip("#").split()
    meta = dict(item.split("=", 1) for item in first)
    m = int(meta["dim"])
    table = np.loadtxt(path, ndmin=2)
    if table.shape[1] != 2 * m + 1:
        raise ValueError(f"expected {2 * m + 1} columns, found {table.shape[1]}")
    shape = tuple(int(s) for s in meta["shape"].split(",") if s)
    return SurfaceMesh(
        m,
        table[:, :m].copy(),
        table[:, m : 2 * m].copy(),
        table[:, 2 * m].copy(),
        int(meta["level"]),
        meta["kind"],
        float(meta["radius"]),
        shape,
    )


def gauss_identity(mesh: SurfaceMesh, fam, x: np.ndarray) -> np.ndarray:
    """``int_Gamma E_0(y - x) n(y) dy`` by the node rule, for each point of ``x``."""
    from .clifford import gp

    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = []
    for p in x:
        dens = gp(fam.E(0, mesh.nodes - p), embed(mesh.normals))
        out.append(integrate(mesh, dens))
    return np.array(out)

