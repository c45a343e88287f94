"""Cauchy transform, singular operators ``S_k^(j)``, Hardy projections and the
Riemann-Hilbert solver for Lipschitz data on a circle or sphere.

Every ``D^u f~`` on the surface is assembled from the data (the closed form
of ``D^u`` in terms of partial derivatives), never by differentiating the
Whitney extension.  Integrands keep the order kernel * normal * density.

Two quadrature routes are available for the on-surface operator:

* the *direct* route integrates ``2 sum_s (-1)**s E_s(y - z) n(y) D^s f~(y)``
  on a symmetric polar rule centred at ``z`` (principal value);
* the *remainder* route integrates ``2 sum_u (-1)**u E_u^(j) n D^u R(y, z)``
  with the Taylor remainder ``R`` of the data, which is only weakly singular
  and gives every component ``S_k^(j)`` at once.
"""
from __future__ import annotations

import math
import warnings
import weakref
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .clifford import cayley, embed, gp, norm, product_tensor
from .kernels import KernelFamily, build_family
from .multiindex import (
    MultiIndex,
    Polynomial,
    dirac_power_expansion,
    enumerate_indices,
    factorial,
    monomial,
)
from .surface import (
    Interpolant,
    SurfaceMesh,
    default_orders,
    fold_sum,
    gl_radial,
    graded_radial,
    polar_rule,
    probe_points,
)
from .whitney import LipschitzData


class TooCloseToSurface(UserWarning):
    """Target point closer to the surface than the quadrature is designed for."""


# --------------------------------------------------------------------------
# Algebra helpers


def blade_left(m: int, blade: int, v: np.ndarray) -> np.ndarray:
    """``e_blade * v`` as a signed permutation of the blade axis."""
    sign, index = cayley(m)
    out = np.empty_like(v)
    out[..., index[blade]] = sign[blade] * v
    return out


def _sum_gp(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """``sum_q gp(a[..., q, J, :], b[..., q, :])`` for a ``(K, Q, J, n)`` and b ``(K, Q, n)``."""
    K, Q, J, n = a.shape
    lhs = a.reshape(K, Q, J * n).transpose(0, 2, 1)
    outer = np.matmul(lhs, b).reshape(K, J, n * n)
    return outer @ product_tensor(m)


def dirac_jets(values: np.ndarray, m: int, k: int, u: int) -> np.ndarray:
    """Jets of ``D^u f~`` of order ``<= k - u`` from jets of ``f~`` of order ``<= k``.

    ``values[t]`` is ``f^(j)`` for ``j = enumerate_indices(m, k)[t]``; the
    result follows ``enumerate_indices(m, k - u)``.  Entry 0 is the trace
    ``D^u f~`` itself.
    """
    if u > k:
        raise IndexError(f"u = {u} exceeds k = {k}")
    exp = dirac_power_expansion(u, m)
    pos = {j: t for t, j in enumerate(enumerate_indices(m, k))}
    out = []
    for beta in enumerate_indices(m, k - u):
        acc = np.zeros(values.shape[1:])
        for blade, idx, weight in exp.terms:
            term = values[pos[tuple(a + b for a, b in zip(idx, beta))]]
            acc = acc + weight * blade_left(m, blade, term)
        out.append(exp.sign * acc)
    return np.stack(out)


# --------------------------------------------------------------------------
# Context and prepared data


@dataclass(frozen=True, eq=False)
class OperatorContext:
    """Mesh, kernel family and quadrature orders shared by all operators.

    ``convention`` selects how a target derivative acts on the kernel:
    ``"target"`` uses ``d_z^j E(y - z) = (-1)**|j| E^(j)(y - z)`` (the
    derivative of the output field), ``"kernel"`` uses ``E^(j)(y - z)``.
    """

    mesh: SurfaceMesh
    kernels: KernelFamily
    k: int
    alpha: float = 0.5
    orders: tuple[int, int] | None = None
    convention: str = "target"

    def __post_init__(self):
        if self.kernels.dim != self.mesh.dim:
            raise ValueError("kernel and mesh dimensions differ")
        if self.kernels.max_order < self.k:
            raise ValueError("kernel family too short for k")
        if self.convention not in ("target", "kernel"):
            raise ValueError("convention must be 'target' or 'kernel'")

    @property
    def dim(self) -> int:
        return self.mesh.dim

    def polar_orders(self, k: int | None = None) -> tuple[int, int]:
        return self.orders or default_orders(self.mesh, self.k if k is None else k)

    def check(self, data: LipschitzData) -> None:
        if data.mesh is not self.mesh:
            raise ValueError("data lives on a different mesh")
        if data.k > self.kernels.max_order:
            raise ValueError(f"data order {data.k} exceeds kernel order {self.kernels.max_order}")


def make_context(mesh: SurfaceMesh, k: int, alpha: float = 0.5, **kwargs) -> OperatorContext:
    return OperatorContext(mesh, build_family(mesh.dim, k), k, alpha, **kwargs)


class _Prepared:
    """Derived arrays of one data object: ``D^u`` jets and spectral interpolants."""

    def __init__(self, data: LipschitzData):
        m, k = data.dim, data.k
        self.data = data
        self.dirac = [dirac_jets(data.values, m, k, u) for u in range(k + 1)]
        self.traces = np.stack([g[0] for g in self.dirac])  # (k+1, N, n)
        self._trace_interp = None
        self._jet_interp = None

    @property
    def trace_interp(self) -> Interpolant:
        if self._trace_interp is None:
            t = self.traces.transpose(1, 0, 2)
            self._trace_interp = Interpolant(self.data.mesh, t)
        return self._trace_interp

    @property
    def jet_interp(self) -> Interpolant:
        if self._jet_interp is None:
            self._jet_interp = Interpolant(self.data.mesh, self.data.values.transpose(1, 0, 2))
        return self._jet_interp

    def jets_at(self, c: np.ndarray) -> np.ndarray:
        """All jets ``(J, n)`` at surface point ``c`` (node values when ``c`` is a node)."""
        mesh = self.data.mesh
        d = np.linalg.norm(mesh.nodes - c, axis=1)
        i = int(np.argmin(d))
        if d[i] <= 1e-12 * mesh.radius:
            return self.data.values[:, i]
        return self.jet_interp(c[None])[0]


_PREPARED: "weakref.WeakKeyDictionary[LipschitzData, _Prepared]" = weakref.WeakKeyDictionary()


def _prepare(data: LipschitzData) -> _Prepared:
    p = _PREPARED.get(data)
    if p is None:
        p = _Prepared(data)
        _PREPARED[data] = p
    return p


# --------------------------------------------------------------------------
# Traces and Taylor defects


@dataclass(frozen=True)
class TraceField:
    """``values[u]`` is ``D^u f~`` at the nodes, ``u = 0..k``."""

    values: np.ndarray

    @property
    def k(self) -> int:
        return self.values.shape[0] - 1

    def __getitem__(self, u: int) -> np.ndarray:
        return self.values[u]


def trace_field(data: LipschitzData, k: int | None = None) -> TraceField:
    k = data.k if k is None else k
    if k > data.k:
        raise IndexError(f"k = {k} exceeds the data order {data.k}")
    return TraceField(_prepare(data).traces[: k + 1])


def dirac_data(data: LipschitzData, u: int) -> LipschitzData:
    """The collection ``{(D^u f~)^(beta) : |beta| <= k - u}`` as data of order ``k - u``."""
    return LipschitzData(data.k - u, data.alpha, data.mesh, _prepare(data).dirac[u])


def taylor_defect(data: LipschitzData, u: int, zeta, y: int) -> np.ndarray:
    """``P_u[f](zeta, y) = sum_{1 <= |b| <= k-u} (zeta - y)**b / b! (D^u f~)^(b)(y)``.

    ``zeta`` is a node index or a point (or batch of points).
    """
    if u > data.k:
        raise IndexError(f"u = {u} exceeds k = {data.k}")
    mesh = data.mesh
    pt = mesh.nodes[zeta] if np.ndim(zeta) == 0 else np.asarray(zeta, dtype=float)
    diff = pt - mesh.nodes[y]
    g = _prepare(data).dirac[u][:, y]
    out = np.zeros(diff.shape[:-1] + (1 << data.dim,))
    for t, b in enumerate(enumerate_indices(data.dim, data.k - u)):
        if sum(b):
            out += (monomial(diff, b) / factorial(b))[..., None] * g[t]
    return out


def taylor_defect_polynomial(poly: Polynomial, k: int, u: int, y) -> Polynomial:
    """``P_u[f](y + w, y)`` as an exact polynomial in ``w`` for data from ``poly``."""
    g = poly.dirac_power(u)
    terms = {}
    for b in enumerate_indices(poly.dim, k - u):
        if sum(b):
            val = g.derivative(b).exact_at(y)
            terms[b] = [Fraction(c) / factorial(b) for c in val]
    return Polynomial(poly.dim, terms)


# --------------------------------------------------------------------------
# Cauchy transform off the surface


def _integrand_sum(fam, points, normals, weights, x, densities, sign_alt=True):
    """``sum_s (-1)**s sum_q w_q E_s(y_q - x) n_q densities[s, q]``."""
    nv = embed(normals)
    out = 0.0
    for s, dens in enumerate(densities):
        ker = gp(fam.E(s, points - x), nv)
        contrib = fold_sum(weights[:, None] * gp(ker, dens), axis=0)
        out = out + (-1) ** s * contrib
    return out


def _nodal_ok(mesh: SurfaceMesh, d: float) -> bool:
    # node rule is spectrally accurate once the target is several spacings away
    return d >= 8 * mesh.spacing


def _cauchy_point(ctx, prep, x, route):
    data = prep.data
    mesh = ctx.mesh
    fam = ctx.kernels
    k = data.k
    r = float(np.linalg.norm(x))
    d = abs(r - mesh.radius)
    if route == "auto":
        route = "nodal" if _nodal_ok(mesh, d) else "subtracted"
    if route == "nodal" and not _nodal_ok(mesh, d):
        warnings.warn(
            f"node rule used at distance {d:.3g} < 8 h from the surface", TooCloseToSurface, stacklevel=3
        )
    if route == "nodal":
        return _integrand_sum(fam, mesh.nodes, mesh.normals, mesh.weights, x, prep.traces)
    if route not in ("graded", "subtracted"):
        raise ValueError(f"unknown route {route!r}")
    c = mesh.project(x)
    n_r, n_a = ctx.polar_orders(k)
    grid = polar_rule(mesh, c, graded_radial(max(d / mesh.radius, 1e-12)), n_a)
    dens = prep.trace_interp(grid.points).transpose(1, 0, 2)  # (k+1, Q, n)
    if route == "graded":
        return _integrand_sum(fam, grid.points, grid.normals, grid.weights, x, dens)
    jets = prep.jets_at(c)
    m = ctx.dim
    g = [dirac_jets(jets, m, k, u) for u in range(k + 1)]
    diff = grid.points - c
    sub = []
    for u in range(k + 1):
        acc = np.zeros_like(dens[u])
        for t, b in enumerate(enumerate_indices(m, k - u)):
            acc += (monomial(diff, b) / factorial(b))[:, None] * g[u][t]
        sub.append(dens[u] - acc)
    out = _integrand_sum(fam, grid.points, grid.normals, grid.weights, x, sub)
    if r < mesh.radius:
        dx = x - c
        for t, l in enumerate(enumerate_indices(m, k)):
            out = out + monomial(dx, l) / factorial(l) * jets[t]
    return out


def cauchy_transform(ctx: OperatorContext, data: LipschitzData, x, route: str = "auto") -> np.ndarray:
    """``C_k f(x) = sum_s (-1)**s int E_s(y - x) n(y) D^s f~(y) dy`` for ``x`` off the surface.

    Routes: ``"nodal"`` (node rule, for targets several spacings away),
    ``"graded"`` (polar rule graded towards the closest surface point) and
    ``"subtracted"`` (graded rule applied to ``D^s(f~ - P)`` with ``P`` the
    Taylor polynomial of the data at the closest point, plus the exact
    transform of ``P``).  ``"auto"`` picks nodal when far, else subtracted.
    """
    ctx.check(data)
    prep = _prepare(data)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return _cauchy_point(ctx, prep, x, route)
    return np.stack([_cauchy_point(ctx, prep, p, route) for p in x])


def dirac_cauchy(
    ctx: OperatorContext, data: LipschitzData, x, u: int, route: str = "reduced"
) -> np.ndarray:
    """``D^u C_k f(x)``.

    ``"reduced"`` uses ``D^u C_k f = C_{k-u}[D^u f~]`` (kernel lowering);
    ``"kernel"`` differentiates the kernel with the closed form of ``D^u``
    under the node rule, valid only for targets away from the surface.
    """
    if u == 0:
        return cauchy_transform(ctx, data, x)
    if route == "reduced":
        return cauchy_transform(ctx, dirac_data(data, u), x)
    if route != "kernel":
        raise ValueError(f"unknown route {route!r}")
    mesh, fam, m = ctx.mesh, ctx.kernels, ctx.dim
    prep = _prepare(data)
    exp = dirac_power_expansion(u, m)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    nv = embed(mesh.normals)
    res = []
    for p in x:
        y = mesh.nodes - p
        total = 0.0
        for s in range(data.k + 1):
            ker = 0.0
            for blade, idx, weight in exp.terms:
                # d_x^idx E_s(y - x) = (-1)**|idx| E_s^(idx)(y - x)
                ker = ker + weight * (-1) ** u * blade_left(m, blade, fam.deriv(s, idx, y))
            ker = exp.sign * ker
            dens = gp(gp(ker, nv), prep.traces[s])
            total = total + (-1) ** s * fold_sum(mesh.weights[:, None] * dens, axis=0)
        res.append(total)
    out = np.array(res)
    return out[0] if single else out


# --------------------------------------------------------------------------
# Singular operators on the surface


def singular_Sk0(ctx: OperatorContext, data: LipschitzData, z: int) -> np.ndarray:
    """Principal value ``2 sum_s (-1)**s pv int E_s(y - z) n(y) D^s f~(y) dy`` at node ``z``."""
    ctx.check(data)
    mesh = ctx.mesh
    prep = _prepare(data)
    n_r, n_a = ctx.polar_orders(data.k)
    grid = polar_rule(mesh, mesh.nodes[z], gl_radial(n_r), n_a)
    dens = prep.trace_interp(grid.points).transpose(1, 0, 2)
    return 2 * _integrand_sum(ctx.kernels, grid.points, grid.normals, grid.weights, mesh.nodes[z], dens)


def _ring_components(ctx, prep, p, js):
    """``S_k^(j) f`` at every node of ring ``p`` for each ``j`` in ``js`` (remainder route)."""
    data = prep.data
    mesh, fam, m, k = ctx.mesh, ctx.kernels, ctx.dim, data.k
    ring = mesh.ring(p)
    K = len(ring)
    n_r, n_a = ctx.polar_orders(k)
    grid = polar_rule(mesh, mesh.nodes[ring[0]], gl_radial(n_r), n_a)
    rot = mesh.rotation(2 * np.pi * np.arange(K) / K)
    Y = np.einsum("kab,qb->kqa", rot, grid.points)
    Z = mesh.nodes[ring]
    X = Y - Z[:, None, :]
    nv = embed(Y / mesh.radius)
    w = grid.weights[None, :, None]
    T = prep.trace_interp.ring(grid.points)  # (K, Q, k+1, n)
    out = np.zeros((K, len(js), 1 << m))
    for u in range(k + 1):
        g = prep.dirac[u][:, ring]  # (J_u, K, n)
        dr = T[:, :, u].copy()
        for t, b in enumerate(enumerate_indices(m, k - u)):
            dr -= (monomial(X, b) / factorial(b))[..., None] * g[t][:, None, :]
        # (E n) DR = E (n DR): one product per u instead of one per (u, j)
        ndr = gp(nv, dr) * w
        ker = np.empty(X.shape[:2] + (len(js), 1 << m))
        for a, j in enumerate(js):
            sgn = (-1) ** sum(j) if ctx.convention == "target" else 1
            ker[:, :, a] = sgn * fam.deriv(u, j, X)
        out += 2 * (-1) ** u * _sum_gp(ker, ndr, m)
    return out


def singular_Skj(ctx: OperatorContext, data: LipschitzData, j: MultiIndex, z: int) -> np.ndarray:
    """``S_k^(j) f(z) = 2 sum_u (-1)**u int E_u^(j)(y - z) n(y) D^u R(y, z) dy + f^(j)(z)``."""
    ctx.check(data)
    j = tuple(j)
    if sum(j) > data.k:
        raise IndexError(f"|j| = {sum(j)} exceeds k = {data.k}")
    prep = _prepare(data)
    p, pos = ctx.mesh.ring_of(z)
    vals = _ring_components(ctx, prep, p, [j])
    return vals[pos, 0] + data.jet(j)[z]


def apply_Sk(ctx: OperatorContext, data: LipschitzData) -> LipschitzData:
    """All components ``{S_k^(j) f : |j| <= k}`` as a new data object."""
    ctx.check(data)
    prep = _prepare(data)
    js = list(data.indices)
    out = np.empty_like(data.values)
    for p in range(ctx.mesh.n_rings):
        ring = ctx.mesh.ring(p)
        out[:, ring] = _ring_components(ctx, prep, p, js).transpose(1, 0, 2)
    return data.with_values(out + data.values)


def project(ctx: OperatorContext, data: LipschitzData, sign: int | str, image: LipschitzData | None = None) -> LipschitzData:
    """Hardy projection ``P+- f = (f +- S_k f) / 2``; ``image`` may supply a precomputed ``S_k f``."""
    s = {"+": 1, "-": -1}.get(sign, sign)
    if s not in (1, -1):
        raise ValueError("sign must be +1, -1, '+' or '-'")
    sf = apply_Sk(ctx, data) if image is None else image
    return data.with_values(0.5 * (data.values + s * sf.values))


# --------------------------------------------------------------------------
# Boundary limits


def neville(xs: np.ndarray, ys: np.ndarray, x0: float = 0.0) -> np.ndarray:
    """Polynomial extrapolation of samples ``ys[i]`` at ``xs[i]`` to ``x0``."""
    p = [np.asarray(y, dtype=float) for y in ys]
    n = len(xs)
    for level in range(1, n):
        p = [
            ((x0 - xs[i + level]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + level])
            for i in range(n - level)
        ]
    return p[0]


@dataclass(frozen=True)
class BoundaryLimit:
    value: np.ndarray
    samples: np.ndarray
    offsets: np.ndarray
    diverging: bool


def boundary_limit(
    ctx: OperatorContext,
    data: LipschitzData,
    z: int,
    side: str,
    route: str = "graded",
    count: int = 4,
    scale: float = 1.0,
    u: int = 0,
) -> BoundaryLimit:
    """Non-tangential limit of ``D^u C_k f`` at node ``z`` from ``side``.

    Samples along ``z -+ delta_i n(z)`` with ``delta_i = scale * h / 2**i``
    and extrapolates to ``delta = 0``.  ``diverging`` is set when the
    successive sample differences fail to contract.
    """
    path = probe_points(ctx.mesh, z, side, count, scale)
    src = data if u == 0 else dirac_data(data, u)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TooCloseToSurface)
        vals = np.stack([cauchy_transform(ctx, src, p, route) for p in path.points])
    steps = norm(np.diff(vals, axis=0))
    floor = 1e-10 * max(1.0, float(np.max(norm(vals))))
    diverging = bool(np.any((steps[1:] > steps[:-1]) & (steps[1:] > floor)))
    return BoundaryLimit(neville(path.offsets, vals), vals, path.offsets, diverging)


# --------------------------------------------------------------------------
# Riemann-Hilbert problem


def exterior_cauchy(
    ctx: OperatorContext,
    data: LipschitzData,
    x,
    radii=(1e1, 1e2, 1e3),
) -> tuple[np.ndarray, dict]:
    """``C_k f(x)`` at an exterior point plus decay diagnostics along the ray through ``x``.

    The diagnostics hold ``|D^u F| |x|**u`` and ``|F| |x|**(m-1)`` at each radius.
    """
    x = np.asarray(x, dtype=float)
    r0 = np.linalg.norm(x)
    if r0 <= ctx.mesh.radius:
        raise ValueError("x must lie in the exterior domain")
    value = cauchy_transform(ctx, data, x)
    direction = x / r0
    pts = np.asarray(radii, dtype=float)[:, None] * direction
    F = cauchy_transform(ctx, data, pts, route="nodal")
    scaled = norm(F) * np.asarray(radii) ** (ctx.dim - 1)
    decay = {}
    for u in range(1, data.k + 1):
        du = dirac_cauchy(ctx, data, pts, u)
        decay[u] = norm(du) * np.asarray(radii) ** u
    return value, {"radii": np.asarray(radii), "F": norm(F), "F_scaled": scaled, "dirac": decay}


@dataclass
class RHSolution:
    """Sectional solution ``F = C_k f`` with residual diagnostics."""

    ctx: OperatorContext
    data: LipschitzData
    report: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray:
        return cauchy_transform(self.ctx, self.data, x)

    def dirac(self, x, u: int) -> np.ndarray:
        return dirac_cauchy(self.ctx, self.data, x, u)


def solve_rh(
    ctx: OperatorContext,
    data: LipschitzData,
    nodes=None,
    direction=(0.48, 0.6, 0.64),
    radii=(1e1, 1e2, 1e3),
) -> RHSolution:
    """Solve the Riemann-Hilbert problem with jumps given by the data.

    The report holds the five residuals: jump of ``F``, jumps of the even and
    odd Dirac traces against the data combinations, decay of ``D^u F``
    (``max_u |D^u F| |x|**u`` at the largest radius) and ``|F(infinity)|``,
    plus the profile ``|F| |x|**(m-1)`` along the ray.
    """
    ctx.check(data)
    mesh = ctx.mesh
    if nodes is None:
        nodes = np.linspace(0, mesh.size - 1, 8).astype(int)
    traces = trace_field(data)
    jumps = {u: 0.0 for u in range(data.k + 1)}
    diverging = False
    for z in nodes:
        for u in range(data.k + 1):
            plus = boundary_limit(ctx, data, int(z), "interior", u=u)
            minus = boundary_limit(ctx, data, int(z), "exterior", u=u)
            diverging |= plus.diverging or minus.diverging
            jumps[u] = max(jumps[u], float(norm(plus.value - minus.value - traces[u][z])))
    d = np.asarray(direction, dtype=float)[: mesh.dim]
    d = d / np.linalg.norm(d)
    _, diag = exterior_cauchy(ctx, data, 2 * mesh.radius * d, radii)
    decay = max((float(v[-1]) for v in diag["dirac"].values()), default=0.0)
    report = {
        "jump_F": jumps[0],
        "jump_even": max((jumps[u] for u in range(2, data.k + 1, 2)), default=0.0),
        "jump_odd": max((jumps[u] for u in range(1, data.k + 1, 2)), default=0.0),
        "decay": decay,
        "F_infinity": float(diag["F"][-1]),
        "F_scaled": diag["F_scaled"].tolist(),
        "diverging": diverging,
    }
    return RHSolution(ctx, data, report)


# --------------------------------------------------------------------------
# Complex-variable reference on the circle


def classical_singular_cauchy(mesh: SurfaceMesh, values: np.ndarray, z: int) -> np.ndarray:
    """``(1 / pi i) pv int g(t) / (t - z) dt`` on the circle, mapped to ``R_{0,2}``.

    Even multivectors ``u + v e12`` correspond to ``g = u - i v`` (the
    Cauchy-Riemann system of ``D``); odd parts are made even by right
    multiplication with ``e1``, which commutes with a left-acting operator.
    The principal value uses the trapezoid rule on nodes offset by half a
    step from ``z`` with Fourier interpolation of the data, a route
    independent of the polar rule.
    """
    if mesh.dim != 2:
        raise ValueError("the complex-variable reference needs the circle")
    values = np.asarray(values, dtype=float)
    N = mesh.size
    h = 2 * np.pi / N
    ang0 = math.atan2(mesh.nodes[0, 1], mesh.nodes[0, 0])
    th = math.atan2(mesh.nodes[z, 1], mesh.nodes[z, 0]) + (np.arange(N) + 0.5) * h
    t = mesh.radius * np.exp(1j * th)
    z0 = complex(*mesh.nodes[z])
    freq = np.fft.fftfreq(N, 1 / N)
    shift = np.exp(1j * np.outer(th - ang0, freq))

    def pv(g):
        gt = shift @ (np.fft.fft(g) / N)
        s = np.sum(gt / (t - z0) * 1j * t * h) / (np.pi * 1j)
        return np.array([s.real, 0.0, 0.0, -s.imag])

    e1 = np.array([0.0, 1.0, 0.0, 0.0])
    even = values * np.array([1.0, 0.0, 0.0, 1.0])
    odd = gp(values - even, e1)
    out = pv(even[:, 0] - 1j * even[:, 3])
    out = out + gp(pv(odd[:, 0] - 1j * odd[:, 3]), -e1)
    return out
