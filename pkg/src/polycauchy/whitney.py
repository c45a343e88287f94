"""Whitney fields on a finite node set and their smooth extension to R^m.

A :class:`LipschitzData` is a collection ``{f^(j) : |j| <= k}`` of
multivector values at the mesh nodes.  Its Taylor remainders

    R_j(x, y) = f^(j)(x) - sum_{|j + l| <= k} f^(j + l)(y) (x - y)**l / l!

control membership in the class ``Lip(k + alpha)``.

The extension follows the dyadic construction: space minus the node set is
covered by cubes ``Q`` with ``diam Q <= dist(Q, E) <= 4 diam Q``, each cube
gets a bump supported on a slightly dilated copy, the bumps are normalised
to a partition of unity, and the extension is the bump-weighted average of
Taylor polynomials centred at the node nearest to each cube.  Cubes are
only materialised near the queried point, and a smooth radial cutoff kills
the extension beyond ``shell_width`` from the nodes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .clifford import norm
from .multiindex import MultiIndex, enumerate_indices, factorial, monomial
from .surface import SurfaceMesh, load_mesh


class ValidationError(ValueError):
    """Data failed the Lipschitz-class validator."""


@dataclass(frozen=True, eq=False)
class LipschitzData:
    """Node-indexed jets ``f^(j)`` for every ``|j| <= k``.

    ``values[t]`` holds ``f^(j)`` for ``j = indices[t]`` (order of
    :func:`~polycauchy.multiindex.enumerate_indices`), shape ``(N, 2**m)``.
    """

    k: int
    alpha: float
    mesh: SurfaceMesh
    values: np.ndarray

    def __post_init__(self):
        J = len(enumerate_indices(self.mesh.dim, self.k))
        expect = (J, self.mesh.size, 1 << self.mesh.dim)
        if self.values.shape != expect:
            raise ValueError(f"values have shape {self.values.shape}, expected {expect}")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def dim(self) -> int:
        return self.mesh.dim

    @property
    def indices(self) -> tuple[MultiIndex, ...]:
        return enumerate_indices(self.dim, self.k)

    @cached_property
    def _position(self) -> dict[MultiIndex, int]:
        return {j: t for t, j in enumerate(self.indices)}

    def position(self, j: MultiIndex) -> int:
        try:
            return self._position[tuple(j)]
        except KeyError:
            raise IndexError(f"multi-index {j} not in the collection of order {self.k}") from None

    def jet(self, j: MultiIndex) -> np.ndarray:
        return self.values[self.position(j)]

    @property
    def primary(self) -> np.ndarray:
        """``f^(0)``."""
        return self.values[0]

    def with_values(self, values: np.ndarray) -> "LipschitzData":
        return LipschitzData(self.k, self.alpha, self.mesh, np.asarray(values, dtype=float))

    def __add__(self, other: "LipschitzData") -> "LipschitzData":
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "LipschitzData") -> "LipschitzData":
        return self.with_values(self.values - other.values)

    def scaled(self, s: float) -> "LipschitzData":
        return self.with_values(s * self.values)

    def sup_norm(self) -> float:
        return float(np.max(norm(self.values))) if self.values.size else 0.0

    def sub_collection(self, j: MultiIndex) -> "LipschitzData":
        """``{f^(j + l) : |l| <= k - |j|}``, a member of ``Lip(k - |j| + alpha)``."""
        kk = self.k - sum(j)
        if kk < 0:
            raise IndexError(f"|j| = {sum(j)} exceeds k = {self.k}")
        rows = [self.position(tuple(a + b for a, b in zip(j, l))) for l in enumerate_indices(self.dim, kk)]
        return LipschitzData(kk, self.alpha, self.mesh, self.values[rows])

    @classmethod
    def zeros(cls, mesh: SurfaceMesh, k: int, alpha: float = 0.5) -> "LipschitzData":
        J = len(enumerate_indices(mesh.dim, k))
        return cls(k, alpha, mesh, np.zeros((J, mesh.size, 1 << mesh.dim)))


def taylor_sum(data: LipschitzData, j: MultiIndex, y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``sum_{|j + l| <= k} f^(j + l)(y) (x - y)**l / l!`` for node arrays ``y`` and points ``x``.

    Broadcasts ``data.values[:, y]`` (shape ``(..., 2**m)``) against ``x - nodes[y]``.
    """
    y = np.asarray(y)
    diff = np.asarray(x, dtype=float) - data.mesh.nodes[y]
    out = np.zeros(diff.shape[:-1] + (1 << data.dim,))
    for l in enumerate_indices(data.dim, data.k - sum(j)):
        jl = tuple(a + b for a, b in zip(j, l))
        out += (monomial(diff, l) / factorial(l))[..., None] * data.values[data.position(jl)][y]
    return out


def remainder(data: LipschitzData, j: MultiIndex, x: int, y: int) -> np.ndarray:
    """``R_j(x, y)`` between nodes ``x`` and ``y``."""
    if sum(j) > data.k:
        raise IndexError(f"|j| = {sum(j)} exceeds k = {data.k}")
    return data.jet(j)[x] - taylor_sum(data, j, np.asarray(y), data.mesh.nodes[x])


def remainder_ratios(data: LipschitzData, chunk: int = 256) -> dict[MultiIndex, float]:
    """``max_{x != y} |R_j(x, y)| / |x - y|**(k + alpha - |j|)`` for every ``j``."""
    nodes = data.mesh.nodes
    N = data.mesh.size
    out = {}
    for j in data.indices:
        expo = data.k + data.alpha - sum(j)
        fj = data.jet(j)
        worst = 0.0
        for start in range(0, N, chunk):
            ys = np.arange(start, min(start + chunk, N))
            # rows: y in chunk, columns: all x
            pred = taylor_sum(data, j, ys[:, None], nodes[None, :, :])
            r = norm(fj[None, :, :] - pred)
            d = np.linalg.norm(nodes[None, :, :] - nodes[ys][:, None, :], axis=-1)
            mask = d > 0
            if np.any(mask):
                worst = max(worst, float(np.max(r[mask] / d[mask] ** expo)))
        out[j] = worst
    return out


def validate(data: LipschitzData, bound: float | None = None) -> tuple[float, bool]:
    """Estimate the class constant ``M`` of the data.

    ``M_est`` is the largest of all node values ``|f^(j)|`` and all
    normalised remainders.  ``ok`` means ``M_est`` is finite and, when a
    ``bound`` is supplied, does not exceed it.
    """
    M = data.sup_norm()
    for v in remainder_ratios(data).values():
        M = max(M, v)
    ok = bool(np.isfinite(M)) and (bound is None or M <= bound)
    return M, ok


# --------------------------------------------------------------------------
# Extension


def _bump(t: np.ndarray) -> np.ndarray:
    """``exp(-1 / (1 - t**2))`` on ``|t| < 1``, zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def _smoothstep(s: np.ndarray) -> np.ndarray:
    """C-infinity transition, 0 for ``s <= 0`` and 1 for ``s >= 1``."""
    s = np.asarray(s, dtype=float)
    a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class Cube:
    level: int
    index: tuple[int, ...]
    side: float

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.index, dtype=float) * self.side

    @property
    def center(self) -> np.ndarray:
        return self.lower + 0.5 * self.side

    @property
    def diam(self) -> float:
        return self.side * math.sqrt(len(self.index))


@dataclass(eq=False)
class WhitneyExtension:
    """Smooth extension of a :class:`LipschitzData` off its node set.

    Parameters
    ----------
    shell_width
        Cubes are used only where ``dist(x, E) < shell_width``; a smooth
        cutoff takes the extension to zero between half the width and the
        full width.
    dilation
        Bumps live on cubes dilated by ``1 + dilation``.
    root_side
        Side of the level-0 dyadic grid.  Any value ``>= shell_width`` keeps
        the ``dist <= 4 diam`` half of the Whitney sandwich for root cubes.
    """

    source: LipschitzData
    shell_width: float = 0.5
    dilation: float = 0.5
    root_side: float = 1.0
    tree: cKDTree = field(init=False, repr=False)

    def __post_init__(self):
        self.tree = cKDTree(self.source.mesh.nodes)
        self._cache: dict[tuple[int, tuple[int, ...]], bool] = {}

    @property
    def dim(self) -> int:
        return self.source.dim

    # cube geometry ------------------------------------------------------
    def cube(self, level: int, index: tuple[int, ...]) -> Cube:
        return Cube(level, tuple(index), self.root_side / 2**level)

    def dist_to_set(self, cube: Cube) -> float:
        """Exact distance from the closed cube to the node set."""
        c = cube.center
        half = 0.5 * cube.side
        d0, _ = self.tree.query(c)
        cand = self.tree.query_ball_point(c, d0 + half * math.sqrt(self.dim) + 1e-12)
        pts = self.source.mesh.nodes[cand]
        gap = np.maximum(np.abs(pts - c) - half, 0.0)
        return float(np.min(np.linalg.norm(gap, axis=1)))

    def is_whitney(self, level: int, index: tuple[int, ...]) -> bool:
        """Accepted by the dyadic rule: small enough, while its parent was not."""
        key = (level, tuple(index))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        q = self.cube(level, index)
        ok = q.diam <= self.dist_to_set(q)
        if ok and level > 0:
            parent = self.cube(level - 1, tuple(i // 2 for i in index))
            ok = parent.diam > self.dist_to_set(parent)
        self._cache[key] = ok
        return ok

    def cube_containing(self, x: np.ndarray) -> Cube:
        """The Whitney cube containing ``x`` (``x`` not a node)."""
        x = np.asarray(x, dtype=float)
        level = 0
        while True:
            side = self.root_side / 2**level
            index = tuple(int(v) for v in np.floor(x / side))
            q = self.cube(level, index)
            if q.diam <= self.dist_to_set(q):
                return q
            level += 1
            if level > 60:
                raise ValueError("point too close to the node set")

    def cubes_near(self, x: np.ndarray) -> list[Cube]:
        """Whitney cubes whose dilated copies contain ``x``."""
        x = np.asarray(x, dtype=float)
        base = self.cube_containing(x)
        found = []
        grow = 0.5 * self.dilation
        for level in range(max(base.level - 3, 0), base.level + 4):
            side = self.root_side / 2**level
            lo = np.floor(x / side - grow - 1e-12).astype(int)
            hi = np.floor(x / side + grow + 1e-12).astype(int)
            for index in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
                if self.is_whitney(level, index):
                    found.append(self.cube(level, index))
        return found

    def anchor(self, cube: Cube) -> int:
        """Node nearest to the cube centre (the point ``p_i`` of the construction)."""
        return int(self.tree.query(cube.center)[1])

    def bump(self, cube: Cube, x: np.ndarray) -> float:
        half = 0.5 * cube.side * (1 + self.dilation)
        t = (np.asarray(x, dtype=float) - cube.center) / half
        return float(np.prod(_bump(t)))

    def partition(self, x: np.ndarray) -> list[tuple[Cube, float]]:
        """Normalised weights ``phi_i*(x)`` of the cubes meeting ``x``."""
        cubes = self.cubes_near(x)
        raw = np.array([self.bump(q, x) for q in cubes])
        total = raw.sum()
        return [(q, w / total) for q, w in zip(cubes, raw) if w > 0]

    def cutoff(self, d: float) -> float:
        w = self.shell_width
        return float(1.0 - _smoothstep((d - 0.5 * w) / (0.5 * w)))

    # evaluation ---------------------------------------------------------
    def __call__(self, x) -> np.ndarray:
        return eval_extension(self, x)

    def emit_cubes(self, min_side: float) -> list[Cube]:
        """All Whitney cubes of side ``>= min_side`` meeting the shell, by recursive subdivision."""
        lo = self.source.mesh.nodes.min(axis=0) - self.shell_width
        hi = self.source.mesh.nodes.max(axis=0) + self.shell_width
        a = np.floor(lo / self.root_side).astype(int)
        b = np.floor(hi / self.root_side).astype(int)
        out = []
        stack = [self.cube(0, idx) for idx in itertools.product(*(range(i, j + 1) for i, j in zip(a, b)))]
        while stack:
            q = stack.pop()
            d = self.dist_to_set(q)
            if d > self.shell_width:
                continue
            if q.diam <= d:
                out.append(q)
            elif q.side / 2 >= min_side:
                for off in itertools.product((0, 1), repeat=self.dim):
                    stack.append(self.cube(q.level + 1, tuple(2 * i + o for i, o in zip(q.index, off))))
        return sorted(out, key=lambda q: (q.level, q.index))


def extend(data: LipschitzData, check: bool = True, **kwargs) -> WhitneyExtension:
    """Build the extension; with ``check`` the data must pass :func:`validate`."""
    if check:
        M, ok = validate(data)
        if not ok:
            raise ValidationError(f"data failed validation (M_est={M})")
    return WhitneyExtension(data, **kwargs)


def eval_extension(ext: WhitneyExtension, x) -> np.ndarray:
    """``f~(x)``: the node value at a node, else the bump-weighted Taylor average."""
    x = np.asarray(x, dtype=float)
    if x.ndim > 1:
        return np.stack([eval_extension(ext, p) for p in x])
    data = ext.source
    d, i = ext.tree.query(x)
    if d == 0.0:
        return data.primary[i].copy()
    if d >= ext.shell_width:
        return np.zeros(1 << data.dim)
    zero = (0,) * data.dim
    out = np.zeros(1 << data.dim)
    for q, w in ext.partition(x):
        out += w * taylor_sum(data, zero, np.asarray(ext.anchor(q)), x)
    return ext.cutoff(d) * out


def fd_derivative(func, x: np.ndarray, j: MultiIndex, step: float) -> np.ndarray:
    """Mixed central difference ``d^j func(x)`` as a product of 1-D stencils."""
    x = np.asarray(x, dtype=float)
    stencil = [(np.zeros(len(x)), 1.0)]
    for i, ji in enumerate(j):
        for _ in range(ji):
            new = []
            for off, c in stencil:
                for s in (1, -1):
                    o = off.copy()
                    o[i] += 0.5 * s * step
                    new.append((o, c * s / step))
            stencil = new
    acc = 0.0
    for off, c in stencil:
        acc = acc + c * func(x + off)
    return np.asarray(acc)


@dataclass(frozen=True)
class BoundReport:
    exponent: float
    distances: np.ndarray
    magnitudes: np.ndarray
    threshold: float
    passed: bool


def oblique_probes(
    base: np.ndarray,
    normal: np.ndarray,
    tangent: np.ndarray,
    distances: np.ndarray,
    angles: np.ndarray,
) -> np.ndarray:
    """Points ``base + d (cos(b) normal + sin(b) tangent)``: shape ``(len(distances), len(angles), m)``.

    Non-tangential approach along several directions; the bound is a
    supremum, so each distance band is summarised by its largest value.
    """
    dirs = np.cos(angles)[:, None] * normal + np.sin(angles)[:, None] * tangent
    return base + np.asarray(distances)[:, None, None] * dirs[None]


def derivative_bound_check(
    ext: WhitneyExtension,
    j: MultiIndex,
    probes: np.ndarray,
    step_ratio: float = 1 / 200,
    slack: float = 0.2,
) -> BoundReport:
    """Fit ``log |d^j f~|`` against ``log dist`` over off-surface probes.

    ``probes`` is ``(P, m)`` (one sample per distance) or ``(B, P, m)``
    (bands of probes; each band contributes its maximum and mean distance).
    The central-difference step is ``step_ratio * dist``: the bump overlap
    zones are a small fraction of a cube, so the step must be smaller still.
    Passes when the fitted exponent is at least ``alpha - 1 - slack``.
    """
    probes = np.asarray(probes, dtype=float)
    if probes.ndim == 2:
        probes = probes[:, None, :]
    dist, mags = [], []
    for band in probes:
        d = ext.tree.query(band)[0]
        v = [float(norm(fd_derivative(ext, p, j, step_ratio * di))) for p, di in zip(band, d)]
        dist.append(float(np.mean(d)))
        mags.append(max(v))
    dist, mags = np.array(dist), np.array(mags)
    good = mags > 0
    if good.sum() >= 2:
        slope = float(np.polyfit(np.log(dist[good]), np.log(mags[good]), 1)[0])
    else:
        slope = math.inf  # derivative identically zero: bounded
    thr = ext.source.alpha - 1 - slack
    return BoundReport(slope, dist, mags, thr, slope >= thr)


# --------------------------------------------------------------------------
# Text format: one node per line, one column block per multi-index


def save_data(data: LipschitzData, path: str | Path) -> None:
    blocks = " ".join("".join(map(str, j)) for j in data.indices)
    header = f"k={data.k} alpha={data.alpha!r} m={data.dim} blades={1 << data.dim} indices={blocks}"
    table = np.concatenate(list(data.values), axis=1)
    np.savetxt(path, table, fmt="%.17g", header=header)


def load_data(path: str | Path, mesh: SurfaceMesh | str | Path) -> LipschitzData:
    if not isinstance(mesh, SurfaceMesh):
        mesh = load_mesh(mesh)
    with open(path) as fh:
        first = fh.readline().lstrip("#").split()
    meta = dict(item.split("=", 1) for item in first if "=" in item)
    k, alpha = int(meta["k"]), float(meta["alpha"])
    n = 1 << mesh.dim
    table = np.loadtxt(path, ndmin=2)
    J = len(enumerate_indices(mesh.dim, k))
    if table.shape != (mesh.size, J * n):
        raise ValueError(f"table shape {table.shape} does not match mesh and k")
    values = table.reshape(mesh.size, J, n).transpose(1, 0, 2).copy()
    return LipschitzData(k, alpha, mesh, values)


__all__ = [
    "LipschitzData",
    "ValidationError",
    "WhitneyExtension",
    "remainder",
    "remainder_ratios",
    "validate",
    "extend",
    "eval_extension",
    "derivative_bound_check",
    "oblique_probes",
    "fd_derivative",
    "save_data",
    "load_data",
]
