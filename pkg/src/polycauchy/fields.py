"""Closed-form test fields with exact partial derivatives, and their sampled jets.

Each field exposes ``jet(j, x)`` returning ``d^j F`` at points ``x`` (last
axis = coordinates) as multivector coefficient arrays.  :func:`sample`
turns a field into :class:`~polycauchy.whitney.LipschitzData` on a mesh.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford import gp
from .kernels import KernelFamily
from .multiindex import MultiIndex, Polynomial, enumerate_indices, factorial
from .surface import SurfaceMesh
from .whitney import LipschitzData


class Field:
    dim: int

    def jet(self, j: MultiIndex, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.jet((0,) * self.dim, x)

    def __add__(self, other: "Field") -> "Field":
        return SumField((self, other))


@dataclass(frozen=True)
class SumField(Field):
    parts: tuple[Field, ...]

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def jet(self, j, x):
        return sum(p.jet(j, x) for p in self.parts)


@dataclass(frozen=True)
class PolynomialField(Field):
    poly: Polynomial

    @property
    def dim(self) -> int:
        return self.poly.dim

    def jet(self, j, x):
        return self.poly.derivative(tuple(j))(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ExpField(Field):
    """``sum_t Re[exp(zeta_t . x + i phase_t)] c_t`` with complex frequency vectors.

    Purely imaginary ``zeta`` gives trigonometric data; ``zeta . zeta = 0``
    (no conjugation) makes every term harmonic.
    """

    zeta: np.ndarray  # (T, m) complex
    phase: np.ndarray  # (T,)
    coeff: np.ndarray  # (T, 2**m)

    @property
    def dim(self) -> int:
        return self.zeta.shape[1]

    def jet(self, j, x):
        x = np.asarray(x, dtype=float)
        z = np.prod(self.zeta ** np.asarray(j), axis=1)  # (T,)
        arg = x @ self.zeta.T + 1j * self.phase  # (..., T)
        w = np.real(z * np.exp(arg))
        return w @ self.coeff


def trig_field(m: int, rng: np.random.Generator, terms: int = 3, scale: float = 1.0) -> ExpField:
    """Random smooth band-limited field ``sum cos(w . x + phase) c``."""
    omega = scale * rng.uniform(-1.0, 1.0, size=(terms, m))
    return ExpField(1j * omega, rng.uniform(0, 2 * np.pi, terms), rng.uniform(-1, 1, (terms, 1 << m)))


def harmonic_field(m: int, rng: np.random.Generator, terms: int = 2, scale: float = 1.0) -> ExpField:
    """Random harmonic field ``sum Re exp((a + i b) . x + i phase) c`` with ``a ⟂ b``, ``|a| = |b|``."""
    zeta = np.zeros((terms, m), dtype=complex)
    for t in range(terms):
        a = rng.standard_normal(m)
        b = rng.standard_normal(m)
        b -= (a @ b) / (a @ a) * a
        b *= np.linalg.norm(a) / np.linalg.norm(b)
        s = scale / np.linalg.norm(a)
        zeta[t] = s * (a + 1j * b)
    return ExpField(zeta, rng.uniform(0, 2 * np.pi, terms), rng.uniform(-1, 1, (terms, 1 << m)))


@dataclass(frozen=True)
class KernelField(Field):
    """``E_u(x - center) c``: polymonogenic of order ``u + 1`` away from ``center``."""

    family: KernelFamily
    order: int
    center: np.ndarray
    coeff: np.ndarray

    @property
    def dim(self) -> int:
        return self.family.dim

    def jet(self, j, x):
        x = np.asarray(x, dtype=float)
        return gp(self.family.deriv(self.order, tuple(j), x - self.center), self.coeff)


@dataclass(frozen=True)
class HolderField(Field):
    """``|x_axis|**(k + alpha)`` times a constant multivector: exactly ``Lip(k + alpha)``."""

    dim: int
    k: int
    alpha: float
    axis: int = 0
    coeff: np.ndarray | None = None

    def jet(self, j, x):
        x = np.asarray(x, dtype=float)
        if any(ji for i, ji in enumerate(j) if i != self.axis):
            return np.zeros(x.shape[:-1] + (1 << self.dim,))
        n = j[self.axis]
        p = self.k + self.alpha
        t = x[..., self.axis]
        # d^n |t|^p = p (p-1) .. (p-n+1) |t|^(p-n) sign(t)^n
        falling = math.prod(p - i for i in range(n))
        val = falling * np.abs(t) ** (p - n) * np.sign(t) ** n
        c = self.coeff if self.coeff is not None else np.eye(1 << self.dim)[0]
        return val[..., None] * c


@dataclass(frozen=True)
class VanishingField(Field):
    """``g = (|x|**2 - R**2)**(k + 1) h`` for a polynomial ``h``; all jets of order ``<= k`` vanish on ``|x| = R``."""

    poly: Polynomial

    @property
    def dim(self) -> int:
        return self.poly.dim

    @classmethod
    def build(cls, h: Polynomial, k: int, radius: float = 1.0) -> "VanishingField":
        from fractions import Fraction

        m = h.dim
        n = 1 << m
        one = [Fraction(0)] * n
        one[0] = Fraction(1)
        q = {(0,) * m: [Fraction(-radius * radius) if b == 0 else Fraction(0) for b in range(n)]}
        for i in range(m):
            e = tuple(2 if t == i else 0 for t in range(m))
            q[e] = one
        base = Polynomial(m, q)
        g = h
        for _ in range(k + 1):
            g = base.mul_poly(g)
        return cls(g)

    def jet(self, j, x):
        return self.poly.derivative(tuple(j))(np.asarray(x, dtype=float))


def sample(field: Field, mesh: SurfaceMesh, k: int, alpha: float = 0.5) -> LipschitzData:
    """Jets ``{d^j F : |j| <= k}`` of ``field`` at the mesh nodes."""
    if field.dim != mesh.dim:
        raise ValueError("field and mesh dimensions differ")
    vals = np.stack([field.jet(j, mesh.nodes) for j in enumerate_indices(mesh.dim, k)])
    return LipschitzData(k, alpha, mesh, vals)


def polynomial_data(poly: Polynomial, mesh: SurfaceMesh, k: int, alpha: float = 0.5) -> LipschitzData:
    return sample(PolynomialField(poly), mesh, k, alpha)


def random_polynomial(m: int, degree: int, rng: np.random.Generator) -> Polynomial:
    return Polynomial.random(m, degree, rng)


def taylor_polynomial(field: Field, center: np.ndarray, k: int) -> callable:
    """Degree-``k`` Taylor polynomial of ``field`` at ``center`` as a callable."""
    center = np.asarray(center, dtype=float)
    idx = enumerate_indices(field.dim, k)
    coeffs = [field.jet(j, center) / factorial(j) for j in idx]

    def P(x):
        d = np.asarray(x, dtype=float) - center
        out = 0.0
        for j, c in zip(idx, coeffs):
            out = out + np.prod(d ** np.asarray(j), axis=-1)[..., None] * c
        return out

    return P
