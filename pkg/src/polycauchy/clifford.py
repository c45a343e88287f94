"""Arithmetic in the real Clifford algebra R_{0,m}.

Basis blades are encoded as bitmasks: bit ``i`` set means the generator
``e_{i+1}`` is a factor, so index 0 is the scalar blade, ``1 << i`` is
``e_{i+1}`` and ``0b011`` is ``e_1 e_2``.  A multivector is stored as a
length ``2**m`` coefficient vector indexed by that bitmask.

Two layers are provided:

* plain array functions (:func:`gp`, :func:`embed`, :func:`norm`) that work
  on arrays with the blade axis last, batched over any leading shape;
* a small :class:`Multivector` value class for scalar use in tests and
  the public API.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

MIN_DIM = 2
MAX_DIM = 4


class DimensionMismatch(ValueError):
    """Operands live in Clifford algebras of different dimension."""


def _check_dim(m: int) -> None:
    if not MIN_DIM <= m <= MAX_DIM:
        raise ValueError(f"dimension m={m} outside supported range {MIN_DIM}..{MAX_DIM}")


def reorder_sign(a: int, b: int) -> int:
    """Sign of ``e_A e_B`` relative to the canonical blade ``e_{A xor B}``.

    Counts the transpositions needed to sort the concatenated generator
    list, then applies ``e_i**2 = -1`` for every shared generator.
    """
    swaps = 0
    x = a >> 1
    while x:
        swaps += bin(x & b).count("1")
        x >>= 1
    sign = -1 if swaps & 1 else 1
    if bin(a & b).count("1") & 1:
        sign = -sign
    return sign


@lru_cache(maxsize=None)
def cayley(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(sign, index)`` tables with ``e_a e_b = sign[a, b] e_{index[a, b]}``."""
    _check_dim(m)
    n = 1 << m
    sign = np.empty((n, n), dtype=np.int64)
    index = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            sign[a, b] = reorder_sign(a, b)
            index[a, b] = a ^ b
    sign.flags.writeable = False
    index.flags.writeable = False
    return sign, index


@lru_cache(maxsize=None)
def product_tensor(m: int) -> np.ndarray:
    """Dense structure tensor reshaped to ``(4**m, 2**m)`` for matmul products."""
    sign, index = cayley(m)
    n = 1 << m
    t = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            t[a, b, index[a, b]] = sign[a, b]
    t = t.reshape(n * n, n)
    t.flags.writeable = False
    return t


def blade_count(m: int) -> int:
    return 1 << m


def dim_of(coeffs: np.ndarray) -> int:
    n = coeffs.shape[-1]
    m = n.bit_length() - 1
    if 1 << m != n:
        raise ValueError(f"blade axis has length {n}, not a power of two")
    return m


def grade(blade: int) -> int:
    return bin(blade).count("1")


def blade_name(blade: int) -> str:
    if blade == 0:
        return "1"
    return "e" + "".join(str(i + 1) for i in range(blade.bit_length()) if blade >> i & 1)


def gp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geometric product of coefficient arrays, broadcasting leading axes.

    Float arrays go through a single matmul against the structure tensor;
    object arrays (e.g. :class:`fractions.Fraction` entries) use an exact
    loop over blade pairs.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatch(f"blade axes differ: {a.shape[-1]} vs {b.shape[-1]}")
    m = dim_of(a)
    n = 1 << m
    if a.dtype == object or b.dtype == object:
        sign, index = cayley(m)
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.empty(shape, dtype=object)
        out[...] = 0
        for i in range(n):
            ai = a[..., i]
            for j in range(n):
                out[..., index[i, j]] = out[..., index[i, j]] + int(sign[i, j]) * ai * b[..., j]
        return out
    outer = a[..., :, None] * b[..., None, :]
    lead = outer.shape[:-2]
    return (outer.reshape(lead + (n * n,)) @ product_tensor(m)).reshape(lead + (n,))


def left_matrix(a: np.ndarray) -> np.ndarray:
    """Matrix ``L`` with ``gp(a, b) == L @ b`` (batched over leading axes)."""
    a = np.asarray(a, dtype=float)
    m = dim_of(a)
    n = 1 << m
    sign, index = cayley(m)
    out = np.zeros(a.shape[:-1] + (n, n))
    for i in range(n):
        for j in range(n):
            out[..., index[i, j], j] += sign[i, j] * a[..., i]
    return out


def embed(x: np.ndarray) -> np.ndarray:
    """Map points of R^m (last axis) to grade-1 multivectors."""
    x = np.asarray(x)
    m = x.shape[-1]
    _check_dim(m)
    out = np.zeros(x.shape[:-1] + (1 << m,), dtype=x.dtype if x.dtype == object else float)
    if out.dtype == object:
        out[...] = 0
    for i in range(m):
        out[..., 1 << i] = x[..., i]
    return out


def norm(a: np.ndarray) -> np.ndarray:
    """Euclidean coefficient norm ``sqrt(sum_A a_A**2)`` over the blade axis."""
    a = np.asarray(a, dtype=float)
    return np.sqrt(np.sum(a * a, axis=-1))


def basis(m: int, blade: int) -> np.ndarray:
    _check_dim(m)
    e = np.zeros(1 << m)
    e[blade] = 1.0
    return e


def generator(m: int, i: int) -> np.ndarray:
    """Coefficients of ``e_i`` (1-based, matching the usual notation)."""
    if not 1 <= i <= m:
        raise ValueError(f"generator index {i} out of range for m={m}")
    return basis(m, 1 << (i - 1))


class Multivector:
    """An element of R_{0,m} with ``2**m`` coefficients.

    Supports ``+``, ``-``, scalar ``*`` and the geometric product via ``*``
    between multivectors (or ``@`` as an explicit spelling).  Coefficients may
    be floats or :class:`~fractions.Fraction` for exact work.
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Sequence | np.ndarray | None = None):
        _check_dim(dim)
        n = 1 << dim
        if coeffs is None:
            arr = np.zeros(n)
        else:
            arr = np.array(coeffs, dtype=object if _is_exact(coeffs) else float)
            if arr.shape != (n,):
                raise ValueError(f"expected {n} coefficients for m={dim}, got shape {arr.shape}")
        arr.flags.writeable = False
        self.dim = dim
        self.coeffs = arr

    @classmethod
    def scalar(cls, dim: int, value: float = 1.0) -> "Multivector":
        c = np.zeros(1 << dim)
        c[0] = value
        return cls(dim, c)

    @classmethod
    def blade(cls, dim: int, blade: int, value: float = 1.0) -> "Multivector":
        c = np.zeros(1 << dim)
        c[blade] = value
        return cls(dim, c)

    @classmethod
    def e(cls, dim: int, *gens: int) -> "Multivector":
        """Product ``e_{i1} e_{i2} ...`` of generators (1-based)."""
        out = cls.scalar(dim)
        for i in gens:
            out = out * cls(dim, generator(dim, i))
        return out

    @classmethod
    def vector(cls, x: Sequence[float]) -> "Multivector":
        x = np.asarray(x, dtype=float)
        return cls(len(x), embed(x))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> "Multivector":
        return cls(dim, rng.standard_normal(1 << dim))

    def _check(self, other: "Multivector") -> None:
        if other.dim != self.dim:
            raise DimensionMismatch(f"m={self.dim} vs m={other.dim}")

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        return Multivector(self.dim, self.coeffs + other.coeffs)

    def __sub__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        return Multivector(self.dim, self.coeffs - other.coeffs)

    def __neg__(self) -> "Multivector":
        return Multivector(self.dim, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector(self.dim, gp(self.coeffs, other.coeffs))
        return Multivector(self.dim, self.coeffs * other)

    def __rmul__(self, other):
        if isinstance(other, Multivector):
            return other.__mul__(self)
        return Multivector(self.dim, other * self.coeffs)

    __matmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector) or other.dim != self.dim:
            return NotImplemented
        return bool(np.all(self.coeffs == other.coeffs))

    __hash__ = None  # mutable-looking numeric type; compare by value only

    def norm(self) -> float:
        return float(norm(np.asarray(self.coeffs, dtype=float)))

    def scalar_part(self) -> float:
        return self.coeffs[0]

    def grade_part(self, g: int) -> "Multivector":
        mask = np.array([grade(b) == g for b in range(1 << self.dim)])
        return Multivector(self.dim, np.where(mask, self.coeffs, 0))

    def isclose(self, other: "Multivector", rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        self._check(other)
        a = np.asarray(self.coeffs, dtype=float)
        b = np.asarray(other.coeffs, dtype=float)
        return bool(np.allclose(a, b, rtol=rtol, atol=atol))

    def __repr__(self) -> str:
        terms = [
            f"{c}*{blade_name(b)}" if b else f"{c}"
            for b, c in enumerate(self.coeffs)
            if c != 0
        ]
        return f"Multivector(m={self.dim}: {' + '.join(terms) or '0'})"


def _is_exact(values) -> bool:
    if isinstance(values, np.ndarray):
        return values.dtype == object
    return any(isinstance(v, Fraction) for v in values)


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return a * b


def add(a: Multivector, b: Multivector) -> Multivector:
    return a + b


def scale(a: Multivector, s: float) -> Multivector:
    return s * a
