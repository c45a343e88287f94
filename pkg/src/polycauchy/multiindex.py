"""Multi-index combinatorics and the closed form of the iterated Dirac operator.

Multi-indices are plain tuples of non-negative ints.  :class:`Polynomial`
holds multivector-coefficient polynomials with exact (``Fraction``)
coefficients so that identities between differential operators can be
checked without rounding.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

import numpy as np

from .clifford import Multivector, gp

MultiIndex = tuple[int, ...]


def order(j: MultiIndex) -> int:
    return sum(j)


def factorial(j: MultiIndex) -> int:
    return math.prod(math.factorial(ji) for ji in j)


def unit(m: int, i: int) -> MultiIndex:
    """The multi-index with a single 1 in (0-based) slot ``i``."""
    return tuple(1 if t == i else 0 for t in range(m))


def add(j: MultiIndex, l: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(j, l))


def sub(j: MultiIndex, l: MultiIndex) -> MultiIndex | None:
    """``j - l`` or ``None`` when some entry would go negative."""
    d = tuple(a - b for a, b in zip(j, l))
    return None if min(d, default=0) < 0 else d


def is_even(j: MultiIndex) -> bool:
    return all(ji % 2 == 0 for ji in j)


def monomial(x: np.ndarray, j: MultiIndex) -> np.ndarray:
    """``x**j`` evaluated over the last axis of ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.ones(x.shape[:-1])
    for i, ji in enumerate(j):
        if ji:
            out = out * x[..., i] ** ji
    return out


@lru_cache(maxsize=None)
def enumerate_indices(m: int, k: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of length ``m`` and order at most ``k``, lexicographic."""
    if m < 1 or k < 0:
        raise ValueError("need m >= 1 and k >= 0")
    return tuple(j for j in itertools.product(range(k + 1), repeat=m) if sum(j) <= k)


@lru_cache(maxsize=None)
def indices_of_order(m: int, s: int) -> tuple[MultiIndex, ...]:
    return tuple(j for j in enumerate_indices(m, s) if sum(j) == s)


def sign_c(s: int) -> int:
    """+1 when s = 0, 1 (mod 4) and -1 when s = 2, 3 (mod 4)."""
    if s < 0:
        raise ValueError("s must be non-negative")
    return 1 if s % 4 in (0, 1) else -1


def even_weight(j: MultiIndex) -> int:
    """Multinomial coefficient of ``d^j`` in ``(sum_i d_i**2)**(|j|/2)``.

    Equals 1 whenever at most one entry of ``j`` is nonzero, in particular for
    every even index of order 2; the first non-trivial weight is 2 for
    ``(2, 2)`` at order four.
    """
    half = [ji // 2 for ji in j]
    return math.factorial(sum(half)) // math.prod(math.factorial(h) for h in half)


@dataclass(frozen=True)
class DiracExpansion:
    """``D**s = sign * sum(weight * blade * d^index)``, blades acting from the left.

    ``terms`` holds ``(blade_bitmask, index, weight)`` triples; the blade is
    the scalar (bitmask 0) for even ``s`` and a single generator for odd
    ``s``.  Weights are the multinomial counts of each even index and are all
    1 for ``s <= 3``.
    """

    order: int
    dim: int
    sign: int
    terms: tuple[tuple[int, MultiIndex, int], ...]

    def blade(self, t: int) -> Multivector:
        return Multivector.blade(self.dim, self.terms[t][0])


@lru_cache(maxsize=None)
def dirac_power_expansion(s: int, m: int) -> DiracExpansion:
    if s < 0:
        raise ValueError("s must be non-negative")
    even = tuple(j for j in indices_of_order(m, s - s % 2) if is_even(j))
    if s % 2 == 0:
        terms = tuple((0, j, even_weight(j)) for j in even)
    else:
        terms = tuple((1 << i, add(j, unit(m, i)), even_weight(j)) for j in even for i in range(m))
    return DiracExpansion(order=s, dim=m, sign=sign_c(s), terms=terms)


def check_parity(exp: DiracExpansion) -> bool:
    """Structural constraints every expansion must satisfy."""
    for blade, idx, _ in exp.terms:
        if sum(idx) != exp.order:
            return False
        if exp.order % 2 == 0:
            if blade != 0 or not is_even(idx):
                return False
        else:
            if bin(blade).count("1") != 1:
                return False
            i = blade.bit_length() - 1
            rest = sub(idx, unit(exp.dim, i))
            if rest is None or not is_even(rest):
                return False
    return True


def _zero(n: int) -> np.ndarray:
    z = np.empty(n, dtype=object)
    z[:] = Fraction(0)
    return z


class Polynomial:
    """Polynomial in ``m`` variables with multivector coefficients.

    Stored as ``{exponent: coefficient array of length 2**m}``; zero
    coefficients are dropped so that equality is structural.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[MultiIndex, Iterable] | None = None):
        self.dim = dim
        n = 1 << dim
        clean: dict[MultiIndex, np.ndarray] = {}
        for e, c in (terms or {}).items():
            arr = np.empty(n, dtype=object)
            arr[:] = [x if isinstance(x, Fraction) else Fraction(x) for x in c]
            if any(arr):
                clean[tuple(e)] = arr
        self.terms = clean

    @classmethod
    def monomial(cls, dim: int, exponent: MultiIndex, coeff) -> "Polynomial":
        return cls(dim, {exponent: np.asarray(coeff, dtype=object)})

    @classmethod
    def random(
        cls, dim: int, degree: int, rng: np.random.Generator, density: float = 0.6, denom: int = 7
    ) -> "Polynomial":
        n = 1 << dim
        terms = {}
        for e in enumerate_indices(dim, degree):
            if rng.random() < density:
                terms[e] = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, denom + 1))) for _ in range(n)]
        return cls(dim, terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = {e: c.copy() for e, c in self.terms.items()}
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c.copy()
        return Polynomial(self.dim, out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other.scaled(-1)

    def scaled(self, s) -> "Polynomial":
        s = Fraction(s)
        return Polynomial(self.dim, {e: c * s for e, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial) or other.dim != self.dim:
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(np.all(self.terms[e] == other.terms[e]) for e in self.terms)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def left_mul(self, a: np.ndarray) -> "Polynomial":
        """Multiply every coefficient by the multivector ``a`` from the left."""
        a = np.asarray(a, dtype=object)
        return Polynomial(self.dim, {e: gp(a, c) for e, c in self.terms.items()})

    def mul_poly(self, other: "Polynomial") -> "Polynomial":
        out: dict[MultiIndex, np.ndarray] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = add(e1, e2)
                prod = gp(c1, c2)
                out[e] = out[e] + prod if e in out else prod
        return Polynomial(self.dim, out)

    def derivative(self, j: MultiIndex) -> "Polynomial":
        """Exact partial derivative ``d^j``."""
        out = {}
        for e, c in self.terms.items():
            d = sub(e, j)
            if d is None:
                continue
            factor = math.prod(math.perm(ei, ji) for ei, ji in zip(e, j))
            out[d] = c * factor
        return Polynomial(self.dim, out)

    def dirac(self) -> "Polynomial":
        """Left Dirac operator ``sum_i e_i d_i``."""
        out = Polynomial(self.dim)
        for i in range(self.dim):
            e_i = np.zeros(1 << self.dim, dtype=object)
            e_i[:] = Fraction(0)
            e_i[1 << i] = Fraction(1)
            out = out + self.derivative(unit(self.dim, i)).left_mul(e_i)
        return out

    def dirac_power(self, s: int) -> "Polynomial":
        p = self
        for _ in range(s):
            p = p.dirac()
        return p

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points (last axis = coordinates); returns ``(..., 2**m)`` floats."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (1 << self.dim,))
        for e, c in self.terms.items():
            out += monomial(x, e)[..., None] * np.asarray(c, dtype=float)
        return out

    def exact_at(self, x: Iterable) -> np.ndarray:
        """Exact evaluation at a rational point."""
        x = [Fraction(v) for v in x]
        out = _zero(1 << self.dim)
        for e, c in self.terms.items():
            out = out + c * math.prod(xi**ei for xi, ei in zip(x, e))
        return out

    def jets(self, k: int) -> dict[MultiIndex, "Polynomial"]:
        return {j: self.derivative(j) for j in enumerate_indices(self.dim, k)}

    def __repr__(self) -> str:
        return f"Polynomial(m={self.dim}, degree={self.degree}, terms={len(self.terms)})"


def expansion_operator(exp: DiracExpansion, f: Polynomial) -> Polynomial:
    """Symbolic ``sign * sum(blade * d^index f)`` for a polynomial ``f``."""
    out = Polynomial(f.dim)
    for blade, idx, weight in exp.terms:
        b = _zero(1 << f.dim)
        b[blade] = Fraction(weight)
        out = out + f.derivative(idx).left_mul(b)
    return out.scaled(exp.sign)


def apply_expansion(
    exp: DiracExpansion, f: Polynomial | Callable[[MultiIndex, np.ndarray], np.ndarray], x: np.ndarray
) -> Multivector | np.ndarray:
    """Evaluate ``D**s f`` at ``x`` using the multi-index expansion.

    ``f`` is either a :class:`Polynomial` or a callable ``(index, points)``
    returning partial derivatives ``d^index f`` at the points.  A single
    point returns a :class:`Multivector`; a batch returns an array.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(f, Polynomial):
        m = f.dim
        deriv = lambda idx, pts: f.derivative(idx)(pts)  # noqa: E731
    else:
        m = x.shape[-1]
        deriv = f
    out = np.zeros(x.shape[:-1] + (1 << m,))
    for blade, idx, weight in exp.terms:
        d = weight * np.asarray(deriv(idx, x), dtype=float)
        if blade == 0:
            out += d
        else:
            b = np.zeros(1 << m)
            b[blade] = 1.0
            out += gp(b, d)
    out *= exp.sign
    if x.ndim == 1:
        return Multivector(m, out)
    return out
