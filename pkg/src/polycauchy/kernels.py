"""Higher-order Cauchy kernels ``E_u`` with ``D E_{u+1} = E_u``.

Every kernel has the radial form

    E_u(x) = (a_u + b_u * xhat) * |x|**(u + 1 - m),   xhat = x / |x|,

with ``a_u = 0`` for even ``u`` and ``b_u = 0`` for odd ``u``.  Two facts fix
the constants:

    D(r**p)      =  p * r**(p - 1) * xhat
    D(x * r**q)  = -(m + q) * r**q

so ``a_{u+1} = b_u / (u + 2 - m)`` for even ``u`` and
``b_{u+1} = -a_u / (u + 1)`` for odd ``u``.  Both identities also hold for
the right-acting Dirac operator, so the family is two-sided.

Partial derivatives are produced symbolically: a kernel component is a sum
of terms ``c * x**p * r**q`` and ``d_i (x**p r**q) = p_i x**(p - e_i) r**q +
q x**(p + e_i) r**(q - 2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .clifford import Multivector, _check_dim, gp, norm
from .multiindex import MultiIndex, enumerate_indices, unit

SINGULAR_RADIUS = 1e-14


class UnsupportedOrder(ValueError):
    """The requested kernel order needs a logarithmic fundamental solution."""


class SingularPoint(ValueError):
    """A kernel was evaluated at (or numerically at) the origin."""


def sigma(m: int) -> float:
    """Surface area ``2 pi**(m/2) / Gamma(m/2)`` of the unit sphere in R^m."""
    if m % 2 == 0:
        gamma_half = math.factorial(m // 2 - 1)
    else:
        # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4**n n!)
        n = (m - 1) // 2
        gamma_half = math.factorial(2 * n) * math.sqrt(math.pi) / (4**n * math.factorial(n))
    return 2 * math.pi ** (m / 2) / gamma_half


# A radial term c * x**p * r**q, stored as {(p, q): c} per blade.
_Terms = dict[tuple[MultiIndex, int], float]


@dataclass(frozen=True)
class KernelFamily:
    """Kernels ``E_0 .. E_K`` in dimension ``m``.

    ``coeffs[u] = (a_u, b_u)``; ``exponent(u) = u + 1 - m`` is the power of
    ``|x|`` multiplying ``a_u + b_u xhat``.
    """

    dim: int
    max_order: int
    coeffs: tuple[tuple[float, float], ...]

    def exponent(self, u: int) -> int:
        return u + 1 - self.dim

    def _check_order(self, u: int) -> None:
        if not 0 <= u <= self.max_order:
            raise ValueError(f"kernel order {u} outside 0..{self.max_order}")

    def E(self, u: int, x: np.ndarray) -> np.ndarray:
        """Batched ``E_u`` at points ``x`` (last axis = coordinates)."""
        self._check_order(u)
        x = np.asarray(x, dtype=float)
        r = np.sqrt(np.sum(x * x, axis=-1))
        if np.any(r < SINGULAR_RADIUS):
            raise SingularPoint("kernel evaluated at the origin")
        a, b = self.coeffs[u]
        p = self.exponent(u)
        out = np.zeros(x.shape[:-1] + (1 << self.dim,))
        if u % 2:
            out[..., 0] = a * r**p
        else:
            scale = b * r ** (p - 1)
            for i in range(self.dim):
                out[..., 1 << i] = scale * x[..., i]
        return out

    def deriv(self, u: int, j: MultiIndex, x: np.ndarray) -> np.ndarray:
        """Batched ``d^j E_u`` at ``x``; ``j = 0`` reproduces :meth:`E`."""
        self._check_order(u)
        if len(j) != self.dim:
            raise ValueError("multi-index length differs from the dimension")
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x * x, axis=-1)
        if np.any(r2 < SINGULAR_RADIUS**2):
            raise SingularPoint("kernel evaluated at the origin")
        out = np.zeros(x.shape[:-1] + (1 << self.dim,))
        terms = derivative_terms(self, u, tuple(j))
        rpow: dict[int, np.ndarray] = {}
        xpow: dict[tuple[int, int], np.ndarray] = {}
        for blade, blade_terms in terms.items():
            acc = np.zeros(x.shape[:-1])
            for (p, q), c in blade_terms.items():
                if q not in rpow:
                    rpow[q] = r2 ** (q / 2)
                val = c * rpow[q]
                for i, pi in enumerate(p):
                    if pi:
                        key = (i, pi)
                        if key not in xpow:
                            xpow[key] = x[..., i] ** pi
                        val = val * xpow[key]
                acc += val
            out[..., blade] = acc
        return out


@lru_cache(maxsize=None)
def _family(m: int, K: int) -> KernelFamily:
    _check_dim(m)
    if K < 0:
        raise ValueError("K must be non-negative")
    if m % 2 == 0 and K + 1 >= m:
        raise UnsupportedOrder(
            f"m={m} is even and K={K} needs E_u with u + 1 >= m, which is logarithmic"
        )
    # Coefficients as exact rational multiples of -1/sigma_m.
    rel = [(Fraction(0), Fraction(1))]
    for u in range(K):
        au, bu = rel[u]
        if u % 2 == 0:
            rel.append((bu / (u + 2 - m), Fraction(0)))
        else:
            rel.append((Fraction(0), -au / (u + 1)))
    s = -1.0 / sigma(m)
    coeffs = tuple((float(ar) * s, float(br) * s) for ar, br in rel)
    return KernelFamily(dim=m, max_order=K, coeffs=coeffs)


def build_family(m: int, K: int) -> KernelFamily:
    """Solve the radial recursion for ``E_0 .. E_K`` in dimension ``m``.

    Raises
    ------
    UnsupportedOrder
        For even ``m`` with ``K + 1 >= m``.
    """
    return _family(m, K)


def _base_terms(fam: KernelFamily, u: int) -> dict[int, _Terms]:
    m = fam.dim
    a, b = fam.coeffs[u]
    p = fam.exponent(u)
    zero = (0,) * m
    if u % 2:
        return {0: {(zero, p): a}}
    return {1 << i: {(unit(m, i), p - 1): b} for i in range(m)}


def _diff_terms(terms: _Terms, i: int) -> _Terms:
    out: _Terms = {}
    for (p, q), c in terms.items():
        if p[i]:
            key = (p[:i] + (p[i] - 1,) + p[i + 1 :], q)
            out[key] = out.get(key, 0.0) + c * p[i]
        if q:
            key = (p[:i] + (p[i] + 1,) + p[i + 1 :], q - 2)
            out[key] = out.get(key, 0.0) + c * q
    return {key: c for key, c in out.items() if c != 0.0}


@lru_cache(maxsize=None)
def _terms_cached(m: int, K: int, coeffs: tuple, u: int, j: MultiIndex) -> dict[int, _Terms]:
    fam = KernelFamily(m, K, coeffs)
    if not any(j):
        return _base_terms(fam, u)
    i = next(t for t, jt in enumerate(j) if jt)
    parent = _terms_cached(m, K, coeffs, u, j[:i] + (j[i] - 1,) + j[i + 1 :])
    return {blade: _diff_terms(t, i) for blade, t in parent.items()}


def derivative_terms(fam: KernelFamily, u: int, j: MultiIndex) -> dict[int, _Terms]:
    """Symbolic ``d^j E_u`` as ``{blade: {(p, q): c}}`` meaning ``c x**p r**q``."""
    return _terms_cached(fam.dim, fam.max_order, fam.coeffs, u, tuple(j))


def _as_result(m: int, x: np.ndarray, out: np.ndarray):
    return Multivector(m, out) if np.asarray(x).ndim == 1 else out


def eval_E(fam: KernelFamily, u: int, x) -> Multivector | np.ndarray:
    """``E_u(x)``; a single point gives a :class:`Multivector`, a batch an array."""
    x = np.asarray(x, dtype=float)
    return _as_result(fam.dim, x, fam.E(u, x))


def eval_E_deriv(fam: KernelFamily, u: int, j: MultiIndex, x) -> Multivector | np.ndarray:
    """``d^j E_u(x)`` from the symbolic product/chain rule."""
    x = np.asarray(x, dtype=float)
    return _as_result(fam.dim, x, fam.deriv(u, j, x))


def fd_dirac(func, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central-difference left Dirac operator ``sum_i e_i d_i func`` at points ``x``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    out = 0.0
    for i in range(m):
        step = np.zeros(m)
        step[i] = h
        d = (func(x + step) - func(x - step)) / (2 * h)
        e = np.zeros(1 << m)
        e[1 << i] = 1.0
        out = out + gp(e, d)
    return out


def random_shell_points(
    rng: np.random.Generator, m: int, n: int, rmin: float = 0.5, rmax: float = 2.0
) -> np.ndarray:
    d = rng.standard_normal((n, m))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(rmin, rmax, size=(n, 1))


def validate_recursion(
    fam: KernelFamily, samples: int = 200, seed: int = 0, h: float = 1e-5
) -> dict[int, float]:
    """Max relative residual of ``D_fd E_{u+1}`` against ``E_u`` per order ``u``.

    Points are drawn with ``0.5 <= |x| <= 2``.  ``K = 0`` gives an empty dict.
    """
    rng = np.random.default_rng(seed)
    x = random_shell_points(rng, fam.dim, samples)
    report = {}
    for u in range(fam.max_order):
        d = fd_dirac(lambda p, u=u: fam.E(u + 1, p), x, h)
        ref = fam.E(u, x)
        report[u] = float(np.max(norm(d - ref) / norm(ref)))
    return report


def monogenicity_residual(
    fam: KernelFamily, samples: int = 200, seed: int = 0, h: float = 1e-5, radius: float = 1.0
) -> float:
    """``max |D_fd E_0(x)| / |E_0(x)|`` over random points with ``|x| = radius``."""
    rng = np.random.default_rng(seed)
    x = random_shell_points(rng, fam.dim, samples, radius, radius)
    d = fd_dirac(lambda p: fam.E(0, p), x, h)
    return float(np.max(norm(d) / norm(fam.E(0, x))))


def derivative_fd_residual(
    fam: KernelFamily, k: int, samples: int = 50, seed: int = 0, h: float = 1e-5
) -> float:
    """Relative mismatch between symbolic ``d^(j+e_i) E_u`` and a central difference
    of ``d^j E_u``, over all ``u`` and ``|j| < k``, at ``|x| = 1``."""
    rng = np.random.default_rng(seed)
    x = random_shell_points(rng, fam.dim, samples, 1.0, 1.0)
    worst = 0.0
    for u in range(fam.max_order + 1):
        for j in enumerate_indices(fam.dim, k - 1):
            base = lambda p, j=j: fam.deriv(u, j, p)  # noqa: E731
            for i in range(fam.dim):
                step = np.zeros(fam.dim)
                step[i] = h
                fd = (base(x + step) - base(x - step)) / (2 * h)
                exact = fam.deriv(u, tuple(a + b for a, b in zip(j, unit(fam.dim, i))), x)
                scale = np.maximum(norm(exact), 1e-3)
                worst = max(worst, float(np.max(norm(fd - exact) / scale)))
    return worst
