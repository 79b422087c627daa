"""Legendre and Radau polynomials, Gauss-Legendre rules, and the roots of the
theta-weighted Radau combination that locates superconvergent points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "PolyCoeffs",
    "QuadratureRule",
    "SpecialRadauPoly",
    "check_theta",
    "gauss_legendre_rule",
    "legendre_deriv_eval",
    "legendre_eval",
    "legendre_vandermonde",
    "radau_poly",
    "special_radau",
]

#: half-width of the search window for roots of the special Radau polynomial
SEARCH_BOUND = 3.0
MAX_GAUSS_POINTS = 32


def check_theta(theta: float) -> float:
    """Validate a flux bias parameter, which must lie in (1/2, 1]."""
    theta = float(theta)
    if not (0.5 < theta <= 1.0):
        raise ValueError(f"theta must lie in (1/2, 1], got {theta!r}")
    return theta


# {{{ Legendre polynomials


def legendre_eval(n: int, xi):
    """Evaluate the Legendre polynomial P_n at ``xi`` (scalar or array)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    xi = np.asarray(xi, dtype=float)
    p_prev = np.ones_like(xi)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = xi.copy()
    for m in range(1, n):
        p_prev, p = p, ((2 * m + 1) * xi * p - m * p_prev) / (m + 1)
    return p if p.ndim else float(p)


def legendre_deriv_eval(n: int, xi):
    """Evaluate P_n'(xi) with the derivative recurrence
    P'_{m+1} = P'_{m-1} + (2m+1) P_m, valid also at the endpoints."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    xi = np.asarray(xi, dtype=float)
    p_prev, p = np.ones_like(xi), xi.copy()
    dp_prev, dp = np.zeros_like(xi), np.ones_like(xi)
    if n == 0:
        return dp_prev if xi.ndim else 0.0
    for m in range(1, n):
        dp_prev, dp = dp, dp_prev + (2 * m + 1) * p
        p_prev, p = p, ((2 * m + 1) * xi * p - m * p_prev) / (m + 1)
    return dp if dp.ndim else float(dp)


def legendre_vandermonde(k: int, xi) -> np.ndarray:
    """Return V with ``V[..., m] = P_m(xi)`` for m = 0..k."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape + (k + 1,))
    out[..., 0] = 1.0
    if k >= 1:
        out[..., 1] = xi
    for m in range(1, k):
        out[..., m + 1] = ((2 * m + 1) * xi * out[..., m] - m * out[..., m - 1]) / (m + 1)
    return out


def legendre_deriv_vandermonde(k: int, xi) -> np.ndarray:
    """Return D with ``D[..., m] = P_m'(xi)`` for m = 0..k."""
    p = legendre_vandermonde(k, xi)
    out = np.zeros_like(p)
    if k >= 1:
        out[..., 1] = 1.0
    for m in range(1, k):
        out[..., m + 1] = out[..., m - 1] + (2 * m + 1) * p[..., m]
    return out


# }}}


# {{{ polynomials in the Legendre basis


@dataclass(frozen=True)
class PolyCoeffs:
    """A polynomial stored by its Legendre coefficients (index n multiplies P_n)."""

    legendre_coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.legendre_coeffs)
        if not coeffs:
            raise ValueError("need at least one coefficient")
        object.__setattr__(self, "legendre_coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.legendre_coeffs) - 1

    def __call__(self, xi):
        return np.polynomial.legendre.legval(xi, self.legendre_coeffs)

    def deriv(self, xi):
        return legendre_deriv_vandermonde(self.degree, xi) @ np.array(self.legendre_coeffs)


def radau_poly(kind: str, k: int) -> PolyCoeffs:
    """Right (``"plus"``, P_{k+1} - P_k) or left (``"minus"``, P_{k+1} + P_k)
    Radau polynomial."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    if kind not in ("plus", "minus"):
        raise ValueError(f"unknown Radau kind {kind!r}")
    c = [0.0] * (k + 2)
    c[k + 1] = 1.0
    c[k] = -1.0 if kind == "plus" else 1.0
    return PolyCoeffs(tuple(c))


@dataclass(frozen=True)
class SpecialRadauPoly:
    """theta R+_{k+1} + (-1)^k (1 - theta) R-_{k+1} together with its real roots.

    For odd ``k`` and ``theta < 1`` the largest root lies outside [-1, 1].
    """

    k: int
    theta: float
    coeffs: PolyCoeffs
    roots: tuple[float, ...]

    def __call__(self, xi):
        return self.coeffs(xi)

    @property
    def interior_roots(self) -> tuple[float, ...]:
        """Roots lying in the reference element [-1, 1]."""
        tol = 1.0e-12
        return tuple(r for r in self.roots if -1.0 - tol <= r <= 1.0 + tol)

    @property
    def exterior_roots(self) -> tuple[float, ...]:
        return tuple(r for r in self.roots if r not in self.interior_roots)


def _newton_polish(p: PolyCoeffs, x: float, lo: float, hi: float) -> float:
    for _ in range(100):
        fx = float(p(x))
        dfx = float(p.deriv(x))
        if dfx == 0.0:
            break
        step = fx / dfx
        x_new = x - step
        if not (lo <= x_new <= hi):
            # Newton left the bracket, fall back to bisection
            flo = float(p(lo))
            if np.sign(flo) == np.sign(fx):
                lo = x
            else:
                hi = x
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < 1.0e-14:
            return x_new
        x = x_new
    return x


def root_bound(p: PolyCoeffs) -> float:
    """Cauchy bound on the magnitude of every real root."""
    mono = np.polynomial.legendre.leg2poly(p.legendre_coeffs)
    mono = np.trim_zeros(mono, "b")
    return 1.0 + float(np.max(np.abs(mono[:-1] / mono[-1]))) if len(mono) > 1 else 0.0


def _bracketed_roots(p: PolyCoeffs, bound: float, n_grid: int = 6001) -> list[float]:
    grid = np.linspace(-bound, bound, n_grid)
    # roots beyond the fine window are isolated, a geometric grid suffices
    outer = root_bound(p)
    if outer > bound:
        far = bound * np.geomspace(1.0, outer / bound, 400)[1:]
        grid = np.concatenate([-far[::-1], grid, far])
    values = p(grid)
    scale = max(abs(c) for c in p.legendre_coeffs)
    roots: list[float] = []
    n = len(grid)
    i = 0
    while i < n - 1:
        if values[i] == 0.0:
            roots.append(float(grid[i]))
        elif values[i] * values[i + 1] < 0.0:
            lo, hi = float(grid[i]), float(grid[i + 1])
            roots.append(_newton_polish(p, 0.5 * (lo + hi), lo, hi))
        i += 1
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))

    for r in roots:
        if abs(float(p(r))) >= 1.0e-12 * scale * max(1.0, abs(r)) ** p.degree:
            raise ArithmeticError(f"root polish failed at {r!r}")
    return roots


def special_radau(k: int, theta: float) -> SpecialRadauPoly:
    """Build R*_{k+1} and locate its k+1 real roots.

    Roots are bracketed on a fine grid over [-3, 3], widened to the Cauchy
    bound when needed: the exterior root for odd k grows like 1/(2 theta - 1).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    theta = check_theta(theta)
    plus = np.array(radau_poly("plus", k).legendre_coeffs)
    minus = np.array(radau_poly("minus", k).legendre_coeffs)
    coeffs = PolyCoeffs(tuple(theta * plus + (-1) ** k * (1.0 - theta) * minus))

    roots = _bracketed_roots(coeffs, SEARCH_BOUND)
    # endpoint roots (theta = 1) may be missed or duplicated by sign sampling
    if theta == 1.0 and not any(abs(r - 1.0) < 1.0e-12 for r in roots):
        roots.append(1.0)
    roots = sorted(roots)
    roots = [r for i, r in enumerate(roots) if i == 0 or r - roots[i - 1] > 1.0e-10]
    if len(roots) != k + 1:
        raise ArithmeticError(
            f"expected {k + 1} roots for k={k}, theta={theta}, found {len(roots)}"
        )
    return SpecialRadauPoly(k=k, theta=theta, coeffs=coeffs, roots=tuple(roots))


# }}}


# {{{ Gauss-Legendre quadrature


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    i = np.arange(1, n + 1)
    # Chebyshev-angle seeds, accurate to O(n^-2)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p = legendre_eval(n, x)
        dp = legendre_deriv_eval(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1.0e-15:
            break
    dp = legendre_deriv_eval(n, x)
    w = 2.0 / ((1.0 - x**2) * dp**2)
    # symmetrise to remove last-bit asymmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    nodes, weights = x[::-1].copy(), w[::-1].copy()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_rule(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1], nodes ascending."""
    if not (1 <= n <= MAX_GAUSS_POINTS):
        raise ValueError(f"point count must be in [1, {MAX_GAUSS_POINTS}], got {n}")
    if n == 1:
        return QuadratureRule(np.array([0.0]), np.array([2.0]))
    return QuadratureRule(*_gauss_legendre(n))


def gauss_points_needed(degree: int) -> int:
    """Smallest Gauss rule exact for polynomials of the given degree."""
    return max(1, math.ceil((degree + 1) / 2))


# }}}
