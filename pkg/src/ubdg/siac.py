"""Symmetric SIAC post-processing: centred B-splines, kernel coefficients from
polynomial reproduction, and exact convolution against a DG solution."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dg_core import DGSolution
from .polybasis import gauss_legendre_rule, legendre_vandermonde

__all__ = [
    "FilteredSample",
    "SIACKernel",
    "bspline_eval",
    "bspline_moments",
    "filter_at",
    "filter_solution",
    "kernel_coefficients",
    "make_kernel",
]


# {{{ B-splines


def bspline_eval(ell: int, x):
    """Centred cardinal B-spline of order ``ell`` (degree ell-1, support
    [-ell/2, ell/2]) by the Cox-de Boor recurrence on integer-spaced knots.

    Intervals are half-open on the right, so ``bspline_eval(1, 0.5) == 0``.
    """
    if ell < 1:
        raise ValueError("B-spline order must be at least 1")
    x = np.asarray(x, dtype=float)
    knots = np.arange(ell + 1) - 0.5 * ell
    # degree-0 pieces on [t_i, t_{i+1})
    b = [((x >= knots[i]) & (x < knots[i + 1])).astype(float) for i in range(ell)]
    for p in range(1, ell):
        # uniform knots: every denominator equals p
        b = [
            ((x - knots[i]) * b[i] + (knots[i + p + 1] - x) * b[i + 1]) / p
            for i in range(ell - p)
        ]
    out = b[0]
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def bspline_moments(ell: int, p_max: int) -> tuple[float, ...]:
    """Moments int x^p psi^(ell)(x) dx for p = 0..p_max, by Gauss quadrature
    on each unit knot interval (exact for the polynomial pieces)."""
    rule = gauss_legendre_rule(max(1, math.ceil((ell + p_max) / 2)))
    knots = np.arange(ell + 1) - 0.5 * ell
    mid = 0.5 * (knots[:-1] + knots[1:])
    x = mid[:, None] + 0.5 * rule.nodes[None, :]
    w = 0.5 * rule.weights[None, :] * bspline_eval(ell, x)
    return tuple(float(np.sum(w * x**p)) for p in range(p_max + 1))


# }}}


# {{{ kernel


def kernel_coefficients(r: int, ell: int) -> np.ndarray:
    """Weights c_gamma, gamma = -r/2..r/2, of K = sum c_gamma psi(x - gamma)
    such that K reproduces polynomials of degree <= r by convolution."""
    if r < 0 or r % 2:
        raise ValueError(f"r must be a non-negative even integer, got {r}")
    if ell < 1:
        raise ValueError("B-spline order must be at least 1")
    nodes = np.arange(r + 1) - r // 2
    mu = bspline_moments(ell, r)
    # int psi(x - g) x^p dx = sum_q C(p, q) g^(p-q) mu_q
    mat = np.empty((r + 1, r + 1))
    for p in range(r + 1):
        for i, g in enumerate(nodes):
            mat[p, i] = sum(math.comb(p, q) * float(g) ** (p - q) * mu[q] for q in range(p + 1))
    rhs = np.zeros(r + 1)
    rhs[0] = 1.0
    if abs(np.linalg.det(mat)) < 1.0e-300 or np.linalg.cond(mat) > 1.0e14:
        raise np.linalg.LinAlgError(f"moment system is singular for r={r}, ell={ell}")
    c = np.linalg.solve(mat, rhs)
    # enforce exact symmetry
    return 0.5 * (c + c[::-1])


@dataclass(frozen=True)
class SIACKernel:
    r: int
    ell: int
    coeffs: tuple[float, ...]

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.r + 1) - self.r // 2

    @property
    def half_width(self) -> float:
        return 0.5 * (self.r + self.ell)

    @property
    def breakpoints(self) -> np.ndarray:
        """Knots of the piecewise-polynomial kernel, in kernel units."""
        return np.arange(self.r + self.ell + 1) - self.half_width

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for g, c in zip(self.nodes, self.coeffs):
            out += c * bspline_eval(self.ell, x - g)
        return out


def make_kernel(k: int | None = None, *, r: int | None = None, ell: int | None = None) -> SIACKernel:
    """Kernel for degree-k DG data; defaults are r = 2k and ell = k + 1."""
    if r is None or ell is None:
        if k is None:
            raise ValueError("give either k or both r and ell")
        r = 2 * k if r is None else r
        ell = k + 1 if ell is None else ell
    return SIACKernel(r=r, ell=ell, coeffs=tuple(kernel_coefficients(r, ell)))


# }}}


# {{{ convolution


@dataclass(frozen=True)
class FilteredSample:
    x: float
    value: float
    #: first and last (unwrapped) cell indices touched by the kernel support
    kernel_footprint: tuple[int, int]


def _convolution_nodes(u: DGSolution, x_bar: float, kernel: SIACKernel, n_gauss: int):
    """Quadrature nodes/weights for int K((x_bar - y)/h) u(y) dy / h, split at
    every kernel knot and cell edge so each piece is a polynomial."""
    mesh = u.mesh
    h = mesh.h
    lo = x_bar - kernel.half_width * h
    hi = x_bar + kernel.half_width * h
    j_lo = math.floor((lo - mesh.a) / h)
    j_hi = math.ceil((hi - mesh.a) / h)
    edges = mesh.a + h * np.arange(j_lo, j_hi + 1)
    knots = x_bar - kernel.breakpoints[::-1] * h
    brk = np.unique(np.concatenate([edges[(edges > lo) & (edges < hi)], knots]))
    # merge near-duplicate breakpoints produced by round-off
    keep = np.concatenate([[True], np.diff(brk) > 1.0e-12 * h])
    brk = brk[keep]
    rule = gauss_legendre_rule(n_gauss)
    left, right = brk[:-1], brk[1:]
    half = 0.5 * (right - left)
    y = (0.5 * (left + right))[:, None] + half[:, None] * rule.nodes[None, :]
    w = half[:, None] * rule.weights[None, :]
    # cell index of each sub-interval, from its midpoint (unwrapped)
    cells = np.floor((0.5 * (left + right) - mesh.a) / h).astype(int)
    return y, w, cells, (int(cells.min()), int(cells.max()))


def filter_at(u: DGSolution, x_bar: float, kernel: SIACKernel, n_gauss: int | None = None) -> FilteredSample:
    """Evaluate the filtered solution (K_h * u)(x_bar) with kernel scaling h,
    extending ``u`` periodically."""
    if n_gauss is None:
        n_gauss = math.ceil((u.k + kernel.ell) / 2) + 1
    h = u.mesh.h
    y, w, cells, footprint = _convolution_nodes(u, float(x_bar), kernel, n_gauss)
    kern = kernel((x_bar - y) / h)
    # local coordinate within the unwrapped cell, then wrap the cell index
    xi = 2.0 * (y - (u.mesh.a + h * cells[:, None])) / h - 1.0
    uvals = np.einsum(
        "sqm,sm->sq",
        legendre_vandermonde(u.k, xi),
        u.coeffs[np.mod(cells, u.mesh.n_cells)],
    )
    value = float(np.sum(w * kern * uvals) / h)
    return FilteredSample(float(x_bar), value, footprint)


def sample_points(u: DGSolution, samples_per_cell: int, rule: str = "uniform") -> np.ndarray:
    """Evaluation grid: cell-interior uniform points (midpoints of
    ``samples_per_cell`` equal sub-cells) or Gauss-Legendre points."""
    if samples_per_cell < 1:
        raise ValueError("need at least one sample per cell")
    if rule == "uniform":
        xi = -1.0 + (2.0 * np.arange(samples_per_cell) + 1.0) / samples_per_cell
    elif rule == "gauss":
        xi = gauss_legendre_rule(samples_per_cell).nodes
    else:
        raise ValueError(f"unknown sampling rule {rule!r}")
    mesh = u.mesh
    return mesh.ref_to_phys(np.arange(mesh.n_cells)[:, None], xi[None, :]).ravel()


def filter_solution(
    u: DGSolution,
    kernel: SIACKernel,
    samples_per_cell: int = 6,
    rule: str = "uniform",
) -> list[FilteredSample]:
    return [filter_at(u, x, kernel) for x in sample_points(u, samples_per_cell, rule)]


# }}}
