"""Modal DG discretisation of u_t + a u_x = 0 with the upwind-biased flux
u_hat = theta u^- + (1 - theta) u^+ on a uniform periodic mesh."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .mesh import Mesh1D
from .polybasis import (
    check_theta,
    gauss_legendre_rule,
    legendre_deriv_vandermonde,
    legendre_vandermonde,
    special_radau,
)

__all__ = [
    "DGSolution",
    "FluxTheta",
    "LocalOperators",
    "assemble_local_operators",
    "energy_rate",
    "inner_product",
    "evaluate",
    "evaluate_side",
    "interface_jumps",
    "interpolate_special",
    "l2_project",
    "semidiscrete_rhs",
]


@dataclass(frozen=True)
class FluxTheta:
    theta: float
    a: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", check_theta(self.theta))
        if not self.a >= 0.0:
            raise ValueError(f"advection speed must be non-negative, got {self.a}")
        object.__setattr__(self, "a", float(self.a))


@dataclass
class DGSolution:
    """Per-cell Legendre coefficients, ``coeffs[j, m]`` multiplies P_m on cell j."""

    mesh: Mesh1D
    k: int
    coeffs: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs)
        if self.coeffs.shape != (self.mesh.n_cells, self.k + 1):
            raise ValueError(
                f"coefficient array has shape {self.coeffs.shape}, "
                f"expected {(self.mesh.n_cells, self.k + 1)}"
            )

    def copy(self) -> DGSolution:
        return replace(self, coeffs=self.coeffs.copy())

    def with_coeffs(self, coeffs: np.ndarray, t: float | None = None) -> DGSolution:
        return DGSolution(self.mesh, self.k, coeffs, self.t if t is None else t)

    @property
    def cell_means(self) -> np.ndarray:
        return self.coeffs[:, 0]

    @property
    def mass(self) -> float:
        return float(self.mesh.h * np.sum(self.coeffs[:, 0]))

    def __call__(self, x):
        return evaluate(self, x)

    def cell_values(self, j, xi):
        """Evaluate the cell-j polynomial at reference coordinate(s) ``xi``,
        which need not lie in [-1, 1]."""
        return legendre_vandermonde(self.k, xi) @ self.coeffs[j]

    def trace_right(self) -> np.ndarray:
        """u^- at the right edge of every cell."""
        return self.coeffs.sum(axis=1)

    def trace_left(self) -> np.ndarray:
        """u^+ at the left edge of every cell."""
        signs = (-1.0) ** np.arange(self.k + 1)
        return self.coeffs @ signs


# {{{ evaluation


def evaluate(u: DGSolution, x):
    """Point values of ``u``; points on interior edges take the right-cell value."""
    j, xi = u.mesh.locate(x)
    vals = np.einsum("...m,...m->...", legendre_vandermonde(u.k, xi), u.coeffs[j])
    return vals if np.ndim(vals) else float(vals)


def evaluate_side(u: DGSolution, x, side: str):
    """One-sided limit of ``u`` at ``x`` (``"left"`` is u^-, ``"right"`` u^+)."""
    if side == "right":
        return evaluate(u, x)
    if side != "left":
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    mesh = u.mesh
    j, xi = mesh.locate(x)
    on_edge = np.isclose(xi, -1.0, rtol=0.0, atol=1.0e-13)
    j = np.where(on_edge, np.mod(j - 1, mesh.n_cells), j)
    xi = np.where(on_edge, 1.0, xi)
    vals = np.einsum("...m,...m->...", legendre_vandermonde(u.k, xi), u.coeffs[j])
    return vals if np.ndim(vals) else float(vals)


def interface_jumps(u: DGSolution) -> np.ndarray:
    """Jump u^- - u^+ at the right interface x_{j+1/2} of each cell."""
    return u.trace_right() - np.roll(u.trace_left(), -1)


# }}}


# {{{ initial data


def l2_project(f: Callable, mesh: Mesh1D, k: int, n_quad: int | None = None) -> DGSolution:
    """Cellwise L2 projection onto polynomials of degree k."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    rule = gauss_legendre_rule(n_quad or k + 6)
    x = mesh.ref_to_phys(np.arange(mesh.n_cells)[:, None], rule.nodes[None, :])
    fx = np.asarray(f(x), dtype=float) * np.ones_like(x)
    vand = legendre_vandermonde(k, rule.nodes)
    scale = 0.5 * (2 * np.arange(k + 1) + 1)
    coeffs = (fx * rule.weights) @ vand * scale
    return DGSolution(mesh, k, coeffs)


def interpolate_special(f: Callable, mesh: Mesh1D, k: int, theta: float) -> DGSolution:
    """Cellwise interpolant of f at the mapped roots of R*_{k+1}.

    Odd k is only admissible for theta = 1, where every root lies in the cell.
    """
    theta = check_theta(theta)
    if k < 1:
        raise ValueError("interpolation at special points needs k >= 1")
    if k % 2 == 1 and theta < 1.0:
        raise ValueError(
            "odd k with theta < 1 puts a special root outside the cell; "
            "no local interpolant exists"
        )
    roots = np.array(special_radau(k, theta).roots)
    x = mesh.ref_to_phys(np.arange(mesh.n_cells)[:, None], roots[None, :])
    fx = np.asarray(f(x), dtype=float) * np.ones_like(x)
    vand = legendre_vandermonde(k, roots)
    coeffs = np.linalg.solve(vand, fx.T).T
    return DGSolution(mesh, k, coeffs)


# }}}


# {{{ operators


@dataclass(frozen=True)
class LocalOperators:
    """Stencil matrices with h du_j/dt = a [A u_j + theta B u_{j-1} + (1-theta) C u_{j+1}].

    The inverse Legendre mass matrix is already applied, and ``A = A1 + theta A2``.
    """

    k: int
    theta: float
    A1: np.ndarray = field(repr=False)
    A2: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)

    @property
    def A(self) -> np.ndarray:
        return self.A1 + self.theta * self.A2

    def symbol(self, zeta) -> np.ndarray:
        """h-scaled Fourier symbol ``A + theta B e^{-i zeta} + (1-theta) C e^{i zeta}``."""
        return (
            self.A
            + self.theta * self.B * np.exp(-1j * zeta)
            + (1.0 - self.theta) * self.C * np.exp(1j * zeta)
        )


@lru_cache(maxsize=None)
def _reference_matrices(k: int) -> tuple[np.ndarray, ...]:
    rule = gauss_legendre_rule(k + 2)
    p = legendre_vandermonde(k, rule.nodes)
    dp = legendre_deriv_vandermonde(k, rule.nodes)
    # stiff[l, m] = int P_m P_l'
    stiff = (dp * rule.weights[:, None]).T @ p
    right = legendre_vandermonde(k, 1.0)
    left = legendre_vandermonde(k, -1.0)
    minv = (2 * np.arange(k + 1) + 1) / 2.0
    return stiff, right, left, minv


def assemble_local_operators(k: int, theta: float, a: float = 1.0) -> LocalOperators:
    """Build the cell stencil matrices of the weak form

        (h/2) M du/dt = a [ S u - u_hat(x_{j+1/2}) P(1) + u_hat(x_{j-1/2}) P(-1) ]

    with ``M`` the Legendre mass matrix; ``a`` only enters through the flux
    direction, which is fixed by the a >= 0 assumption.
    """
    if k < 0:
        raise ValueError("degree must be non-negative")
    theta = check_theta(theta)
    if a < 0:
        raise ValueError("negative advection speeds are not supported")
    stiff, right, left, minv = _reference_matrices(k)
    scale = 2.0 * minv[:, None]
    # theta-free and theta-proportional parts of the own-cell block
    a1 = scale * (stiff + np.outer(left, left))
    a2 = scale * (-np.outer(right, right) - np.outer(left, left))
    b = scale * np.outer(left, right)
    c = scale * (-np.outer(right, left))
    return LocalOperators(k=k, theta=theta, A1=a1, A2=a2, B=b, C=c)


def semidiscrete_rhs(
    u: DGSolution,
    flux: FluxTheta,
    ops: LocalOperators | None = None,
    out: np.ndarray | None = None,
) -> np.ndarray:
    """du/dt for every coefficient, with periodic wrap-around."""
    if ops is None:
        ops = assemble_local_operators(u.k, flux.theta, flux.a)
    c = u.coeffs
    res = c @ ops.A.T
    res += flux.theta * (np.roll(c, 1, axis=0) @ ops.B.T)
    if flux.theta < 1.0:
        res += (1.0 - flux.theta) * (np.roll(c, -1, axis=0) @ ops.C.T)
    res *= flux.a / u.mesh.h
    if out is not None:
        out[...] = res
        return out
    return res


def energy_rate(u: DGSolution, flux: FluxTheta) -> float:
    """Exact value of <u, L u> predicted by the L2-stability identity."""
    return -flux.a * (flux.theta - 0.5) * float(np.sum(interface_jumps(u) ** 2))


def inner_product(u: DGSolution, v_coeffs: np.ndarray) -> float:
    """L2 inner product of ``u`` with another coefficient array on the same mesh."""
    weights = 2.0 / (2 * np.arange(u.k + 1) + 1)
    return float(0.5 * u.mesh.h * np.sum(u.coeffs * v_coeffs * weights))


# }}}
