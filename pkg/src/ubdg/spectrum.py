"""Fourier analysis of the semidiscrete scheme: amplification matrix, its
eigenvalues, the physical mode and fitted dispersion/dissipation orders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dg_core import assemble_local_operators
from .polybasis import check_theta

__all__ = [
    "AmplificationMatrix",
    "EigenSolverError",
    "ModeFit",
    "ModeReport",
    "OrderFit",
    "assemble_G",
    "characteristic_polynomial",
    "default_zeta_grid",
    "durand_kerner",
    "eigenvalues",
    "fit_orders",
    "physical_mode",
]

MAX_DEGREE = 4


class EigenSolverError(ArithmeticError):
    pass


@dataclass(frozen=True)
class AmplificationMatrix:
    """h G(omega, h) at zeta = omega h, for unit advection speed."""

    k: int
    theta: float
    zeta: float
    entries: np.ndarray

    def scaled(self, h: float) -> np.ndarray:
        """The unscaled symbol G = entries / h."""
        return self.entries / h


def assemble_G(k: int, theta: float, zeta: float) -> AmplificationMatrix:
    if not 0 <= k <= MAX_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_DEGREE}]")
    theta = check_theta(theta)
    ops = assemble_local_operators(k, theta)
    return AmplificationMatrix(k, theta, float(zeta), ops.symbol(zeta))


# {{{ eigenvalues


def characteristic_polynomial(mat: np.ndarray) -> np.ndarray:
    """Monic coefficients of det(lambda I - M), highest degree first
    (Faddeev-LeVerrier)."""
    n = mat.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = np.zeros_like(mat, dtype=complex)
    eye = np.eye(n)
    for i in range(1, n + 1):
        m = mat @ m + coeffs[i - 1] * eye
        coeffs[i] = -np.trace(mat @ m) / i
    return coeffs


def durand_kerner(coeffs: np.ndarray, max_iter: int = 500, tol: float = 1.0e-14) -> np.ndarray:
    """All roots of a monic polynomial (coefficients highest degree first)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    n = len(coeffs) - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-coeffs[1]])
    radius = 1.0 + np.max(np.abs(coeffs[1:]))
    z = radius * (0.4 + 0.9j) ** np.arange(n)
    for _ in range(max_iter):
        z_old = z.copy()
        for i in range(n):
            denom = np.prod(z[i] - np.delete(z, i))
            z[i] = z[i] - np.polyval(coeffs, z[i]) / denom
        if np.all(np.abs(z - z_old) <= tol * np.maximum(1.0, np.abs(z))):
            return z
    raise EigenSolverError(f"Durand-Kerner did not converge in {max_iter} iterations")


def _polish(mat: np.ndarray, lam: complex, steps: int = 3) -> complex:
    # Newton on det(M - lambda I): step = 1 / trace((M - lambda I)^{-1})
    eye = np.eye(mat.shape[0])
    for _ in range(steps):
        try:
            tr = np.trace(np.linalg.inv(mat - lam * eye))
        except np.linalg.LinAlgError:
            break
        if not np.isfinite(tr) or tr == 0:
            break
        step = 1.0 / tr
        if abs(step) > 1.0e-6 * max(1.0, abs(lam)):
            break
        lam = lam + step
        if abs(step) <= 1.0e-16 * max(1.0, abs(lam)):
            break
    return lam


def eigen_residual(mat: np.ndarray, lam: complex) -> float:
    """min ||(M - lambda I) v|| over unit v, the residual of the best eigenvector."""
    s = np.linalg.svd(mat - lam * np.eye(mat.shape[0]), compute_uv=False)
    return float(s[-1])


def eigenvalues(G: AmplificationMatrix | np.ndarray, tol: float = 1.0e-10) -> np.ndarray:
    """Eigenvalues of a small complex matrix via its characteristic polynomial."""
    mat = np.asarray(G.entries if isinstance(G, AmplificationMatrix) else G, dtype=complex)
    if mat.shape[0] > MAX_DEGREE + 1:
        raise ValueError("eigenvalue solver supports matrices up to 5x5")
    if mat.shape == (1, 1):
        return mat[0].copy()
    lam = durand_kerner(characteristic_polynomial(mat))
    lam = np.array([_polish(mat, z) for z in lam])
    scale = max(1.0, float(np.max(np.abs(mat))))
    for z in lam:
        if eigen_residual(mat, z) > tol * scale:
            raise EigenSolverError(f"eigenvalue {z} fails the residual check")
    return lam


# }}}


# {{{ physical mode


@dataclass(frozen=True)
class ModeReport:
    """Eigenvalues of h G at ``zeta``; dispersion and dissipation refer to
    the unscaled physical eigenvalue at wavenumber ``omega``."""

    zeta: float
    eigenvalues: np.ndarray
    physical_index: int
    h: float
    ambiguous: bool = False

    @property
    def omega(self) -> float:
        return self.zeta / self.h

    @property
    def physical(self) -> complex:
        """Physical eigenvalue of G (not h-scaled)."""
        return complex(self.eigenvalues[self.physical_index] / self.h)

    @property
    def dispersion_error(self) -> float:
        return abs(self.physical.imag + self.omega)

    @property
    def dissipation(self) -> float:
        return self.physical.real

    @property
    def nonphysical(self) -> np.ndarray:
        return np.delete(self.eigenvalues, self.physical_index)


def physical_mode(G: AmplificationMatrix, h: float | None = None) -> ModeReport:
    """Pick the eigenvalue of h G nearest to -i zeta.

    ``h`` defaults to zeta, i.e. unit wavenumber.
    """
    if h is None:
        h = G.zeta if G.zeta != 0.0 else 1.0
    lam = eigenvalues(G)
    dist = np.abs(lam + 1j * G.zeta)
    idx = int(np.argmin(dist))
    others = np.delete(dist, idx)
    ambiguous = bool(len(others) and np.min(others) - dist[idx] < 1.0e-12)
    return ModeReport(G.zeta, lam, idx, float(h), ambiguous)


@dataclass(frozen=True)
class OrderFit:
    slope: float
    coefficient: float
    degenerate: bool = False


@dataclass(frozen=True)
class ModeFit:
    k: int
    theta: float
    h: np.ndarray
    dispersion_errors: np.ndarray
    dissipation_errors: np.ndarray
    dispersion: OrderFit
    dissipation: OrderFit


def _loglog(h: np.ndarray, err: np.ndarray) -> OrderFit:
    if np.any(err <= 0.0) or np.max(err) < 1.0e-14:
        return OrderFit(float("nan"), float("nan"), True)
    slope, intercept = np.polyfit(np.log(h), np.log(err), 1)
    return OrderFit(float(slope), float(np.exp(intercept)))


def fit_orders(k: int, theta: float, zeta_grid: Sequence[float]) -> ModeFit:
    """Log-log fit of |Im(lambda) + omega| and |Re(lambda)| against h at
    omega = 1 (so h = zeta), for the physical eigenvalue lambda of G."""
    zeta = np.asarray(zeta_grid, dtype=float)
    if len(zeta) < 5:
        raise ValueError("need at least 5 wavenumbers to fit orders")
    disp, diss = [], []
    for z in zeta:
        rep = physical_mode(assemble_G(k, theta, z), h=z)
        disp.append(rep.dispersion_error)
        diss.append(abs(rep.dissipation))
    disp, diss = np.array(disp), np.array(diss)
    return ModeFit(k, float(theta), zeta, disp, diss, _loglog(zeta, disp), _loglog(zeta, diss))


def default_zeta_grid(k: int, theta: float = 1.0, n: int = 8) -> np.ndarray:
    """Small-zeta window where the leading term dominates and the error is
    well above round-off.

    For k = 1 the next-order term carries an extra 1/(2 theta - 1), so the
    window shrinks with theta.
    """
    lo, hi = {0: (0.005, 0.05), 1: (0.005, 0.05), 2: (0.05, 0.2), 3: (0.1, 0.25), 4: (0.4, 0.7)}[k]
    if k == 1:
        shrink = min(1.0, 2.0 * theta - 1.0)
        lo, hi = lo * shrink, hi * shrink
    return np.geomspace(lo, hi, n)


# }}}
