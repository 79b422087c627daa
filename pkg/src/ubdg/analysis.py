"""Error norms, convergence studies, pointwise error curves and the
superconvergence checks at the special Radau points."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dg_core import DGSolution, FluxTheta, interpolate_special, l2_project
from .mesh import Mesh1D, build_uniform
from .polybasis import gauss_legendre_rule, legendre_vandermonde, special_radau
from .siac import SIACKernel, filter_at, make_kernel
from .time_integration import TimeStepPlan, integrate

__all__ = [
    "CaseResult",
    "ConvergenceTable",
    "ErrorReport",
    "PointwiseErrorCurve",
    "StudyConfig",
    "SuperconvergenceFit",
    "convergence_study",
    "error_curve",
    "exact_advection",
    "fitted_order",
    "l2_error",
    "linf_error",
    "initial_condition",
    "run_case",
    "run_study",
    "sin_initial",
    "superconvergence_order_at_roots",
    "tables_from_results",
]

FILTER_L2_POINTS = 6
LINF_SAMPLES = 20


def exact_advection(u0: Callable, mesh: Mesh1D, a: float = 1.0) -> Callable:
    """Exact solution u0(x - a t) of the periodic advection problem."""

    def exact(x, t):
        return u0(mesh.wrap(np.asarray(x) - a * t))

    return exact


# {{{ norms


def _filtered_values(u: DGSolution, kernel: SIACKernel, x: np.ndarray) -> np.ndarray:
    flat = [filter_at(u, xx, kernel).value for xx in np.ravel(x)]
    return np.reshape(flat, np.shape(x))


def l2_error(u: DGSolution, exact: Callable, t: float | None = None, kernel: SIACKernel | None = None) -> float:
    """(int (u - exact)^2 dx)^(1/2) by composite Gauss quadrature.

    With ``kernel`` the filtered solution is measured on a 6-point rule per
    cell; otherwise the DG solution itself with k+6 points per cell.
    """
    t = u.t if t is None else t
    mesh = u.mesh
    rule = gauss_legendre_rule(FILTER_L2_POINTS if kernel is not None else u.k + 6)
    cells = np.arange(mesh.n_cells)[:, None]
    x = mesh.ref_to_phys(cells, rule.nodes[None, :])
    if kernel is None:
        uh = u.coeffs @ legendre_vandermonde(u.k, rule.nodes).T
    else:
        uh = _filtered_values(u, kernel, x)
    err = uh - exact(x, t)
    return float(np.sqrt(0.5 * mesh.h * np.sum(err**2 * rule.weights)))


def linf_error(u: DGSolution, exact: Callable, t: float | None = None, kernel: SIACKernel | None = None) -> float:
    """Max error over 20 interior points per cell plus both one-sided edge values."""
    t = u.t if t is None else t
    mesh = u.mesh
    xi = np.linspace(-1.0, 1.0, LINF_SAMPLES + 2)
    cells = np.arange(mesh.n_cells)[:, None]
    x = mesh.ref_to_phys(cells, xi[None, :])
    if kernel is None:
        uh = u.coeffs @ legendre_vandermonde(u.k, xi).T
    else:
        # the filtered solution is continuous, so shared edges need one evaluation
        uh = _filtered_values(u, kernel, x)
    return float(np.max(np.abs(uh - exact(x, t))))


@dataclass(frozen=True)
class ErrorReport:
    l2: float
    linf: float
    n_cells: int
    filtered: bool = False


# }}}


# {{{ convergence studies


def sin_initial(x):
    return np.sin(x)


@dataclass(frozen=True)
class StudyConfig:
    k: int = 2
    theta: float = 1.0
    meshes: tuple[int, ...] = (10, 20, 40)
    t_final: float = 1.0
    cfl_constant: float = 0.05
    dt_rule: str = "spatial_dominant"
    init: str = "l2"
    filtered: bool = False
    a: float = 1.0
    domain: tuple[float, float] = (0.0, 2.0 * math.pi)
    u0: Callable = sin_initial

    def __post_init__(self) -> None:
        FluxTheta(self.theta, self.a)
        if self.k < 0:
            raise ValueError("degree must be non-negative")
        if self.init not in ("l2", "interp"):
            raise ValueError(f"unknown initial condition {self.init!r}")
        if self.init == "interp" and (self.k < 1 or (self.k % 2 == 1 and self.theta < 1.0)):
            raise ValueError("interpolation at special points needs even k, or theta = 1")
        if not self.meshes or any(n < 2 for n in self.meshes):
            raise ValueError("mesh list must hold cell counts >= 2")
        if self.t_final < 0.0:
            raise ValueError("final time must be non-negative")


@dataclass
class CaseResult:
    n_cells: int
    initial: DGSolution
    solution: DGSolution
    n_steps: int
    dg: ErrorReport
    post: ErrorReport | None = None


def initial_condition(config: StudyConfig, mesh: Mesh1D) -> DGSolution:
    if config.init == "interp":
        return interpolate_special(config.u0, mesh, config.k, config.theta)
    return l2_project(config.u0, mesh, config.k)


def run_case(config: StudyConfig, n_cells: int, filtered: bool | None = None) -> CaseResult:
    """Project, integrate to ``t_final`` and measure errors on one mesh."""
    filtered = config.filtered if filtered is None else filtered
    mesh = build_uniform(*config.domain, n_cells)
    flux = FluxTheta(config.theta, config.a)
    u0 = initial_condition(config, mesh)
    if config.t_final > 0.0:
        plan = TimeStepPlan.from_rule(
            config.t_final, mesh.h, config.k, config.a, config.cfl_constant, config.dt_rule
        )
        u = integrate(u0, plan, flux)
        n_steps = plan.n_steps
    else:
        u, n_steps = u0.copy(), 0
    exact = exact_advection(config.u0, mesh, config.a)
    dg = ErrorReport(l2_error(u, exact), linf_error(u, exact), n_cells)
    post = None
    if filtered:
        kernel = make_kernel(config.k)
        post = ErrorReport(
            l2_error(u, exact, kernel=kernel), linf_error(u, exact, kernel=kernel), n_cells, True
        )
    return CaseResult(n_cells, u0, u, n_steps, dg, post)


def _orders(errors: Sequence[float], cells: Sequence[int]) -> list[float | None]:
    out: list[float | None] = [None]
    for i in range(1, len(errors)):
        ratio = cells[i] / cells[i - 1]
        out.append(math.log(errors[i - 1] / errors[i]) / math.log(ratio))
    return out


@dataclass
class ConvergenceTable:
    """Rows of ``(n_cells, l2, l2_order, linf, linf_order)``; orders are
    ``None`` on the first row."""

    rows: list[tuple[int, float, float | None, float, float | None]]
    k: int
    theta: float
    t_final: float
    init: str
    filtered: bool

    @classmethod
    def from_reports(cls, reports: Sequence[ErrorReport], config: StudyConfig, filtered: bool) -> ConvergenceTable:
        cells = [r.n_cells for r in reports]
        l2 = [r.l2 for r in reports]
        linf = [r.linf for r in reports]
        rows = list(zip(cells, l2, _orders(l2, cells), linf, _orders(linf, cells)))
        return cls(rows, config.k, config.theta, config.t_final, config.init, filtered)

    @property
    def l2_orders(self) -> list[float]:
        return [r[2] for r in self.rows[1:]]

    @property
    def linf_orders(self) -> list[float]:
        return [r[4] for r in self.rows[1:]]

    def error_at(self, n_cells: int, norm: str = "l2") -> float:
        for row in self.rows:
            if row[0] == n_cells:
                return row[1] if norm == "l2" else row[3]
        raise KeyError(n_cells)


def _run_case_args(args):
    return run_case(*args)


def run_study(config: StudyConfig, jobs: int = 1) -> list[CaseResult]:
    """Run every mesh of ``config``; independent meshes may use a process pool."""
    args = [(config, n) for n in config.meshes]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(args))) as pool:
            return list(pool.map(_run_case_args, args))
    return [run_case(*a) for a in args]


def tables_from_results(config: StudyConfig, results: Sequence[CaseResult]) -> list[ConvergenceTable]:
    tables = [ConvergenceTable.from_reports([r.dg for r in results], config, False)]
    if all(r.post is not None for r in results):
        tables.append(ConvergenceTable.from_reports([r.post for r in results], config, True))
    return tables


def convergence_study(config: StudyConfig, jobs: int = 1) -> ConvergenceTable:
    """Errors and observed orders over ``config.meshes``, for the filtered
    solution when ``config.filtered`` is set and the raw DG solution otherwise."""
    results = run_study(config, jobs)
    return tables_from_results(config, results)[-1 if config.filtered else 0]


def fitted_order(cells: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of -log(error) against log(n_cells)."""
    if len(cells) < 2:
        raise ValueError("an order fit needs at least two meshes")
    slope, _ = np.polyfit(np.log(cells), -np.log(errors), 1)
    return float(slope)


# }}}


# {{{ pointwise errors


@dataclass
class PointwiseErrorCurve:
    k: int
    n_cells: int
    xi: np.ndarray
    x: np.ndarray
    #: ``error[j, i]`` is the error in cell j at ``xi[i]``
    error: np.ndarray
    zero_crossings: list[list[float]] = field(default_factory=list)

    def crossing_counts(self) -> np.ndarray:
        return np.array([len(c) for c in self.zero_crossings])

    def nearest_roots(self, roots: Sequence[float]) -> list[list[tuple[float, float, float]]]:
        """Per cell, ``(crossing, nearest root, distance)`` triples."""
        roots = np.asarray(roots)
        out = []
        for cell in self.zero_crossings:
            rows = []
            for c in cell:
                i = int(np.argmin(np.abs(roots - c)))
                rows.append((c, float(roots[i]), float(abs(roots[i] - c))))
            out.append(rows)
        return out


def _bisect(g: Callable[[float], float], lo: float, hi: float, tol: float = 1.0e-8) -> float:
    glo = g(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if np.sign(gm) == np.sign(glo):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def error_curve(
    u: DGSolution,
    exact: Callable,
    t: float | None = None,
    samples_per_cell: int = 200,
    zero_tol: float = 1.0e-14,
) -> PointwiseErrorCurve:
    """Sample u - exact in every cell and bisect sign changes to 1e-8 in xi.

    Errors below ``zero_tol`` in magnitude count as exactly zero, so an exact
    representation yields no crossings.
    """
    if samples_per_cell < 50:
        raise ValueError("error curves need at least 50 samples per cell")
    t = u.t if t is None else t
    mesh = u.mesh
    xi = np.linspace(-1.0, 1.0, samples_per_cell)
    cells = np.arange(mesh.n_cells)
    x = mesh.ref_to_phys(cells[:, None], xi[None, :])
    err = u.coeffs @ legendre_vandermonde(u.k, xi).T - exact(x, t)
    err = np.where(np.abs(err) < zero_tol, 0.0, err)

    crossings = []
    for j in cells:
        def g(s, j=j):
            return float(u.cell_values(j, s) - exact(mesh.ref_to_phys(j, s), t))

        row = []
        sgn = np.sign(err[j])
        for i in range(samples_per_cell - 1):
            if sgn[i] * sgn[i + 1] < 0:
                row.append(_bisect(g, xi[i], xi[i + 1]))
            elif sgn[i + 1] == 0.0 and i + 2 < samples_per_cell and sgn[i] * sgn[i + 2] < 0:
                row.append(float(xi[i + 1]))
        crossings.append(row)
    return PointwiseErrorCurve(u.k, mesh.n_cells, xi, x, err, crossings)


@dataclass
class SuperconvergenceFit:
    k: int
    theta: float
    meshes: tuple[int, ...]
    errors: list[float]
    orders: list[float | None]
    order: float


def superconvergence_order_at_roots(
    k: int,
    theta: float,
    meshes: Sequence[int],
    t_final: float = 1.0,
    cfl_constant: float = 0.05,
    u0: Callable = sin_initial,
    domain: tuple[float, float] = (0.0, 2.0 * math.pi),
) -> SuperconvergenceFit:
    """Max error at the mapped roots of R*_{k+1} inside each cell, for data
    interpolated at those roots, fitted across a sequence of meshes."""
    meshes = tuple(meshes)
    if len(meshes) < 2:
        raise ValueError("an order fit needs at least two meshes")
    config = StudyConfig(
        k=k, theta=theta, meshes=meshes, t_final=t_final,
        cfl_constant=cfl_constant, init="interp", u0=u0, domain=domain,
    )
    roots = np.array(special_radau(k, theta).interior_roots)
    errors = []
    for n in meshes:
        res = run_case(config, n, filtered=False)
        u = res.solution
        mesh = u.mesh
        exact = exact_advection(u0, mesh)
        x = mesh.ref_to_phys(np.arange(n)[:, None], roots[None, :])
        uh = u.coeffs @ legendre_vandermonde(k, roots).T
        errors.append(float(np.max(np.abs(uh - exact(x, u.t)))))
    return SuperconvergenceFit(
        k, float(theta), meshes, errors, _orders(errors, meshes), fitted_order(meshes, errors)
    )


# }}}
