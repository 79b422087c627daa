"""SSP(3,3) Runge-Kutta stepping for the semidiscrete DG system."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dg_core import DGSolution, FluxTheta, assemble_local_operators, semidiscrete_rhs

__all__ = [
    "NumericalInstability",
    "TimeStepPlan",
    "integrate",
    "ssprk3_step",
    "stability_cap",
]

#: solution norms above this are treated as a blow-up
BLOWUP_NORM = 1.0e6


class NumericalInstability(RuntimeError):
    pass


def stability_cap(h: float, k: int, a: float) -> float:
    """Largest dt accepted for fixed-step runs."""
    return 1.2 * h / (max(a, 1.0e-300) * (2 * k + 1))


@dataclass(frozen=True)
class TimeStepPlan:
    t_final: float
    dt: float
    n_steps: int
    cfl_constant: float = 0.0
    dt_rule: str = "fixed"

    @classmethod
    def fixed(cls, t_final: float, dt: float) -> TimeStepPlan:
        if dt <= 0.0:
            raise ValueError(f"time step must be positive, got {dt}")
        if t_final < 0.0:
            raise ValueError("final time must be non-negative")
        n = max(0, math.ceil(t_final / dt - 1.0e-10))
        return cls(t_final=float(t_final), dt=float(dt), n_steps=n, dt_rule="fixed")

    @classmethod
    def from_rule(
        cls,
        t_final: float,
        h: float,
        k: int,
        a: float = 1.0,
        cfl_constant: float = 0.05,
        dt_rule: str = "spatial_dominant",
    ) -> TimeStepPlan:
        """``spatial_dominant``: dt = C h^max(1, (2k+1)/3) / a, so that the
        O(dt^3) time error stays below the O(h^{2k+1}) filtered error.
        ``fixed``: dt = C h / (a (2k+1))."""
        if cfl_constant <= 0.0:
            raise ValueError("CFL constant must be positive")
        speed = a if a > 0.0 else 1.0
        if dt_rule == "spatial_dominant":
            dt = cfl_constant * h ** max(1.0, (2 * k + 1) / 3) / speed
        elif dt_rule == "fixed":
            dt = cfl_constant * h / (speed * (2 * k + 1))
        else:
            raise ValueError(f"unknown dt rule {dt_rule!r}")
        plan = cls.fixed(t_final, dt)
        return cls(plan.t_final, plan.dt, plan.n_steps, float(cfl_constant), dt_rule)

    def step_sizes(self) -> np.ndarray:
        """Sizes of all steps; the last one is shortened to land on t_final."""
        if self.n_steps == 0:
            return np.zeros(0)
        sizes = np.full(self.n_steps, self.dt)
        sizes[-1] = self.t_final - self.dt * (self.n_steps - 1)
        return sizes


def ssprk3_step(u: DGSolution, dt: float, flux: FluxTheta, ops=None) -> DGSolution:
    """One Shu-Osher SSP(3,3) step."""
    if dt <= 0.0:
        raise ValueError(f"time step must be positive, got {dt}")
    if ops is None:
        ops = assemble_local_operators(u.k, flux.theta, flux.a)

    def rhs(c):
        return semidiscrete_rhs(u.with_coeffs(c), flux, ops)

    c0 = u.coeffs
    c1 = c0 + dt * rhs(c0)
    c2 = 0.75 * c0 + 0.25 * (c1 + dt * rhs(c1))
    c3 = c0 / 3.0 + 2.0 / 3.0 * (c2 + dt * rhs(c2))
    return u.with_coeffs(c3, t=u.t + dt)


def integrate(
    u0: DGSolution,
    plan: TimeStepPlan,
    flux: FluxTheta,
    *,
    check_every: int = 50,
) -> DGSolution:
    """Advance ``u0`` by ``plan.t_final`` and return the new state.

    The number of steps taken is ``plan.n_steps``.
    """
    if plan.n_steps and plan.dt <= 0.0:
        raise ValueError("time step must be positive")
    if plan.dt_rule == "fixed" and plan.n_steps:
        cap = stability_cap(u0.mesh.h, u0.k, flux.a)
        if plan.dt > cap:
            raise ValueError(f"dt={plan.dt:.3e} exceeds the linear stability cap {cap:.3e}")

    ops = assemble_local_operators(u0.k, flux.theta, flux.a)
    u = u0.copy()
    t0 = u0.t
    for n, dt in enumerate(plan.step_sizes()):
        u = ssprk3_step(u, float(dt), flux, ops)
        if n % check_every == 0 and not np.all(np.abs(u.coeffs) < BLOWUP_NORM):
            raise NumericalInstability(f"solution blew up at step {n}, t={u.t:.4g}")
    if not np.all(np.isfinite(u.coeffs)) or np.abs(u.coeffs).max(initial=0.0) >= BLOWUP_NORM:
        raise NumericalInstability("solution blew up")
    # avoid accumulated round-off in the clock
    u.t = t0 + plan.t_final
    return u
