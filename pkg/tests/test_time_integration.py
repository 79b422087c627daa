from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ubdg.dg_core import DGSolution, FluxTheta, inner_product, l2_project
from ubdg.mesh import build_uniform
from ubdg.time_integration import (
    NumericalInstability,
    TimeStepPlan,
    integrate,
    ssprk3_step,
    stability_cap,
)


@given(st.floats(0.05, 1.0), st.floats(0.5 + 1e-3, 1.0), st.integers(1, 15))
def test_ssp_scalar_amplification(cfl, theta, m):
    # k = 0 on a Fourier mode is the scalar ODE y' = lam y with
    # h lam = 1 - 2 theta + theta e^{-i zeta} - (1 - theta) e^{i zeta}
    n = 32
    mesh = build_uniform(0.0, 1.0, n)
    zeta = 2 * np.pi * m / n
    lam = (1 - 2 * theta + theta * np.exp(-1j * zeta) - (1 - theta) * np.exp(1j * zeta)) / mesh.h
    dt = cfl * mesh.h
    z = lam * dt
    u = DGSolution(mesh, 0, np.exp(1j * zeta * np.arange(n))[:, None])
    v = ssprk3_step(u, dt, FluxTheta(theta))
    ratio = v.coeffs[:, 0] / u.coeffs[:, 0]
    assert np.allclose(ratio, 1 + z + z**2 / 2 + z**3 / 6, rtol=0, atol=1e-14)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("theta", [1.0, 0.7])
def test_mass_conservation_100_steps(k, theta, rng):
    mesh = build_uniform(0.0, 2 * np.pi, 13)
    u = DGSolution(mesh, k, rng.standard_normal((13, k + 1)))
    plan = TimeStepPlan.fixed(100 * 0.1 * mesh.h / (2 * k + 1), 0.1 * mesh.h / (2 * k + 1))
    assert plan.n_steps == 100
    v = integrate(u, plan, FluxTheta(theta))
    assert abs(v.mass - u.mass) < 1e-11


def test_energy_is_nonincreasing(rng):
    mesh = build_uniform(0.0, 1.0, 20)
    u = DGSolution(mesh, 2, rng.standard_normal((20, 3)))
    flux = FluxTheta(0.75)
    e_prev = inner_product(u, u.coeffs)
    for _ in range(30):
        u = ssprk3_step(u, 0.1 * mesh.h / 5, flux)
        e = inner_product(u, u.coeffs)
        assert e <= e_prev * (1 + 1e-14)
        e_prev = e


def test_half_integration_composes():
    mesh = build_uniform(0.0, 2 * np.pi, 10)
    u0 = l2_project(np.sin, mesh, 2)
    flux = FluxTheta(0.8)
    dt = 0.01
    full = integrate(u0, TimeStepPlan.fixed(0.4, dt), flux)
    half = integrate(integrate(u0, TimeStepPlan.fixed(0.2, dt), flux), TimeStepPlan.fixed(0.2, dt), flux)
    assert np.allclose(full.coeffs, half.coeffs, atol=1e-13)
    assert half.t == pytest.approx(0.4)


def test_plan_step_sizes_land_on_final_time():
    plan = TimeStepPlan.fixed(1.0, 0.3)
    assert plan.n_steps == 4
    sizes = plan.step_sizes()
    assert sizes.sum() == pytest.approx(1.0)
    assert sizes[-1] == pytest.approx(0.1)
    assert TimeStepPlan.fixed(0.0, 0.1).n_steps == 0
    with pytest.raises(ValueError):
        TimeStepPlan.fixed(1.0, 0.0)
    with pytest.raises(ValueError):
        TimeStepPlan.fixed(-1.0, 0.1)


def test_plan_rules():
    h = 0.1
    sd = TimeStepPlan.from_rule(1.0, h, 3, cfl_constant=0.5)
    assert sd.dt == pytest.approx(0.5 * h ** (7 / 3))
    lo = TimeStepPlan.from_rule(1.0, h, 0, cfl_constant=0.5)
    assert lo.dt == pytest.approx(0.5 * h)
    fx = TimeStepPlan.from_rule(1.0, h, 2, a=2.0, cfl_constant=0.5, dt_rule="fixed")
    assert fx.dt == pytest.approx(0.5 * h / (2.0 * 5))
    with pytest.raises(ValueError):
        TimeStepPlan.from_rule(1.0, h, 2, dt_rule="adaptive")
    with pytest.raises(ValueError):
        TimeStepPlan.from_rule(1.0, h, 2, cfl_constant=0.0)


def test_fixed_rule_rejects_steps_above_cap():
    mesh = build_uniform(0.0, 1.0, 10)
    u = l2_project(np.sin, mesh, 1)
    plan = TimeStepPlan.from_rule(1.0, mesh.h, 1, cfl_constant=2.0, dt_rule="fixed")
    assert plan.dt > stability_cap(mesh.h, 1, 1.0)
    with pytest.raises(ValueError):
        integrate(u, plan, FluxTheta(1.0))


def test_blowup_detection():
    mesh = build_uniform(0.0, 1.0, 10)
    u = DGSolution(mesh, 0, np.full((10, 1), 1e7))
    with pytest.raises(NumericalInstability):
        integrate(u, TimeStepPlan.fixed(0.01, 0.001), FluxTheta(1.0))


def test_unstable_step_is_detected(rng):
    mesh = build_uniform(0.0, 1.0, 16)
    u = DGSolution(mesh, 2, rng.standard_normal((16, 3)))
    # a large step under the spatial_dominant label bypasses the cap check and blows up
    plan = TimeStepPlan(t_final=200.0, dt=2.0 * mesh.h, n_steps=100, dt_rule="spatial_dominant")
    with pytest.raises(NumericalInstability):
        integrate(u, plan, FluxTheta(1.0))


def test_step_rejects_nonpositive_dt():
    mesh = build_uniform(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        ssprk3_step(l2_project(np.sin, mesh, 1), 0.0, FluxTheta(1.0))
