"""Acceptance criteria, one test per criterion.

Each test prints a single ``CRITERION n: PASS|FAIL ...`` line; the lines are
repeated in the terminal summary.  Companion diagnostics at the bottom
record what the implementation does where a criterion, as stated, cannot
hold (see the project notes).
"""

from __future__ import annotations

import math
import time
from functools import lru_cache

import numpy as np
import pytest
from numpy.polynomial import legendre as npleg

from ubdg.analysis import (
    StudyConfig,
    error_curve,
    exact_advection,
    run_case,
    run_study,
    superconvergence_order_at_roots,
    tables_from_results,
)
from ubdg.dg_core import DGSolution, FluxTheta, energy_rate, inner_product, semidiscrete_rhs
from ubdg.mesh import build_uniform
from ubdg.polybasis import gauss_legendre_rule, legendre_vandermonde, special_radau
from ubdg.siac import make_kernel
from ubdg.spectrum import assemble_G, default_zeta_grid, fit_orders, physical_mode
from ubdg.time_integration import TimeStepPlan, integrate, ssprk3_step

ACCEPTANCE_LINES: list[str] = []

MESHES = (10, 20, 40)

# printed root table: theta -> k -> roots (two decimals)
PRINTED_ROOTS = {
    1.0: {1: [-1 / 3, 1.0], 2: [-0.68, 0.28, 1.0], 3: [-0.82, -0.18, 0.57, 1.0], 4: [-0.88, -0.44, 0.16, 0.72, 1.0]},
    0.75: {1: [-0.21, 1.54], 2: [-0.72, 0.16, 0.86], 3: [-0.80, -0.11, 0.69, 1.36], 4: [-0.89, -0.48, 0.09, 0.62, 0.93]},
}

# printed L2 errors: (k, theta) -> N=20 unfiltered, N=40 filtered
REFERENCE_L2_N20 = {(2, 1.0): 1.06e-4, (2, 0.85): 9.03e-5, (2, 0.55): 6.97e-5, (3, 1.0): 1.30e-5}
REFERENCE_FILTERED_L2_N40 = {
    (2, 1.0): 4.46e-8, (2, 0.85): 4.19e-8, (2, 0.55): 3.63e-8,
    (3, 1.0): 3.34e-10, (3, 0.85): 3.34e-10, (3, 0.55): 3.39e-10,
}


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


@lru_cache(maxsize=None)
def study(k: int, theta: float, filtered: bool):
    t0 = time.perf_counter()
    cfg = StudyConfig(k=k, theta=theta, meshes=MESHES, filtered=filtered)
    tables = tables_from_results(cfg, run_study(cfg))
    return tables, time.perf_counter() - t0


# {{{ criteria


def test_criterion_1_root_table():
    t0 = time.perf_counter()
    worst = (0.0, None)
    for theta, rows in PRINTED_ROOTS.items():
        for k, printed in rows.items():
            got = special_radau(k, theta).roots
            for g, p in zip(got, printed):
                if abs(g - p) > worst[0]:
                    worst = (abs(g - p), (k, theta, g, p))
    elapsed = time.perf_counter() - t0
    dev, where = worst
    ok = dev <= 0.005 and elapsed < 1.0
    report(1, ok, f"max |root - table| = {dev:.4f} (tol 0.005) at k={where[0]}, theta={where[1]}: "
           f"{where[2]:.6f} vs {where[3]}; {elapsed:.3f}s")


def test_criterion_2_unfiltered_convergence():
    msgs, ok, total = [], True, 0.0
    for theta in (1.0, 0.85, 0.55):
        (dg,), dt = study(2, theta, False)
        total += dt
        orders = dg.l2_orders
        ok &= all(abs(o - 3.0) <= 0.15 for o in orders)
        ratio = dg.error_at(20) / REFERENCE_L2_N20[(2, theta)]
        ok &= 1 / 3 <= ratio <= 3
        msgs.append(f"k=2 th={theta}: orders {orders[0]:.2f},{orders[1]:.2f} N20 ratio {ratio:.2f}")
    (dg,), dt = study(3, 1.0, False)
    total += dt
    ratio = dg.error_at(20) / REFERENCE_L2_N20[(3, 1.0)]
    ok &= abs(dg.l2_orders[-1] - 4.0) <= 0.3 and 1 / 3 <= ratio <= 3
    msgs.append(f"k=3 th=1: finest order {dg.l2_orders[-1]:.2f} N20 ratio {ratio:.2f}")
    ok &= total < 120
    report(2, ok, "; ".join(msgs) + f"; {total:.1f}s")


def test_criterion_3_filtered_superconvergence():
    msgs, ok, total = [], True, 0.0
    for k, bound in ((2, 5.7), (3, 7.3)):
        for theta in (1.0, 0.85, 0.55):
            (_, post), dt = study(k, theta, True)
            total += dt
            order = post.l2_orders[-1]
            ratio = post.error_at(40) / REFERENCE_FILTERED_L2_N40[(k, theta)]
            ok &= order >= bound and 1 / 3 <= ratio <= 3
            msgs.append(f"k={k} th={theta}: {order:.2f} (x{ratio:.2f})")
    ok &= total < 300
    report(3, ok, "; ".join(msgs) + f"; {total:.1f}s")


def test_criterion_4_theta_monotonicity():
    errs = {k: [study(k, th, False)[0][0].error_at(20) for th in (1.0, 0.85, 0.55)] for k in (2, 3)}
    dec = errs[2][0] > errs[2][1] > errs[2][2]
    inc = errs[3][0] < errs[3][1] < errs[3][2]
    fmt = lambda v: " > ".join(f"{e:.3e}" for e in v)  # noqa: E731
    report(4, dec and inc, f"k=2 {fmt(errs[2])} (decreasing: {dec}); k=3 {fmt(errs[3][::-1])} (increasing: {inc})")


def crossing_stats(k: int, theta: float, n: int):
    res = run_case(StudyConfig(k=k, theta=theta, meshes=(n,)), n)
    u = res.solution
    curve = error_curve(u, exact_advection(np.sin, u.mesh))
    return curve, curve.nearest_roots(special_radau(k, theta).interior_roots)


def test_criterion_5_superconvergent_points():
    curve2, near2 = crossing_stats(2, 0.7, 10)
    good = good_cells(near2)
    frac = good / curve2.n_cells
    curve3, _ = crossing_stats(3, 0.7, 10)
    counts = curve3.crossing_counts()
    modal = int(np.bincount(counts).argmax())
    ok = frac >= 0.8 and modal == 3
    report(5, ok, f"k=2 cells with 3 crossings within 0.1 of a root: {good}/10 ({frac:.0%}, need 80%); "
           f"k=3 modal crossing count {modal} (histogram {np.bincount(counts).tolist()})")


def test_criterion_6_pointwise_order_at_roots():
    fits = {th: superconvergence_order_at_roots(2, th, (10, 20, 40, 80)) for th in (1.0, 0.75)}
    ok = all(f.order >= 3.5 for f in fits.values())
    report(6, ok, "; ".join(f"theta={th}: fitted order {f.order:.3f}" for th, f in fits.items()))


def test_criterion_7_dispersion_fits():
    t0 = time.perf_counter()
    f0 = fit_orders(0, 0.75, default_zeta_grid(0, 0.75))
    f1 = fit_orders(1, 0.75, default_zeta_grid(1, 0.75))
    f2 = fit_orders(2, 0.75, default_zeta_grid(2, 0.75))
    c0 = abs(f0.dissipation.coefficient / 0.25 - 1) <= 0.01
    s1 = abs(f1.dissipation.slope - 3) <= 0.2
    c1 = abs(f1.dissipation.coefficient / (1 / 36) - 1) <= 0.10
    s2 = abs(f2.dispersion.slope - 5) <= 0.3
    worst = -np.inf
    for k in range(1, 5):
        for theta in (0.51, 0.55, 0.6, 0.75, 0.85, 1.0):
            for zeta in np.linspace(0.05, np.pi, 12):
                worst = max(worst, float(np.max(physical_mode(assemble_G(k, theta, zeta)).nonphysical.real)))
    damped = worst < 0
    elapsed = time.perf_counter() - t0
    ok = c0 and s1 and c1 and s2 and damped and elapsed < 10
    report(7, ok, f"k=0 coeff {f0.dissipation.coefficient:.5f} ({c0}); k=1 slope {f1.dissipation.slope:.3f} ({s1}) "
           f"coeff {f1.dissipation.coefficient:.5f} vs {1 / 36:.5f} ({c1}); k=2 dispersion slope "
           f"{f2.dispersion.slope:.3f} vs 5 ({s2}); max non-physical Re {worst:.3e} ({damped}); {elapsed:.2f}s")


def test_criterion_8_property_suites():
    rng = np.random.default_rng(8)
    checks = {}

    x, w = npleg.leggauss(24)
    v = legendre_vandermonde(12, x)
    gram = (v * w[:, None]).T @ v
    checks["orthogonality"] = float(np.max(np.abs(gram - np.diag(2.0 / (2 * np.arange(13) + 1)))))

    worst = 0.0
    xs = np.linspace(-3.0, 3.0, 200)
    for k in range(4):
        kern = make_kernel(k)
        rule = gauss_legendre_rule(k + 6)
        brk = kern.breakpoints
        ys = (0.5 * (brk[:-1] + brk[1:]))[:, None] + 0.5 * rule.nodes[None, :]
        ws = 0.5 * rule.weights[None, :] * kern(ys)
        for p in range(2 * k + 1):
            conv = np.array([np.sum(ws * (xx - ys) ** p) for xx in xs])
            worst = max(worst, float(np.max(np.abs(conv - xs**p))))
    checks["reproduction"] = worst

    worst = 0.0
    for _ in range(1000):
        k = int(rng.integers(0, 5))
        n = int(rng.integers(2, 16))
        flux = FluxTheta(rng.uniform(0.5 + 1e-3, 1.0), rng.uniform(0.2, 2.0))
        u = DGSolution(build_uniform(0.0, rng.uniform(0.5, 7.0), n), k, rng.standard_normal((n, k + 1)))
        lhs = inner_product(u, semidiscrete_rhs(u, flux))
        rhs = energy_rate(u, flux)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    checks["energy"] = worst

    mesh = build_uniform(0.0, 2 * np.pi, 17)
    u = DGSolution(mesh, 3, rng.standard_normal((17, 4)))
    dt = 0.1 * mesh.h / 7
    out = integrate(u, TimeStepPlan.fixed(100 * dt, dt), FluxTheta(0.7))
    checks["mass"] = abs(out.mass - u.mass)

    worst = 0.0
    n = 32
    m0 = build_uniform(0.0, 1.0, n)
    for theta in (1.0, 0.75, 0.55):
        for m in range(1, 16):
            zeta = 2 * np.pi * m / n
            lam_h = 1 - 2 * theta + theta * np.exp(-1j * zeta) - (1 - theta) * np.exp(1j * zeta)
            for cfl in (0.1, 0.5, 1.0):
                z = lam_h * cfl
                u0 = DGSolution(m0, 0, np.exp(1j * zeta * np.arange(n))[:, None])
                r = ssprk3_step(u0, cfl * m0.h, FluxTheta(theta)).coeffs[:, 0] / u0.coeffs[:, 0]
                worst = max(worst, float(np.max(np.abs(r - (1 + z + z**2 / 2 + z**3 / 6)))))
    checks["ssp"] = worst

    tols = {"orthogonality": 1e-12, "reproduction": 1e-10, "energy": 1e-12, "mass": 1e-11, "ssp": 1e-14}
    ok = all(checks[key] <= tol for key, tol in tols.items())
    report(8, ok, ", ".join(f"{key} {checks[key]:.1e} (tol {tols[key]:.0e})" for key in tols))


# }}}


# {{{ companion diagnostics


def test_root_table_matches_two_decimal_truncation():
    # the printed roots agree with the computed ones truncated (not rounded) to 2 dp
    for theta, rows in PRINTED_ROOTS.items():
        for k, printed in rows.items():
            got = special_radau(k, theta).roots
            for g, p in zip(got, printed):
                if p in (1.0, -1 / 3):
                    assert g == pytest.approx(p, abs=1e-12)
                else:
                    assert math.trunc(g * 100) / 100 == pytest.approx(p, abs=1e-12)


def test_reference_l2_values_are_rms_normalised():
    # printed L2 errors equal ours divided by sqrt(2 pi), the square root of the domain length
    for (k, theta), ref in REFERENCE_L2_N20.items():
        if k == 2:
            (dg,), _ = study(k, theta, False)
            assert dg.error_at(20) / math.sqrt(2 * math.pi) == pytest.approx(ref, rel=0.03)
    for (k, theta), ref in REFERENCE_FILTERED_L2_N40.items():
        if k == 2:
            (_, post), _ = study(k, theta, True)
            assert post.error_at(40) / math.sqrt(2 * math.pi) == pytest.approx(ref, rel=0.03)


def good_cells(near, count=3, tol=0.1):
    return sum(1 for cell in near if len(cell) == count and all(d <= tol for _, _, d in cell))


def test_crossings_approach_roots_under_refinement():
    _, near10 = crossing_stats(2, 0.7, 10)
    _, near20 = crossing_stats(2, 0.7, 20)
    mean = lambda near: np.mean([d for cell in near for _, _, d in cell])  # noqa: E731
    assert mean(near20) < mean(near10)
    # the 80% proxy is first met one refinement later, at N = 20
    assert good_cells(near10) / 10 < 0.8 <= good_cells(near20) / 20
    # N = 10: every cell has 2 or 3 crossings, none further than 0.15 from a root
    assert all(len(cell) in (2, 3) for cell in near10)
    assert max(d for cell in near10 for _, _, d in cell) < 0.15


@pytest.mark.parametrize("k", [1, 2, 3])
def test_physical_mode_real_part_is_order_2k_plus_1(k):
    # leading real (dissipative) term is h^(2k+1), imaginary (dispersive) error h^(2k+2)
    fit = fit_orders(k, 0.75, default_zeta_grid(k, 0.75))
    assert fit.dissipation.slope == pytest.approx(2 * k + 1, abs=0.25)
    assert fit.dispersion.slope == pytest.approx(2 * k + 2, abs=0.25)


def test_k2_leading_coefficients():
    # at omega = 1: Re = -(2 theta - 1) / 7200 h^5, Im + 1 = -(theta^2 - theta + 1/14) / 3000 h^6
    h = np.geomspace(0.05, 0.15, 5)
    for theta in (1.0, 0.75, 0.55):
        reps = [physical_mode(assemble_G(2, theta, z)) for z in h]
        re = np.array([r.dissipation for r in reps])
        im = np.array([r.physical.imag + 1 for r in reps])
        assert np.allclose(re / h**5, -(2 * theta - 1) / 7200, rtol=0.02)
        assert np.allclose(im / h**6, -(theta**2 - theta + 1 / 14) / 3000, rtol=0.02)


# }}}


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
