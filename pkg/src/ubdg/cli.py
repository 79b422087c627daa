"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import io
from .analysis import (
    StudyConfig,
    error_curve,
    exact_advection,
    run_case,
    run_study,
    sin_initial,
    tables_from_results,
)
from .polybasis import check_theta, special_radau
from .siac import filter_at, make_kernel, sample_points
from .spectrum import EigenSolverError, assemble_G, default_zeta_grid, fit_orders, physical_mode
from .time_integration import NumericalInstability

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


# {{{ configuration


def parse_u0(spec: str) -> Callable:
    """``sin`` or ``custom-poly:c0,c1,...`` (monomial coefficients, lowest first)."""
    if spec == "sin":
        return sin_initial
    if spec.startswith("custom-poly:"):
        try:
            coeffs = [float(c) for c in spec.split(":", 1)[1].split(",") if c.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad polynomial coefficients in {spec!r}") from exc
        if not coeffs:
            raise ConfigError("custom-poly needs at least one coefficient")
        # a Polynomial (not a lambda) stays picklable for the worker pool
        return np.polynomial.Polynomial(coeffs)
    raise ConfigError(f"unknown initial condition {spec!r}")


def parse_meshes(spec: str) -> tuple[int, ...]:
    try:
        meshes = tuple(int(s) for s in spec.split(",") if s.strip())
    except ValueError as exc:
        raise ConfigError(f"bad mesh list {spec!r}") from exc
    if not meshes:
        raise ConfigError("mesh list is empty")
    return meshes


@dataclass(frozen=True)
class RunConfig:
    k: int
    theta: float
    meshes: tuple[int, ...]
    t_final: float
    cfl_constant: float
    dt_rule: str
    init: str
    filter: bool
    u0: str
    output: Path

    def study(self) -> StudyConfig:
        try:
            check_theta(self.theta)
            if self.k < 0:
                raise ValueError("k must be non-negative")
            if self.cfl_constant <= 0:
                raise ValueError("cfl constant must be positive")
            if self.init == "interp" and (self.k < 1 or (self.k % 2 == 1 and self.theta < 1.0)):
                raise ValueError("--init interp needs even k >= 2, or theta = 1")
            return StudyConfig(
                k=self.k,
                theta=self.theta,
                meshes=self.meshes,
                t_final=self.t_final,
                cfl_constant=self.cfl_constant,
                dt_rule=self.dt_rule,
                init=self.init,
                filtered=self.filter,
                u0=parse_u0(self.u0),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def record(self, command: str) -> dict:
        return {
            "command": command,
            "k": self.k,
            "theta": self.theta,
            "meshes": list(self.meshes),
            "t_final": self.t_final,
            "cfl_constant": self.cfl_constant,
            "dt_rule": self.dt_rule,
            "init": self.init,
            "filter": self.filter,
            "u0": self.u0,
        }


def run_config(args, meshes: tuple[int, ...]) -> RunConfig:
    return RunConfig(
        k=args.k,
        theta=args.theta,
        meshes=meshes,
        t_final=args.t_final,
        cfl_constant=args.cfl,
        dt_rule=args.dt_rule,
        init=args.init,
        filter=getattr(args, "filter", False),
        u0=args.u0,
        output=Path(args.out),
    )


# }}}


# {{{ commands


def cmd_roots(args) -> int:
    try:
        rstar = special_radau(args.k, args.theta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(", ".join(f"{r:.6f}" for r in rstar.roots))
    for r in rstar.roots:
        if r > 1.0 + 1.0e-12:
            print(f"note: root {r:.6f} lies outside the reference element [-1, 1]")
    if args.csv:
        io.write_rows(
            args.csv, ("index", "root", "outside"),
            ((i, r, r > 1.0 + 1.0e-12) for i, r in enumerate(rstar.roots)),
        )
    return 0


def cmd_solve(args) -> int:
    if args.samples < 1:
        raise ConfigError("--samples must be positive")
    cfg = run_config(args, (args.cells,))
    study = cfg.study()
    res = run_case(study, args.cells)
    out = cfg.output
    io.write_solution(out / "solution.csv", res.solution, cfg.theta)
    line = f"n_cells={args.cells} k={cfg.k} theta={cfg.theta:g} t={res.solution.t:g} steps={res.n_steps} L2={res.dg.l2:.6e} Linf={res.dg.linf:.6e}"
    if cfg.filter:
        u = res.solution
        kernel = make_kernel(cfg.k)
        x = sample_points(u, args.samples, "uniform")
        uf = [filter_at(u, xx, kernel).value for xx in x]
        exact = exact_advection(study.u0, u.mesh, study.a)
        io.write_filtered(out / "filtered.csv", x, uf, exact(x, u.t))
        line += f" filtered_L2={res.post.l2:.6e} filtered_Linf={res.post.linf:.6e}"
    io.write_json(out / "run.json", cfg.record("solve"))
    print(line)
    return 0


def cmd_converge(args) -> int:
    cfg = run_config(args, parse_meshes(args.meshes))
    study = cfg.study()
    results = run_study(study, jobs=args.jobs)
    tables = tables_from_results(study, results)
    out = cfg.output
    io.write_table(out / "table.csv", tables)
    io.write_json(out / "run.json", cfg.record("converge"))
    for tab in tables:
        label = "filtered" if tab.filtered else "dg"
        print(f"[{label}] k={tab.k} theta={tab.theta:g}")
        print(f"{'cells':>6} {'L2':>12} {'order':>6} {'Linf':>12} {'order':>6}")
        for n, l2, l2o, linf, linfo in tab.rows:
            o1 = "-" if l2o is None else f"{l2o:.2f}"
            o2 = "-" if linfo is None else f"{linfo:.2f}"
            print(f"{n:>6} {l2:>12.3e} {o1:>6} {linf:>12.3e} {o2:>6}")
    if args.plot:
        from .plotting import plot_convergence

        plot_convergence(tables, out / "convergence.svg")
    return 0


def cmd_dispersion(args) -> int:
    try:
        check_theta(args.theta)
        if not 0 <= args.k <= 4:
            raise ValueError("dispersion analysis supports 0 <= k <= 4")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.zeta_min is not None or args.zeta_max is not None:
        lo0, hi0 = default_zeta_grid(args.k, args.theta)[[0, -1]]
        lo = args.zeta_min if args.zeta_min is not None else lo0
        hi = args.zeta_max if args.zeta_max is not None else hi0
        if not 0 < lo < hi:
            raise ConfigError("need 0 < zeta-min < zeta-max")
        zeta = np.geomspace(lo, hi, args.points)
    else:
        zeta = default_zeta_grid(args.k, args.theta, args.points)
    fit = fit_orders(args.k, args.theta, zeta)
    reports = [physical_mode(assemble_G(args.k, args.theta, z)) for z in zeta]
    out = Path(args.out)
    io.write_dispersion(out / "dispersion.csv", reports)
    io.write_json(
        out / "run.json",
        {"command": "dispersion", "k": args.k, "theta": args.theta, "zeta": [float(z) for z in zeta]},
    )
    for name, f in (("dispersion", fit.dispersion), ("dissipation", fit.dissipation)):
        flag = " (degenerate)" if f.degenerate else ""
        print(f"{name}: slope={f.slope:.4f} coeff={f.coefficient:.6e}{flag}")
    return 0


def cmd_points(args) -> int:
    if args.samples < 50:
        raise ConfigError("--samples must be at least 50")
    cfg = run_config(args, (args.cells,))
    study = cfg.study()
    res = run_case(study, args.cells, filtered=False)
    u = res.solution
    curve = error_curve(u, exact_advection(study.u0, u.mesh, study.a), samples_per_cell=args.samples)
    roots = special_radau(cfg.k, cfg.theta).interior_roots if cfg.k >= 1 else ()
    out = cfg.output
    io.write_curve(out / "curve.csv", curve)
    io.write_crossings(out / "crossings.csv", curve, roots or (0.0,))
    io.write_json(out / "run.json", cfg.record("points"))
    counts = curve.crossing_counts()
    hist = {int(c): int(n) for c, n in zip(*np.unique(counts, return_counts=True))}
    print(f"crossings per cell: {hist}")
    print("special points: " + ", ".join(f"{r:.6f}" for r in roots))
    if args.plot:
        from .plotting import plot_error_curve

        plot_error_curve(curve, roots, out / "curve.svg")
    return 0


# }}}


def _common(p: argparse.ArgumentParser, cells: bool = True) -> None:
    p.add_argument("--k", type=int, default=2, help="polynomial degree")
    p.add_argument("--theta", type=float, default=1.0, help="flux bias in (1/2, 1]")
    if cells:
        p.add_argument("--cells", type=int, default=20)
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--cfl", type=float, default=0.05, help="CFL constant of the dt rule")
    p.add_argument("--dt-rule", choices=("spatial_dominant", "fixed"), default="spatial_dominant")
    p.add_argument("--init", choices=("l2", "interp"), default="l2")
    p.add_argument("--u0", default="sin", help="'sin' or 'custom-poly:c0,c1,...'")
    p.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ubdg", description="Upwind-biased DG for u_t + u_x = 0 with SIAC filtering."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", help="roots of the special Radau polynomial")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--csv", default=None, help="optional CSV output path")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("solve", help="solve the sine-wave test problem on one mesh")
    _common(p)
    p.add_argument("--filter", action="store_true", help="also post-process with SIAC")
    p.add_argument("--samples", type=int, default=6, help="filtered samples per cell")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("converge", help="convergence table over a mesh sequence")
    _common(p, cells=False)
    p.add_argument("--meshes", default="10,20,40")
    p.add_argument("--filter", action="store_true")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--plot", action="store_true", help="write SVG plots")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("dispersion", help="eigenvalues of the amplification matrix")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--zeta-min", type=float, default=None)
    p.add_argument("--zeta-max", type=float, default=None)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("points", help="pointwise error curves and zero crossings")
    _common(p)
    p.add_argument("--samples", type=int, default=200, help="samples per cell")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_points)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalInstability, EigenSolverError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
