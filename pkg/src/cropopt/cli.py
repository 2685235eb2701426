"""Command-line front end: ``cropopt {mesh,solve,compare,symcheck} --config FILE``.

Exit codes: 0 success, 2 configuration or usage error, 3 solver failure,
4 a check asserted by ``compare`` or ``symcheck`` failed.
"""
import argparse
import dataclasses
import logging
from pathlib import Path
import sys

from .config import BENCHMARK_NAMES, load_config
from .exceptions import (AssemblyError, BudgetError, ConfigError, DivergenceError,
                         DomainError, InvalidSpecError, SolverError)
from .fem import integrate_nodal
from .io import SUMMARY_HEADER, element_csv, nodal_csv, summary_row
from .mesh import benchmark_domain, format_mesh, generate_mesh, measure_indicator
from .model import cost_J, solve_state
from .oracle import make_annulus_control, random_bangbang, solve_exact
from .symmetry import (ball_symmetric_difference, check_axis_symmetry, check_directional_convexity,
                       check_star_shaped, rasterize_control, schwarz_radius)
from .uzawa import run_uzawa

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CHECK = 0, 2, 3, 4
COMPARE_HEADER = "domain,control,seed,J,area"

logger = logging.getLogger(__name__)


def _write(out, name, text):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def _out_dir(config):
    return Path(config.output_dir)


def cmd_mesh(config):
    mesh = generate_mesh(config.domain)
    _write(_out_dir(config), "mesh.txt", format_mesh(mesh))
    print(f"{config.domain_name}: {mesh.n_vertices} vertices, {mesh.n_triangles} triangles, "
          f"area {mesh.area:.12g}")
    return EXIT_OK


def _solve(mesh, config, solver):
    """Run one solver; returns (control, xi, gap, history)."""
    if solver == "oracle":
        res = solve_exact(mesh, config.params)
        return res.control, res.xi, res.quantization_gap, None
    u, history = run_uzawa(mesh, config.params, config.uzawa)
    return u, "", "", history


def cmd_solve(config):
    """Write the mesh, control, state, summary and (Uzawa) history files."""
    out = _out_dir(config)
    mesh = generate_mesh(config.domain)
    _write(out, "mesh.txt", format_mesh(mesh))
    summary = [SUMMARY_HEADER]
    for solver in config.solvers:
        u, xi, gap, history = _solve(mesh, config, solver)
        state = solve_state(mesh, config.params, u)
        J = config.params.T * integrate_nodal(mesh, state)
        area = measure_indicator(mesh, u)
        _write(out, f"control_{solver}.csv", element_csv(mesh, u))
        _write(out, f"state_{solver}.csv", nodal_csv(mesh, state))
        if history is not None:
            _write(out, f"history_{solver}.csv", history.to_csv())
            if not history.converged:
                logger.warning("uzawa stopped at max_iters without meeting the stop rule")
        summary.append(summary_row(config.domain_name, config.domain.h, config.params, J,
                                   area, xi, gap))
        print(f"{solver}: J = {J:.10g}, area = {area:.10g}")
    _write(out, "summary.csv", "\n".join(summary) + "\n")
    return EXIT_OK


def _compare_rows(config, name, spec):
    mesh = generate_mesh(spec)
    params = config.params
    rows = []
    for solver in config.solvers:
        u = _solve(mesh, config, solver)[0]
        rows.append((name, solver, "", cost_J(mesh, params, u), measure_indicator(mesh, u)))
    if spec.kind == "disk":
        u = make_annulus_control(mesh, params).control
        rows.append((name, "annulus", "", cost_J(mesh, params, u), measure_indicator(mesh, u)))
    for k in range(config.baselines):
        seed = config.seed + k
        u = random_bangbang(mesh, params.L, seed)
        rows.append((name, "random", str(seed), cost_J(mesh, params, u),
                     measure_indicator(mesh, u)))
    return rows


def cmd_compare(config, benchmark=False):
    """Rank the optimal, annulus and random controls by cost.

    With ``benchmark=True`` the four benchmark fields are compared at the
    configured ``h`` instead of the configured domain.
    """
    if benchmark:
        domains = [(name, benchmark_domain(i, config.domain.h))
                   for name, i in BENCHMARK_NAMES.items()]
    else:
        domains = [(config.domain_name, config.domain)]
    rows = []
    for name, spec in domains:
        rows += _compare_rows(config, name, spec)
    # stable sort keeps generation order among equal costs
    rows.sort(key=lambda r: -r[3])
    lines = [COMPARE_HEADER]
    lines += [f"{d},{c},{s},{J:.17g},{a:.17g}" for d, c, s, J, a in rows]
    _write(_out_dir(config), "compare.csv", "\n".join(lines) + "\n")
    status = EXIT_OK
    for name, spec in domains:
        dom = [r for r in rows if r[0] == name]
        for r in dom:
            if r[1] in config.solvers:
                print(f"{name}: {r[1]} J = {r[3]:.10g}")
        if spec.kind == "disk":
            ok = dom[-1][1] == "annulus"
            print(f"{name}: annulus has the lowest J: {'PASS' if ok else 'FAIL'}")
            status = status if ok else EXIT_CHECK
    if benchmark:
        best = {}
        for d, c, _, J, _ in rows:
            if c == "oracle":
                best[d] = J
        print("oracle ordering: " + " > ".join(sorted(best, key=lambda d: -best[d])))
    return status


def _mesh_raster(mesh, h):
    """Cells of about the mesh size; finer rasters only resolve the element staircase."""
    extent = mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)
    return tuple(max(1, int(round(e / h))) for e in extent)


def cmd_symcheck(config):
    """Rasterise the oracle control and score its symmetry, convexity and star shape."""
    if config.domain.kind not in ("rectangle", "disk"):
        print(f"symcheck supports rectangle and disk domains, not {config.domain.kind}",
              file=sys.stderr)
        return EXIT_CONFIG
    mesh = generate_mesh(config.domain)
    u = solve_exact(mesh, config.params).control
    nx, ny = config.raster or _mesh_raster(mesh, config.domain.h)
    g = rasterize_control(mesh, u, nx, ny)
    tol = config.symcheck
    checks = [
        ("asymmetry_x", check_axis_symmetry(g, "x") / g.cell_area, tol.axis, "cell areas"),
        ("asymmetry_y", check_axis_symmetry(g, "y") / g.cell_area, tol.axis, "cell areas"),
        ("convexity_gap_x", check_directional_convexity(g, "x"), tol.gap, "cells"),
        ("convexity_gap_y", check_directional_convexity(g, "y"), tol.gap, "cells"),
        ("star_violation", check_star_shaped(g), tol.star, "fraction"),
    ]
    if config.domain.kind == "disk":
        L = config.params.L
        diff = ball_symmetric_difference(mesh, u, schwarz_radius(L, 2))
        checks.append(("ball_symdiff", diff / L if L > 0 else 0.0, tol.disk, "fraction of L"))
    ok = True
    for name, value, limit, unit in checks:
        passed = value <= limit
        ok &= passed
        print(f"{name} = {value:.6g} {unit} (tol {limit:g}) {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK


def build_parser():
    parser = argparse.ArgumentParser(prog="cropopt",
                                     description="Optimal crop-field intervention zones.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("mesh", "generate and dump the mesh"),
                       ("solve", "solve for the optimal control"),
                       ("compare", "rank optimal, annulus and random controls"),
                       ("symcheck", "check symmetry of the optimal zone")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path, help="override output_dir from the config")
        if name == "compare":
            p.add_argument("--benchmark", action="store_true",
                           help="compare all four benchmark fields")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is not None:
        config = dataclasses.replace(config, output_dir=args.out)
    commands = {"mesh": cmd_mesh, "solve": cmd_solve, "symcheck": cmd_symcheck,
                "compare": lambda c: cmd_compare(c, benchmark=args.benchmark)}
    try:
        return commands[args.command](config)
    except (InvalidSpecError, BudgetError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, DivergenceError, AssemblyError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
