"""Command-line front end.

    logistic-threshold {validate,eig,curve,solve,sweep,verify} --config run.json --out DIR

Exit codes: 0 success, 1 mathematical failure (a hypothesis fails, a solver
does not converge, a check fails), 2 usage error.  Every command writes
``manifest.json`` listing its outputs with SHA-256 hashes.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config
from .diagnostics import (boundary_flux, decay_exponent, energy_identity, newton_comparison,
                          newtonian_potential, norms, profile_from_values)
from .eigen import principal_shifted, principal_weighted, refinement_bracket
from .errors import SolverError
from .grid import build_grid, grid_for_radius
from .io import Manifest, read_csv, write_csv, write_gnuplot, write_json
from .logistic import Extinct, bifurcation_sweep, solve_entire
from .problem import validate_absorption, validate_potential
from .threshold import estimate_big_lambda, lambda_curve

EXIT_OK, EXIT_MATH, EXIT_USAGE = 0, 1, 2
ENERGY_TOL = 1e-6
NEWTON_TOL = 1e-3


class CheckFailed(Exception):
    """A command ran but one of its checks failed (exit 1)."""


def _estimate(cfg, manifest, out):
    curve = lambda_curve(cfg.build_potential(), cfg.R_schedule, cfg.nodes_per_unit,
                         cfg.dimension, cfg.tolerances["tol"])
    manifest.add(write_csv(out / "curve.csv", ["R", "lambda1", "residual"],
                           [curve.radii, curve.lambda1, curve.residual]))
    manifest.add(write_gnuplot(out / "curve", curve.radii, curve.lambda1,
                               "principal eigenvalue on B_R", "R", "lambda1", "x"))
    estimate = estimate_big_lambda(curve)
    manifest.add(write_json(out / "estimate.json",
                            dict(estimate.to_dict(), resolution_failure=curve.resolution_failure,
                                 nodes_per_unit=curve.nodes_per_unit)))
    return curve, estimate


def cmd_validate(cfg, out, manifest):
    potential = cfg.build_potential()
    vrep = validate_potential(potential)
    manifest.add(write_json(out / "validation_potential.json", vrep.to_dict()))
    ok = vrep.passed
    if cfg.absorption_spec is not None:
        arep = validate_absorption(cfg.build_absorption(), potential.estimated_sup_norm())
        manifest.add(write_json(out / "validation_absorption.json", arep.to_dict()))
        ok = ok and arep.passed
    if not ok:
        raise CheckFailed("a checkable hypothesis failed; see the validation reports")


def cmd_eig(cfg, out, manifest):
    potential = cfg.build_potential()
    if cfg.node_count is not None:
        grid = build_grid(cfg.dimension, cfg.radius, cfg.node_count)
    else:
        grid = grid_for_radius(cfg.dimension, cfg.radius, cfg.nodes_per_unit)
    tol = cfg.tolerances["tol"]
    res = principal_weighted(grid, potential, tol)
    fine, extrapolated, err = refinement_bracket(cfg.dimension, cfg.radius, grid.node_count,
                                                 potential, tol)
    record = {"dimension": cfg.dimension, "radius": cfg.radius, "node_count": grid.node_count,
              "lambda1": res.lambda1, "residual": res.residual, "iterations": res.iterations,
              "refinement": {"lambda1_fine": fine, "extrapolated": extrapolated,
                             "error_estimate": err},
              "diagnostics": res.diagnostics}
    manifest.add(write_csv(out / "eigenvector.csv", ["r", "phi"], [grid.nodes, res.phi1]))
    manifest.add(write_gnuplot(out / "eigenvector", grid.nodes, res.phi1,
                               "principal eigenfunction", "r", "phi"))
    if cfg.lam is not None:
        sh = principal_shifted(grid, potential, cfg.lam, cfg.tolerances["eig_tol"])
        record["shifted"] = {"lambda": cfg.lam, "mu1": sh.mu1, "residual": sh.residual,
                             "iterations": sh.iterations}
        manifest.add(write_csv(out / "shifted_eigenvector.csv", ["r", "e1"], [grid.nodes, sh.e1]))
    manifest.add(write_json(out / "eig.json", record))


def cmd_curve(cfg, out, manifest):
    curve, _ = _estimate(cfg, manifest, out)
    if curve.resolution_failure:
        raise CheckFailed("lambda_1(R) is not monotone; raise nodes_per_unit")


def _lambda(cfg, manifest, out):
    if cfg.lam is not None:
        return cfg.lam, None
    if cfg.lambda_relative is None:
        raise ConfigError("this command needs 'lambda' or 'lambda_relative'")
    _, est = _estimate(cfg, manifest, out)
    return cfg.lambda_relative * est.value, est


def _profile_csv(path, profile):
    return write_csv(path, ["r", "u"], [profile.grid.nodes, profile.values])


def cmd_solve(cfg, out, manifest):
    potential, f = cfg.build_potential(), cfg.build_absorption()
    lam, est = _lambda(cfg, manifest, out)
    result = solve_entire(potential, f, lam, cfg.solve_schedule, cfg.solve_options())
    record = {"lambda": lam, "dimension": cfg.dimension, "nodes_per_unit": cfg.nodes_per_unit,
              "potential": cfg.potential_spec, "absorption": cfg.absorption_spec,
              "schedule": list(cfg.solve_schedule), "profile": "profile.csv",
              "lambda_estimate": None if est is None else est.to_dict()}
    if isinstance(result, Extinct):
        grid = grid_for_radius(cfg.dimension, cfg.solve_schedule[-1], cfg.nodes_per_unit)
        manifest.add(write_csv(out / "profile.csv", ["r", "u"],
                               [grid.nodes, np.zeros(grid.node_count)]))
        record.update(status="extinct", radius=grid.radius, reason=result.reason,
                      trajectory=result.trajectory)
        manifest.add(write_json(out / "solution.json", record))
        raise CheckFailed(f"extinct at lambda={lam}: {result.reason}")
    for p in result.profiles:
        manifest.add(_profile_csv(out / f"profile_R{p.grid.radius:g}.csv", p))
    final = result.final
    manifest.add(_profile_csv(out / "profile.csv", final))
    manifest.add(write_gnuplot(out / "profile", final.grid.nodes[final.values > 0],
                               final.values[final.values > 0], f"u at lambda={lam:.6g}",
                               "r", "u", "xy"))
    record.update(status="exists", radius=final.grid.radius, sup_norm=final.sup_norm,
                  residual=final.residual, stage_deltas=result.stage_deltas,
                  converged=result.converged, activation_R=result.activation_radius,
                  supersolution_constant=result.supersolution_constant,
                  supersolution_ok=result.supersolution_ok,
                  decay=None if result.decay is None else result.decay.to_dict(),
                  iterations=[p.iterations for p in result.profiles])
    manifest.add(write_json(out / "solution.json", record))


def cmd_sweep(cfg, out, manifest):
    potential, f = cfg.build_potential(), cfg.build_absorption()
    est = None
    if cfg.lambda_grid is not None:
        grid = cfg.lambda_grid
    elif cfg.lambda_grid_relative is not None:
        _, est = _estimate(cfg, manifest, out)
        grid = tuple(x * est.value for x in cfg.lambda_grid_relative)
    else:
        raise ConfigError("sweep needs 'lambda_grid' or 'lambda_grid_relative'")
    table = bifurcation_sweep(potential, f, grid, cfg.solve_schedule, cfg.solve_options())
    rows = table.rows
    nan = float("nan")
    manifest.add(write_csv(out / "sweep.csv",
                           ["lambda", "exists", "sup_norm", "iterations", "activation_R"],
                           [[r.lam for r in rows], [float(r.exists) for r in rows],
                            [r.sup_norm for r in rows], [r.iterations for r in rows],
                            [nan if r.activation_radius is None else r.activation_radius
                             for r in rows]]))
    for i, res in enumerate(table.results):
        if not isinstance(res, Extinct):
            for p in res.profiles:
                manifest.add(_profile_csv(out / f"profile_l{i:02d}_R{p.grid.radius:g}.csv", p))
    manifest.add(write_json(out / "sweep.json", {
        "lambda_emp": table.lambda_emp,
        "lambda_estimate": None if est is None else est.to_dict(),
        "rows": [vars(r) for r in rows]}))


def cmd_verify(cfg, out, manifest):
    if cfg.solution is None:
        raise ConfigError("verify needs 'solution' (a solution.json written by solve)")
    try:
        sol = json.loads(cfg.solution.read_text())
        _, data = read_csv(cfg.solution.parent / sol["profile"])
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read solution {cfg.solution}: {exc}") from exc
    from .config import build_absorption, build_potential

    potential = build_potential(sol["potential"], cfg.solution.parent)
    f = build_absorption(sol["absorption"])
    grid = build_grid(sol["dimension"], sol["radius"], data.shape[0])
    if not np.allclose(grid.nodes, data[:, 0], rtol=1e-12, atol=0.0):
        raise ConfigError("profile radii do not match a vertex-centred grid on the stated ball")
    profile = profile_from_values(grid, data[:, 1], lam=sol["lambda"])

    record = {"lambda": sol["lambda"], "radius": grid.radius, "node_count": grid.node_count,
              "status": sol.get("status")}
    try:
        decay = decay_exponent(profile)
    except ValueError as exc:
        record["decay"] = {"refused": str(exc)}
        manifest.add(write_json(out / "verify.json", record))
        raise CheckFailed(f"decay check refused: {exc}")
    record["decay"] = decay.to_dict()
    record["norms"] = norms(profile, potential, f).to_dict()
    record["boundary_flux"] = boundary_flux(profile)
    ident = energy_identity(profile, potential, f)
    record["energy_identity"] = vars(ident)
    newton = newtonian_potential(profile, potential)
    comp = newton_comparison(profile, potential)
    record["newtonian"] = {"residual": newton.residual, "boundary_value": newton.boundary_value,
                           "tail_bound": newton.tail_bound, "comparison": vars(comp)}
    checks = {"decay_bound": decay.bound_ok, "decay_rate": decay.passed,
              "energy_identity": ident.relative_gap <= ENERGY_TOL,
              "newton_residual": newton.residual <= NEWTON_TOL,
              "newton_comparison": comp.passed}
    record["checks"] = checks
    manifest.add(write_csv(out / "newton.csv", ["r", "v"], [grid.nodes, newton.values]))
    manifest.add(write_gnuplot(out / "newton", grid.nodes, newton.values,
                               "Newtonian potential of V+ u", "r", "v"))
    manifest.add(write_json(out / "verify.json", record))
    # the rate check is reported; the exit code follows the upper bound |u| <= C r^(2-N)
    failed = [k for k, v in checks.items() if not v and k != "decay_rate"]
    if failed:
        raise CheckFailed(f"checks failed: {', '.join(failed)}")


COMMANDS = {"validate": cmd_validate, "eig": cmd_eig, "curve": cmd_curve,
            "solve": cmd_solve, "sweep": cmd_sweep, "verify": cmd_verify}


def build_parser():
    parser = argparse.ArgumentParser(prog="logistic-threshold", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        p = sub.add_parser(name, help=(func.__doc__ or name).split("\n")[0])
        p.add_argument("--config", required=True, type=Path, help="JSON run config")
        p.add_argument("--out", required=True, type=Path, help="output directory")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(out, args.command, args.config)
    code = EXIT_OK
    try:
        COMMANDS[args.command](cfg, out, manifest)
    except ConfigError as exc:
        manifest.fail(str(exc))
        code = EXIT_USAGE
    except (CheckFailed, SolverError, ValueError) as exc:
        manifest.fail(f"{type(exc).__name__}: {exc}")
        code = EXIT_MATH
    manifest.write()
    if code:
        print(f"error: {manifest.error}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
