"""Command-line interface.

Exit status: 0 on success, 1 when a check fails or the solver gives up,
2 on usage errors (bad arguments or an invalid configuration file).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import grid as g
from .diagnostics import mass
from .errors import PhaseFieldError, ParseError, ValidationError
from .experiments import (
    energy_violations,
    probe_continuous_dependence,
    run_relaxation,
    sweep_alpha,
    sweep_eps,
)
from .initial import make_initial_state
from .io import load_config, read_snapshot, write_snapshot
from .potentials import PotentialKind
from .steady_state import StationaryProblem, solve_stationary, stationary_residual
from .stepper import State


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    parser = _Parser(prog="tumor-phasefield", description="Viscous Cahn-Hilliard tumor-growth solver")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("run", help="integrate a configuration and write a run directory")
    p.add_argument("--config", required=True)
    p.add_argument("--resume", help="snapshot to continue from")
    p.add_argument("--output-dir", help="override output_dir from the config")

    p = sub.add_parser("steady", help="solve the stationary problem for a given mu_s")
    p.add_argument("--config", required=True)
    p.add_argument("--mu-s", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--output", help="snapshot file for the solution")

    p = sub.add_parser("sweep-alpha", help="alpha -> 0 sweep against the limit problem")
    p.add_argument("--config", required=True)
    p.add_argument("--alphas", type=_floats, required=True)

    p = sub.add_parser("sweep-eps", help="Moreau envelope values for decreasing eps")
    p.add_argument("--potential", required=True, choices=[k.value for k in PotentialKind])
    p.add_argument("--eps", type=_floats, required=True)
    p.add_argument("--points", type=_floats, required=True)
    p.add_argument("--kappa", type=float, default=0.0)

    p = sub.add_parser("validate", help="run the invariant suite on a short trajectory")
    p.add_argument("--config", required=True)
    p.add_argument("--steps", type=int, default=50)

    p = sub.add_parser("probe-dependence", help="continuous dependence on initial data")
    p.add_argument("--config", required=True)
    p.add_argument("--deltas", type=_floats, required=True)
    return parser


def _dump(report, path=None):
    text = json.dumps(report, indent=2, sort_keys=True, default=float)
    print(text)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _cmd_run(args):
    run = load_config(args.config)
    if args.output_dir:
        run = run.replace(output_dir=args.output_dir)
    initial = read_snapshot(args.resume, run.grid) if args.resume else None
    result = run_relaxation(run, initial_state=initial)
    last = result.records[-1]
    status = "steady" if result.steady is not None else "completed"
    print(f"{status}: {result.steps} steps to t={last.t:.6g}, mass={last.mass:.17g}, "
          f"energy_gamma={last.energy_gamma:.17g} -> {result.output_dir}")
    return 0


def _cmd_steady(args):
    run = load_config(args.config)
    guess = make_initial_state(run.grid, run.init, run.seed).u
    prob = StationaryProblem(args.mu_s, run.solver.potential, run.grid, guess)
    u = solve_stationary(prob, args.tol, method=run.solver.linear_solver)
    res = float(np.max(np.abs(stationary_residual(run.grid, run.solver.potential, u, args.mu_s))))
    out = args.output or os.path.join(run.output_dir, "stationary.pftg")
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    state = State(run.grid, 0.0, run.grid.full(args.mu_s), u, run.grid.full(run.solver.gamma * args.mu_s))
    write_snapshot(state, out)
    print(f"residual={res:.3e} min(u)={u.min():.17g} max(u)={u.max():.17g} mean(u)={g.mean(run.grid, u):.17g} -> {out}")
    return 0


def _cmd_sweep_alpha(args):
    run = load_config(args.config)
    report = sweep_alpha(run, args.alphas)
    ok = report["d_u_monotone"] and report["norms_bounded"] and report["limit_residual_max"] <= run.solver.tol_newton
    report.pop("limit_residuals")
    _dump(report, os.path.join(run.output_dir, "sweep_alpha.json"))
    return 0 if ok else 1


def _cmd_sweep_eps(args):
    report = sweep_eps(args.potential, args.eps, args.points, args.kappa)
    _dump(report)
    return 0 if report["monotone"] and report["bounded"] else 1


def _cmd_probe(args):
    run = load_config(args.config)
    report = probe_continuous_dependence(run, args.deltas)
    _dump(report, os.path.join(run.output_dir, "probe_dependence.json"))
    return 0 if report["finite"] and report["linear_response"] else 1


def validate_run(run, steps: int = 50):
    """Invariant checks on a short trajectory; returns ``[(name, passed, detail), ...]``."""
    cfg = run.solver
    steps = max(1, min(steps, int(round(run.t_end / cfg.dt))))
    short = run.replace(t_end=steps * cfg.dt, steady_threshold=0.0, snapshot_every=0)
    result = run_relaxation(short, write=False)
    checks = []

    finite = result.final.is_finite()
    checks.append(("finite fields", finite, f"t={result.final.t:.6g}"))

    masses = [r.mass for r in result.records]
    drift = max(abs(m - masses[0]) for m in masses)
    bound = 100 * steps * cfg.tol_lin * (1 + abs(masses[0]))
    checks.append(("mass conservation", drift <= bound, f"drift={drift:.3e} bound={bound:.3e}"))

    viol = energy_violations(result.records, cfg.dt)
    checks.append(("energy dissipation", len(viol) <= 0.01 * steps, f"{len(viol)} of {steps} steps increase"))

    checks.append(("newton residual", result.max_newton_residual <= cfg.tol_newton,
                   f"max={result.max_newton_residual:.3e}"))

    rng = np.random.default_rng(run.seed)
    grid = run.grid
    worst_sym = worst_sbp = worst_def = 0.0
    for _ in range(20):
        f = rng.standard_normal(grid.shape)
        h = rng.standard_normal(grid.shape)
        lf, lh = g.laplacian_neumann(grid, f), g.laplacian_neumann(grid, h)
        scale = g.l2_norm(grid, f) * g.l2_norm(grid, h)
        worst_sym = max(worst_sym, abs(g.integrate(grid, f * lh) - g.integrate(grid, h * lf)) / scale)
        fl = g.integrate(grid, f * lf)
        worst_def = max(worst_def, fl / g.l2_norm(grid, f) ** 2)
        gs = g.grad_sq_integral(grid, f)
        worst_sbp = max(worst_sbp, abs(-fl - gs) / gs)
    checks.append(("laplacian symmetry", worst_sym <= 1e-12, f"{worst_sym:.2e}"))
    checks.append(("laplacian semidefinite", worst_def <= 1e-12, f"{worst_def:.2e}"))
    checks.append(("summation by parts", worst_sbp <= 1e-12, f"{worst_sbp:.2e}"))

    if cfg.potential.kind is PotentialKind.DOUBLE_OBSTACLE:
        over = float(np.max(np.maximum(np.abs(result.final.u) - 1.0, 0.0)))
        checks.append(("obstacle overshoot", True,
                       f"{over:.3e}" + (" WARNING exceeds 10*eps" if over > 10 * cfg.potential.eps else "")))
    checks.append(("initial mass", True, f"{mass(make_initial_state(grid, run.init, run.seed), cfg):.17g}"))
    return checks


def _cmd_validate(args):
    run = load_config(args.config)
    checks = validate_run(run, args.steps)
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return 0 if all(c[1] for c in checks) else 1


_COMMANDS = {
    "run": _cmd_run,
    "steady": _cmd_steady,
    "sweep-alpha": _cmd_sweep_alpha,
    "sweep-eps": _cmd_sweep_eps,
    "validate": _cmd_validate,
    "probe-dependence": _cmd_probe,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PhaseFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
