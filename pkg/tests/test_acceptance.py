"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Scenarios are spelled out as config text so that every number used here is
visible in one place.  Tolerances are the contract values; none of them is
relaxed to make a run pass.
"""

import math
import time

import numpy as np

from acceptance_report import report
from oracles import scalar_trajectory
from tumor_phasefield import grid as g
from tumor_phasefield.diagnostics import FIRST_ESTIMATE_KEYS
from tumor_phasefield.experiments import (
    energy_violations,
    probe_continuous_dependence,
    run_relaxation,
    sweep_alpha,
    sweep_eps,
)
from tumor_phasefield.grid import Grid
from tumor_phasefield.io import parse_config
from tumor_phasefield.potentials import PotentialSpec, ProliferationSpec
from tumor_phasefield.steady_state import OmegaBranch, classify_omega
from tumor_phasefield.stepper import SolverConfig, State, step_limit, step_viscous

STANDARD = """\
alpha = 0.1
gamma = 1
dt = 0.001
tol_newton = 1e-10
tol_lin = 1e-11
potential.kind = quartic
potential.eps = 0.01
proliferation.kind = sqrt_w
proliferation.p0 = 1
grid.n = 64
grid.length = 1
init.kind = tanh
init.x0 = 0.5
init.width = 0.1
init.mu0 = 0
init.sigma0 = 0.5
t_end = 1
"""

LONG_RUN = STANDARD.replace("dt = 0.001", "dt = 0.01").replace("t_end = 1", "t_end = 200") + \
    "steady_threshold = 1e-6\n"

OBSTACLE = LONG_RUN.replace("potential.kind = quartic", "potential.kind = double_obstacle").replace(
    "potential.eps = 0.01", "potential.eps = 0.001")


def standard(**kw):
    return parse_config(STANDARD).replace(**kw)


def test_criterion_1_mass_conservation():
    run = standard()
    t0 = time.perf_counter()
    res = run_relaxation(run, write=False)
    elapsed = time.perf_counter() - t0
    m = [r.mass for r in res.records]
    drift = max(abs(x - m[0]) for x in m)
    bound = 1e-7 * (1 + abs(m[0]))
    ok = res.steps == 1000 and drift <= bound and elapsed < 30.0
    report(1, "mass conservation", ok,
           f"max|M_n-M_0|={drift:.2e} (bound {bound:.2e}), {res.steps} steps in {elapsed:.1f}s")
    assert ok


def test_criterion_2_energy_dissipation():
    t0 = time.perf_counter()
    coarse = run_relaxation(standard(), write=False)
    fine_run = standard(solver=standard().solver.replace(dt=1e-4))
    fine = run_relaxation(fine_run, write=False)
    elapsed = time.perf_counter() - t0
    v_coarse = energy_violations(coarse.records, 1e-3)
    v_fine = energy_violations(fine.records, 1e-4)
    frac = 1.0 - len(v_coarse) / coarse.steps
    ok = frac >= 0.99 and not v_fine and fine.steps == 10000 and elapsed < 120.0
    report(2, "energy dissipation", ok,
           f"tau=1e-3: {100 * frac:.1f}% of {coarse.steps} steps nonincreasing; "
           f"tau=1e-4: {len(v_fine)} violations in {fine.steps} steps; {elapsed:.1f}s")
    assert ok


def test_criterion_3_omega_limit():
    run = parse_config(LONG_RUN)
    res = run_relaxation(run, write=False)
    rec = res.records[-1]
    checks = {
        "osc_mu": rec.osc_mu,
        "osc_sigma": rec.osc_sigma,
        "steady_residual_u": rec.steady_residual_u,
        "reaction_l2": rec.reaction_l2,
    }
    ok = res.steady is not None and all(v <= 1e-5 for v in checks.values())
    detail = ", ".join(f"{k}={v:.1e}" for k, v in checks.items())
    report(3, "omega-limit structure", ok, f"steady at t={rec.t:.2f}; {detail}")
    assert ok


def test_criterion_4_trichotomy():
    scenarios = {
        "interface": "init.kind = tanh",
        "noise": "init.kind = noise\ninit.mean = 0.2\ninit.amplitude = 0.5",
        "biased": "init.kind = constant\ninit.mean = 0.9\ninit.mu0 = 2\ninit.sigma0 = 2",
    }
    outcome, ok = [], True
    for name, init in scenarios.items():
        text = OBSTACLE.replace("init.kind = tanh", init)
        if name == "biased":
            text = text.replace("init.mu0 = 0\n", "").replace("init.sigma0 = 0.5\n", "")
        run = parse_config(text)
        res = run_relaxation(run, write=False)
        cls = classify_omega(res.final, run.solver, 1e-5)
        mu_s = g.mean(run.grid, res.final.mu)
        ok &= res.steady is not None and cls.branch is not OmegaBranch.NOT_STEADY
        if cls.branch is OmegaBranch.MIXED:
            ok &= bool(cls.sigma_eq_gamma_mu) and cls.gap <= 1e-5
        if name == "biased":
            ok &= cls.branch is OmegaBranch.PURE_PLUS and mu_s > 0
        outcome.append(f"{name}->{cls.branch.value} (gap {cls.gap:.1e}, mu_s {mu_s:.3f})")
    report(4, "trichotomy", ok, "; ".join(outcome))
    assert ok


def test_criterion_5_yosida_monotonicity():
    eps = [0.2, 0.1, 0.05, 0.025]
    points = np.linspace(-2.5, 2.5, 50)
    parts, ok = [], True
    for kind in ("quartic", "logarithmic", "double_obstacle"):
        rep = sweep_eps(kind, eps, points)
        ok &= rep["monotone"] and rep["bounded"] and len(rep["points"]) == 50
        parts.append(f"{kind}: monotone={rep['monotone']} bounded={rep['bounded']}")
        if kind == "double_obstacle":
            err = rep["closed_form_max_error"]
            ok &= err <= 1e-12
            parts.append(f"closed-form error {err:.1e}")
    report(5, "Yosida monotonicity", ok, "; ".join(parts))
    assert ok


def test_criterion_6_alpha_limit():
    run = standard()
    t0 = time.perf_counter()
    rep = sweep_alpha(run, [0.2, 0.1, 0.05, 0.025])
    elapsed = time.perf_counter() - t0
    spread = max(rep["norm_spread"][k] for k in FIRST_ESTIMATE_KEYS)
    ok = (rep["d_u_monotone"] and rep["limit_residual_max"] <= run.solver.tol_newton
          and rep["norms_bounded"] and elapsed < 300.0)
    d = ", ".join(f"{x:.2e}" for x in rep["d_u"])
    report(6, "alpha -> 0", ok,
           f"d(alpha)=[{d}], limit residual max {rep['limit_residual_max']:.1e}, "
           f"max norm spread {spread:.2f}x, {elapsed:.1f}s")
    assert ok


def test_criterion_7_operator_suite():
    rng = np.random.default_rng(2024)
    grids = [Grid((64,), 1.0), Grid((8, 8), (1.0, 2.0)), Grid((4, 4, 4), (1.0, 1.0, 3.0)),
             Grid((40, 25), (2.0, 1.0))]
    worst = {"symmetry": 0.0, "definite": 0.0, "sbp": 0.0, "spectrum": 0.0, "null": 0.0}
    ranks_ok = True
    for grid in grids:
        for _ in range(200):
            f = rng.standard_normal(grid.shape)
            h = rng.standard_normal(grid.shape)
            lf, lh = g.laplacian_neumann(grid, f), g.laplacian_neumann(grid, h)
            nf, nh = g.l2_norm(grid, f), g.l2_norm(grid, h)
            worst["symmetry"] = max(worst["symmetry"],
                                    abs(g.integrate(grid, f * lh) - g.integrate(grid, h * lf)) / (nf * nh))
            ff = g.integrate(grid, f * lf)
            worst["definite"] = max(worst["definite"], ff / nf ** 2)
            gs = g.grad_sq_integral(grid, f)
            worst["sbp"] = max(worst["sbp"], abs(-ff - gs) / gs)
        c = grid.full(rng.standard_normal())
        worst["null"] = max(worst["null"], float(np.max(np.abs(g.laplacian_neumann(grid, c)))))
        if grid.size <= 64:
            A = g.laplacian_matrix(grid).toarray()
            ranks_ok &= np.linalg.matrix_rank(A) == grid.size - 1
            dense = np.sort(np.linalg.eigvalsh(A))
            ours = np.sort(g.neumann_eigenvalues(grid).ravel())
            worst["spectrum"] = max(worst["spectrum"], float(np.max(np.abs(dense - ours))))
    ok = (ranks_ok and worst["spectrum"] <= 1e-10
          and all(worst[k] <= 1e-12 for k in ("symmetry", "definite", "sbp", "null")))
    report(7, "operator suite", ok,
           ", ".join(f"{k}={v:.1e}" for k, v in worst.items()) + f", kernel rank ok={ranks_ok}")
    assert ok


def test_criterion_8_scalar_oracle():
    grid = Grid((8, 6), (1.0, 1.0))
    viscous = SolverConfig(alpha=0.1, gamma=1.5, potential=PotentialSpec("quartic", 0.01),
                           proliferation=ProliferationSpec("sqrt_w", p0=1.0), dt=0.01)
    limit = viscous.replace(alpha=0.0)
    init = (0.2, 0.4, 0.8)
    errors = {}
    for name, cfg, step in (("viscous", viscous, step_viscous), ("limit", limit, step_limit)):
        ref = scalar_trajectory(*init, cfg, 100, limit=(step is step_limit))
        state, worst = State.constant(grid, *init), 0.0
        for n in range(1, 101):
            state, _ = step(state, cfg)
            for fld, val in zip(state.fields(), ref[n]):
                worst = max(worst, float(np.max(np.abs(fld - val))))
        errors[name] = worst
    ok = all(v <= 1e-10 for v in errors.values())
    report(8, "scalar ODE oracle", ok, ", ".join(f"{k} max error {v:.1e}" for k, v in errors.items()))
    assert ok


def test_criterion_9_continuous_dependence():
    rep = probe_continuous_dependence(standard(), [1e-3, 1e-4, 1e-5])
    ok = rep["finite"] and all(0.5 <= r <= 2.0 for r in rep["ratios"]) and all(
        math.isfinite(k) for k in rep["K"])
    report(9, "continuous dependence", ok,
           "K=[" + ", ".join(f"{k:.6g}" for k in rep["K"]) + "], ratios=["
           + ", ".join(f"{r:.4f}" for r in rep["ratios"]) + "]")
    assert ok
