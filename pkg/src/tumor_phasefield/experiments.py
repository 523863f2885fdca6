"""Drivers for relaxation runs, parameter sweeps and the continuous-dependence probe.

All drivers are deterministic: the same configuration and seed give
bit-identical outputs.  Reports are plain dicts that embed the serialized
configuration they were produced from.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import grid as g
from .diagnostics import FIRST_ESTIMATE_KEYS, apriori_norm_report, diagnostics
from .errors import ValidationError
from .initial import check_admissible, make_initial_state
from .io import RunConfig, append_timeseries, serialize_config, write_snapshot, write_timeseries_header
from .potentials import PotentialKind, PotentialSpec, beta_eps_moreau, beta_hat
from .steady_state import is_steady
from .stepper import SolverConfig, State, advance, limit_residual

__all__ = [
    "RunResult",
    "step_count",
    "trajectory",
    "run_relaxation",
    "energy_violations",
    "sweep_alpha",
    "sweep_eps",
    "probe_continuous_dependence",
    "unit_perturbation",
]


@dataclass
class RunResult:
    final: State
    records: list
    steps: int
    output_dir: str | None = None
    steady: State | None = None
    history: list = field(default_factory=list)
    max_newton_residual: float = 0.0
    limit_residuals: list = field(default_factory=list)


def step_count(t_start: float, t_end: float, dt: float) -> int:
    n = (t_end - t_start) / dt
    k = int(round(n))
    if k < 1 or abs(n - k) > 1e-9 * max(1.0, n):
        raise ValidationError(f"(t_end - t) = {t_end - t_start} is not a positive multiple of dt = {dt}")
    return k


def trajectory(state: State, cfg: SolverConfig, steps: int, keep_every: int = 1):
    """Run ``steps`` steps from ``state``; return (final state, kept states, max Newton residual).

    The kept list includes the initial state and every ``keep_every``-th state.
    """
    kept = [state] if keep_every else []
    worst = 0.0
    t0 = state.t
    for k in range(1, steps + 1):
        state, stats = advance(state, cfg)
        state.t = t0 + k * cfg.dt  # no drift from repeated addition
        worst = max(worst, stats.residual)
        if keep_every and k % keep_every == 0:
            kept.append(state)
    return state, kept, worst


def run_relaxation(run: RunConfig, initial_state: State | None = None, write: bool = True,
                   keep_every: int = 0) -> RunResult:
    """Integrate to ``run.t_end`` and write the run directory.

    The directory holds ``config.txt``, ``timeseries.csv`` (one row per time
    level, the initial one included), ``snapshots/`` (every
    ``run.snapshot_every`` steps, plus the final state, numbered by global
    step ``round(t/dt)``) and ``final.json``.
    With ``run.steady_threshold > 0`` the run stops at the first state that
    :func:`~tumor_phasefield.steady_state.is_steady` accepts.
    """
    cfg = run.solver
    state = initial_state if initial_state is not None else make_initial_state(run.grid, run.init, run.seed)
    if initial_state is None:
        check_admissible(state, cfg.potential)
    steps = step_count(state.t, run.t_end, cfg.dt)

    out = run.output_dir if write else None
    ts_path = snap_dir = None
    if out:
        snap_dir = os.path.join(out, "snapshots")
        os.makedirs(snap_dir, exist_ok=True)
        with open(os.path.join(out, "config.txt"), "w", encoding="utf-8") as fh:
            fh.write(serialize_config(run))
        ts_path = os.path.join(out, "timeseries.csv")
        write_timeseries_header(ts_path)

    def snapshot(s, k):
        if snap_dir:
            write_snapshot(s, os.path.join(snap_dir, f"snap_{k:07d}.pftg"))

    # snapshot names use the global step index so resumed runs continue the numbering
    k0 = int(round(state.t / cfg.dt))
    rec = diagnostics(state, cfg)
    records = [rec]
    if ts_path:
        append_timeseries(rec, ts_path)
    snapshot(state, k0)
    history = [state] if keep_every else []
    limit_res = []
    worst = 0.0
    steady = None
    t0 = state.t
    k = 0
    for k in range(1, steps + 1):
        prev = state
        state, stats = advance(prev, cfg)
        state.t = t0 + k * cfg.dt
        worst = max(worst, stats.residual)
        if cfg.alpha == 0.0:
            limit_res.append(limit_residual(state, prev, cfg))
        rec = diagnostics(state, cfg, prev, stats)
        records.append(rec)
        if ts_path:
            append_timeseries(rec, ts_path)
        if run.snapshot_every and (k0 + k) % run.snapshot_every == 0:
            snapshot(state, k0 + k)
        if keep_every and k % keep_every == 0:
            history.append(state)
        if run.steady_threshold > 0.0 and is_steady(prev, state, cfg, run.steady_threshold):
            steady = state
            break
    if not (run.snapshot_every and (k0 + k) % run.snapshot_every == 0):
        snapshot(state, k0 + k)

    if out:
        final = {
            "status": "steady" if steady is not None else "completed",
            "steps": k,
            "max_newton_residual": worst,
            "final": records[-1].as_dict(),
        }
        with open(os.path.join(out, "final.json"), "w", encoding="utf-8") as fh:
            json.dump(final, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return RunResult(state, records, k, out, steady, history, worst, limit_res)


def energy_violations(records, dt: float, slack_factor: float = 5.0) -> list:
    """Indices ``n`` with ``E(n) > E(n-1) + max(1e-10, slack_factor dt^2 |E(0)|)``."""
    energies = [r.energy_gamma for r in records]
    slack = max(1e-10, slack_factor * dt * dt * abs(energies[0]))
    return [n for n in range(1, len(energies)) if energies[n] > energies[n - 1] + slack]


def _common_state(run: RunConfig):
    state = make_initial_state(run.grid, run.init, run.seed)
    check_admissible(state, run.solver.potential)
    return state


def sweep_alpha(run: RunConfig, alphas, norm_every: int = 1) -> dict:
    """Compare viscous runs for decreasing ``alpha`` with the ``alpha = 0`` limit at ``run.t_end``."""
    alphas = [float(a) for a in alphas]
    if any(a <= 0.0 for a in alphas) or any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ValidationError("alphas must be positive and strictly descending")
    if run.solver.potential.kind is not PotentialKind.QUARTIC:
        raise ValidationError("the alpha sweep needs the quartic potential")
    init = _common_state(run)
    steps = step_count(init.t, run.t_end, run.solver.dt)

    limit_cfg = run.solver.replace(alpha=0.0)
    limit_final, limit_res = init, []
    for _ in range(steps):
        prev = limit_final
        limit_final, _ = advance(prev, limit_cfg)
        limit_res.append(limit_residual(limit_final, prev, limit_cfg))
    grid = run.grid

    members = []
    for a in alphas:
        cfg = run.solver.replace(alpha=a)
        final, kept, worst = trajectory(init, cfg, steps, keep_every=norm_every)
        members.append({
            "alpha": a,
            "d_u": g.l2_norm(grid, final.u - limit_final.u),
            "d_sigma": g.l2_norm(grid, final.sigma - limit_final.sigma),
            "d_mu": g.l2_norm(grid, final.mu - limit_final.mu),
            "max_newton_residual": worst,
            "norms": apriori_norm_report(kept, cfg),
        })

    d = [m["d_u"] for m in members]
    monotone = all(b <= 1.1 * a for a, b in zip(d, d[1:]))
    spread = {}
    for key in FIRST_ESTIMATE_KEYS:
        vals = [m["norms"][key] for m in members]
        lo, hi = min(vals), max(vals)
        spread[key] = hi / lo if lo > 0 else (1.0 if hi == 0 else math.inf)
    return {
        "config": serialize_config(run),
        "t_end": run.t_end,
        "members": members,
        "d_u": d,
        "d_u_monotone": monotone,
        "limit_residual_max": max(limit_res) if limit_res else 0.0,
        "limit_residuals": limit_res,
        "norm_spread": spread,
        "norms_bounded": all(v < 2.0 for v in spread.values()),
    }


def sweep_eps(kind, eps_list, points, kappa: float = 0.0) -> dict:
    """Moreau envelope values for decreasing ``eps`` at each probe point.

    Checks that every column is nondecreasing as ``eps`` decreases and stays
    below ``beta_hat`` where that is finite.
    """
    eps_list = [float(e) for e in eps_list]
    if any(not 0.0 < e < 1.0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValidationError("eps values must lie in (0,1) and be strictly descending")
    points = np.asarray(points, dtype=float)
    specs = [PotentialSpec(kind, e, kappa) for e in eps_list]
    table = np.array([beta_eps_moreau(s, points) for s in specs])
    upper = beta_hat(specs[0], points)
    tol = 1e-13 * (1.0 + np.abs(table))
    monotone = bool(np.all(table[1:] >= table[:-1] - tol[1:]))
    finite = np.isfinite(upper)
    bounded = bool(np.all(table[:, finite] <= upper[finite] + tol[:, finite]))
    report = {
        "kind": PotentialKind(kind).value,
        "eps": eps_list,
        "points": points.tolist(),
        "table": table.tolist(),
        "beta_hat": upper.tolist(),
        "monotone": monotone,
        "bounded": bounded,
    }
    if PotentialKind(kind) is PotentialKind.DOUBLE_OBSTACLE:
        exact = np.array([(np.abs(points) - np.clip(np.abs(points), 0, 1)) ** 2 / (2 * e) for e in eps_list])
        report["closed_form_max_error"] = float(np.max(np.abs(table - exact)))
    return report


def unit_perturbation(grid: g.Grid):
    """Fixed smooth field ``cos(pi x / L)`` scaled to unit discrete L2 norm."""
    x = grid.coordinates()[0]
    phi = np.cos(np.pi * x / grid.length[0])
    return phi / g.l2_norm(grid, phi)


def _triple_distance(a: State, b: State) -> float:
    grid = a.grid
    return math.sqrt(sum(g.l2_norm(grid, x - y) ** 2 for x, y in zip(a.fields(), b.fields())))


def probe_continuous_dependence(run: RunConfig, deltas) -> dict:
    """Amplification ``K(delta) = ||difference at t_end|| / delta`` for perturbed ``u0``."""
    deltas = [float(d) for d in deltas]
    if any(d < 0.0 for d in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValidationError("deltas must be nonnegative and strictly descending")
    cfg = run.solver
    base = _common_state(run)
    steps = step_count(base.t, run.t_end, cfg.dt)
    ref, _, _ = trajectory(base, cfg, steps, keep_every=0)
    phi = unit_perturbation(run.grid)
    ks, dists = [], []
    for delta in deltas:
        pert = State(base.grid, base.t, base.mu.copy(), base.u + delta * phi, base.sigma.copy())
        final, _, _ = trajectory(pert, cfg, steps, keep_every=0)
        dist = _triple_distance(final, ref)
        dists.append(dist)
        ks.append(dist / delta if delta > 0 else 0.0)
    ratios = [a / b if b > 0 else math.inf for a, b in zip(ks, ks[1:])]
    return {
        "config": serialize_config(run),
        "deltas": deltas,
        "distances": dists,
        "K": ks,
        "ratios": ratios,
        "finite": all(math.isfinite(k) for k in ks),
        "linear_response": all(0.5 <= r <= 2.0 for r in ratios),
    }

