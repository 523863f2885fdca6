"""Monitored quantities: mass, energies, dissipation, steadiness and a priori norms."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import grid as g
from .errors import InsufficientHistory
from .potentials import beta_eps, lambda_prime, p_value, w_eps_value
from .stepper import SolverConfig, State

__all__ = [
    "DiagnosticsRecord",
    "SteadyIndicators",
    "energy_intro",
    "energy_gamma",
    "mass",
    "dissipation",
    "reaction",
    "steady_indicators",
    "diagnostics",
    "apriori_norm_report",
    "FIRST_ESTIMATE_KEYS",
]

FIRST_ESTIMATE_KEYS = (
    "sqrt_alpha_mu_Linf_L2",
    "grad_mu_L2_L2",
    "sqrt_alpha_ut_L2_L2",
    "u_Linf_H1",
    "W_eps_Linf_L1",
    "sigma_Linf_L2",
    "grad_sigma_L2_L2",
    "reaction_dissipation_L2_L2",
)


@dataclass
class DiagnosticsRecord:
    t: float
    mass: float
    energy_intro: float
    energy_gamma: float
    dissipation: float
    reaction_l2: float
    grad_mu_l2: float
    grad_sigma_l2: float
    steady_residual_u: float
    osc_mu: float
    osc_sigma: float
    newton_iters: int = 0
    linear_iters: int = 0

    def as_dict(self):
        return asdict(self)


@dataclass
class SteadyIndicators:
    grad_mu_l2: float
    grad_sigma_l2: float
    reaction_l2: float
    steady_residual_u: float

    def max(self) -> float:
        return max(self.grad_mu_l2, self.grad_sigma_l2, self.reaction_l2, self.steady_residual_u)


def _potential_energy(state: State, cfg: SolverConfig) -> float:
    return g.integrate(state.grid, w_eps_value(cfg.potential, state.u))


def energy_intro(state: State, cfg: SolverConfig) -> float:
    """``int(|grad u|^2/2 + W_eps(u) + alpha mu^2/2 + sigma^2/2)``."""
    grid = state.grid
    return (
        0.5 * g.grad_sq_integral(grid, state.u)
        + _potential_energy(state, cfg)
        + 0.5 * cfg.alpha * g.integrate(grid, state.mu ** 2)
        + 0.5 * g.integrate(grid, state.sigma ** 2)
    )


def energy_gamma(state: State, cfg: SolverConfig) -> float:
    """Lyapunov functional with the nutrient weighted by ``1/gamma``.

    This is the quantity that the scheme dissipates step by step.
    """
    grid = state.grid
    return (
        0.5 * cfg.alpha * g.integrate(grid, state.mu ** 2)
        + g.integrate(grid, state.sigma ** 2) / (2.0 * cfg.gamma)
        + 0.5 * g.grad_sq_integral(grid, state.u)
        + _potential_energy(state, cfg)
    )


def mass(state: State, cfg: SolverConfig) -> float:
    return g.integrate(state.grid, cfg.alpha * state.mu + state.u + state.sigma)


def reaction(state: State, cfg: SolverConfig):
    """Pointwise reaction term ``p(u) (sigma - gamma mu)``."""
    return p_value(cfg.proliferation, cfg.potential, state.u) * (state.sigma - cfg.gamma * state.mu)


def dissipation(state: State, cfg: SolverConfig, previous: State | None = None) -> float:
    grid = state.grid
    out = g.grad_sq_integral(grid, state.mu) + g.grad_sq_integral(grid, state.sigma) / cfg.gamma
    if previous is not None:
        dt = state.t - previous.t
        if dt > 0.0:
            out += cfg.alpha * g.integrate(grid, ((state.u - previous.u) / dt) ** 2)
    return out


def steady_indicators(state: State, cfg: SolverConfig) -> SteadyIndicators:
    grid = state.grid
    lap_u = g.laplacian_neumann(grid, state.u)
    stationary = (-lap_u + beta_eps(cfg.potential, state.u) + lambda_prime(cfg.potential, state.u)
                  - g.mean(grid, state.mu))
    return SteadyIndicators(
        grad_mu_l2=math.sqrt(g.grad_sq_integral(grid, state.mu)),
        grad_sigma_l2=math.sqrt(g.grad_sq_integral(grid, state.sigma)),
        reaction_l2=g.l2_norm(grid, reaction(state, cfg)),
        steady_residual_u=g.l2_norm(grid, stationary),
    )


def diagnostics(state: State, cfg: SolverConfig, previous: State | None = None,
                stats=None) -> DiagnosticsRecord:
    """Full record for one time level (``previous`` enables the ``u_t`` term)."""
    ind = steady_indicators(state, cfg)
    return DiagnosticsRecord(
        t=state.t,
        mass=mass(state, cfg),
        energy_intro=energy_intro(state, cfg),
        energy_gamma=energy_gamma(state, cfg),
        dissipation=dissipation(state, cfg, previous),
        reaction_l2=ind.reaction_l2,
        grad_mu_l2=ind.grad_mu_l2,
        grad_sigma_l2=ind.grad_sigma_l2,
        steady_residual_u=ind.steady_residual_u,
        osc_mu=float(np.ptp(state.mu)),
        osc_sigma=float(np.ptp(state.sigma)),
        newton_iters=0 if stats is None else stats.newton_iters,
        linear_iters=0 if stats is None else stats.linear_iters,
    )


def _trapezoid(values, dt):
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return 0.0
    return float(dt * (v.sum() - 0.5 * (v[0] + v[-1])))


def apriori_norm_report(history, cfg: SolverConfig) -> dict:
    """Discrete-in-time versions of the first a priori estimate's norms.

    ``L^inf`` in time is the max over snapshots, ``L^2`` in time uses the
    trapezoid rule on the (uniform) snapshot spacing, and ``u_t`` is a
    backward difference.  The keys in :data:`FIRST_ESTIMATE_KEYS` are the
    terms of the energy estimate, all bounded uniformly in ``alpha``; the
    remaining keys (reaction, ``sigma_t``, ``sigma`` in H1) come from the
    follow-up nutrient estimates.
    """
    history = list(history)
    if len(history) < 2:
        raise InsufficientHistory("a priori norms need at least two snapshots")
    grid = history[0].grid
    dt = history[1].t - history[0].t
    a = cfg.alpha

    mu_l2 = [g.l2_norm(grid, s.mu) for s in history]
    grad_mu_sq = [g.grad_sq_integral(grid, s.mu) for s in history]
    grad_sigma_sq = [g.grad_sq_integral(grid, s.sigma) for s in history]
    sigma_l2 = [g.l2_norm(grid, s.sigma) for s in history]
    u_v = [math.sqrt(g.l2_norm(grid, s.u) ** 2 + g.grad_sq_integral(grid, s.u)) for s in history]
    sigma_v = [math.sqrt(sigma_l2[i] ** 2 + grad_sigma_sq[i]) for i in range(len(history))]
    w_l1 = [g.integrate(grid, np.abs(w_eps_value(cfg.potential, s.u))) for s in history]
    react = [reaction(s, cfg) for s in history]
    react_sq = [g.integrate(grid, r * r) for r in react]
    pot = [p_value(cfg.proliferation, cfg.potential, s.u) for s in history]
    weighted_sq = [
        g.integrate(grid, pk * (math.sqrt(cfg.gamma) * s.mu - s.sigma / math.sqrt(cfg.gamma)) ** 2)
        for pk, s in zip(pot, history)
    ]
    ut_sq = [0.0] + [
        g.integrate(grid, ((history[i].u - history[i - 1].u) / dt) ** 2) for i in range(1, len(history))
    ]
    st_sq = [0.0] + [
        g.integrate(grid, ((history[i].sigma - history[i - 1].sigma) / dt) ** 2)
        for i in range(1, len(history))
    ]
    # backward differences live on intervals, so integrate them as a Riemann sum
    ut_int = float(dt * np.sum(ut_sq[1:]))
    st_int = float(dt * np.sum(st_sq[1:]))

    return {
        "sqrt_alpha_mu_Linf_L2": math.sqrt(a) * max(mu_l2),
        "grad_mu_L2_L2": math.sqrt(_trapezoid(grad_mu_sq, dt)),
        "sqrt_alpha_ut_L2_L2": math.sqrt(a * ut_int),
        "u_Linf_H1": max(u_v),
        "W_eps_Linf_L1": max(w_l1),
        "sigma_Linf_L2": max(sigma_l2),
        "grad_sigma_L2_L2": math.sqrt(_trapezoid(grad_sigma_sq, dt)),
        "reaction_dissipation_L2_L2": math.sqrt(_trapezoid(weighted_sq, dt)),
        "R_L2_L2": math.sqrt(_trapezoid(react_sq, dt)),
        "sigma_t_L2_L2": math.sqrt(st_int),
        "sigma_Linf_H1": max(sigma_v),
        "t_start": history[0].t,
        "t_end": history[-1].t,
        "snapshots": len(history),
    }
