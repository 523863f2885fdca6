"""Stationary problem and classification of long-time limits.

Omega-limit points have constant ``mu`` and ``sigma`` and an order parameter
that solves ``-Lap u + beta(u) + lam'(u) = mu_s``.  With a double obstacle
and a ``p`` vanishing only at +-1 the limit is either a pure phase or satisfies
``sigma_s = gamma * mu_s``.  Pure phases are recognized inside a ``10 eps``
collar because the Yosida dynamics overshoot [-1, 1] by O(eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from . import grid as g
from .diagnostics import steady_indicators
from .errors import NewtonDivergence
from .potentials import PotentialSpec, beta_eps, beta_eps_prime, lambda_prime, lambda_second
from .stepper import SolverConfig, State

__all__ = [
    "StationaryProblem",
    "OmegaBranch",
    "OmegaClass",
    "solve_stationary",
    "stationary_residual",
    "classify_omega",
    "increment_norm",
    "is_steady",
    "detect_convergence",
]


@dataclass
class StationaryProblem:
    mu_s: float
    potential: PotentialSpec
    grid: g.Grid
    initial_guess: np.ndarray


class OmegaBranch(str, Enum):
    MIXED = "mixed"
    PURE_PLUS = "pure_plus"
    PURE_MINUS = "pure_minus"
    NOT_STEADY = "not_steady"


@dataclass
class OmegaClass:
    branch: OmegaBranch
    sigma_eq_gamma_mu: bool | None = None
    gap: float = math.nan  # |mean(sigma) - gamma mean(mu)|


def stationary_residual(grid, potential, u, mu_s):
    return (-g.laplacian_neumann(grid, u) + beta_eps(potential, u)
            + lambda_prime(potential, u) - mu_s)


def solve_stationary(prob: StationaryProblem, tol: float, max_iter: int = 50,
                     method: str = "cosine_transform"):
    """Damped Newton for ``-Lap u + beta_eps(u) + lam'(u) = mu_s``.

    ``lam'`` is taken at the current iterate.  Several stationary solutions
    coexist in general; the one returned is the Newton basin of
    ``prob.initial_guess``.  ``method`` selects the Helmholtz solver used as
    preconditioner for the GMRES inner solve.
    """
    grid, pot, mu_s = prob.grid, prob.potential, prob.mu_s
    shape, n = grid.shape, grid.size
    u = np.array(prob.initial_guess, dtype=float).reshape(shape)
    F = stationary_residual(grid, pot, u, mu_s)
    res = float(np.max(np.abs(F)))

    for _ in range(max_iter):
        if res <= tol:
            return u
        d = beta_eps_prime(pot, u) + lambda_second(pot, u)
        A = LinearOperator(
            (n, n),
            matvec=lambda v: (-g.laplacian_neumann(grid, v.reshape(shape)) + d * v.reshape(shape)).ravel(),
            dtype=float,
        )
        shift = max(abs(float(np.mean(d))), 1e-6)
        M = LinearOperator(
            (n, n),
            matvec=lambda v: g.solve_helmholtz(grid, shift, 1.0, v.reshape(shape), tol=1e-12,
                                               method=method).ravel(),
            dtype=float,
        )
        du, _ = gmres(A, -F.ravel(), rtol=1e-12, atol=1e-3 * tol, restart=80, maxiter=50, M=M)
        du = du.reshape(shape)

        step = 1.0
        for _ in range(11):
            ut = u + step * du
            Ft = stationary_residual(grid, pot, ut, mu_s)
            rt = float(np.max(np.abs(Ft)))
            if rt < res:
                break
            step *= 0.5
        else:
            raise NewtonDivergence(f"stationary Newton stalled at residual {res:.3e}")
        u, F, res = ut, Ft, rt
    if res <= tol:
        return u
    raise NewtonDivergence(f"stationary Newton residual {res:.3e} above {tol:.1e}")


def classify_omega(state: State, cfg: SolverConfig, tol: float) -> OmegaClass:
    """Sort a (candidate) limit state into the pure-phase / mixed trichotomy."""
    ind = steady_indicators(state, cfg)
    osc = max(float(np.ptp(state.mu)), float(np.ptp(state.sigma)))
    if ind.max() > tol or osc > tol:
        return OmegaClass(OmegaBranch.NOT_STEADY)
    grid = state.grid
    gap = abs(g.mean(grid, state.sigma) - cfg.gamma * g.mean(grid, state.mu))
    collar = 10.0 * cfg.potential.eps + tol
    if np.max(np.abs(state.u - 1.0)) <= collar:
        return OmegaClass(OmegaBranch.PURE_PLUS, gap=gap)
    if np.max(np.abs(state.u + 1.0)) <= collar:
        return OmegaClass(OmegaBranch.PURE_MINUS, gap=gap)
    return OmegaClass(OmegaBranch.MIXED, sigma_eq_gamma_mu=gap <= tol, gap=gap)


def increment_norm(prev: State, cur: State) -> float:
    """``||(mu, u, sigma)_n - (mu, u, sigma)_{n-1}||_2 / dt``."""
    dt = cur.t - prev.t
    grid = cur.grid
    sq = sum(g.l2_norm(grid, a - b) ** 2 for a, b in zip(cur.fields(), prev.fields()))
    return math.sqrt(sq) / dt


def is_steady(prev: State | None, cur: State, cfg: SolverConfig, threshold: float) -> bool:
    if steady_indicators(cur, cfg).max() > threshold:
        return False
    return prev is None or increment_norm(prev, cur) <= threshold


def detect_convergence(history, cfg: SolverConfig, threshold: float = 1e-6):
    """First state of ``history`` whose indicators and time increment are below ``threshold``.

    The first state is judged by the increment to its successor.  Returns
    ``None`` if the trajectory never settles.
    """
    history = list(history)
    if not history:
        raise ValueError("history is empty")
    for i, cur in enumerate(history):
        if i == 0:
            nxt = history[1] if len(history) > 1 else None
            ok = steady_indicators(cur, cfg).max() <= threshold and (
                nxt is None or increment_norm(cur, nxt) <= threshold
            )
        else:
            ok = is_steady(history[i - 1], cur, cfg, threshold)
        if ok:
            return cur
    return None
