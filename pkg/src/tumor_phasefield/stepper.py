"""Implicit time stepping for the viscous tumor-growth system and its alpha=0 limit.

One step of size ``tau`` solves, for ``(mu, u, sigma)`` at the new time,

    alpha (mu - mu_n)/tau + (u - u_n)/tau - Lap mu = R
    mu = alpha (u - u_n)/tau - Lap u + beta_eps(u) + lam'(u_n)
    (sigma - sigma_n)/tau - Lap sigma = -R,        R = p(u_n) (sigma - gamma mu)

with the same discrete ``R`` in the first and last equation, so that
``int(alpha mu + u + sigma)`` is conserved up to the linear-solver residual.
The limit scheme (``alpha = 0``) replaces the second equation by
``mu = -Lap u + u**3 - u_n`` (convex part implicit, concave part explicit).

The nonlinear system is solved by damped Newton.  Each linearization is
applied matrix-free and solved with GMRES, preconditioned by the exact
inverse of the constant-coefficient system (mean ``p`` and mean diagonal)
in the cosine basis.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from . import grid as g
from .errors import NewtonDivergence, SingularSystem, UnsupportedPotential, ValidationError
from .potentials import (
    PotentialKind,
    PotentialSpec,
    ProliferationSpec,
    beta_eps,
    beta_eps_prime,
    lambda_prime,
    p_value,
)

__all__ = [
    "SolverConfig",
    "State",
    "StepStats",
    "newton_solve",
    "step_viscous",
    "step_limit",
    "advance",
    "VISCOUS",
    "LIMIT",
]

VISCOUS = "viscous"
LIMIT = "limit"

MAX_DAMPING_HALVINGS = 10


@dataclass(frozen=True)
class SolverConfig:
    """Model constants and discretization/tolerance parameters.

    The reaction term is always treated with ``p`` frozen at the old time
    level and ``sigma - gamma*mu`` implicit.
    """

    alpha: float = 0.1
    gamma: float = 1.0
    potential: PotentialSpec = field(default_factory=PotentialSpec)
    proliferation: ProliferationSpec = field(default_factory=ProliferationSpec)
    dt: float = 1e-3
    tol_newton: float = 1e-10
    tol_lin: float = 1e-11
    max_newton: int = 25
    max_halvings: int = 6
    linear_solver: str = "cg"

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in [0,1) (hypothesis alpha in (0,1), gamma > 0); got {self.alpha}")
        if not self.gamma > 0.0:
            raise ValidationError(f"gamma must be > 0 (hypothesis alpha in (0,1), gamma > 0); got {self.gamma}")
        if not self.dt > 0.0:
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if not (self.tol_newton > 0.0 and self.tol_lin > 0.0):
            raise ValidationError("tolerances must be > 0")
        if self.max_newton < 1:
            raise ValidationError("max_newton must be >= 1")
        if self.linear_solver not in ("cg", "cosine_transform"):
            raise ValidationError(f"unknown linear solver {self.linear_solver!r}")

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class State:
    """Chemical potential, order parameter and nutrient on one grid at time ``t``."""

    grid: g.Grid
    t: float
    mu: np.ndarray
    u: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        for name in ("mu", "u", "sigma"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.grid.shape:
                raise ValidationError(f"{name} has shape {arr.shape}, grid expects {self.grid.shape}")
            setattr(self, name, arr)

    @classmethod
    def constant(cls, grid, mu=0.0, u=0.0, sigma=0.0, t=0.0):
        return cls(grid, t, grid.full(mu), grid.full(u), grid.full(sigma))

    def copy(self) -> "State":
        return State(self.grid, self.t, self.mu.copy(), self.u.copy(), self.sigma.copy())

    def fields(self):
        return self.mu, self.u, self.sigma

    def is_finite(self) -> bool:
        return all(np.isfinite(f).all() for f in self.fields())


@dataclass
class StepStats:
    newton_iters: int = 0
    residual: float = 0.0
    linear_iters: int = 0
    halvings: int = 0
    residual_history: list = field(default_factory=list)

    def merged(self, other: "StepStats") -> "StepStats":
        return StepStats(
            self.newton_iters + other.newton_iters,
            max(self.residual, other.residual),
            self.linear_iters + other.linear_iters,
            max(self.halvings, other.halvings),
            self.residual_history + other.residual_history,
        )


class _System:
    """Residual and Jacobian of one time step."""

    def __init__(self, old: State, cfg: SolverConfig, scheme: str):
        self.old = old
        self.cfg = cfg
        self.scheme = scheme
        self.grid = old.grid
        self.shape = old.grid.shape
        self.n = old.grid.size
        self.p = p_value(cfg.proliferation, cfg.potential, old.u)
        if scheme == VISCOUS:
            self.explicit = lambda_prime(cfg.potential, old.u)
        else:
            self.explicit = -old.u
        self.lap_eigs = -g.neumann_eigenvalues(self.grid)

    def split(self, x):
        n = self.n
        return (x[:n].reshape(self.shape), x[n:2 * n].reshape(self.shape),
                x[2 * n:].reshape(self.shape))

    def residual(self, mu, u, sigma):
        cfg, old, grid = self.cfg, self.old, self.grid
        a, tau = cfg.alpha, cfg.dt
        lap = g.laplacian_neumann
        react = self.p * (sigma - cfg.gamma * mu)
        f1 = a * (mu - old.mu) + (u - old.u) - tau * lap(grid, mu) - tau * react
        if self.scheme == VISCOUS:
            f2 = (mu - a * (u - old.u) / tau + lap(grid, u)
                  - beta_eps(cfg.potential, u) - self.explicit)
        else:
            f2 = mu + lap(grid, u) - u * u * u - self.explicit
        f3 = (sigma - old.sigma) - tau * lap(grid, sigma) + tau * react
        return np.concatenate([f1.ravel(), f2.ravel(), f3.ravel()])

    def diagonal(self, u):
        """Pointwise derivative of the implicit nonlinearity in the second equation."""
        cfg = self.cfg
        if self.scheme == VISCOUS:
            return cfg.alpha / cfg.dt + beta_eps_prime(cfg.potential, u)
        return 3.0 * u * u

    def jacobian(self, u):
        cfg, grid = self.cfg, self.grid
        a, tau, gam = cfg.alpha, cfg.dt, cfg.gamma
        p = self.p
        d = self.diagonal(u)
        lap = g.laplacian_neumann

        def matvec(v):
            dmu, du, dsig = self.split(np.asarray(v, dtype=float).ravel())
            dreact = p * (dsig - gam * dmu)
            j1 = a * dmu + du - tau * lap(grid, dmu) - tau * dreact
            j2 = dmu + lap(grid, du) - d * du
            j3 = dsig - tau * lap(grid, dsig) + tau * dreact
            return np.concatenate([j1.ravel(), j2.ravel(), j3.ravel()])

        N = 3 * self.n
        return LinearOperator((N, N), matvec=matvec, dtype=float), d

    def preconditioner(self, d):
        cfg = self.cfg
        a, tau, gam = cfg.alpha, cfg.dt, cfg.gamma
        pbar = float(np.mean(self.p))
        dbar = float(np.mean(d))
        L = self.lap_eigs.ravel()
        blocks = np.zeros((L.size, 3, 3))
        blocks[:, 0, 0] = a + tau * L + tau * gam * pbar
        blocks[:, 0, 1] = 1.0
        blocks[:, 0, 2] = -tau * pbar
        blocks[:, 1, 0] = 1.0
        blocks[:, 1, 1] = -(L + dbar)
        blocks[:, 2, 0] = -tau * gam * pbar
        blocks[:, 2, 2] = 1.0 + tau * L + tau * pbar
        inv = np.linalg.inv(blocks)

        def apply(v):
            parts = self.split(np.asarray(v, dtype=float).ravel())
            hat = np.stack([g.dct_forward(f).ravel() for f in parts], axis=1)
            sol = np.einsum("kij,kj->ki", inv, hat)
            out = [g.dct_inverse(sol[:, i].reshape(self.shape)).ravel() for i in range(3)]
            return np.concatenate(out)

        N = 3 * self.n
        return LinearOperator((N, N), matvec=apply, dtype=float)


def _krylov(A, M, rhs, rtol, atol):
    count = [0]

    def cb(_):
        count[0] += 1

    x, info = gmres(A, rhs, rtol=rtol, atol=atol, restart=60, maxiter=50, M=M,
                    callback=cb, callback_type="pr_norm")
    if not np.all(np.isfinite(x)):
        raise SingularSystem("GMRES produced non-finite values")
    return x, count[0], info


def newton_solve(state: State, cfg: SolverConfig, scheme: str = VISCOUS):
    """Damped Newton for one step, warm-started from ``state``.

    Returns ``((mu, u, sigma), StepStats)``.  The residual is measured in the
    max norm with the mass-balance equations written in increment form
    (multiplied by ``tau``).
    """
    system = _System(state, cfg, scheme)
    mu, u, sigma = state.mu.copy(), state.u.copy(), state.sigma.copy()
    F = system.residual(mu, u, sigma)
    res = float(np.max(np.abs(F)))
    stats = StepStats(residual=res, residual_history=[res])
    x = np.concatenate([mu.ravel(), u.ravel(), sigma.ravel()])

    for _ in range(cfg.max_newton):
        if res <= cfg.tol_newton:
            break
        A, d = system.jacobian(u)
        M = system.preconditioner(d)
        b = -F
        dx, its, _ = _krylov(A, M, b, cfg.tol_lin, 1e-3 * cfg.tol_lin * cfg.tol_newton)
        stats.linear_iters += its

        step = 1.0
        for _ in range(MAX_DAMPING_HALVINGS + 1):
            xt = x + step * dx
            Ft = system.residual(*system.split(xt))
            rt = float(np.max(np.abs(Ft)))
            if rt < res:
                break
            step *= 0.5
        else:
            raise NewtonDivergence(
                f"Newton residual stalled at {res:.3e} (tolerance {cfg.tol_newton:.1e})"
            )
        x, F, res = xt, Ft, rt
        mu, u, sigma = (f.copy() for f in system.split(x))
        stats.newton_iters += 1
        stats.residual_history.append(res)
    stats.residual = res
    if not res <= cfg.tol_newton:
        raise NewtonDivergence(
            f"Newton residual {res:.3e} above {cfg.tol_newton:.1e} after {cfg.max_newton} iterations"
        )
    return (mu, u, sigma), stats


def step_viscous(state: State, cfg: SolverConfig):
    """Advance the viscous system (``alpha > 0``) by one step ``cfg.dt``."""
    if not cfg.alpha > 0.0:
        raise ValueError("step_viscous needs alpha > 0; use step_limit for alpha = 0")
    (mu, u, sigma), stats = newton_solve(state, cfg, VISCOUS)
    return State(state.grid, state.t + cfg.dt, mu, u, sigma), stats


def step_limit(state: State, cfg: SolverConfig):
    """Advance the ``alpha = 0`` Cahn-Hilliard-type limit problem by one step."""
    if cfg.alpha != 0.0:
        raise ValueError("step_limit needs alpha = 0")
    if cfg.potential.kind is not PotentialKind.QUARTIC:
        raise UnsupportedPotential("the alpha = 0 limit scheme needs the smooth quartic potential")
    (mu, u, sigma), stats = newton_solve(state, cfg, LIMIT)
    return State(state.grid, state.t + cfg.dt, mu, u, sigma), stats


def advance(state: State, cfg: SolverConfig, _depth: int = 0):
    """One step of ``cfg.dt``; on Newton failure the step is split in halves.

    At most ``cfg.max_halvings`` nested halvings are tried before the
    :class:`NewtonDivergence` is re-raised.
    """
    step = step_viscous if cfg.alpha > 0.0 else step_limit
    try:
        return step(state, cfg)
    except NewtonDivergence:
        if _depth >= cfg.max_halvings:
            raise
    half = cfg.replace(dt=0.5 * cfg.dt)
    mid, st1 = advance(state, half, _depth + 1)
    end, st2 = advance(mid, half, _depth + 1)
    stats = st1.merged(st2)
    stats.halvings = max(stats.halvings, _depth + 1)
    return end, stats


def limit_residual(new: State, old: State, cfg: SolverConfig) -> float:
    """Discrete L2 norm of ``mu + Lap u - (u**3 - u_old)`` for a limit-scheme step."""
    r = new.mu + g.laplacian_neumann(new.grid, new.u) - (new.u ** 3 - old.u)
    return g.l2_norm(new.grid, r)

