"""
Stationary profiles
===================

Solve -u'' + beta_eps(u) + lam'(u) = mu_s directly.  Several solutions
coexist; Newton returns the one whose basin holds the initial guess.
"""

import numpy as np

from tumor_phasefield import grid as g
from tumor_phasefield.grid import Grid
from tumor_phasefield.potentials import PotentialSpec
from tumor_phasefield.steady_state import StationaryProblem, solve_stationary, stationary_residual

# The quartic interface is about sqrt(2) wide, so use a box that can hold one.
grid = Grid((256,), (20.0,))
x = grid.coordinates()[0]

for kind in ("quartic", "double_obstacle"):
    pot = PotentialSpec(kind, 0.01)
    for label, guess in (("front", np.tanh(x - 10.0)), ("plateau", grid.full(0.95))):
        u = solve_stationary(StationaryProblem(0.0, pot, grid, guess), 1e-10)
        res = np.max(np.abs(stationary_residual(grid, pot, u, 0.0)))
        print(f"{kind:<16} {label:<8} min={u.min():+.4f} max={u.max():+.4f}"
              f" mean={g.mean(grid, u):+.4f} residual={res:.1e}")
