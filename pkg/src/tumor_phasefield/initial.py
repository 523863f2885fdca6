"""Built-in initial data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInitialData, ValidationError
from .grid import Grid
from .potentials import PotentialKind, PotentialSpec
from .stepper import State

__all__ = ["InitSpec", "make_initial_state", "check_admissible"]

INIT_KINDS = ("constant", "noise", "tanh", "file")


@dataclass(frozen=True)
class InitSpec:
    """Initial data; ``mu`` and ``sigma`` always start constant (``mu0``, ``sigma0``).

    ``constant``: u = mean.  ``noise``: u = mean + uniform noise in
    [-amplitude, amplitude] drawn from the run seed.  ``tanh``: planar
    interface u = tanh((x - x0)/width) along the first axis.  ``file``:
    all three fields read from a snapshot at ``path``.
    """

    kind: str = "constant"
    mean: float = 0.0
    amplitude: float = 0.0
    x0: float = 0.5
    width: float = 0.1
    mu0: float = 0.0
    sigma0: float = 0.0
    path: str = ""

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise ValidationError(f"init.kind must be one of {INIT_KINDS}, got {self.kind!r}")
        if self.kind == "tanh" and not self.width > 0.0:
            raise ValidationError("init.width must be > 0")
        if self.kind == "file" and not self.path:
            raise ValidationError("init.kind = file needs init.path")
        if self.amplitude < 0.0:
            raise ValidationError("init.amplitude must be >= 0")


def check_admissible(state: State, potential: PotentialSpec):
    """Raise :class:`InvalidInitialData` unless ``beta_hat(u0)`` is finite everywhere."""
    if potential.kind in (PotentialKind.DOUBLE_OBSTACLE, PotentialKind.LOGARITHMIC):
        worst = float(np.max(np.abs(state.u)))
        if worst > 1.0:
            raise InvalidInitialData(
                f"|u0| reaches {worst:.6g} > 1, outside the domain of the {potential.kind.value} potential"
            )


def make_initial_state(grid: Grid, init: InitSpec, seed: int = 0) -> State:
    if init.kind == "file":
        from .io import read_snapshot

        return read_snapshot(init.path, grid)
    if init.kind == "constant":
        u = grid.full(init.mean)
    elif init.kind == "noise":
        rng = np.random.default_rng(seed)
        u = init.mean + rng.uniform(-init.amplitude, init.amplitude, size=grid.shape)
    else:
        x = grid.coordinates()[0]
        u = np.tanh((x - init.x0) / init.width)
    return State(grid, 0.0, grid.full(init.mu0), u, grid.full(init.sigma0))
