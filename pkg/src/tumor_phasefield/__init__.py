"""Finite-difference solver for a viscous Cahn-Hilliard tumor-growth system.

The model couples a chemical potential ``mu``, an order parameter ``u`` and a
nutrient ``sigma`` on a box with homogeneous Neumann conditions.  The package
provides the potentials (quartic, logarithmic, double obstacle) with their
Yosida regularization, grid operators, a mass-conserving Newton-Krylov time
stepper for ``alpha > 0`` and for the ``alpha = 0`` limit, diagnostics,
stationary solves and experiment drivers.
"""

from .errors import (
    FormatError,
    GridMismatch,
    IncompatiblePotential,
    InsufficientHistory,
    InvalidInitialData,
    NewtonDivergence,
    ParseError,
    PhaseFieldError,
    ResolventDivergence,
    SingularSystem,
    UnsupportedPotential,
    ValidationError,
)
from .grid import Grid
from .initial import InitSpec
from .io import RunConfig, parse_config, read_snapshot, serialize_config, write_snapshot
from .potentials import PotentialKind, PotentialSpec, ProliferationKind, ProliferationSpec
from .stepper import SolverConfig, State, StepStats, advance, step_limit, step_viscous

__version__ = "0.1.0"
