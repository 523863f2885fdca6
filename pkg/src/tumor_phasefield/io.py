"""Run configuration files, binary snapshots and CSV time series.

Configuration is plain ``key = value`` text with ``#`` comments and dotted
keys::

    alpha = 0.1
    gamma = 1
    potential.kind = quartic
    potential.eps = 0.01
    grid.n = 64
    grid.length = 1
    t_end = 1

Unknown and duplicate keys are errors.  Snapshots are little-endian binary
(magic ``PFTG1``); time series are CSV with 17 significant digits so that
every float64 survives a round trip.
"""

from __future__ import annotations

import csv
import math
import os
import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import FormatError, GridMismatch, ParseError, ValidationError
from .grid import Grid
from .initial import InitSpec
from .potentials import PotentialSpec, ProliferationSpec
from .stepper import SolverConfig, State

__all__ = [
    "RunConfig",
    "parse_config",
    "load_config",
    "serialize_config",
    "write_snapshot",
    "read_snapshot",
    "TIMESERIES_HEADER",
    "append_timeseries",
    "write_timeseries_header",
    "read_timeseries",
]

MAGIC = b"PFTG1"

TIMESERIES_HEADER = (
    "t,mass,energy_intro,energy_gamma,dissipation,reaction_l2,grad_mu_l2,"
    "grad_sigma_l2,steady_residual_u,osc_mu,osc_sigma,newton_iters,linear_iters"
)
_COLUMNS = TIMESERIES_HEADER.split(",")
_INT_COLUMNS = {"newton_iters", "linear_iters"}


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run."""

    solver: SolverConfig
    grid: Grid
    init: InitSpec = field(default_factory=InitSpec)
    t_end: float = 1.0
    snapshot_every: int = 0
    seed: int = 0
    output_dir: str = "run"
    steady_threshold: float = 0.0

    def __post_init__(self):
        if not self.t_end > 0.0:
            raise ValidationError(f"t_end must be > 0, got {self.t_end}")
        if self.snapshot_every < 0:
            raise ValidationError("snapshot_every must be >= 0")
        if self.steady_threshold < 0.0:
            raise ValidationError("steady_threshold must be >= 0")

    def replace(self, **changes) -> "RunConfig":
        return replace(self, **changes)


# key -> (section, attribute, type); section None means RunConfig itself
_KEYS = {
    "alpha": ("solver", "alpha", float),
    "gamma": ("solver", "gamma", float),
    "dt": ("solver", "dt", float),
    "tol_newton": ("solver", "tol_newton", float),
    "tol_lin": ("solver", "tol_lin", float),
    "max_newton": ("solver", "max_newton", int),
    "max_halvings": ("solver", "max_halvings", int),
    "solver.kind": ("solver", "linear_solver", str),
    "potential.kind": ("potential", "kind", str),
    "potential.eps": ("potential", "eps", float),
    "potential.kappa": ("potential", "kappa", float),
    "proliferation.kind": ("proliferation", "kind", str),
    "proliferation.value": ("proliferation", "value", float),
    "proliferation.p0": ("proliferation", "p0", float),
    "grid.dim": ("grid", "dim", int),
    "grid.n": ("grid", "n", "ints"),
    "grid.length": ("grid", "length", "floats"),
    "init.kind": ("init", "kind", str),
    "init.mean": ("init", "mean", float),
    "init.amplitude": ("init", "amplitude", float),
    "init.x0": ("init", "x0", float),
    "init.width": ("init", "width", float),
    "init.mu0": ("init", "mu0", float),
    "init.sigma0": ("init", "sigma0", float),
    "init.path": ("init", "path", str),
    "t_end": (None, "t_end", float),
    "snapshot_every": (None, "snapshot_every", int),
    "seed": (None, "seed", int),
    "output_dir": (None, "output_dir", str),
    "steady_threshold": (None, "steady_threshold", float),
}
_REQUIRED = ("alpha", "gamma", "dt", "potential.kind", "grid.n", "grid.length", "t_end")


def _convert(raw: str, kind, lineno: int):
    try:
        if kind is float:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        if kind is int:
            return int(raw)
        if kind == "ints":
            return tuple(int(x) for x in raw.split(","))
        if kind == "floats":
            return tuple(float(x) for x in raw.split(","))
        if kind is bool:
            if raw.lower() not in ("true", "false"):
                raise ValueError
            return raw.lower() == "true"
        return raw
    except ValueError:
        raise ParseError(f"cannot parse {raw!r}", lineno) from None


def parse_config(text: str) -> RunConfig:
    """Parse configuration text into a validated :class:`RunConfig`."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", lineno)
        if raw == "":
            raise ParseError(f"missing value for {key!r}", lineno)
        values[key] = _convert(raw, _KEYS[key][2], lineno)

    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ValidationError(f"missing required keys: {', '.join(missing)}")

    sections = {"solver": {}, "potential": {}, "proliferation": {}, "grid": {}, "init": {}, None: {}}
    for key, value in values.items():
        section, attr, _ = _KEYS[key]
        sections[section][attr] = value

    try:
        potential = PotentialSpec(**sections["potential"])
        proliferation = ProliferationSpec(**sections["proliferation"])
        dim = sections["grid"].pop("dim", None)
        grid = Grid(**sections["grid"])
        if dim is not None and dim != grid.dim:
            raise ValidationError(f"grid.dim = {dim} but grid.n has {grid.dim} entries")
        solver = SolverConfig(potential=potential, proliferation=proliferation, **sections["solver"])
        init = InitSpec(**sections["init"])
        return RunConfig(solver=solver, grid=grid, init=init, **sections[None])
    except ValidationError:
        raise
    except ValueError as exc:  # bad enum value
        raise ValidationError(str(exc)) from None


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    if hasattr(value, "value"):  # enums
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(run: RunConfig) -> str:
    """Inverse of :func:`parse_config` (every key written explicitly)."""
    objects = {
        "solver": run.solver,
        "potential": run.solver.potential,
        "proliferation": run.solver.proliferation,
        "grid": run.grid,
        "init": run.init,
        None: run,
    }
    lines = []
    for key, (section, attr, _) in _KEYS.items():
        value = getattr(objects[section], attr)
        if key == "init.path" and not value:
            continue
        lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# snapshots
# ---------------------------------------------------------------------------

def write_snapshot(state: State, path):
    grid = state.grid
    parts = [
        MAGIC,
        struct.pack("<B", grid.dim),
        struct.pack(f"<{grid.dim}Q", *grid.n),
        struct.pack(f"<{grid.dim}d", *grid.length),
        struct.pack("<d", state.t),
    ]
    for f in state.fields():
        parts.append(np.ascontiguousarray(f.ravel(order="F"), dtype="<f8").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def read_snapshot(path, grid: Grid | None = None) -> State:
    """Read a snapshot; if ``grid`` is given the file must match it exactly."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:5] != MAGIC:
        raise FormatError(f"{path}: bad magic")
    off = 5
    if len(data) < off + 1:
        raise FormatError(f"{path}: truncated header")
    dim = data[off]
    off += 1
    if dim not in (1, 2, 3):
        raise FormatError(f"{path}: invalid dimension {dim}")
    head = 16 * dim + 8
    if len(data) < off + head:
        raise FormatError(f"{path}: truncated header")
    n = struct.unpack_from(f"<{dim}Q", data, off)
    off += 8 * dim
    length = struct.unpack_from(f"<{dim}d", data, off)
    off += 8 * dim
    (t,) = struct.unpack_from("<d", data, off)
    off += 8
    size = int(np.prod(n))
    if len(data) != off + 3 * 8 * size:
        raise FormatError(f"{path}: expected {3 * size} values, file size does not match")
    try:
        file_grid = Grid(n, length)
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if grid is not None and (grid.n != file_grid.n or grid.length != file_grid.length):
        raise GridMismatch(f"{path}: snapshot grid {file_grid} differs from {grid}")
    arrays = []
    for k in range(3):
        flat = np.frombuffer(data, dtype="<f8", count=size, offset=off + 8 * size * k)
        arrays.append(flat.astype(float).reshape(n, order="F"))
    return State(file_grid, t, *arrays)


# ---------------------------------------------------------------------------
# time series
# ---------------------------------------------------------------------------

def append_timeseries(record, path):
    """Append one diagnostics record; writes the header if the file is new or empty."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    row = record.as_dict() if hasattr(record, "as_dict") else dict(record)
    cells = []
    for col in _COLUMNS:
        v = row[col]
        cells.append(str(int(v)) if col in _INT_COLUMNS else format(float(v), ".17g"))
    with open(path, "a", encoding="utf-8", newline="") as fh:
        if fresh:
            fh.write(TIMESERIES_HEADER + "\n")
        fh.write(",".join(cells) + "\n")


def write_timeseries_header(path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TIMESERIES_HEADER + "\n")


def read_timeseries(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _COLUMNS:
            raise FormatError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            {k: (int(v) if k in _INT_COLUMNS else float(v)) for k, v in row.items()}
            for row in reader
        ]

