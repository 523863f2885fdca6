"""Cell-centered Cartesian grids with homogeneous Neumann operators.

Fields are plain numpy arrays of shape ``grid.shape`` (axis 0 is x).  The
boundary condition is imposed with mirror ghost cells, so every boundary face
carries zero flux and the discrete Laplacian has exact zero column sums.
The flat, x-fastest ordering used on disk is ``field.ravel(order="F")``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy.sparse.linalg import LinearOperator, cg

from .errors import SingularSystem, ValidationError

__all__ = [
    "Grid",
    "laplacian_neumann",
    "integrate",
    "mean",
    "l2_norm",
    "grad_sq_integral",
    "neumann_eigenvalues",
    "dct_forward",
    "dct_inverse",
    "solve_helmholtz",
    "laplacian_matrix",
]


@dataclass(frozen=True)
class Grid:
    """Uniform box ``prod_i (0, length_i)`` split into ``n_i`` cells per axis."""

    n: tuple
    length: tuple

    def __post_init__(self):
        n = tuple(int(k) for k in np.atleast_1d(self.n))
        length = tuple(float(x) for x in np.atleast_1d(self.length))
        if len(length) == 1 and len(n) > 1:
            length = length * len(n)
        if not 1 <= len(n) <= 3:
            raise ValidationError(f"grid dimension must be 1, 2 or 3, got {len(n)}")
        if len(length) != len(n):
            raise ValidationError("grid.n and grid.length must have the same number of entries")
        if any(k < 2 for k in n):
            raise ValidationError(f"each axis needs at least 2 cells, got {n}")
        if any(not (x > 0.0 and math.isfinite(x)) for x in length):
            raise ValidationError(f"axis lengths must be positive, got {length}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "length", length)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple:
        return self.n

    @property
    def h(self) -> tuple:
        return tuple(x / k for x, k in zip(self.length, self.n))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def volume(self) -> float:
        return float(np.prod(self.length))

    def coordinates(self):
        """Cell-center coordinates, one broadcastable array per axis."""
        axes = [(np.arange(k) + 0.5) * hk for k, hk in zip(self.n, self.h)]
        return np.meshgrid(*axes, indexing="ij")

    def zeros(self):
        return np.zeros(self.shape)

    def full(self, value):
        return np.full(self.shape, float(value))


def laplacian_neumann(grid: Grid, f):
    """Second-order ``2*dim+1``-point Laplacian with mirror ghosts."""
    f = np.asarray(f, dtype=float)
    out = np.zeros_like(f)
    for ax, h in enumerate(grid.h):
        flux = np.diff(f, axis=ax) / h
        pad = [(0, 0)] * f.ndim
        pad[ax] = (1, 1)
        out += np.diff(np.pad(flux, pad), axis=ax) / h
    return out


def integrate(grid: Grid, f) -> float:
    return float(np.sum(f) * grid.cell_volume)


def mean(grid: Grid, f) -> float:
    return integrate(grid, f) / grid.volume


def l2_norm(grid: Grid, f) -> float:
    """Discrete ``L^2(Omega)`` norm."""
    f = np.asarray(f, dtype=float)
    return math.sqrt(float(np.sum(f * f)) * grid.cell_volume)


def grad_sq_integral(grid: Grid, f) -> float:
    """Face-based ``int |grad f|^2``; equals ``-int f * laplacian(f)``."""
    f = np.asarray(f, dtype=float)
    total = 0.0
    for ax, h in enumerate(grid.h):
        d = np.diff(f, axis=ax) / h
        total += float(np.sum(d * d))
    return total * grid.cell_volume


def neumann_eigenvalues(grid: Grid):
    """Eigenvalues of :func:`laplacian_neumann`, indexed like a field (mode k at [k])."""
    lam = np.zeros(grid.shape)
    for ax, (k, h) in enumerate(zip(grid.n, grid.h)):
        shape = [1] * grid.dim
        shape[ax] = k
        lam = lam + ((2.0 / h**2) * (np.cos(np.pi * np.arange(k) / k) - 1.0)).reshape(shape)
    return lam


def dct_forward(f):
    """Orthonormal DCT-II; diagonalizes the mirror-ghost Neumann Laplacian."""
    return scipy.fft.dctn(f, type=2, norm="ortho")


def dct_inverse(fh):
    return scipy.fft.idctn(fh, type=2, norm="ortho")


def laplacian_matrix(grid: Grid):
    """Sparse matrix of the Laplacian acting on ``field.ravel(order="F")``."""
    import scipy.sparse as sp

    mats = []
    for k, h in zip(grid.n, grid.h):
        main = -2.0 * np.ones(k)
        main[0] = main[-1] = -1.0
        off = np.ones(k - 1)
        mats.append(sp.diags([off, main, off], [-1, 0, 1]) / h**2)
    eye = [sp.identity(k) for k in grid.n]
    total = None
    for ax in range(grid.dim):
        factors = [mats[ax] if j == ax else eye[j] for j in range(grid.dim)]
        term = factors[0]
        for fac in factors[1:]:
            # x-fastest ordering: later axes vary slowest
            term = sp.kron(fac, term)
        total = term if total is None else total + term
    return total.tocsr()


def _jacobi_diagonal(grid: Grid, a: float, b: float):
    diag = np.full(grid.shape, float(a))
    for ax, (k, h) in enumerate(zip(grid.n, grid.h)):
        line = np.full(k, 2.0 / h**2)
        line[0] = line[-1] = 1.0 / h**2
        shape = [1] * grid.dim
        shape[ax] = k
        diag = diag + b * line.reshape(shape)
    return diag


def solve_helmholtz(grid: Grid, a: float, b: float, rhs, tol: float = 1e-10,
                    method: str = "cg"):
    """Solve ``(a I - b Laplacian) x = rhs`` with Neumann boundary conditions.

    ``method`` is ``"cg"`` (Jacobi-preconditioned conjugate gradients) or
    ``"cosine_transform"`` (exact diagonalization).  When ``a == 0`` the
    right-hand side must have zero mean and the zero-mean solution is returned.
    """
    rhs = np.asarray(rhs, dtype=float)
    if b < 0.0 or a < 0.0:
        raise ValueError("solve_helmholtz needs a >= 0 and b >= 0")
    singular = a == 0.0
    if singular:
        if b == 0.0:
            raise SingularSystem("a = b = 0 gives the zero operator")
        rhs_mean = float(np.mean(rhs))
        if abs(rhs_mean) > 1e-10 * max(1.0, float(np.max(np.abs(rhs)))):
            raise SingularSystem(f"pure Neumann problem with nonzero mean rhs ({rhs_mean:.3e})")
        rhs = rhs - rhs_mean
    if b == 0.0:
        return rhs / a

    if method in ("cosine_transform", "dct"):
        denom = a - b * neumann_eigenvalues(grid)
        rh = dct_forward(rhs)
        if singular:
            denom.flat[0] = 1.0
            rh.flat[0] = 0.0
        return dct_inverse(rh / denom)
    if method != "cg":
        raise ValueError(f"unknown linear solver {method!r}")

    shape = grid.shape
    n = grid.size

    def matvec(v):
        x = v.reshape(shape)
        return (a * x - b * laplacian_neumann(grid, x)).ravel()

    inv_diag = (1.0 / _jacobi_diagonal(grid, a, b)).ravel()
    A = LinearOperator((n, n), matvec=matvec, dtype=float)
    M = LinearOperator((n, n), matvec=lambda v: inv_diag * v, dtype=float)
    x, info = cg(A, rhs.ravel(), rtol=tol, atol=0.0, maxiter=10 * n, M=M)
    if info != 0:
        raise SingularSystem(f"conjugate gradients did not converge (info={info})")
    x = x.reshape(shape)
    if singular:
        x = x - np.mean(x)
    return x
