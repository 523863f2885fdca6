"""Double-well potentials, their Yosida regularization and the proliferation function.

Every potential is split as ``W = beta_hat + lam`` with ``beta_hat`` convex,
lower semicontinuous and nonnegative, and ``lam`` nonnegative with a
Lipschitz derivative.  The (possibly multivalued) graph ``beta`` is the
subdifferential of ``beta_hat``; the solver only ever sees its Yosida
regularization ``beta_eps``, which is single valued and ``1/eps``-Lipschitz.

All functions accept scalars or numpy arrays and are vectorized.  Scalars in
give Python floats out.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    IncompatiblePotential,
    ResolventDivergence,
    UnsupportedPotential,
    ValidationError,
)

__all__ = [
    "PotentialKind",
    "PotentialSpec",
    "ProliferationKind",
    "ProliferationSpec",
    "beta_hat",
    "lambda_value",
    "lambda_prime",
    "lambda_second",
    "w_value",
    "w_eps_value",
    "beta_eps_moreau",
    "beta_eps",
    "beta_eps_prime",
    "resolvent",
    "w_prime_smooth",
    "p_value",
    "p_lipschitz_bound",
]

RESOLVENT_TOL = 1e-13
RESOLVENT_MAXITER = 200


class PotentialKind(str, Enum):
    QUARTIC = "quartic"
    LOGARITHMIC = "logarithmic"
    DOUBLE_OBSTACLE = "double_obstacle"


class ProliferationKind(str, Enum):
    CONSTANT = "constant"
    SQRT_W = "sqrt_w"


@dataclass(frozen=True)
class PotentialSpec:
    """Choice of double-well potential and Yosida parameter ``eps``.

    ``kappa`` is only used by the logarithmic potential.
    """

    kind: PotentialKind = PotentialKind.QUARTIC
    eps: float = 0.01
    kappa: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if not 0.0 < self.eps < 1.0:
            raise ValidationError(f"potential eps must lie in (0,1), got {self.eps}")
        if self.kappa < 0.0:
            raise ValidationError(f"potential kappa must be >= 0, got {self.kappa}")


@dataclass(frozen=True)
class ProliferationSpec:
    """Proliferation function ``p``: a constant, or ``2 p0 sqrt(W)`` on [-1,1]."""

    kind: ProliferationKind = ProliferationKind.SQRT_W
    value: float = 0.0
    p0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ProliferationKind(self.kind))
        if self.kind is ProliferationKind.CONSTANT and self.value < 0.0:
            raise ValidationError(f"constant proliferation must be >= 0, got {self.value}")
        if self.kind is ProliferationKind.SQRT_W and self.p0 <= 0.0:
            raise ValidationError(f"p0 must be > 0, got {self.p0}")


def _wrap(r):
    arr = np.asarray(r, dtype=float)
    return arr, arr.ndim == 0


def _out(x, scalar):
    return float(x) if scalar else x


# ---------------------------------------------------------------------------
# convex part and its subdifferential
# ---------------------------------------------------------------------------

def _log_beta_hat(s):
    # (1-s)ln(1-s) + (1+s)ln(1+s), continuous at |s| = 1
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(s < 1.0, (1.0 - s) * np.log1p(-s), 0.0)
        b = np.where(s > -1.0, (1.0 + s) * np.log1p(s), 0.0)
    return a + b


def beta_hat(spec: PotentialSpec, r):
    """Convex part of the potential; ``+inf`` outside its effective domain."""
    r, scalar = _wrap(r)
    kind = spec.kind
    if kind is PotentialKind.QUARTIC:
        out = 0.25 * np.maximum(r * r - 1.0, 0.0) ** 2
    elif kind is PotentialKind.LOGARITHMIC:
        inside = np.abs(r) <= 1.0
        out = np.where(inside, _log_beta_hat(np.clip(r, -1.0, 1.0)), np.inf)
    else:
        out = np.where(np.abs(r) <= 1.0, 0.0, np.inf)
    return _out(out, scalar)


def lambda_value(spec: PotentialSpec, r):
    r, scalar = _wrap(r)
    q = np.maximum(1.0 - r * r, 0.0)
    if spec.kind is PotentialKind.QUARTIC:
        out = 0.25 * q * q
    elif spec.kind is PotentialKind.DOUBLE_OBSTACLE:
        out = q * q
    else:
        out = spec.kappa * q
    return _out(out, scalar)


def lambda_prime(spec: PotentialSpec, r):
    """Derivative of the smooth (concave-ish) part ``lam``."""
    r, scalar = _wrap(r)
    inside = np.abs(r) <= 1.0
    if spec.kind is PotentialKind.QUARTIC:
        out = np.where(inside, -r * (1.0 - r * r), 0.0)
    elif spec.kind is PotentialKind.DOUBLE_OBSTACLE:
        out = np.where(inside, -4.0 * r * (1.0 - r * r), 0.0)
    else:
        out = np.where(inside, -2.0 * spec.kappa * r, 0.0)
    return _out(out, scalar)


def lambda_second(spec: PotentialSpec, r):
    """Second derivative of ``lam``; at +-1 the one-sided interior limit.

    Taking the interior value at the kink keeps ``beta_eps' + lam''`` away
    from zero on exact pure phases, where ``beta_eps'`` vanishes.
    """
    r, scalar = _wrap(r)
    inside = np.abs(r) <= 1.0
    if spec.kind is PotentialKind.QUARTIC:
        out = np.where(inside, 3.0 * r * r - 1.0, 0.0)
    elif spec.kind is PotentialKind.DOUBLE_OBSTACLE:
        out = np.where(inside, 12.0 * r * r - 4.0, 0.0)
    else:
        out = np.where(inside, -2.0 * spec.kappa, 0.0)
    return _out(out, scalar)


def w_value(spec: PotentialSpec, r):
    """Unregularized potential ``W = beta_hat + lam`` (extended real)."""
    r, scalar = _wrap(r)
    return _out(beta_hat(spec, r) + lambda_value(spec, r), scalar)


def w_prime_smooth(spec: PotentialSpec, r):
    """Exact ``W'(r) = r**3 - r``; only the quartic potential is smooth enough."""
    if spec.kind is not PotentialKind.QUARTIC:
        raise UnsupportedPotential(f"W' is not a C^3 function for {spec.kind.value}")
    r, scalar = _wrap(r)
    return _out(r * r * r - r, scalar)


# ---------------------------------------------------------------------------
# resolvent (I + eps*beta)^-1 and Yosida regularization
# ---------------------------------------------------------------------------

def _safeguarded_newton(g, dg, lo, hi, x0, scale):
    """Root of an increasing function ``g`` bracketed by ``[lo, hi]`` (elementwise)."""
    x = np.clip(x0, lo, hi)
    for _ in range(RESOLVENT_MAXITER):
        gx = g(x)
        done = (np.abs(gx) <= RESOLVENT_TOL * scale) | (hi - lo <= 4.0 * np.spacing(np.abs(x) + 1.0))
        if done.all():
            return x
        lo = np.where(gx < 0.0, x, lo)
        hi = np.where(gx > 0.0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = x - gx / dg(x)
        bad = ~((trial > lo) & (trial < hi))
        x = np.where(done, x, np.where(bad, 0.5 * (lo + hi), trial))
    raise ResolventDivergence(
        f"resolvent did not converge in {RESOLVENT_MAXITER} iterations"
    )


def _resolve(spec: PotentialSpec, r: np.ndarray, eps: float):
    """Return ``(s, b)`` with ``s + eps*b = r`` and ``b`` in ``beta(s)``.

    ``b`` is computed without the cancellation in ``(r - s)/eps`` where possible;
    it is exactly the Yosida value ``beta_eps(r)``.
    """
    kind = spec.kind
    if kind is PotentialKind.DOUBLE_OBSTACLE:
        s = np.clip(r, -1.0, 1.0)
        return s, (r - s) / eps

    sign = np.where(r < 0.0, -1.0, 1.0)
    a = np.abs(r)
    scale = 1.0 + a

    if kind is PotentialKind.QUARTIC:
        outside = a > 1.0
        if not outside.any():
            return r.copy(), np.zeros_like(r)
        ao = np.where(outside, a, 1.0)
        s_abs = _safeguarded_newton(
            lambda s: s + eps * s * (s * s - 1.0) - ao,
            lambda s: 1.0 + eps * (3.0 * s * s - 1.0),
            np.ones_like(ao),
            ao.copy(),
            ao.copy(),
            scale,
        )
        s_abs = np.where(outside, s_abs, a)
        b_abs = np.where(outside, s_abs * (s_abs * s_abs - 1.0), 0.0)
        return sign * s_abs, sign * b_abs

    # logarithmic: beta(s) = 2 atanh(s); solve tanh(y) + 2 eps y = |r| for y >= 0
    lo = np.maximum(0.0, (a - 1.0) / (2.0 * eps))
    hi = a / (2.0 * eps)
    y = _safeguarded_newton(
        lambda y: np.tanh(y) + 2.0 * eps * y - a,
        lambda y: 1.0 / np.cosh(np.minimum(y, 350.0)) ** 2 + 2.0 * eps,
        lo,
        hi,
        lo.copy(),
        scale,
    )
    return sign * np.tanh(y), sign * 2.0 * y


def resolvent(spec: PotentialSpec, r, eps: float | None = None):
    """Solve ``s + eps*beta(s) = r`` for ``s``."""
    if eps is None:
        eps = spec.eps
    if eps <= 0.0:
        raise ValueError("resolvent needs eps > 0")
    r, scalar = _wrap(r)
    s, _ = _resolve(spec, r, eps)
    return _out(s, scalar)


def beta_eps(spec: PotentialSpec, r):
    """Yosida regularization ``beta_eps(r) = (r - J_eps(r))/eps``."""
    r, scalar = _wrap(r)
    _, b = _resolve(spec, r, spec.eps)
    return _out(b, scalar)


def beta_eps_prime(spec: PotentialSpec, r):
    """Derivative of ``beta_eps`` (a generalized one at kinks), always in [0, 1/eps]."""
    r, scalar = _wrap(r)
    eps = spec.eps
    if spec.kind is PotentialKind.DOUBLE_OBSTACLE:
        out = np.where(np.abs(r) > 1.0, 1.0 / eps, 0.0)
        return _out(out, scalar)
    s, b = _resolve(spec, r, eps)
    if spec.kind is PotentialKind.QUARTIC:
        d = np.where(np.abs(s) > 1.0, 3.0 * s * s - 1.0, 0.0)
        out = d / (1.0 + eps * d)
    else:
        # beta'(s) = 2/(1-s^2) = 2 cosh(y)^2 with y = b/2
        sech2 = 1.0 / np.cosh(np.minimum(np.abs(b) / 2.0, 350.0)) ** 2
        out = 1.0 / (eps + 0.5 * sech2)
    return _out(out, scalar)


def _moreau_from(spec, s, b, eps):
    if spec.kind is PotentialKind.LOGARITHMIC:
        # beta_hat(tanh y) evaluated through softplus to stay accurate for large y
        y = np.abs(b) / 2.0
        sp_pos = np.logaddexp(0.0, 2.0 * y)
        sp_neg = np.logaddexp(0.0, -2.0 * y)
        ln2 = np.log(2.0)
        one_minus = 2.0 * np.exp(-sp_pos)
        one_plus = 2.0 * np.exp(-sp_neg)
        bh = one_minus * (ln2 - sp_pos) + one_plus * (ln2 - sp_neg)
    else:
        bh = beta_hat(spec, s)
    return 0.5 * eps * b * b + bh


def beta_eps_moreau(spec: PotentialSpec, r, eps: float | None = None):
    """Moreau envelope ``min_s (s-r)^2/(2 eps) + beta_hat(s)``."""
    if eps is None:
        eps = spec.eps
    r, scalar = _wrap(r)
    s, b = _resolve(spec, r, eps)
    return _out(_moreau_from(spec, s, b, eps), scalar)


def w_eps_value(spec: PotentialSpec, r):
    """Regularized potential ``W_eps = B_eps + lam``; finite everywhere."""
    r, scalar = _wrap(r)
    return _out(beta_eps_moreau(spec, r) + lambda_value(spec, r), scalar)


# ---------------------------------------------------------------------------
# proliferation
# ---------------------------------------------------------------------------

def p_value(pspec: ProliferationSpec, potential: PotentialSpec, r):
    """Proliferation function evaluated at ``r``.

    ``sqrt_w`` uses the unregularized potential on [-1,1] and vanishes
    outside; it is Lipschitz only when ``W`` has quadratic minima at +-1,
    which rules out the logarithmic potential.
    """
    r, scalar = _wrap(r)
    if pspec.kind is ProliferationKind.CONSTANT:
        return _out(np.full_like(r, pspec.value), scalar)
    if potential.kind is PotentialKind.LOGARITHMIC:
        raise IncompatiblePotential("sqrt_w proliferation cannot be used with the logarithmic potential")
    inside = np.abs(r) <= 1.0
    rc = np.clip(r, -1.0, 1.0)
    w = lambda_value(potential, rc)  # beta_hat vanishes on [-1,1] for both kinds
    out = np.where(inside, 2.0 * pspec.p0 * np.sqrt(w), 0.0)
    return _out(out, scalar)


def p_lipschitz_bound(pspec: ProliferationSpec, potential: PotentialSpec) -> float:
    """A Lipschitz constant for ``p`` (exact for the built-in combinations)."""
    if pspec.kind is ProliferationKind.CONSTANT:
        return 0.0
    if potential.kind is PotentialKind.QUARTIC:
        return 2.0 * pspec.p0  # p = p0 (1 - r^2)
    if potential.kind is PotentialKind.DOUBLE_OBSTACLE:
        return 4.0 * pspec.p0  # p = 2 p0 (1 - r^2)
    raise IncompatiblePotential("sqrt_w proliferation cannot be used with the logarithmic potential")
