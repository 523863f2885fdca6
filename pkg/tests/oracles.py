"""Independent reference computations shared by the unit and acceptance tests."""

import math

from scipy.optimize import brentq

from tumor_phasefield.potentials import beta_eps, lambda_prime, p_value


def scalar_step(mu_n, u_n, sigma_n, cfg, limit=False):
    """One backward-Euler step of the spatially constant system.

    With no spatial variation the Laplacians vanish.  The nutrient equation
    gives ``sigma`` as an affine function of ``mu``, and the second equation
    gives ``mu`` as a monotone function of ``u``.  What remains is a scalar
    equation in ``u`` that is strictly increasing, so a bracketing root
    finder settles it.
    """
    a, tau, gam = cfg.alpha, cfg.dt, cfg.gamma
    p = float(p_value(cfg.proliferation, cfg.potential, u_n))

    if limit:
        def mu_of(u):
            return u ** 3 - u_n
    else:
        lp = float(lambda_prime(cfg.potential, u_n))

        def mu_of(u):
            return a * (u - u_n) / tau + float(beta_eps(cfg.potential, u)) + lp

    def sigma_of(mu):
        return (sigma_n + tau * p * gam * mu) / (1.0 + tau * p)

    def f1(u):
        mu = mu_of(u)
        return a * (mu - mu_n) + (u - u_n) - tau * p * (sigma_of(mu) - gam * mu)

    width = 1.0
    while f1(u_n - width) > 0 or f1(u_n + width) < 0:
        width *= 2
    u = brentq(f1, u_n - width, u_n + width, xtol=1e-15, rtol=1e-15, maxiter=500)
    mu = mu_of(u)
    return mu, u, sigma_of(mu)


def scalar_trajectory(mu, u, sigma, cfg, steps, limit=False):
    out = [(mu, u, sigma)]
    for _ in range(steps):
        mu, u, sigma = scalar_step(mu, u, sigma, cfg, limit)
        out.append((mu, u, sigma))
    return out


def trapezoid_exact_grad_mu(length, t_end):
    """Closed form of int_0^T ||grad(cos(pi x/L) e^{-t})||^2 dt on (0, L)."""
    k = math.pi / length
    return k * k * (length / 2) * (1 - math.exp(-2 * t_end)) / 2
