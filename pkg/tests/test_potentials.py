import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from tumor_phasefield.errors import IncompatiblePotential, UnsupportedPotential, ValidationError
from tumor_phasefield.potentials import (
    PotentialSpec,
    ProliferationSpec,
    beta_eps,
    beta_eps_moreau,
    beta_hat,
    lambda_prime,
    lambda_value,
    p_value,
    resolvent,
    w_eps_value,
    w_prime_smooth,
    w_value,
)

KINDS = ["quartic", "logarithmic", "double_obstacle"]
SPECS = [PotentialSpec(k, e) for k in KINDS for e in (0.2, 0.05, 0.01)]


def moreau_by_grid(spec, r, lo=-4.0, hi=4.0, n=400001):
    """Brute-force Moreau envelope: minimize over a dense s grid, then polish locally."""
    s = np.linspace(lo, hi, n)
    vals = (s - r) ** 2 / (2 * spec.eps) + beta_hat(spec, s)
    k = int(np.argmin(vals))
    fine = np.linspace(s[max(k - 1, 0)], s[min(k + 1, n - 1)], 20001)
    return float(np.min((fine - r) ** 2 / (2 * spec.eps) + beta_hat(spec, fine)))


def log_resolvent_oracle(r, eps):
    f = lambda s: s + eps * math.log((1 + s) / (1 - s)) - r
    return brentq(f, -1 + 1e-16, 1 - 1e-16, xtol=1e-15, rtol=1e-15)


class TestValues:
    def test_w_value(self):
        assert w_value(PotentialSpec("quartic"), 0.0) == pytest.approx(0.25, abs=1e-15)
        assert w_value(PotentialSpec("quartic"), 1.0) == 0.0
        assert w_value(PotentialSpec("double_obstacle"), 2.0) == math.inf
        assert w_value(PotentialSpec("logarithmic"), 0.0) == 0.0

    def test_w_eps_value(self):
        for eps in (0.1, 0.3):
            assert w_eps_value(PotentialSpec("quartic", eps), 0.0) == pytest.approx(0.25, abs=1e-15)
        do1 = PotentialSpec("double_obstacle", 0.1)
        do2 = PotentialSpec("double_obstacle", 0.05)
        assert w_eps_value(do1, 2.0) == pytest.approx(5.0, abs=1e-12)
        assert w_eps_value(do2, 2.0) == pytest.approx(10.0, abs=1e-12)
        assert w_eps_value(do1, 2.0) == pytest.approx(moreau_by_grid(do1, 2.0, -1.0, 1.0), abs=1e-8)

    def test_moreau(self):
        assert beta_eps_moreau(PotentialSpec("quartic", 0.1), 0.5) == 0.0
        do = PotentialSpec("double_obstacle", 0.1)
        assert beta_eps_moreau(do, 1.5) == pytest.approx(1.25, abs=1e-12)
        q = PotentialSpec("quartic", 0.5)
        val = beta_eps_moreau(q, 1.2)
        assert val <= beta_hat(q, 1.2) == pytest.approx(0.0484, abs=1e-12)
        assert val == pytest.approx(moreau_by_grid(q, 1.2), abs=1e-9)

    @pytest.mark.parametrize("spec", SPECS, ids=repr)
    def test_moreau_against_grid_oracle(self, spec):
        for r in (-2.5, -1.1, -0.3, 0.95, 1.3, 3.0):
            lo, hi = (-1 + 1e-12, 1 - 1e-12) if spec.kind.value != "quartic" else (-4.0, 4.0)
            assert beta_eps_moreau(spec, r) == pytest.approx(moreau_by_grid(spec, r, lo, hi), abs=1e-8)

    def test_beta_eps(self):
        for spec in SPECS:
            assert beta_eps(spec, 0.0) == 0.0
        assert beta_eps(PotentialSpec("double_obstacle", 0.1), 2.0) == pytest.approx(10.0, abs=1e-12)
        lg = PotentialSpec("logarithmic", 0.1)
        s = log_resolvent_oracle(0.5, 0.1)
        assert beta_eps(lg, 0.5) == pytest.approx((0.5 - s) / 0.1, abs=1e-12)

    def test_resolvent(self):
        assert resolvent(PotentialSpec("double_obstacle", 0.1), 2.0) == 1.0
        for eps in (0.5, 0.01):
            assert resolvent(PotentialSpec("quartic", eps), 0.3) == 0.3
        s = resolvent(PotentialSpec("logarithmic", 0.01), 0.9)
        assert 0.0 < s < 0.9
        assert s == pytest.approx(log_resolvent_oracle(0.9, 0.01), abs=1e-13)

    def test_quartic_resolvent_oracle(self):
        q = PotentialSpec("quartic", 0.05)
        for r in (1.5, -2.0, 7.0):
            f = lambda s: s + 0.05 * s * (s * s - 1) - r
            lo, hi = sorted((math.copysign(1.0, r), r))
            assert resolvent(q, r) == pytest.approx(brentq(f, lo, hi, xtol=1e-15), abs=1e-13)

    def test_log_resolvent_far_out(self):
        lg = PotentialSpec("logarithmic", 0.1)
        # the resolvent sits within 1e-200 of 1, so beta_eps carries the information
        assert resolvent(lg, 50.0) <= 1.0
        assert beta_eps(lg, 50.0) == pytest.approx(490.0, rel=1e-13)
        assert beta_eps(lg, -50.0) == pytest.approx(-490.0, rel=1e-13)

    def test_lambda_prime(self):
        q = PotentialSpec("quartic")
        assert lambda_prime(q, 0.0) == 0.0
        h = 1e-6
        fd = (lambda_value(q, 0.5 + h) - lambda_value(q, 0.5 - h)) / (2 * h)
        assert lambda_prime(q, 0.5) == pytest.approx(-0.375, abs=1e-12)
        assert lambda_prime(q, 0.5) == pytest.approx(fd, abs=1e-8)
        assert lambda_prime(PotentialSpec("double_obstacle"), 1.0) == 0.0

    def test_w_prime_smooth(self):
        q = PotentialSpec("quartic")
        assert w_prime_smooth(q, 1.0) == 0.0
        assert w_prime_smooth(q, 2.0) == pytest.approx(6.0, abs=1e-12)
        h = 1e-6
        fd = (w_value(q, -0.5 + h) - w_value(q, -0.5 - h)) / (2 * h)
        assert w_prime_smooth(q, -0.5) == pytest.approx(0.375, abs=1e-12)
        assert w_prime_smooth(q, -0.5) == pytest.approx(fd, abs=1e-8)
        with pytest.raises(UnsupportedPotential):
            w_prime_smooth(PotentialSpec("double_obstacle"), 0.0)

    def test_p_value(self):
        q = PotentialSpec("quartic")
        sw = ProliferationSpec("sqrt_w", p0=1.0)
        assert p_value(sw, q, 0.0) == pytest.approx(1.0, abs=1e-15)
        assert p_value(sw, q, 1.0) == 0.0
        assert p_value(sw, q, -1.0) == 0.0
        for kind in KINDS:
            assert p_value(ProliferationSpec("constant", value=0.7), PotentialSpec(kind), 0.3) == 0.7
        with pytest.raises(IncompatiblePotential):
            p_value(sw, PotentialSpec("logarithmic"), 0.0)

    def test_spec_validation(self):
        with pytest.raises(ValidationError):
            PotentialSpec("quartic", 0.0)
        with pytest.raises(ValidationError):
            PotentialSpec("quartic", 1.0)
        with pytest.raises(ValidationError):
            PotentialSpec("logarithmic", 0.1, kappa=-1.0)

    def test_vectorized_matches_scalar(self):
        r = np.linspace(-3, 3, 41)
        for spec in SPECS:
            vec = beta_eps(spec, r)
            assert np.array_equal(vec, [beta_eps(spec, float(x)) for x in r])


class TestProperties:
    @settings(max_examples=1000, deadline=None)
    @given(st.sampled_from(SPECS), st.floats(-5, 5), st.floats(-5, 5))
    def test_monotone_and_lipschitz(self, spec, a, b):
        r1, r2 = min(a, b), max(a, b)
        b1, b2 = beta_eps(spec, r1), beta_eps(spec, r2)
        assert b1 <= b2 + 1e-12 * (1 + abs(b2))
        assert abs(b2 - b1) <= (r2 - r1) / spec.eps * (1 + 1e-12) + 1e-12

    @settings(max_examples=300, deadline=None)
    @given(st.sampled_from(KINDS), st.floats(-5, 5), st.floats(0.01, 0.5), st.floats(0.01, 0.5))
    def test_envelope_ordering(self, kind, r, e1, e2):
        e1, e2 = min(e1, e2), max(e1, e2)
        small, big = PotentialSpec(kind, e1), PotentialSpec(kind, e2)
        lo, hi = beta_eps_moreau(big, r), beta_eps_moreau(small, r)
        assert lo <= hi + 1e-12 * (1 + abs(hi))
        top = beta_hat(small, r)
        if math.isfinite(top):
            assert hi <= top + 1e-12 * (1 + abs(top))

    @pytest.mark.parametrize("spec", SPECS, ids=repr)
    def test_derivative_consistency(self, spec):
        rng = np.random.default_rng(7)
        r = rng.uniform(-3, 3, 400)
        r = r[np.abs(np.abs(r) - 1.0) > 1e-3][:100]
        h = 1e-6
        fd = (beta_eps_moreau(spec, r + h) - beta_eps_moreau(spec, r - h)) / (2 * h)
        be = beta_eps(spec, r)
        scale = np.maximum(np.abs(be), 1e-3)
        assert np.all(np.abs(fd - be) <= 1e-6 * scale + 1e-8)

    @settings(max_examples=300, deadline=None)
    @given(st.sampled_from(KINDS), st.floats(-1.5, 1.5))
    def test_decomposition(self, kind, r):
        spec = PotentialSpec(kind, 0.1)
        w = w_value(spec, r)
        if math.isfinite(w):
            assert w == pytest.approx(beta_hat(spec, r) + lambda_value(spec, r), abs=1e-14)

    def test_quartic_derivative_fd(self):
        q = PotentialSpec("quartic")
        r = np.linspace(-2.5, 2.5, 101)
        h = 1e-5
        fd = (w_value(q, r + h) - w_value(q, r - h)) / (2 * h)
        assert np.max(np.abs(fd - w_prime_smooth(q, r))) <= 1e-8

    @pytest.mark.parametrize("kind", ["quartic", "double_obstacle"])
    def test_p_bounds(self, kind):
        pot = PotentialSpec(kind)
        sw = ProliferationSpec("sqrt_w", p0=1.3)
        r = np.linspace(-3, 3, 6001)
        p = p_value(sw, pot, r)
        wmax = np.max(w_value(pot, np.linspace(-1, 1, 2001)))
        assert np.all(p >= 0.0)
        assert np.max(p) <= 2 * 1.3 * math.sqrt(wmax) + 1e-14
