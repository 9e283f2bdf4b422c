import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coordlqr import numkit
from coordlqr.coordsynth import CostSpec, HardSpec, Plant, Weights, center_value, synthesize_hard
from coordlqr.exceptions import SweepError, ValidationError
from coordlqr.softcoord import (
    SoftSpec,
    equivalence_as_hard,
    soft_cost_report,
    solve_soft,
    sweep_lambda,
)

from conftest import random_instance


def scalar_soft_oracle(a, b, q, f, lam):
    """Closed-form scalar center solution.

    Minimizing the integral of ``q x^2 + u^2 + k (u - f x)^2`` with
    ``k = lam / (1 - lam)``, scaled by ``1 - lam``. The Riccati equation
    ``2 a x + q + k f^2 - (1 - lam)(b x - k f)^2 = 0`` is a quadratic in ``x``;
    the stabilizing root gives a stable ``a + b u_gain``.
    """
    k = lam / (1.0 - lam)
    c2 = -(1.0 - lam) * b * b
    c1 = 2.0 * a + 2.0 * (1.0 - lam) * b * k * f
    c0 = q + k * f * f - (1.0 - lam) * k * k * f * f
    for x in np.roots([c2, c1, c0]).real:
        gain = lam * f - (1.0 - lam) * b * x
        if a + b * gain < 0:
            y = (f + b * x) ** 2 / (-2.0 * (a + b * gain))
            return x, gain, y
    raise AssertionError("no stabilizing root")


class TestScalar:
    def test_tadpole_axis(self, scalar_axis):
        plant, cost, Fbar = scalar_axis
        sol = solve_soft(plant, cost, SoftSpec(Fbar, 0.5))
        # (1 + 625) - (x + 25)^2 / 2 = 0
        x = np.sqrt(1252.0) - 25.0
        assert sol.X_lambda[0, 0] == pytest.approx(x, abs=1e-10)
        assert sol.X_lambda[0, 0] == pytest.approx(10.38361203, abs=1e-8)
        assert sol.Y_lambda[0, 0] == pytest.approx(6.03778939, abs=1e-8)
        assert sol.F_center[0, 0] == pytest.approx(-17.69180601, abs=1e-8)

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(-2.0, 2.0),
        st.floats(0.3, 3.0),
        st.floats(0.1, 5.0),
        st.floats(0.05, 0.95),
    )
    def test_against_quadratic_formula(self, a, b, q, lam):
        f = -(abs(a) + 1.0) / b * 2.0
        x, gain, y = scalar_soft_oracle(a, b, q, f, lam)
        sol = solve_soft(Plant([[a]], [[b]]), CostSpec([[q]]), SoftSpec([[f]], lam))
        assert sol.X_lambda[0, 0] == pytest.approx(x, rel=1e-8, abs=1e-10)
        assert sol.F_center[0, 0] == pytest.approx(gain, rel=1e-8, abs=1e-10)
        assert sol.Y_lambda[0, 0] == pytest.approx(y, rel=1e-7, abs=1e-10)

    def test_endpoints(self, scalar_axis):
        plant, cost, Fbar = scalar_axis
        s0 = solve_soft(plant, cost, SoftSpec(Fbar, 0.0))
        s1 = solve_soft(plant, cost, SoftSpec(Fbar, 1.0))
        assert s0.X_lambda[0, 0] == pytest.approx(1.0)
        assert s0.F_center[0, 0] == pytest.approx(-1.0)
        assert s1.X_lambda[0, 0] == pytest.approx(12.52)
        assert s1.F_center[0, 0] == pytest.approx(-25.0)

    def test_lambda_range(self):
        with pytest.raises(ValidationError):
            SoftSpec([[0.0]], 1.5)


def _random_solutions(seed, count=10):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, n + 1))
        plant, cost, weights, Fbar, x0s = random_instance(rng, n, m, 3)
        yield plant, cost, weights, Fbar, x0s, float(rng.uniform(0.05, 0.95))


class TestSensitivities:
    def test_sandwich(self):
        for plant, cost, _, Fbar, _, lam in _random_solutions(31):
            sol = solve_soft(plant, cost, SoftSpec(Fbar, lam))
            assert numkit.min_eig(sol.X_lambda - sol.X_alpha) >= -1e-8
            assert numkit.min_eig(sol.Xbar - sol.X_lambda) >= -1e-8
            assert numkit.min_eig(sol.Y_lambda) >= -1e-8
            assert numkit.min_eig(-sol.Z_lambda) >= -1e-8
            assert numkit.is_hurwitz(sol.A_lambda)

    def test_value_derivative_is_mismatch_gramian(self):
        h = 1e-5
        for plant, cost, _, Fbar, _, lam in _random_solutions(32, 5):
            sp = solve_soft(plant, cost, SoftSpec(Fbar, lam + h))
            sm = solve_soft(plant, cost, SoftSpec(Fbar, lam - h))
            Y = solve_soft(plant, cost, SoftSpec(Fbar, lam)).Y_lambda
            dX = (sp.X_lambda - sm.X_lambda) / (2 * h)
            assert np.abs(dX - Y).max() <= 1e-4 * (1 + np.abs(Y).max())

    def test_gramian_derivative(self):
        # d/dlam Y = (Z + 2 Y) / (1 - lam)
        h = 1e-5
        for plant, cost, _, Fbar, _, lam in _random_solutions(33, 5):
            s = solve_soft(plant, cost, SoftSpec(Fbar, lam))
            sp = solve_soft(plant, cost, SoftSpec(Fbar, lam + h))
            sm = solve_soft(plant, cost, SoftSpec(Fbar, lam - h))
            dY = (sp.Y_lambda - sm.Y_lambda) / (2 * h)
            expected = (s.Z_lambda + 2 * s.Y_lambda) / (1 - lam)
            assert np.abs(dY - expected).max() <= 1e-4 * (1 + np.abs(expected).max())

    def test_tradeoff_derivatives(self):
        h = 1e-5
        for plant, cost, weights, Fbar, x0s, lam in _random_solutions(34, 5):
            _, sp, ap = soft_cost_report(plant, cost, weights, SoftSpec(Fbar, lam + h), x0s)
            _, sm, am = soft_cost_report(plant, cost, weights, SoftSpec(Fbar, lam - h), x0s)
            rep, _, _ = soft_cost_report(plant, cost, weights, SoftSpec(Fbar, lam), x0s)
            sol = rep.extra["solution"]
            xbar0 = rep.extra["xbar0"]
            z = xbar0 @ sol.Z_lambda @ xbar0
            alpha_dot = (ap - am) / (2 * h)
            sigma_dot = (sp - sm) / (2 * h)
            assert np.allclose(alpha_dot, weights.mu**2 * lam * z, rtol=1e-3)
            assert sigma_dot == pytest.approx((1 - lam) * z, rel=1e-3)

    def test_tradeoff_slope(self, scalar_axis):
        # d alpha / d sigma = mu^2 lam / (1 - lam); flat at lam = 0
        plant, cost, Fbar = scalar_axis
        w = Weights.uniform(2)
        x0s = np.array([[1.0], [1.0]])
        h = 1e-6
        for lam in (h, 0.4):
            _, sp, ap = soft_cost_report(plant, cost, w, SoftSpec(Fbar, lam + h), x0s)
            _, sm, am = soft_cost_report(plant, cost, w, SoftSpec(Fbar, max(lam - h, 0.0)), x0s)
            slope = (ap[0] - am[0]) / (sp - sm)
            assert slope == pytest.approx(0.5 * lam / (1 - lam), abs=1e-5)


class TestCosts:
    def test_endpoints_recover_hard_and_local(self, rng):
        plant, cost, weights, Fbar, x0s = random_instance(rng, 3, 2, 3)
        _, X_alpha, Xbar = synthesize_hard(plant, cost, weights, HardSpec(Fbar))
        r1, s1, a1 = soft_cost_report(plant, cost, weights, SoftSpec(Fbar, 1.0), x0s)
        assert s1 == pytest.approx(0.0, abs=1e-10)
        assert np.allclose(a1, 0.0, atol=1e-9)
        assert np.allclose(r1.J_excess, r1.extra["hard_excess"])
        r0, _, _ = soft_cost_report(plant, cost, weights, SoftSpec(Fbar, 0.0), x0s)
        assert np.allclose(r0.J_excess, 0.0, atol=1e-9)

    def test_saving_identity(self, rng):
        plant, cost, weights, Fbar, x0s = random_instance(rng, 3, 2, 4)
        rep, _, alphas = soft_cost_report(plant, cost, weights, SoftSpec(Fbar, 0.6), x0s)
        assert np.allclose(rep.J_excess + alphas, rep.extra["hard_excess"], rtol=1e-10)

    def test_equivalent_hard_gain(self, scalar_axis):
        plant, cost, Fbar = scalar_axis
        soft = SoftSpec(Fbar, 0.5)
        hard = equivalence_as_hard(plant, cost, soft)
        assert hard.Fbar[0, 0] == pytest.approx(-17.6918, abs=1e-4)
        sol = solve_soft(plant, cost, soft)
        eff = sol.X_lambda - 0.25 * sol.Y_lambda
        assert np.abs(center_value(plant, cost, hard) - eff).max() <= 1e-8

    def test_equivalent_hard_gain_random(self):
        for plant, cost, _, Fbar, _, lam in _random_solutions(35, 5):
            sol = solve_soft(plant, cost, SoftSpec(Fbar, lam))
            hard = equivalence_as_hard(plant, cost, SoftSpec(Fbar, lam))
            eff = sol.X_lambda - lam * (1 - lam) * sol.Y_lambda
            assert np.abs(center_value(plant, cost, hard) - eff).max() <= 1e-8 * (1 + np.abs(eff).max())


class TestSweep:
    def test_monotone(self, scalar_axis):
        plant, cost, Fbar = scalar_axis
        w = Weights.uniform(2)
        x0s = np.array([[1.0], [0.5]])
        pts = sweep_lambda(plant, cost, w, Fbar, np.linspace(0, 0.95, 20), x0s)
        sig = np.array([p.sigma for p in pts])
        exc = np.array([p.excess.sum() for p in pts])
        assert np.all(np.diff(sig) < 0)
        assert np.all(np.diff(exc) > 0)

    def test_grid_must_exclude_one(self, scalar_axis):
        plant, cost, Fbar = scalar_axis
        with pytest.raises(SweepError):
            sweep_lambda(plant, cost, Weights.uniform(2), Fbar, [0.5, 1.0], np.ones((2, 1)))
