import dataclasses
import logging

import numpy as np
import pytest

from cfvc.errors import BadOrdering
from cfvc.irf import irf_bootstrap, irf_point, orthogonal_factor, orthogonalized_irf, simulate_recursive
from cfvc.simulate import Dgp, generate
from cfvc.var import fit_var


@pytest.fixture(scope="module")
def fitted():
    y1, y2 = generate(Dgp("var", {"A": [[0.5, 0.2], [0.1, 0.3]]}, 1.0, 300, 61))
    return fit_var([y1, y2], 1, "constant")


def with_params(model, a, sigma):
    return dataclasses.replace(model, coefficient_matrices=np.asarray(a, dtype=float)[None], residual_covariance=np.asarray(sigma, dtype=float))


class TestPoint:
    def test_decoupled_system(self, fitted):
        model = with_params(fitted, 0.5 * np.eye(2), np.eye(2))
        r = irf_point(model, ("y1", "y2"), 10, impulse="y1", response="y2")
        np.testing.assert_array_equal(r.point, np.zeros(11))
        c = irf_point(model, ("y1", "y2"), 10, cumulative=True, impulse="y1", response="y2")
        np.testing.assert_array_equal(c.point, np.zeros(11))

    def test_closed_form(self, fitted):
        a = np.array([[0.6, 0.2], [-0.3, 0.4]])
        sigma = np.array([[2.0, 0.6], [0.6, 1.0]])
        model = with_params(fitted, a, sigma)
        p = np.linalg.cholesky(sigma)
        theta = orthogonalized_irf(model, ("y1", "y2"), 10)
        for h in range(11):
            np.testing.assert_allclose(theta[h], np.linalg.matrix_power(a, h) @ p, atol=1e-10, rtol=0)

    def test_reversed_ordering_factor(self, fitted):
        sigma = np.array([[2.0, 0.6], [0.6, 1.0]])
        model = with_params(fitted, np.zeros((2, 2)), sigma)
        p = orthogonal_factor(model, ("y2", "y1"))
        np.testing.assert_allclose(p @ p.T, sigma, atol=1e-14)
        assert p[1, 0] == 0.0 and p[0, 0] > 0 and p[1, 1] > 0

    def test_zero_contemporaneous_response_of_first(self, fitted):
        theta = orthogonalized_irf(fitted, ("y1", "y2"), 3)
        assert theta[0, 0, 1] == 0.0
        assert theta[0, 0, 0] > 0 and theta[0, 1, 1] > 0

    def test_sigma_scaling(self, fitted):
        base = orthogonalized_irf(fitted, ("y1", "y2"), 12)
        scaled = orthogonalized_irf(dataclasses.replace(fitted, residual_covariance=9.0 * fitted.residual_covariance), ("y1", "y2"), 12)
        np.testing.assert_allclose(scaled, 3.0 * base, atol=1e-10)

    def test_decay_and_cumulative_convergence(self, fitted):
        theta = np.abs(orthogonalized_irf(fitted, ("y1", "y2"), 200))
        assert theta[50:101].max() < theta[:50].max()
        cum = orthogonalized_irf(fitted, ("y1", "y2"), 200, cumulative=True)
        assert np.max(np.abs(cum[200] - cum[199])) <= 1e-6

    def test_shock_size_normalization(self, fitted):
        r = irf_point(fitted, impulse="y1", response="y1", shock_size=0.01)
        assert r.point[0] == pytest.approx(0.01, rel=1e-14)

    def test_default_ordering_puts_impulse_first(self, fitted):
        r = irf_point(fitted, impulse="y2")
        assert r.ordering == ("y2", "y1") and r.response == "y1"

    def test_bad_ordering(self, fitted):
        with pytest.raises(BadOrdering):
            irf_point(fitted, ("y1", "y1"))
        with pytest.raises(BadOrdering):
            irf_point(fitted, ("y1", "zz"))

    def test_unstable_warning(self, fitted, caplog):
        with caplog.at_level(logging.WARNING, logger="cfvc.irf"):
            irf_point(with_params(fitted, np.eye(2), np.eye(2)))
        assert "not stable" in caplog.text


class TestBootstrap:
    def test_recursive_simulation_with_actual_residuals_reproduces_data(self, fitted):
        y = simulate_recursive(fitted, fitted.residuals)
        np.testing.assert_allclose(y, fitted.data, atol=1e-9)

    def test_deterministic_and_ordered(self, fitted):
        a = irf_bootstrap(fitted, horizon=8, replications=150, seed=5)
        b = irf_bootstrap(fitted, horizon=8, replications=150, seed=5)
        assert a.lower.tobytes() == b.lower.tobytes() and a.upper.tobytes() == b.upper.tobytes()
        assert np.all(a.lower <= a.upper)
        c = irf_bootstrap(fitted, horizon=8, replications=150, seed=6)
        assert c.lower.tobytes() != a.lower.tobytes()

    def test_point_inside_band(self, fitted):
        r = irf_bootstrap(fitted, horizon=10, replications=500, seed=2016, cumulative=False)
        inside = np.mean((r.lower <= r.point) & (r.point <= r.upper))
        assert inside >= 0.95
        assert r.discarded == 0 and r.replications == 500 and len(r.lower) == 11

    def test_argument_checks(self, fitted):
        with pytest.raises(ValueError):
            irf_bootstrap(fitted, replications=50)
        with pytest.raises(ValueError):
            irf_bootstrap(fitted, level=1.0)
