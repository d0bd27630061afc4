import numpy as np
import pytest

from cfvc.errors import SeriesTooShort
from cfvc.granger import (
    causality_conclusion,
    cross_lag_positions,
    robustness_flag,
    ty_granger,
    ty_robustness,
    wald_zero_restriction,
)
from cfvc.numerics import dist_sf
from cfvc.simulate import Dgp, generate, spawn_seeds
from cfvc.timeseries import TimeSeries
from cfvc.var import fit_var

from helpers import reference_fixtures


def ts(values, label):
    return TimeSeries(label, "2000-01", np.asarray(values, dtype=float))


@pytest.fixture(scope="module")
def causal():
    return generate(Dgp("causal_pair", {}, 1.0, 300, 104))


class TestTyGranger:
    def test_result_contract(self, causal):
        x, y = causal
        g = ty_granger(x, y, 2, 1)
        assert g.dof == 2 and g.m == 2 and g.d_max == 1
        assert g.wald_statistic >= 0
        assert g.p_value == dist_sf("chi_square", g.wald_statistic, 2)
        assert g.pair == "x→y"
        assert g.reject_at == {lvl: g.p_value < a for lvl, a in (("1%", 0.01), ("5%", 0.05), ("10%", 0.10))}
        assert g.nobs == 300 - 3

    def test_restricts_only_first_m_lags(self, causal):
        x, y = causal
        model = fit_var([x, y], 3, "constant_and_trend")
        positions = cross_lag_positions(model, 0, 2)
        assert positions == [2, 4]
        assert ty_granger(x, y, 2, 1).wald_statistic == pytest.approx(wald_zero_restriction(model, 1, positions), rel=1e-14)

    def test_power_direction(self, causal):
        x, y = causal
        assert ty_granger(x, y, 1, 1).p_value < 1e-6
        assert ty_granger(y, x, 1, 1).p_value > 0.01

    def test_bad_arguments(self, causal):
        x, y = causal
        with pytest.raises(ValueError):
            ty_granger(x, y, 0)
        with pytest.raises(ValueError):
            ty_granger(x, y, 1, 3)

    def test_too_short(self):
        rng = np.random.default_rng(0)
        with pytest.raises(SeriesTooShort):
            ty_granger(ts(rng.standard_normal(12), "a"), ts(rng.standard_normal(12), "b"), 4, 1)

    @pytest.mark.parametrize("scale", [(1e-3, 1.0), (1.0, 250.0), (7.0, 0.02)])
    def test_scale_and_shift_invariance(self, causal, scale):
        x, y = causal
        base = ty_granger(x, y, 2, 1).wald_statistic
        moved = ty_granger(ts(scale[0] * x.values + 5.0, "x"), ts(scale[1] * y.values - 3.0, "y"), 2, 1).wald_statistic
        assert abs(moved - base) <= 1e-6 * base


@pytest.mark.parametrize("fx", reference_fixtures(), ids=lambda f: f["name"])
def test_mwald_against_frozen_oracle(fx):
    x, y = ts(fx["x"], "x"), ts(fx["y"], "y")
    for d_max in (0, 1):
        for cause, effect, key in ((x, y, "x_to_y"), (y, x, "y_to_x")):
            g = ty_granger(cause, effect, fx["m"], d_max)
            ref = fx["ty"][f"{key}_dmax{d_max}"]
            assert g.wald_statistic == pytest.approx(ref["statistic"], abs=1e-6)
            assert g.p_value == pytest.approx(ref["p_value"], abs=1e-6)
    # d_max = 0 is the classical VAR Wald causality test
    assert ty_granger(x, y, fx["m"], 0).wald_statistic == pytest.approx(fx["ty"]["x_to_y_dmax0_var_wald"], abs=1e-8)


def test_size_on_independent_white_noise():
    runs, rejections, pvals = 500, 0, []
    for seed in spawn_seeds(90, runs):
        a, b = seed.spawn(2)
        x = ts(generate(Dgp("white_noise", {}, 1.0, 300, a)).values, "x")
        y = ts(generate(Dgp("white_noise", {}, 1.0, 300, b)).values, "y")
        g = ty_granger(x, y, 2, 1)
        rejections += g.p_value < 0.05
        pvals.append(g.p_value)
    assert 0.02 <= rejections / runs <= 0.09
    # rough uniformity: each decile holds 5%-15% of p-values
    counts = np.histogram(pvals, bins=10, range=(0, 1))[0] / runs
    assert counts.min() >= 0.05 and counts.max() <= 0.15


class TestRobustness:
    def test_m1_rejected(self, causal):
        with pytest.raises(ValueError):
            ty_robustness(*causal, 1)

    def test_strong_causality_smooth(self, causal):
        rob = ty_robustness(*causal, 2)
        assert rob.lags == (1, 2, 3)
        assert all(r.p_value < 0.05 for r in rob.results)
        assert rob.flag == "smooth"
        assert {r.pair for r in rob.results} == {"x→y"}

    def test_volatile_pattern(self):
        assert robustness_flag([0.11, 0.02, 0.13]) == "volatile"
        assert robustness_flag([0.5, 0.3, 0.9]) == "smooth"


class TestConclusion:
    @staticmethod
    def _g(cause, effect, p):
        from cfvc.granger import GrangerResult

        return GrangerResult(cause, effect, 2, 1, 1.0, 2, p, "constant_and_trend", 100)

    def test_kinds(self):
        f, b = self._g("cf", "vc", 0.01), self._g("vc", "cf", 0.2)
        assert causality_conclusion(f, b) == ("Unidirectional causality", "cf→vc")
        assert causality_conclusion(b, f) == ("Unidirectional causality", "cf→vc")
        assert causality_conclusion(f, self._g("vc", "cf", 0.03)) == ("Bidirectional causality", "cf↔vc")
        assert causality_conclusion(self._g("cf", "vc", 0.4), b) == ("No causality", "")
