import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from cfvc.errors import ConstantSeries, Misaligned, NonPositiveValue, SeriesTooShort
from cfvc.timeseries import Month, TimeSeries, difference, log_transform, pearson


def ts(values, label="s", start="2012-04"):
    return TimeSeries(label, start, values)


class TestMonth:
    def test_parse_and_arithmetic(self):
        m = Month.parse("2012-04")
        assert str(m + 9) == "2013-01"
        assert Month.parse("2015-06") - m == 38
        assert m < m + 1

    def test_bad_month(self):
        with pytest.raises(ValueError):
            Month.parse("2012-13")


class TestTimeSeries:
    def test_immutable_values(self):
        s = ts([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 5.0

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            ts([1.0, float("nan")])

    def test_volume_non_negative(self):
        with pytest.raises(ValueError):
            TimeSeries("v", "2012-04", [1.0, -1.0], volume=True)

    def test_end_and_months(self):
        s = ts([1, 2, 3])
        assert str(s.end) == "2012-06"
        assert [str(m) for m in s.months] == ["2012-04", "2012-05", "2012-06"]


class TestTransforms:
    def test_log_of_ones(self):
        np.testing.assert_allclose(log_transform(ts([1, 1, 1])).values, [0, 0, 0])

    def test_log_of_powers_of_e(self):
        np.testing.assert_allclose(log_transform(ts([math.e, math.e**2])).values, [1, 2])

    def test_log_zero_reports_month(self):
        with pytest.raises(NonPositiveValue) as err:
            log_transform(ts([1.0, 0.0, 2.0]))
        assert str(err.value.month) == "2012-05"

    def test_difference(self):
        np.testing.assert_allclose(difference(ts([1, 2, 4, 7]), 1).values, [1, 2, 3])
        np.testing.assert_allclose(difference(ts([1, 2, 4, 7]), 2).values, [1, 1])
        np.testing.assert_allclose(difference(ts([5, 5, 5]), 1).values, [0, 0])

    def test_difference_advances_start(self):
        d = difference(ts([1, 2, 4, 7]), 2)
        assert str(d.start) == "2012-06"
        assert len(d) == 2

    def test_difference_too_short(self):
        with pytest.raises(SeriesTooShort):
            difference(ts([1, 2]), 2)

    def test_log_difference_of_geometric_series(self):
        s = ts(3.0 * 1.07 ** np.arange(20))
        np.testing.assert_allclose(difference(log_transform(s)).values, math.log(1.07), atol=1e-12)


class TestPearson:
    def test_perfect(self):
        x = ts([1.0, 3.0, 2.0, 5.0])
        assert pearson(x, x).rho == 1.0
        assert pearson(x, ts(-x.values)).rho == -1.0

    def test_textbook_oracle(self):
        rng = np.random.default_rng(11)
        cov = [[1.0, 0.5], [0.5, 1.0]]
        xy = rng.multivariate_normal([0, 0], cov, size=39)
        x, y = ts(xy[:, 0], "x"), ts(xy[:, 1], "y")
        n = 39
        sx, sy = xy[:, 0].sum(), xy[:, 1].sum()
        rho = (n * (xy[:, 0] * xy[:, 1]).sum() - sx * sy) / math.sqrt(
            (n * (xy[:, 0] ** 2).sum() - sx**2) * (n * (xy[:, 1] ** 2).sum() - sy**2)
        )
        t = abs(rho) * math.sqrt((n - 2) / (1 - rho**2))
        v = n - 2
        dens = lambda u: special.gamma((v + 1) / 2) / (math.sqrt(v * math.pi) * special.gamma(v / 2)) * (1 + u * u / v) ** (-(v + 1) / 2)  # noqa: E731
        tail, _ = integrate.quad(dens, t, np.inf, epsabs=1e-14)
        r = pearson(x, y)
        assert r.rho == pytest.approx(rho, abs=1e-12)
        assert r.p_value == pytest.approx(2 * tail, abs=1e-10)
        assert r.n == 39

    def test_misaligned(self):
        with pytest.raises(Misaligned):
            pearson(ts([1, 2, 3]), ts([1, 2, 3], start="2012-05"))

    def test_constant(self):
        with pytest.raises(ConstantSeries):
            pearson(ts([1, 1, 1]), ts([1, 2, 3]))

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            pearson(ts([1, 2]), ts([2, 1]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.1, 100), st.floats(-50, 50))
    def test_symmetry_and_affine_invariance(self, seed, scale, shift):
        rng = np.random.default_rng(seed)
        x, y = ts(rng.standard_normal(30)), ts(rng.standard_normal(30))
        r = pearson(x, y)
        assert pearson(y, x).rho == r.rho
        assert pearson(ts(scale * x.values + shift), y).rho == pytest.approx(r.rho, abs=1e-12)
        assert 0.0 <= r.p_value <= 1.0
