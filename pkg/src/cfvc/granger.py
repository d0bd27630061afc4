"""Toda-Yamamoto Granger causality: a Wald test on a lag-augmented VAR in levels.

The VAR is fitted with ``m + d_max`` lags and only the first ``m`` lags of the
causing variable are restricted in the effect equation, so the statistic is
asymptotically chi-square with ``m`` degrees of freedom whatever the
integration or cointegration properties of the pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deterministic import Deterministic
from .numerics import dist_sf
from .timeseries import TimeSeries
from .var import VarModel, fit_var

SIGNIFICANCE_LEVELS = {"1%": 0.01, "5%": 0.05, "10%": 0.10}


@dataclass(frozen=True)
class GrangerResult:
    cause: str
    effect: str
    m: int
    d_max: int
    wald_statistic: float
    dof: int
    p_value: float
    spec: Deterministic
    nobs: int

    @property
    def reject_at(self) -> dict:
        return {lvl: self.p_value < a for lvl, a in SIGNIFICANCE_LEVELS.items()}

    @property
    def pair(self) -> str:
        return f"{self.cause}→{self.effect}"


def wald_zero_restriction(model: VarModel, equation: int, positions) -> float:
    """Wald statistic for ``b[positions] = 0`` in one equation of a fitted VAR."""
    b = model.coefficient_vector(equation)
    v = model.coefficient_cov(equation)
    idx = np.asarray(positions, dtype=int)
    rb = b[idx]
    return float(rb @ np.linalg.solve(v[np.ix_(idx, idx)], rb))


def cross_lag_positions(model: VarModel, causing: int, lags: int) -> list[int]:
    nd = model.spec.n_terms
    return [nd + j * model.k + causing for j in range(lags)]


def ty_granger(cause: TimeSeries, effect: TimeSeries, m: int, d_max: int = 1, spec=Deterministic.CONSTANT_AND_TREND) -> GrangerResult:
    """Test the null that ``cause`` does not Granger-cause ``effect``."""
    if m < 1:
        raise ValueError("lag order m must be >= 1")
    if d_max not in (0, 1, 2):
        raise ValueError("d_max must be 0, 1 or 2")
    spec = Deterministic.coerce(spec)
    model = fit_var([cause, effect], m + d_max, spec)
    w = wald_zero_restriction(model, 1, cross_lag_positions(model, 0, m))
    return GrangerResult(cause.label, effect.label, m, d_max, w, m, dist_sf("chi_square", w, m), spec, model.sample_size)


def robustness_flag(p_values, level: float = 0.05) -> str:
    """``"volatile"`` when the decisions at ``level`` disagree across lags, else ``"smooth"``."""
    decisions = {p < level for p in p_values}
    return "volatile" if len(decisions) > 1 else "smooth"


@dataclass(frozen=True)
class Robustness:
    results: tuple
    flag: str

    @property
    def lags(self) -> tuple:
        return tuple(r.m for r in self.results)


def ty_robustness(cause: TimeSeries, effect: TimeSeries, m: int, d_max: int = 1, spec=Deterministic.CONSTANT_AND_TREND, level: float = 0.05) -> Robustness:
    """Re-run the test at ``m - 1``, ``m`` and ``m + 1``."""
    if m < 2:
        raise ValueError("robustness check needs m >= 2 so that m - 1 >= 1")
    results = tuple(ty_granger(cause, effect, lag, d_max, spec) for lag in (m - 1, m, m + 1))
    return Robustness(results, robustness_flag([r.p_value for r in results], level))


def causality_conclusion(forward: GrangerResult, backward: GrangerResult, level: float = 0.05) -> tuple[str, str]:
    """Pair-level verdict for the Granger table: (kind, direction)."""
    f, b = forward.p_value < level, backward.p_value < level
    if f and b:
        return "Bidirectional causality", f"{forward.cause}↔{forward.effect}"
    if f:
        return "Unidirectional causality", forward.pair
    if b:
        return "Unidirectional causality", backward.pair
    return "No causality", ""
