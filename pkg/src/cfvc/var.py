"""VAR estimation, information criteria, Ljung-Box diagnostics, stability and lag selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .deterministic import Deterministic, deterministic_columns
from .errors import SeriesTooShort, SingularCovariance
from .numerics import dist_sf, eigen_general, ols
from .timeseries import TimeSeries, check_aligned


@dataclass(frozen=True)
class VarModel:
    """Estimated VAR(m).

    ``coefficient_matrices[j - 1][i, l]`` is the effect of variable ``l`` at lag
    ``j`` on variable ``i``.  The trend regressor is the 1-based time index of
    the data row (1 at the first presample row), so it does not depend on how
    many presample rows the estimation skips.
    ``residual_covariance`` is the ML estimate ``E'E / T``; ``ols_covariance``
    is the ``T - s`` scaled version used for coefficient standard errors.
    """

    labels: tuple
    m: int
    spec: Deterministic
    intercepts: np.ndarray
    trend: np.ndarray
    coefficient_matrices: np.ndarray
    residuals: np.ndarray
    residual_covariance: np.ndarray
    ols_covariance: np.ndarray
    xtx_inv: np.ndarray
    data: np.ndarray = field(repr=False)
    first_obs: int = 0

    @property
    def k(self) -> int:
        return len(self.labels)

    @property
    def sample_size(self) -> int:
        return self.residuals.shape[0]

    @property
    def params_per_equation(self) -> int:
        return self.spec.n_terms + self.k * self.m

    @property
    def n_params(self) -> int:
        return self.m * self.k**2 + self.k * self.spec.n_terms

    def index(self, label) -> int:
        return self.labels.index(label)

    def coefficient_vector(self, equation: int) -> np.ndarray:
        """Coefficients of one equation in design order: deterministics, then lag 1..m blocks."""
        det = [self.intercepts[equation], self.trend[equation]][: self.spec.n_terms]
        lags = [self.coefficient_matrices[j][equation] for j in range(self.m)]
        return np.concatenate([np.asarray(det, dtype=float), *lags])

    def coefficient_cov(self, equation: int) -> np.ndarray:
        return self.ols_covariance[equation, equation] * self.xtx_inv

    def deterministic_at(self, rows: np.ndarray) -> np.ndarray:
        """Deterministic contribution for absolute data rows, shape (len(rows), k)."""
        rows = np.asarray(rows)
        out = np.zeros((rows.size, self.k))
        if self.spec.n_terms >= 1:
            out += self.intercepts
        if self.spec.n_terms == 2:
            out += np.outer(rows + 1, self.trend)
        return out


def _var_design(data: np.ndarray, m: int, start: int, spec: Deterministic):
    n = data.shape[0]
    rows = n - start
    lagged = [data[start - j : n - j] for j in range(1, m + 1)]
    design = np.column_stack([deterministic_columns(rows, spec, first_trend=start + 1), *lagged])
    return data[start:], design


def _stack(series) -> tuple[tuple, np.ndarray]:
    if isinstance(series, TimeSeries):
        series = [series]
    series = list(series)
    if not series:
        raise ValueError("no series given")
    check_aligned(series)
    return tuple(s.label for s in series), np.column_stack([s.values for s in series])


def fit_var_array(data: np.ndarray, labels: Sequence[str], m: int, spec=Deterministic.CONSTANT, start: int | None = None) -> VarModel:
    spec = Deterministic.coerce(spec)
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    n, k = data.shape
    if m < 1:
        raise ValueError("lag order must be >= 1")
    start = m if start is None else start
    if start < m:
        raise ValueError("estimation start must leave m presample rows")
    nobs = n - start
    if 2 * m >= n or nobs <= k * m + spec.n_terms + 5:
        raise SeriesTooShort(
            f"VAR({m}) with {k} variables needs more than {k * m + spec.n_terms + 5} usable rows, have {nobs}"
        )
    y, design = _var_design(data, m, start, spec)
    fit = ols(design, y)
    b = fit.coefficients
    nd = spec.n_terms
    intercepts = b[0] if nd >= 1 else np.zeros(k)
    trend = b[1] if nd == 2 else np.zeros(k)
    mats = np.stack([b[nd + j * k : nd + (j + 1) * k].T for j in range(m)])
    e = fit.residuals
    return VarModel(
        labels=tuple(labels),
        m=m,
        spec=spec,
        intercepts=np.array(intercepts),
        trend=np.array(trend),
        coefficient_matrices=mats,
        residuals=e,
        residual_covariance=e.T @ e / nobs,
        ols_covariance=np.atleast_2d(fit.residual_covariance),
        xtx_inv=fit.xtx_inv,
        data=data,
        first_obs=start,
    )


def fit_var(series, m: int, spec=Deterministic.CONSTANT, start: int | None = None) -> VarModel:
    """OLS estimate of a VAR(m) on aligned series.

    ``start`` is the first data row used as a response (default ``m``); lag
    selection passes a common ``start`` so all candidates share one sample.
    """
    labels, data = _stack(series)
    return fit_var_array(data, labels, m, spec, start)


@dataclass(frozen=True)
class InformationCriteria:
    aic: float
    bic_sic: float
    fpe: float


def information_criteria(model: VarModel) -> InformationCriteria:
    t = model.sample_size
    sign, logdet = np.linalg.slogdet(model.residual_covariance)
    if sign <= 0:
        raise SingularCovariance("residual covariance is singular")
    p = model.n_params
    s = model.params_per_equation
    aic = logdet + 2.0 * p / t
    bic = logdet + p * math.log(t) / t
    fpe = math.exp(logdet) * ((t + s) / (t - s)) ** model.k
    return InformationCriteria(float(aic), float(bic), float(fpe))


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    statistic: float
    p_value: float
    dof: int


def ljung_box(residuals, h: int = 12, fitted_params: int = 0) -> TestResult:
    """Ljung-Box Q on one residual column, chi-square with ``max(h - fitted_params, 1)`` dof."""
    e = np.asarray(residuals, dtype=float).ravel()
    n = e.size
    if h < 1:
        raise ValueError("h must be >= 1")
    if n <= h + fitted_params:
        raise SeriesTooShort(f"Ljung-Box with h={h} and {fitted_params} fitted parameters needs more than {h + fitted_params} residuals")
    d = e - e.mean()
    denom = float(d @ d)
    dof = max(h - fitted_params, 1)
    if denom == 0.0:
        return TestResult(0.0, 1.0, dof)
    q = 0.0
    for j in range(1, h + 1):
        r = float(d[j:] @ d[:-j]) / denom
        q += r * r / (n - j)
    q *= n * (n + 2)
    return TestResult(q, dist_sf("chi_square", q, dof), dof)


def companion_matrix(model_or_mats) -> np.ndarray:
    mats = model_or_mats.coefficient_matrices if isinstance(model_or_mats, VarModel) else np.asarray(model_or_mats)
    m, k, _ = mats.shape
    top = np.concatenate(list(mats), axis=1)
    if m == 1:
        return top
    bottom = np.eye(k * (m - 1), k * m)
    return np.vstack([top, bottom])


def stability_roots(model) -> np.ndarray:
    """Moduli of the companion-matrix eigenvalues, descending; stable iff all < 1."""
    return np.sort(np.abs(eigen_general(companion_matrix(model))))[::-1]


def is_stable(model) -> bool:
    return bool(stability_roots(model)[0] < 1.0)


CRITERIA = ("bic_sic", "aic", "fpe")


@dataclass(frozen=True)
class LagRow:
    m: int
    aic: float
    bic_sic: float
    fpe: float
    ljung_box_p: tuple
    stable: bool
    max_root: float

    def passes(self, level: float) -> bool:
        return self.stable and min(self.ljung_box_p) >= level


@dataclass(frozen=True)
class LagSelection:
    per_lag: dict
    chosen_m: int
    rationale: str
    minimizers: dict
    violation: bool = False

    def best(self, criterion: str) -> int:
        return self.minimizers[criterion]


def select_lag(series, max_lag: int = 6, spec=Deterministic.CONSTANT_AND_TREND, h: int = 12, level: float = 0.05) -> LagSelection:
    """Choose the VAR lag order.

    All orders ``1..max_lag`` are fitted on one common sample.  The choice is the
    smallest lag that minimizes at least one criterion and whose residuals pass
    Ljung-Box (every equation, ``level``) with a stable companion matrix.  If no
    minimizer passes, the next larger lag that passes is taken; if nothing
    passes, the BIC/SIC minimizer is returned with ``violation=True``.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    labels, data = _stack(series)
    spec = Deterministic.coerce(spec)
    rows = {}
    for m in range(1, max_lag + 1):
        model = fit_var_array(data, labels, m, spec, start=max_lag)
        ic = information_criteria(model)
        lb = tuple(ljung_box(model.residuals[:, i], h, model.k * m).p_value for i in range(model.k))
        roots = stability_roots(model)
        rows[m] = LagRow(m, ic.aic, ic.bic_sic, ic.fpe, lb, bool(roots[0] < 1.0), float(roots[0]))

    minimizers = {c: min(rows, key=lambda m: (getattr(rows[m], c), m)) for c in CRITERIA}
    for m in sorted(set(minimizers.values())):
        if rows[m].passes(level):
            names = [c for c in CRITERIA if minimizers[c] == m]
            return LagSelection(rows, m, f"minimizes {'/'.join(names)}; residual checks pass", minimizers)

    floor = min(minimizers.values())
    for m in range(floor + 1, max_lag + 1):
        if rows[m].passes(level):
            return LagSelection(
                rows, m, f"smallest lag above the criterion minimum ({floor}) clearing Ljung-Box and stability", minimizers
            )
    m = minimizers["bic_sic"]
    return LagSelection(rows, m, "bic_sic minimum; no lag clears Ljung-Box and stability", minimizers, violation=True)


def ma_coefficients(mats: np.ndarray, horizon: int) -> np.ndarray:
    """MA(infinity) matrices Psi_0..Psi_horizon of a VAR with lag matrices ``mats``."""
    m, k, _ = mats.shape
    psi = np.zeros((horizon + 1, k, k))
    psi[0] = np.eye(k)
    for h in range(1, horizon + 1):
        for j in range(1, min(h, m) + 1):
            psi[h] += mats[j - 1] @ psi[h - j]
    return psi
