"""ADF, Phillips-Perron and KPSS tests and the joint integration-order decision."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .deterministic import Deterministic, deterministic_columns
from .errors import InvalidSpec, SeriesTooShort
from .numerics import ols
from .timeseries import TimeSeries, difference

LEVELS = ("1%", "5%", "10%")

# MacKinnon (2010) response surfaces for the DF tau distribution, one series:
# cv(T) = b0 + b1/T + b2/T**2 + b3/T**3, rows ordered 1%, 5%, 10%.
_TAU_SURFACE = {
    Deterministic.NONE: [
        (-2.56574, -2.2358, -3.627, 0.0),
        (-1.94100, -0.2686, -3.365, 31.223),
        (-1.61682, 0.2656, -2.714, 25.364),
    ],
    Deterministic.CONSTANT: [
        (-3.43035, -6.5393, -16.786, -79.433),
        (-2.86154, -2.8903, -4.234, -40.040),
        (-2.56677, -1.5384, -2.809, 0.0),
    ],
    Deterministic.CONSTANT_AND_TREND: [
        (-3.95877, -9.0531, -28.428, -134.155),
        (-3.41049, -4.3904, -9.036, -45.374),
        (-3.12705, -2.5856, -3.925, -22.380),
    ],
}

# Kwiatkowski, Phillips, Schmidt and Shin (1992), Table 1.
_KPSS_CRITICAL = {
    Deterministic.CONSTANT: {"1%": 0.739, "5%": 0.463, "10%": 0.347},
    Deterministic.CONSTANT_AND_TREND: {"1%": 0.216, "5%": 0.146, "10%": 0.119},
}


def tau_critical_values(spec, nobs: int) -> dict[str, float]:
    spec = Deterministic.coerce(spec)
    out = {}
    for level, (b0, b1, b2, b3) in zip(LEVELS, _TAU_SURFACE[spec]):
        inv = 1.0 / nobs
        out[level] = b0 + b1 * inv + b2 * inv**2 + b3 * inv**3
    return out


def kpss_critical_values(spec) -> dict[str, float]:
    spec = Deterministic.coerce(spec)
    if spec not in _KPSS_CRITICAL:
        raise InvalidSpec("KPSS needs a constant or a constant and trend")
    return dict(_KPSS_CRITICAL[spec])


def auto_bandwidth(n: int) -> int:
    """Newey-West rule ``floor(4 (n/100)^(2/9))``."""
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def bartlett_lrv(u: np.ndarray, bandwidth: int) -> float:
    """Bartlett-kernel long-run variance of ``u`` (no demeaning, divisor ``n``)."""
    n = u.size
    total = float(u @ u)
    for j in range(1, bandwidth + 1):
        total += 2.0 * (1.0 - j / (bandwidth + 1.0)) * float(u[j:] @ u[:-j])
    return total / n


@dataclass(frozen=True)
class UnitRootResult:
    test: str
    statistic: float
    spec: Deterministic
    lags_or_bandwidth: int
    critical_values: dict
    nobs: int
    reject_at_5pct: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "reject_at_5pct", self.rejects("5%"))

    @property
    def right_tailed(self) -> bool:
        return self.test == "kpss"

    def rejects(self, level: str) -> bool:
        cv = self.critical_values[level]
        return self.statistic > cv if self.right_tailed else self.statistic < cv


def _gaussian_ic(rss: float, nobs: int, k: int, criterion: str) -> float:
    llf = -0.5 * nobs * (math.log(2 * math.pi) + math.log(rss / nobs) + 1.0)
    penalty = 2.0 * k if criterion == "aic" else math.log(nobs) * k
    return -2.0 * llf + penalty


def _adf_design(x: np.ndarray, lags: int, keep: int, spec: Deterministic):
    """Regression of dy_t on (deterministics, y_{t-1}, dy_{t-1..t-lags}) over the last ``keep`` rows."""
    dy = np.diff(x)
    cols = [x[-keep - 1 : -1]]
    for j in range(1, lags + 1):
        cols.append(dy[-keep - j : dy.size - j])
    z = np.column_stack(cols)
    det = deterministic_columns(keep, spec)
    return dy[-keep:], np.column_stack([det, z]), det.shape[1]


def adf(s: TimeSeries, spec=Deterministic.CONSTANT, max_lag: int | None = None, criterion: str | None = "aic") -> UnitRootResult:
    """Augmented Dickey-Fuller t-test of a unit root (left-tailed).

    With ``criterion`` set to ``"aic"`` or ``"bic"`` the augmentation lag is
    searched over ``0..max_lag`` on a common sample, then the chosen model is
    re-estimated on every available observation.  ``criterion=None`` uses
    exactly ``max_lag`` lags.
    """
    spec = Deterministic.coerce(spec)
    x = np.asarray(s.values, dtype=float)
    n = x.size
    if max_lag is None:
        max_lag = max(0, min(int(12.0 * (n / 100.0) ** 0.25), n - 10))
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    if n < max_lag + 10:
        raise SeriesTooShort(f"ADF with max_lag={max_lag} needs at least {max_lag + 10} observations, got {n}")

    lag = max_lag
    if criterion is not None:
        if criterion not in ("aic", "bic"):
            raise ValueError(f"criterion must be 'aic', 'bic' or None, got {criterion!r}")
        keep = n - 1 - max_lag
        y, full, ndet = _adf_design(x, max_lag, keep, spec)
        best = None
        for cand in range(max_lag + 1):
            k = ndet + 1 + cand
            fit = ols(full[:, :k], y)
            ic = _gaussian_ic(float(fit.rss), keep, k, criterion)
            if best is None or ic < best[0]:
                best = (ic, cand)
        lag = best[1]

    keep = n - 1 - lag
    y, design, ndet = _adf_design(x, lag, keep, spec)
    fit = ols(design, y)
    rho = fit.coefficients[ndet]
    se = math.sqrt(fit.coefficient_covariance[ndet, ndet])
    return UnitRootResult("adf", float(rho / se), spec, lag, tau_critical_values(spec, keep), keep)


def pp(s: TimeSeries, spec=Deterministic.CONSTANT, bandwidth: int | str = "auto") -> UnitRootResult:
    """Phillips-Perron Z-tau test with a Bartlett long-run variance (left-tailed)."""
    spec = Deterministic.coerce(spec)
    x = np.asarray(s.values, dtype=float)
    if x.size < 20:
        raise SeriesTooShort(f"PP needs at least 20 observations, got {x.size}")
    if bandwidth == "auto":
        bandwidth = auto_bandwidth(x.size)
    bandwidth = int(bandwidth)

    n = x.size - 1
    det = deterministic_columns(n, spec)
    design = np.column_stack([x[:-1], det])
    fit = ols(design, x[1:])
    k = design.shape[1]
    u = fit.residuals
    if bandwidth > u.size:
        raise SeriesTooShort(f"bandwidth {bandwidth} exceeds the {u.size} residuals")
    lam2 = bartlett_lrv(u, bandwidth)
    s2 = float(u @ u) / (n - k)
    gamma0 = s2 * (n - k) / n
    sigma = math.sqrt(fit.coefficient_covariance[0, 0])
    rho = fit.coefficients[0]
    z_tau = math.sqrt(gamma0 / lam2) * ((rho - 1.0) / sigma) - 0.5 * ((lam2 - gamma0) / math.sqrt(lam2)) * (
        n * sigma / math.sqrt(s2)
    )
    return UnitRootResult("pp", float(z_tau), spec, bandwidth, tau_critical_values(spec, n), n)


def kpss(s: TimeSeries, spec=Deterministic.CONSTANT, bandwidth: int | str = "auto") -> UnitRootResult:
    """KPSS LM test of level or trend stationarity (right-tailed)."""
    spec = Deterministic.coerce(spec)
    if spec == Deterministic.NONE:
        raise InvalidSpec("KPSS needs a constant or a constant and trend")
    x = np.asarray(s.values, dtype=float)
    n = x.size
    if n < 20:
        raise SeriesTooShort(f"KPSS needs at least 20 observations, got {n}")
    if bandwidth == "auto":
        bandwidth = auto_bandwidth(n)
    bandwidth = int(bandwidth)
    if bandwidth >= n:
        raise SeriesTooShort(f"bandwidth {bandwidth} must be below the {n} observations")
    if spec == Deterministic.CONSTANT:
        e = x - x.mean()
    else:
        e = ols(deterministic_columns(n, spec), x).residuals
    eta = float(np.sum(np.cumsum(e) ** 2)) / n**2
    stat = eta / bartlett_lrv(e, bandwidth)
    return UnitRootResult("kpss", stat, spec, bandwidth, kpss_critical_values(spec), n)


def classify(adf_result: UnitRootResult, kpss_result: UnitRootResult) -> str:
    if adf_result.reject_at_5pct and not kpss_result.reject_at_5pct:
        return "stationary"
    if not adf_result.reject_at_5pct and kpss_result.reject_at_5pct:
        return "unit_root"
    return "ambiguous"


@dataclass(frozen=True)
class BatteryRow:
    d: int
    adf: UnitRootResult
    pp: UnitRootResult
    kpss: UnitRootResult
    verdict: str


@dataclass(frozen=True)
class IntegrationOrder:
    label: str
    d: int
    capped: bool
    evidence: list

    @property
    def note(self) -> str:
        return "cap reached" if self.capped else ""

    def __int__(self):
        return self.d


def run_battery(s: TimeSeries, spec=Deterministic.CONSTANT_AND_TREND, adf_max_lag=None, criterion="aic", bandwidth="auto"):
    a = adf(s, spec, adf_max_lag, criterion)
    p = pp(s, spec, bandwidth)
    k = kpss(s, spec if Deterministic.coerce(spec) != Deterministic.NONE else Deterministic.CONSTANT, bandwidth)
    return a, p, k


def integration_order(s: TimeSeries, max_d: int = 1, spec=Deterministic.CONSTANT_AND_TREND, adf_max_lag=None, criterion="aic", bandwidth="auto") -> IntegrationOrder:
    """Smallest ``d`` at which ADF rejects and KPSS does not, capped at ``max_d``.

    Ambiguous outcomes (both reject, or neither) count as non-stationary, so the
    series is differenced again.  PP results are carried as evidence only.
    """
    if max_d not in (1, 2):
        raise ValueError("max_d must be 1 or 2")
    evidence = []
    current = s
    for d in range(max_d + 1):
        a, p, k = run_battery(current, spec, adf_max_lag, criterion, bandwidth)
        verdict = classify(a, k)
        evidence.append(BatteryRow(d, a, p, k, verdict))
        if verdict == "stationary":
            return IntegrationOrder(s.label, d, False, evidence)
        if d < max_d:
            current = difference(current, 1)
    return IntegrationOrder(s.label, max_d, True, evidence)
