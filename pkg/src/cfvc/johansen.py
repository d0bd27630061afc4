"""Bivariate Johansen cointegration test (trace and maximum-eigenvalue statistics)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deterministic import Deterministic
from .errors import NotPositiveDefinite, RankDeficient, SeriesTooShort, SingularMoments, UnsupportedSpec
from .numerics import eigen_symmetric_generalized, ols
from .timeseries import check_aligned

# Osterwald-Lenum (1992) quantiles indexed by p - r (number of common trends
# under the null).  constant_and_trend: Table 2*, linear trend restricted to the
# cointegration space; constant: Table 1, unrestricted constant.
_OSTERWALD_LENUM = {
    Deterministic.CONSTANT_AND_TREND: {
        "trace": {1: {"10%": 10.49, "5%": 12.25, "1%": 16.26}, 2: {"10%": 22.76, "5%": 25.32, "1%": 30.45}},
        "max_eig": {1: {"10%": 10.49, "5%": 12.25, "1%": 16.26}, 2: {"10%": 16.85, "5%": 18.96, "1%": 23.65}},
    },
    Deterministic.CONSTANT: {
        "trace": {1: {"10%": 2.69, "5%": 3.76, "1%": 6.65}, 2: {"10%": 13.33, "5%": 15.41, "1%": 20.04}},
        "max_eig": {1: {"10%": 2.69, "5%": 3.76, "1%": 6.65}, 2: {"10%": 12.07, "5%": 14.07, "1%": 18.63}},
    },
}


def johansen_critical_value(kind: str, rank_null: int, level: str, spec=Deterministic.CONSTANT_AND_TREND, k: int = 2) -> float:
    spec = Deterministic.coerce(spec)
    if spec not in _OSTERWALD_LENUM:
        raise UnsupportedSpec(f"no Johansen critical values for spec {spec.value!r}")
    if kind not in ("trace", "max_eig"):
        raise ValueError(f"kind must be 'trace' or 'max_eig', got {kind!r}")
    table = _OSTERWALD_LENUM[spec][kind]
    trends = k - rank_null
    if trends not in table or level not in table[trends]:
        raise UnsupportedSpec(f"no critical value for k={k}, r={rank_null}, level={level}")
    return table[trends][level]


@dataclass(frozen=True)
class JohansenResult:
    labels: tuple
    lag: int
    spec: Deterministic
    nobs: int
    eigenvalues: np.ndarray
    trace_stats: np.ndarray
    max_eig_stats: np.ndarray
    critical_values: dict
    cointegrating_vectors: np.ndarray

    def _rank(self, kind: str, level: str) -> int:
        stats = self.trace_stats if kind == "trace" else self.max_eig_stats
        for r, stat in enumerate(stats):
            if stat <= self.critical_values[kind][r][level]:
                return r
        return len(stats)

    @property
    def concluded_rank(self) -> int:
        """Smallest rank whose trace-test null is not rejected at 5%."""
        return self._rank("trace", "5%")

    @property
    def max_eig_rank(self) -> int:
        return self._rank("max_eig", "5%")

    def rank_at(self, kind: str = "trace", level: str = "5%") -> int:
        return self._rank(kind, level)


def _residualize(target, regressors):
    if regressors.shape[1] == 0:
        return target
    return ols(regressors, target).residuals


def johansen(series_pair, lag: int = 2, spec=Deterministic.CONSTANT_AND_TREND) -> JohansenResult:
    """Reduced-rank regression on the VECM implied by a levels VAR(``lag``).

    ``dy_t`` and ``y_{t-1}`` are purged of ``lag - 1`` lagged differences and
    the unrestricted constant; under ``constant_and_trend`` a linear trend joins
    ``y_{t-1}`` inside the cointegrating relation.  Statistics use the
    ``T = n - lag`` effective observations.
    """
    spec = Deterministic.coerce(spec)
    if spec not in _OSTERWALD_LENUM:
        raise UnsupportedSpec(f"Johansen test supports constant or constant_and_trend, got {spec.value!r}")
    if lag < 2:
        raise ValueError("lag must be >= 2 (the VECM keeps lag - 1 differenced lags)")
    series_pair = list(series_pair)
    check_aligned(series_pair)
    data = np.column_stack([s.values for s in series_pair])
    n, k = data.shape
    t_eff = n - lag
    if t_eff <= k * lag + spec.n_terms + 5:
        raise SeriesTooShort(f"Johansen test at lag {lag} needs more than {k * lag + spec.n_terms + 5 + lag} observations, got {n}")

    dy = np.diff(data, axis=0)
    z0 = dy[lag - 1 :]
    z1 = data[lag - 1 : -1]
    short_run = [dy[lag - 1 - j : n - 1 - j] for j in range(1, lag)]
    z2 = np.column_stack([np.ones(t_eff), *short_run])
    if spec == Deterministic.CONSTANT_AND_TREND:
        z1 = np.column_stack([z1, np.arange(lag, lag + t_eff, dtype=float)])

    try:
        r0 = _residualize(z0, z2)
        r1 = _residualize(z1, z2)
        s00 = r0.T @ r0 / t_eff
        s11 = r1.T @ r1 / t_eff
        s01 = r0.T @ r1 / t_eff
        a = s01.T @ np.linalg.solve(s00, s01)
        values, vectors = eigen_symmetric_generalized(0.5 * (a + a.T), s11)
    except (RankDeficient, NotPositiveDefinite, np.linalg.LinAlgError) as exc:
        raise SingularMoments("product-moment matrices are singular") from exc

    lam = np.clip(values[:k], 0.0, np.nextafter(1.0, 0.0))
    logs = np.log1p(-lam)
    trace = -t_eff * np.cumsum(logs[::-1])[::-1]
    max_eig = -t_eff * logs
    # final null has a single eigenvalue left: make the identity exact
    trace[-1] = max_eig[-1]
    cvs = {
        kind: {r: {lvl: johansen_critical_value(kind, r, lvl, spec, k) for lvl in ("10%", "5%", "1%")} for r in range(k)}
        for kind in ("trace", "max_eig")
    }
    return JohansenResult(
        labels=tuple(s.label for s in series_pair),
        lag=lag,
        spec=spec,
        nobs=t_eff,
        eigenvalues=lam,
        trace_stats=trace,
        max_eig_stats=max_eig,
        critical_values=cvs,
        cointegrating_vectors=vectors[:, :k],
    )


def coint_conclusion(result: JohansenResult, level: str = "5%") -> str:
    """Report wording for the trace-based rank."""
    rank = result.rank_at("trace", level)
    if rank == 0:
        return "No coint. vector."
    if rank < len(result.eigenvalues):
        return "One coint. vector." if rank == 1 else f"{rank} coint. vectors."
    return "At least one coint. vector."
