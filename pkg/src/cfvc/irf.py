"""Orthogonalized (Cholesky) impulse responses with residual-bootstrap bands."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import BadOrdering, CfvcError, NonFiniteReplicate
from .numerics import cholesky_lower
from .var import VarModel, fit_var_array, is_stable, ma_coefficients

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IrfResult:
    impulse: str
    response: str
    ordering: tuple
    horizon: int
    point: np.ndarray
    lower: np.ndarray | None
    upper: np.ndarray | None
    level: float | None
    cumulative: bool
    replications: int
    discarded: int
    seed: int | None
    shock_size: float | None

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.horizon + 1)


def _ordering_index(model: VarModel, ordering) -> list[int]:
    ordering = tuple(ordering)
    if sorted(ordering) != sorted(model.labels) or len(set(ordering)) != len(ordering):
        raise BadOrdering(f"ordering {ordering} is not a permutation of {model.labels}")
    return [model.index(lbl) for lbl in ordering]


def orthogonal_factor(model: VarModel, ordering) -> np.ndarray:
    """Lower-triangular-in-``ordering`` factor P with ``P P' = Sigma``; column j is a shock to variable j."""
    idx = _ordering_index(model, ordering)
    sigma = model.residual_covariance[np.ix_(idx, idx)]
    lower = cholesky_lower(sigma)
    p = np.zeros_like(lower)
    p[np.ix_(idx, idx)] = lower
    return p


def orthogonalized_irf(model: VarModel, ordering, horizon: int, cumulative: bool = False) -> np.ndarray:
    """Array ``theta[h, i, j]``: response of variable i at lag h to a one s.d. shock in j."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    theta = ma_coefficients(model.coefficient_matrices, horizon) @ orthogonal_factor(model, ordering)
    return np.cumsum(theta, axis=0) if cumulative else theta


def _path(model, ordering, horizon, cumulative, i, j, shock_size):
    theta = orthogonalized_irf(model, ordering, horizon, cumulative)
    path = theta[:, i, j]
    if shock_size is not None:
        path = path * (shock_size / orthogonal_factor(model, ordering)[j, j])
    return path


def _resolve(model, ordering, impulse, response):
    if ordering is None:
        first = impulse if impulse is not None else model.labels[0]
        ordering = (first, *[lbl for lbl in model.labels if lbl != first])
    ordering = tuple(ordering)
    _ordering_index(model, ordering)
    impulse = ordering[0] if impulse is None else impulse
    if response is None:
        response = next(lbl for lbl in ordering if lbl != impulse) if len(ordering) > 1 else impulse
    for lbl in (impulse, response):
        if lbl not in model.labels:
            raise BadOrdering(f"unknown variable {lbl!r}")
    return ordering, model.index(impulse), model.index(response), impulse, response


def irf_point(model: VarModel, ordering=None, horizon: int = 10, cumulative: bool = False, impulse=None, response=None, shock_size: float | None = None) -> IrfResult:
    """Point impulse response of ``response`` to an orthogonal shock in ``impulse``.

    ``ordering`` defaults to the impulse variable first.  ``shock_size`` rescales
    the shock to that impact on the impulse variable itself (e.g. 0.01 for a
    one-percent move of a logged series); ``None`` keeps one standard deviation.
    """
    ordering, j, i, imp, resp = _resolve(model, ordering, impulse, response)
    if not is_stable(model):
        log.warning("VAR(%d) on %s is not stable; impulse responses will not die out", model.m, "/".join(model.labels))
    path = _path(model, ordering, horizon, cumulative, i, j, shock_size)
    return IrfResult(imp, resp, ordering, horizon, path, None, None, None, cumulative, 0, 0, None, shock_size)


def simulate_recursive(model: VarModel, shocks: np.ndarray) -> np.ndarray:
    """Rebuild the sample from the fitted parameters, the actual presample and ``shocks``."""
    y = np.array(model.data, dtype=float, copy=True)
    start = model.first_obs
    n = y.shape[0]
    det = model.deterministic_at(np.arange(start, n))
    mats = model.coefficient_matrices
    for t in range(start, n):
        row = det[t - start] + shocks[t - start]
        for j in range(model.m):
            row = row + mats[j] @ y[t - j - 1]
        y[t] = row
    return y


def irf_bootstrap(
    model: VarModel,
    ordering=None,
    horizon: int = 10,
    replications: int = 1000,
    level: float = 0.90,
    seed: int = 0,
    cumulative: bool = True,
    impulse=None,
    response=None,
    shock_size: float | None = None,
) -> IrfResult:
    """Point IRF plus percentile bands from a recursive-design residual bootstrap.

    Each replicate resamples the centred residuals with replacement, rebuilds
    the series recursively from the observed presample, refits the VAR with the
    same lag order and deterministics, and recomputes the response.  Replicate
    ``r`` draws from child ``r`` of ``SeedSequence(seed)``, so a given seed
    always reproduces the same bands.  Replicates that fail to fit or produce
    non-finite responses are dropped and counted in ``discarded``.
    """
    if replications < 100:
        raise ValueError("replications must be >= 100")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    ordering, j, i, imp, resp = _resolve(model, ordering, impulse, response)
    point = _path(model, ordering, horizon, cumulative, i, j, shock_size)

    e = model.residuals - model.residuals.mean(axis=0)
    t_obs = e.shape[0]
    draws = []
    discarded = 0
    for child in np.random.SeedSequence(seed).spawn(replications):
        rng = np.random.Generator(np.random.PCG64(child))
        shocks = e[rng.integers(0, t_obs, size=t_obs)]
        try:
            y = simulate_recursive(model, shocks)
            if not np.all(np.isfinite(y)):
                raise NonFiniteReplicate("simulated path is not finite")
            refit = fit_var_array(y, model.labels, model.m, model.spec, model.first_obs)
            path = _path(refit, ordering, horizon, cumulative, i, j, shock_size)
            if not np.all(np.isfinite(path)):
                raise NonFiniteReplicate("replicate response is not finite")
        except (CfvcError, np.linalg.LinAlgError) as exc:
            discarded += 1
            log.debug("bootstrap replicate discarded: %s", exc)
            continue
        draws.append(path)
    if not draws:
        raise NonFiniteReplicate(f"all {replications} bootstrap replicates were discarded")
    if discarded:
        log.info("IRF bootstrap %s→%s: discarded %d of %d replicates", imp, resp, discarded, replications)
    alpha = (1.0 - level) / 2.0
    lower, upper = np.quantile(np.stack(draws), [alpha, 1.0 - alpha], axis=0)
    return IrfResult(imp, resp, ordering, horizon, point, lower, upper, level, cumulative, replications, discarded, seed, shock_size)
