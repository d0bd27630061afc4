"""Crowdfunding / venture-capital time-series toolkit.

Monthly aggregation of transaction files, unit-root batteries, VAR lag
selection, Toda-Yamamoto Granger causality, Johansen cointegration and
bootstrapped Cholesky impulse responses, plus a config-driven CLI pipeline.
"""

__version__ = "0.1.0"

from .deterministic import Deterministic  # noqa: E402
from .granger import GrangerResult, ty_granger, ty_robustness  # noqa: E402
from .irf import IrfResult, irf_bootstrap, irf_point  # noqa: E402
from .johansen import JohansenResult, johansen, johansen_critical_value  # noqa: E402
from .timeseries import Month, TimeSeries  # noqa: E402
from .unitroot import adf, integration_order, kpss, pp  # noqa: E402
from .var import VarModel, fit_var, select_lag  # noqa: E402

__all__ = [
    "Deterministic",
    "GrangerResult",
    "IrfResult",
    "JohansenResult",
    "Month",
    "TimeSeries",
    "VarModel",
    "adf",
    "fit_var",
    "integration_order",
    "irf_bootstrap",
    "irf_point",
    "johansen",
    "johansen_critical_value",
    "kpss",
    "pp",
    "select_lag",
    "ty_granger",
    "ty_robustness",
]
