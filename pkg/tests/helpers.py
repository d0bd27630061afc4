"""Shared test helpers: frozen oracle fixtures and their comparison against cfvc."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

import numpy as np

from cfvc.granger import ty_granger
from cfvc.johansen import johansen
from cfvc.simulate import Dgp, generate
from cfvc.timeseries import TimeSeries
from cfvc.unitroot import adf, kpss, pp
from cfvc.var import fit_var, information_criteria, ljung_box

DATA = Path(__file__).resolve().parent / "data"


@lru_cache(maxsize=1)
def reference_fixtures() -> list[dict]:
    return json.loads((DATA / "reference_fixtures.json").read_text(encoding="utf-8"))["fixtures"]


def ts(values, label="s", start="2000-01") -> TimeSeries:
    return TimeSeries(label, start, np.asarray(values, dtype=float))


def fixture_series(fx: dict) -> tuple[TimeSeries, TimeSeries]:
    return ts(fx["x"], "x"), ts(fx["y"], "y")


def regenerate(fx: dict) -> tuple[np.ndarray, np.ndarray]:
    d1, d2 = (Dgp(**r) if r else None for r in fx["dgp"])
    first = generate(d1)
    if d2 is None:
        return first[0].values, first[1].values
    return first.values, generate(d2).values


def compare_fixture(fx: dict) -> dict[str, float]:
    """Largest absolute deviation from the reference, by quantity group."""
    x, y = fixture_series(fx)
    dev = {k: 0.0 for k in ("adf", "pp", "kpss", "ljung_box", "var_coefficients", "information_criteria", "johansen", "mwald")}

    def upd(key, ours, ref):
        dev[key] = max(dev[key], float(np.max(np.abs(np.asarray(ours, dtype=float) - np.asarray(ref, dtype=float)))))

    for label, s in (("x", x), ("y", y)):
        for spec, ref in fx["unit_root"][label].items():
            a = adf(s, spec, max_lag=ref["adf_max_lag"], criterion="aic")
            if a.lags_or_bandwidth != ref["adf_lag"]:
                dev["adf"] = float("inf")
            upd("adf", a.statistic, ref["adf"])
            upd("pp", pp(s, spec, ref["bandwidth"]).statistic, ref["pp"])
            upd("kpss", kpss(s, spec, ref["bandwidth"]).statistic, ref["kpss"])

    m = fx["m"]
    model = fit_var([x, y], m, "constant_and_trend")
    for eq in range(2):
        upd("var_coefficients", model.coefficient_vector(eq), fx["var"]["params"][eq])
        lb = ljung_box(model.residuals[:, eq], 12, 2 * m)
        upd("ljung_box", lb.statistic, fx["var"]["ljung_box"][eq])
        upd("ljung_box", lb.p_value, fx["var"]["ljung_box_p"][eq])
    ic = information_criteria(model)
    upd("information_criteria", [ic.aic, ic.bic_sic], [fx["var"]["aic"], fx["var"]["bic"]])
    # FPE is exp(logdet)*...: compare relative to its own scale
    dev["information_criteria"] = max(dev["information_criteria"], abs(ic.fpe / fx["var"]["fpe"] - 1.0))

    for spec, ref in fx["johansen"].items():
        j = johansen([x, y], fx["johansen_lag"], spec)
        upd("johansen", j.eigenvalues, ref["eigenvalues"])
        upd("johansen", j.trace_stats, ref["trace"])
        upd("johansen", j.max_eig_stats, ref["max_eig"])

    for d_max in (0, 1):
        for cause, effect, key in ((x, y, "x_to_y"), (y, x, "y_to_x")):
            g = ty_granger(cause, effect, m, d_max)
            ref = fx["ty"][f"{key}_dmax{d_max}"]
            upd("mwald", g.wald_statistic, ref["statistic"])
            upd("mwald", g.p_value, ref["p_value"])
    return dev


TOLERANCES = {
    "adf": 1e-6,
    "pp": 1e-6,
    "kpss": 1e-6,
    "ljung_box": 1e-6,
    "var_coefficients": 1e-8,
    "information_criteria": 1e-6,
    "johansen": 1e-6,
    "mwald": 1e-6,
}
