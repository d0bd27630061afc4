"""Report serialization: schema-checked JSON, plain-text tables and plot CSVs.

The plain-text renderer reads only the structured report mapping, so every
number it prints is (a rounding of) a value stored in the JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path

import jsonschema

from .timeseries import Month

TABLES = ("descriptive", "correlations", "unit_roots", "lag_selection", "granger", "cointegration")


def empty_report() -> dict:
    keys = (*TABLES, "integration_orders", "lag_choice", "robustness", "irf", "errors")
    return {**{k: [] for k in keys}, "series": {}, "ingest": {}, "provenance": {}}


def _clean(value):
    """Replace non-finite floats with null so the JSON is strict."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def report_schema() -> dict:
    return json.loads(resources.files("cfvc").joinpath("data/report_schema.json").read_text(encoding="utf-8"))


def validate_report(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if the report does not match the bundled schema."""
    jsonschema.validate(_clean(report), report_schema())


def to_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# plain-text tables


def _fmt(value, digits=3):
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, int):
        return str(value)
    return f"{value:.{digits}f}"


def _table(title: str, header, rows) -> str:
    header = list(header)
    rows = [[str(c) for c in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(header)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    out = [title, line(header), line(["-" * w for w in widths])]
    out += [line(r) for r in rows]
    return "\n".join(out) + "\n"


def render_text(report: dict) -> str:
    parts = []
    parts.append(_table(
        "Descriptive statistics (project level)",
        ["Series", "N", "Volume", "Mean", "SD", "25%", "50%", "75%"],
        [[r["series"], r["count"], *[_fmt(r[k], 0) for k in ("volume", "mean", "sd", "p25", "p50", "p75")]] for r in report["descriptive"]],
    ))
    parts.append(_table(
        "Pearson correlations",
        ["X", "Y", "rho", "p-value", "N", "Transform"],
        [[r["x"], r["y"], _fmt(r["rho"]), _fmt(r["p_value"]), r["n"], r["transform"]] for r in report["correlations"]],
    ))
    parts.append(_table(
        "Unit-root tests",
        ["Series", "Spec", "d", "Test", "Statistic", "Lags/BW", "CV 5%", "Reject 5%", "Verdict"],
        [[r["series"], r["spec"], r["d"], r["test"].upper(), _fmt(r["statistic"]), r["lags_or_bandwidth"],
          _fmt(r["critical_values"]["5%"]), _fmt(r["reject_5pct"]), r["verdict"]] for r in report["unit_roots"]],
    ))
    parts.append(_table(
        "Integration orders",
        ["Series", "Spec", "d", "Note"],
        [[r["series"], r["spec"], r["d"], r["note"]] for r in report["integration_orders"]],
    ))
    parts.append(_table(
        "Lag selection",
        ["Pair", "m", "AIC", "BIC/SIC", "FPE", "min LB p", "Stable", "Max root"],
        [[r["pair"], r["m"], _fmt(r["aic"]), _fmt(r["bic_sic"]), f"{r['fpe']:.4g}" if r["fpe"] is not None else "NA",
          _fmt(min((p for p in r["ljung_box_p"] if p is not None), default=None)), _fmt(r["stable"]), _fmt(r["max_root"])]
         for r in report["lag_selection"]],
    ))
    parts.append(_table(
        "Lag choice",
        ["Pair", "m", "Rationale"],
        [[r["pair"], r["chosen_m"], r["rationale"] + (" [violation]" if r["violation"] else "")] for r in report["lag_choice"]],
    ))
    parts.append(_table(
        "Toda-Yamamoto MWald test for Granger causality",
        ["Pair", "Lag", "χ²", "p-value", "Granger causality"],
        [[r["pair"], r["lag"], _fmt(r["chi2"], 1), f"{_fmt(r['p_value'])}{r['stars']}", r["conclusion"]] for r in report["granger"]],
    ))
    parts.append(_table(
        "Granger robustness (m-1, m, m+1)",
        ["Pair", "Lags", "p-values", "Flag"],
        [[r["pair"], ",".join(map(str, r["lags"])), ",".join(_fmt(p) for p in r["p_values"]), r["flag"]] for r in report["robustness"]],
    ))
    parts.append(_table(
        "Bivariate Johansen cointegration test",
        ["Pair", "Lag", "CIV", "Eigenvalue", "Trace", "Max eigenval.", "Conclusion"],
        [[r["pair"] if r["rank_null"] == 0 else "", r["lag"] if r["rank_null"] == 0 else "", r["civ"], _fmt(r["eigenvalue"]),
          f"{_fmt(r['trace'])}{r['trace_stars']}", f"{_fmt(r['max_eig'])}{r['max_eig_stars']}", r["conclusion"]]
         for r in report["cointegration"]],
    ))
    parts.append(_table(
        "Impulse responses (final lag)",
        ["Impulse", "Response", "Lag order", "Horizon", "Point", "Lower", "Upper", "Level"],
        [[r["impulse"], r["response"], r["lag_order"], r["horizon"], _fmt(r["point"][-1], 4), _fmt(r["lower"][-1], 4),
          _fmt(r["upper"][-1], 4), _fmt(r["level"], 2)] for r in report["irf"]],
    ))
    parts.append(_table(
        "Errors",
        ["Pair", "Stage", "Error", "Message"],
        [[r["pair"], r["stage"], r["error"], r["message"]] for r in report["errors"]],
    ))
    notes = "*** p<0.01, ** p<0.05, * p<0.1. Johansen stars compare each statistic with its 1%/5%/10% critical value.\n"
    return "\n".join(parts) + "\n" + notes


# ---------------------------------------------------------------------------
# files


def emit_report(report: dict, format: str, path) -> Path:
    """Write ``report`` as ``"json"`` (structured) or ``"text"`` (plain tables)."""
    path = Path(path)
    if format in ("json", "structured-data"):
        validate_report(report)
        content = to_json(report)
    elif format in ("text", "plain-table"):
        content = render_text(report)
    else:
        raise ValueError(f"unknown report format {format!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
    return path


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def emit_plot_data(report: dict, directory) -> list[Path]:
    """One CSV per pair overlay (``series_<x>_<y>.csv``) and per IRF (``irf_<impulse>_<response>.csv``)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    pairs = report.get("provenance", {}).get("pairs", [])
    series = report.get("series", {})
    for x, y in pairs:
        if x not in series or y not in series:
            continue
        sx, sy = series[x], series[y]
        start = Month.parse(sx["start"])
        rows = [(str(start + i), repr(a), repr(b)) for i, (a, b) in enumerate(zip(sx["values"], sy["values"]))]
        p = directory / f"series_{x}_{y}.csv"
        p.write_text(_csv_text(("month", x, y), rows), encoding="utf-8")
        written.append(p)
    for r in report.get("irf", []):
        rows = [(h, repr(r["point"][h]), repr(r["lower"][h]), repr(r["upper"][h])) for h in range(r["horizon"] + 1)]
        p = directory / f"irf_{r['impulse']}_{r['response']}.csv"
        p.write_text(_csv_text(("lag", "point", "lower", "upper"), rows), encoding="utf-8")
        written.append(p)
    return written
