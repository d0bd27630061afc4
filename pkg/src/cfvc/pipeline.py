"""End-to-end analysis driven by a declarative YAML config.

Stages, per configured pair: correlation → unit roots → lag selection →
Toda-Yamamoto causality (with m±1 robustness) → Johansen → IRF.  A failure in
one stage of one pair is recorded in the report's ``errors`` table and the run
moves on.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .deterministic import Deterministic
from .errors import CfvcError, ConfigInvalid
from .granger import causality_conclusion, ty_granger, ty_robustness
from .ingest import (
    CategoryMapping,
    SegmentRule,
    Transaction,
    aggregate_monthly,
    apply_mapping,
    describe,
    filter_category,
    in_window,
    mapping_coverage,
    parse_transactions,
    segment,
    trim_top_percentile,
)
from .irf import irf_bootstrap
from .johansen import coint_conclusion, johansen
from .timeseries import Month, TimeSeries, log_transform, pearson
from .unitroot import LEVELS, integration_order
from .var import fit_var, select_lag

log = logging.getLogger(__name__)

STAGES = ("correlation", "unitroot", "granger", "johansen", "irf")
TRANSFORMS = ("levels", "log")
DEFAULT_TRANSFORMS = {"correlation": "levels", "unitroot": "levels", "granger": "levels", "johansen": "levels", "irf": "log"}
DEFAULT_PAIRS = (
    ("cf_sum", "vc_sum"),
    ("cf_sum", "vc_angel_seed"),
    ("cf_sum", "vc_early_growth"),
    ("cf_sum", "vc_small"),
    ("cf_hardware", "vc_hardware"),
    ("cf_media", "vc_media"),
    ("cf_fashion", "vc_fashion"),
)
CATEGORIES = ("hardware", "media", "fashion")
_SOURCE_PREFIX = {"cf": "crowdfunding", "vc": "venture_capital"}


def series_definition(name: str, small_threshold: float) -> tuple[str, SegmentRule, str | None]:
    """(source, segment rule, merged category) behind a series name such as ``vc_angel_seed``."""
    prefix, _, rest = name.partition("_")
    if prefix not in _SOURCE_PREFIX:
        raise ConfigInvalid(f"unknown series {name!r}")
    source = _SOURCE_PREFIX[prefix]
    if rest == "sum":
        return source, SegmentRule("all"), None
    if rest in CATEGORIES:
        return source, SegmentRule("all"), rest
    if prefix == "vc" and rest in ("angel_seed", "early_growth"):
        return source, SegmentRule(rest), None
    if prefix == "vc" and rest == "small":
        return source, SegmentRule("small_below_threshold", small_threshold), None
    raise ConfigInvalid(f"unknown series {name!r}")


def registry_names() -> list[str]:
    names = ["cf_sum", *[f"cf_{c}" for c in CATEGORIES], "vc_sum", "vc_angel_seed", "vc_early_growth", "vc_small"]
    return names + [f"vc_{c}" for c in CATEGORIES]


@dataclass(frozen=True)
class IrfSettings:
    horizon: int = 10
    replications: int = 500
    level: float = 0.90
    seed: int = 2016
    shock_size: float | None = 0.01
    cumulative: bool = True


@dataclass(frozen=True)
class PipelineConfig:
    crowdfunding: Path
    venture_capital: Path
    mapping: Path | None = None
    window: tuple = ("2012-04", "2015-06")
    keep_quantile: float = 0.99
    max_lag: int = 6
    d_max: int | str = 1
    spec: Deterministic = Deterministic.CONSTANT_AND_TREND
    small_threshold: float = 500_000.0
    transforms: dict = field(default_factory=lambda: dict(DEFAULT_TRANSFORMS))
    irf: IrfSettings = field(default_factory=IrfSettings)
    pairs: tuple = DEFAULT_PAIRS
    output: Path = Path("output")
    source: dict = field(default_factory=dict, repr=False, compare=False)

    def input_paths(self) -> list[Path]:
        return [p for p in (self.crowdfunding, self.venture_capital, self.mapping) if p is not None]

    def check_inputs(self) -> None:
        for p in self.input_paths():
            if not p.is_file():
                raise ConfigInvalid(f"input file not found: {p}")


_TOP_KEYS = {"inputs", "window", "keep_quantile", "max_lag", "d_max", "spec", "small_threshold", "transforms", "irf", "pairs", "output"}
_IRF_KEYS = {"horizon", "replications", "level", "seed", "shock_size", "cumulative"}


def _require(cond, message):
    if not cond:
        raise ConfigInvalid(message)


def config_from_dict(raw: dict, base_dir: Path | str = ".") -> PipelineConfig:
    """Validate a parsed config mapping; relative paths resolve against ``base_dir``."""
    _require(isinstance(raw, dict), "config must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    base = Path(base_dir)

    def path(value):
        p = Path(str(value))
        return p if p.is_absolute() else base / p

    inputs = raw.get("inputs")
    _require(isinstance(inputs, dict), "config needs an 'inputs' mapping with crowdfunding and venture_capital files")
    _require(set(inputs) <= {"crowdfunding", "venture_capital", "mapping"}, f"unknown input keys: {sorted(set(inputs))}")
    for key in ("crowdfunding", "venture_capital"):
        _require(inputs.get(key), f"inputs.{key} is required")

    window = tuple(str(w) for w in raw.get("window", PipelineConfig.window))
    _require(len(window) == 2, "window must be [start, end]")
    try:
        start, end = Month.parse(window[0]), Month.parse(window[1])
    except ValueError as exc:
        raise ConfigInvalid(f"invalid window: {exc}") from None
    _require(start <= end, f"window end {end} precedes start {start}")

    kq = raw.get("keep_quantile", 0.99)
    _require(isinstance(kq, (int, float)) and 0 < kq <= 1, "keep_quantile must be in (0, 1]")
    max_lag = raw.get("max_lag", 6)
    _require(isinstance(max_lag, int) and not isinstance(max_lag, bool) and max_lag >= 2, "max_lag must be an integer >= 2")
    d_max = raw.get("d_max", 1)
    _require(d_max in (0, 1, 2, "auto"), "d_max must be 0, 1, 2 or 'auto'")
    try:
        spec = Deterministic.coerce(raw.get("spec", "constant_and_trend"))
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from None
    small = raw.get("small_threshold", 500_000.0)
    _require(isinstance(small, (int, float)) and small > 0, "small_threshold must be positive")

    transforms = dict(DEFAULT_TRANSFORMS)
    given = raw.get("transforms", {}) or {}
    _require(isinstance(given, dict) and set(given) <= set(STAGES), f"transforms keys must be among {STAGES}")
    for stage, value in given.items():
        _require(value in TRANSFORMS, f"transform for {stage} must be one of {TRANSFORMS}")
        transforms[stage] = value

    irf_raw = raw.get("irf", {}) or {}
    _require(isinstance(irf_raw, dict) and set(irf_raw) <= _IRF_KEYS, f"irf keys must be among {sorted(_IRF_KEYS)}")
    irf = IrfSettings(**{**IrfSettings().__dict__, **irf_raw})
    _require(isinstance(irf.horizon, int) and irf.horizon >= 0, "irf.horizon must be a non-negative integer")
    _require(isinstance(irf.replications, int) and irf.replications >= 100, "irf.replications must be >= 100")
    _require(0 < irf.level < 1, "irf.level must be in (0, 1)")
    _require(isinstance(irf.seed, int), "irf.seed must be an integer")
    _require(irf.shock_size is None or irf.shock_size > 0, "irf.shock_size must be positive or null")

    pairs_raw = raw.get("pairs", [list(p) for p in DEFAULT_PAIRS])
    _require(isinstance(pairs_raw, list), "pairs must be a list of [x, y] series names")
    pairs = []
    for pair in pairs_raw:
        _require(isinstance(pair, (list, tuple)) and len(pair) == 2 and pair[0] != pair[1], f"invalid pair {pair!r}")
        for name in pair:
            series_definition(str(name), float(small))
        pairs.append((str(pair[0]), str(pair[1])))

    return PipelineConfig(
        crowdfunding=path(inputs["crowdfunding"]),
        venture_capital=path(inputs["venture_capital"]),
        mapping=path(inputs["mapping"]) if inputs.get("mapping") else None,
        window=window,
        keep_quantile=float(kq),
        max_lag=max_lag,
        d_max=d_max,
        spec=spec,
        small_threshold=float(small),
        transforms=transforms,
        irf=irf,
        pairs=tuple(pairs),
        output=path(raw.get("output", "output")),
        source=raw,
    )


def load_config(path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigInvalid(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigInvalid(f"cannot parse {path}: {exc}") from None
    return config_from_dict(raw, path.parent)


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def config_hash(config: PipelineConfig) -> str:
    """Hash of the config as written plus the bytes of every input file."""
    h = hashlib.sha256(json.dumps(config.source, sort_keys=True, default=str).encode())
    for p in config.input_paths():
        h.update(_sha256_file(p).encode())
    return h.hexdigest()


# ---------------------------------------------------------------------------


def _num(x):
    return None if x is None or not np.isfinite(x) else float(x)


def _error_row(pair, stage, exc) -> dict:
    return {"pair": pair, "stage": stage, "error": type(exc).__name__, "message": str(exc)}


class _Run:
    def __init__(self, config: PipelineConfig):
        self.config = config
        self.errors: list[dict] = []
        self.series: dict[str, TimeSeries] = {}
        self.txns: dict[str, list[Transaction]] = {}
        self.orders: dict[tuple, object] = {}

    # -- ingestion -----------------------------------------------------
    def ingest(self) -> dict:
        cfg = self.config
        mapping = CategoryMapping.from_csv(cfg.mapping) if cfg.mapping else CategoryMapping.bundled()
        summary = {}
        pooled = []
        for source, path in (("crowdfunding", cfg.crowdfunding), ("venture_capital", cfg.venture_capital)):
            rows = parse_transactions(path, source)
            windowed = in_window(rows, cfg.window)
            trimmed = trim_top_percentile(windowed, cfg.keep_quantile) if windowed else []
            mapped = apply_mapping(trimmed, mapping)
            pooled.extend(mapped)
            summary[source] = {
                "rows": len(rows),
                "outside_window": len(rows) - len(windowed),
                "trimmed": len(windowed) - len(trimmed),
                "kept": len(mapped),
                "mapping_coverage": _num(mapping_coverage(mapped)) if mapped else None,
            }
        self.pooled = pooled
        return summary

    def build_series(self, name: str) -> TimeSeries:
        if name not in self.series:
            source, rule, category = series_definition(name, self.config.small_threshold)
            rows = [t for t in self.pooled if t.source == source]
            rows = filter_category(segment(rows, rule), category)
            self.txns[name] = rows
            self.series[name] = aggregate_monthly(rows, self.config.window, label=name)
        return self.series[name]

    def transformed(self, name: str, stage: str) -> TimeSeries:
        s = self.build_series(name)
        if self.config.transforms[stage] == "log":
            logged = log_transform(s)
            return logged.with_values(logged.values, label=name)
        return s

    # -- stages --------------------------------------------------------
    def descriptive(self) -> list[dict]:
        rows = []
        for name in registry_names():
            try:
                self.build_series(name)
            except CfvcError as exc:
                self.errors.append(_error_row(name, "descriptive", exc))
                continue
            rows.append({"series": name, **{k: _num(v) if k != "count" else v for k, v in describe(self.txns[name]).items()}})
        return rows

    def unit_roots(self, name: str):
        stage = "unitroot"
        rows, orders = [], []
        for spec in (Deterministic.CONSTANT, Deterministic.CONSTANT_AND_TREND):
            key = (name, spec)
            if key not in self.orders:
                self.orders[key] = integration_order(self.transformed(name, stage), max_d=1, spec=spec)
            order = self.orders[key]
            orders.append({"series": name, "spec": spec.value, "transform": self.config.transforms[stage], "d": order.d, "capped": order.capped, "note": order.note})
            for ev in order.evidence:
                for res in (ev.adf, ev.pp, ev.kpss):
                    rows.append({
                        "series": name,
                        "spec": spec.value,
                        "transform": self.config.transforms[stage],
                        "d": ev.d,
                        "test": res.test,
                        "statistic": _num(res.statistic),
                        "lags_or_bandwidth": res.lags_or_bandwidth,
                        "nobs": res.nobs,
                        "critical_values": {lvl: _num(res.critical_values[lvl]) for lvl in LEVELS},
                        "reject_5pct": res.reject_at_5pct,
                        "verdict": ev.verdict,
                    })
        return rows, orders

    def d_max_for(self, x: str, y: str) -> int:
        if self.config.d_max != "auto":
            return int(self.config.d_max)
        spec = self.config.spec if self.config.spec != Deterministic.NONE else Deterministic.CONSTANT
        return max(self.orders[(n, spec)].d if (n, spec) in self.orders else integration_order(self.transformed(n, "unitroot"), 1, spec).d for n in (x, y))


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute every stage for every configured pair and return the report mapping."""
    config.check_inputs()
    run = _Run(config)
    cfg = config
    report = {
        "descriptive": [],
        "correlations": [],
        "unit_roots": [],
        "integration_orders": [],
        "lag_selection": [],
        "lag_choice": [],
        "granger": [],
        "robustness": [],
        "cointegration": [],
        "irf": [],
        "errors": run.errors,
        "series": {},
    }
    report["ingest"] = run.ingest()
    report["descriptive"] = run.descriptive()
    seen_unitroot = set()

    for x, y in cfg.pairs:
        pair = f"{x}, {y}"

        def stage(name, fn):
            try:
                return fn()
            except (CfvcError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
                log.warning("%s [%s]: %s", pair, name, exc)
                run.errors.append(_error_row(pair, name, exc))
                return None

        if stage("series", lambda: (run.build_series(x), run.build_series(y))) is None:
            continue
        for n in (x, y):
            report["series"][n] = {"start": str(run.series[n].start), "values": [float(v) for v in run.series[n].values]}

        def correlation():
            r = pearson(run.transformed(x, "correlation"), run.transformed(y, "correlation"))
            report["correlations"].append({"x": x, "y": y, "transform": cfg.transforms["correlation"], "rho": _num(r.rho), "p_value": _num(r.p_value), "n": r.n})
        stage("correlation", correlation)

        for n in (x, y):
            if n in seen_unitroot:
                continue
            seen_unitroot.add(n)
            out = stage("unitroot", lambda n=n: run.unit_roots(n))
            if out:
                report["unit_roots"].extend(out[0])
                report["integration_orders"].extend(out[1])

        gx, gy = run.transformed(x, "granger"), run.transformed(y, "granger")

        def lag_selection():
            sel = select_lag([gx, gy], cfg.max_lag, cfg.spec)
            for row in sel.per_lag.values():
                report["lag_selection"].append({
                    "pair": pair, "m": row.m, "aic": _num(row.aic), "bic_sic": _num(row.bic_sic), "fpe": _num(row.fpe),
                    "ljung_box_p": [_num(p) for p in row.ljung_box_p], "stable": row.stable, "max_root": _num(row.max_root),
                })
            report["lag_choice"].append({
                "pair": pair, "transform": cfg.transforms["granger"], "chosen_m": sel.chosen_m, "rationale": sel.rationale,
                "minimizers": dict(sel.minimizers), "violation": sel.violation,
            })
            return sel
        sel = stage("lag_selection", lag_selection)
        if sel is None:
            continue
        m = sel.chosen_m
        d_max = stage("d_max", lambda: run.d_max_for(x, y))
        if d_max is None:
            continue

        def granger():
            fwd = ty_granger(gx, gy, m, d_max, cfg.spec)
            bwd = ty_granger(gy, gx, m, d_max, cfg.spec)
            kind, direction = causality_conclusion(fwd, bwd)
            for res, conclusion in ((fwd, kind), (bwd, direction)):
                report["granger"].append({
                    "pair": res.pair, "config_pair": pair, "cause": res.cause, "effect": res.effect, "lag": res.m, "d_max": res.d_max,
                    "chi2": _num(res.wald_statistic), "dof": res.dof, "p_value": _num(res.p_value),
                    "stars": stars(res.p_value), "conclusion": conclusion, "transform": cfg.transforms["granger"],
                    "spec": res.spec.value, "nobs": res.nobs,
                })
        stage("granger", granger)

        def robustness():
            for cause, effect in ((gx, gy), (gy, gx)):
                rob = ty_robustness(cause, effect, m, d_max, cfg.spec)
                report["robustness"].append({
                    "pair": rob.results[0].pair, "config_pair": pair, "lags": list(rob.lags), "chi2": [_num(r.wald_statistic) for r in rob.results],
                    "p_values": [_num(r.p_value) for r in rob.results], "flag": rob.flag,
                })
        if m >= 2:
            stage("robustness", robustness)

        def cointegration():
            jx, jy = run.transformed(x, "johansen"), run.transformed(y, "johansen")
            res = johansen([jx, jy], max(m, 2), cfg.spec if cfg.spec != Deterministic.NONE else Deterministic.CONSTANT)
            conclusion = coint_conclusion(res)
            for r in range(len(res.eigenvalues)):
                cv = res.critical_values
                report["cointegration"].append({
                    "pair": pair, "lag": res.lag, "civ": "r=0" if r == 0 else f"r≤{r}", "rank_null": r,
                    "eigenvalue": _num(res.eigenvalues[r]), "trace": _num(res.trace_stats[r]),
                    "trace_stars": critical_stars(res.trace_stats[r], cv["trace"][r]),
                    "max_eig": _num(res.max_eig_stats[r]), "max_eig_stars": critical_stars(res.max_eig_stats[r], cv["max_eig"][r]),
                    "trace_cv_5pct": cv["trace"][r]["5%"], "max_eig_cv_5pct": cv["max_eig"][r]["5%"],
                    "conclusion": conclusion if r == 0 else "", "concluded_rank": res.concluded_rank,
                    "max_eig_rank": res.max_eig_rank, "spec": res.spec.value, "nobs": res.nobs,
                    "transform": cfg.transforms["johansen"],
                })
        stage("johansen", cointegration)

        def impulse_response():
            ix, iy = run.transformed(x, "irf"), run.transformed(y, "irf")
            irf_sel = select_lag([ix, iy], cfg.max_lag, cfg.spec)
            lag = irf_sel.best("fpe")
            model = fit_var([ix, iy], lag, cfg.spec)
            s = cfg.irf
            res = irf_bootstrap(model, (x, y), s.horizon, s.replications, s.level, s.seed, s.cumulative, x, y, s.shock_size)
            report["irf"].append({
                "impulse": x, "response": y, "lag_order": lag, "lag_rule": "fpe", "horizon": s.horizon, "level": s.level,
                "replications": s.replications, "discarded": res.discarded, "seed": s.seed, "shock_size": s.shock_size,
                "cumulative": s.cumulative, "ordering": list(res.ordering), "transform": cfg.transforms["irf"],
                "point": [float(v) for v in res.point], "lower": [float(v) for v in res.lower], "upper": [float(v) for v in res.upper],
            })
        stage("irf", impulse_response)

    report["provenance"] = {
        "config_hash": config_hash(config),
        "seed": cfg.irf.seed,
        "version": __version__,
        "window": list(cfg.window),
        "keep_quantile": cfg.keep_quantile,
        "trim_order": "before_segmentation",
        "max_lag": cfg.max_lag,
        "d_max": cfg.d_max,
        "spec": cfg.spec.value,
        "transforms": dict(cfg.transforms),
        "pairs": [list(p) for p in cfg.pairs],
    }
    return report


def stars(p_value) -> str:
    """``***`` below 0.01, ``**`` below 0.05, ``*`` below 0.1."""
    if p_value is None or not np.isfinite(p_value):
        return ""
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.1:
        return "*"
    return ""


def critical_stars(statistic, critical_values: dict) -> str:
    """Stars for a right-tailed statistic against its 1%/5%/10% critical values."""
    for mark, level in (("***", "1%"), ("**", "5%"), ("*", "10%")):
        if statistic > critical_values[level]:
            return mark
    return ""
