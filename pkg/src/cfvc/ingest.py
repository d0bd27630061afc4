"""Transaction records to monthly volume series.

Input CSV files carry the header ``date,amount,category,round_type``.  A parsed
file is a list of :class:`Transaction`; the pipeline then trims the top tail of
amounts, attaches merged categories, applies a segment rule and sums amounts per
calendar month.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
from collections import Counter
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadDate,
    EmptyInput,
    InvertedWindow,
    MissingRoundType,
    NegativeAmount,
    SchemaViolation,
)
from .timeseries import Month, TimeSeries

log = logging.getLogger(__name__)

SOURCES = ("crowdfunding", "venture_capital")
MERGED_CATEGORIES = ("hardware", "media", "fashion", "unmapped")
CSV_COLUMNS = ("date", "amount", "category", "round_type")
ANGEL_SEED_ROUNDS = frozenset({"angel", "seed"})
EARLY_GROWTH_ROUNDS = frozenset({"venture"})


@dataclass(frozen=True)
class Transaction:
    date: dt.date
    amount: float
    raw_category: str
    source: str
    round_type: str | None = None
    merged_category: str | None = None

    @property
    def month(self) -> Month:
        return Month.of(self.date)


def _check_source(source):
    if source not in SOURCES:
        raise ValueError(f"source must be one of {SOURCES}, got {source!r}")


def parse_transactions(path, source: str) -> list[Transaction]:
    """Read one transaction CSV; every data row becomes one :class:`Transaction`.

    Line numbers in errors are 1-based and count the header line.
    """
    _check_source(source)
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"transaction file not found: {path}")
    out = []
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaViolation(1, "missing header row")
        header = [h.strip().lower() for h in header]
        if tuple(header) != CSV_COLUMNS:
            raise SchemaViolation(1, f"expected header {','.join(CSV_COLUMNS)}, got {','.join(header)}")
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CSV_COLUMNS):
                raise SchemaViolation(line, f"expected {len(CSV_COLUMNS)} fields, got {len(row)}")
            date_s, amount_s, category, round_type = (c.strip() for c in row)
            try:
                date = dt.date.fromisoformat(date_s)
            except ValueError:
                raise BadDate(line, f"invalid ISO-8601 date {date_s!r}") from None
            try:
                amount = float(amount_s.replace("−", "-"))
            except ValueError:
                raise SchemaViolation(line, f"invalid amount {amount_s!r}") from None
            if not math.isfinite(amount):
                raise SchemaViolation(line, f"invalid amount {amount_s!r}")
            if amount < 0:
                raise NegativeAmount(line, f"negative amount {amount_s}")
            out.append(Transaction(date, amount, category, source, round_type or None))
    return out


def trim_top_percentile(txns: Sequence[Transaction], keep_quantile: float = 0.99) -> list[Transaction]:
    """Drop transactions whose amount lies strictly above the per-source quantile.

    The quantile uses linear interpolation between order statistics.
    """
    if not 0 < keep_quantile <= 1:
        raise ValueError(f"keep_quantile must be in (0, 1], got {keep_quantile}")
    if not txns:
        raise EmptyInput("no transactions to trim")
    cutoffs = {}
    for source in {t.source for t in txns}:
        amounts = np.array([t.amount for t in txns if t.source == source])
        cutoffs[source] = float(np.quantile(amounts, keep_quantile))
    return [t for t in txns if t.amount <= cutoffs[t.source]]


def _norm(text: str) -> str:
    return " ".join(text.strip().lower().split())


class CategoryMapping:
    """Total lookup from (source, raw category) to a merged category.

    Raw categories match case-insensitively.  A Kickstarter-style
    ``parent/child`` name that is not listed falls back to its parent;
    ``|``-separated lists resolve to the first listed name that maps.
    Anything else is ``unmapped``.
    """

    def __init__(self, entries: Iterable[tuple[str, str, str]]):
        self._table: dict[tuple[str, str], str] = {}
        self.entries = []
        for source, raw, merged in entries:
            _check_source(source)
            if merged not in MERGED_CATEGORIES:
                raise ValueError(f"unknown merged category {merged!r}")
            key = (source, _norm(raw))
            if self._table.get(key, merged) != merged:
                raise ValueError(f"{source}/{raw!r} maps to two merged categories")
            self._table[key] = merged
            self.entries.append((source, raw, merged))

    @classmethod
    def from_csv(cls, path) -> "CategoryMapping":
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"mapping file not found: {path}")
        with path.open(newline="", encoding="utf-8-sig") as fh:
            return cls._read(fh)

    @classmethod
    def bundled(cls) -> "CategoryMapping":
        ref = resources.files("cfvc").joinpath("data/category_mapping.csv")
        with ref.open("r", encoding="utf-8") as fh:
            return cls._read(fh)

    @classmethod
    def _read(cls, fh):
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != [
            "source",
            "raw_category",
            "merged_category",
        ]:
            raise SchemaViolation(1, "mapping header must be source,raw_category,merged_category")
        return cls((r["source"].strip(), r["raw_category"], r["merged_category"].strip()) for r in reader)

    def lookup(self, source: str, raw_category: str) -> str:
        for name in raw_category.split("|"):
            key = _norm(name)
            while key:
                hit = self._table.get((source, key))
                if hit is not None:
                    return hit
                if "/" not in key:
                    break
                key = key.rsplit("/", 1)[0].strip()
        return "unmapped"

    def __len__(self):
        return len(self._table)


def apply_mapping(txns: Sequence[Transaction], mapping: CategoryMapping) -> list[Transaction]:
    return [replace(t, merged_category=mapping.lookup(t.source, t.raw_category)) for t in txns]


def mapping_coverage(txns: Sequence[Transaction]) -> float:
    """Share of transactions assigned to a merged category other than ``unmapped``."""
    if not txns:
        return 0.0
    counts = Counter(t.merged_category for t in txns)
    if None in counts:
        raise ValueError("transactions have not been mapped")
    return 1.0 - counts["unmapped"] / len(txns)


@dataclass(frozen=True)
class SegmentRule:
    kind: str = "all"
    threshold: float | None = None

    KINDS = ("all", "angel_seed", "early_growth", "small_below_threshold")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if (self.kind == "small_below_threshold") != (self.threshold is not None):
            raise ValueError("threshold is required for, and only for, small_below_threshold")
        if self.threshold is not None and not self.threshold > 0:
            raise ValueError("threshold must be positive")


def segment(txns: Sequence[Transaction], rule: SegmentRule) -> list[Transaction]:
    """Filter by round type or amount.

    Round-type rules apply to venture-capital rows only; crowdfunding rows carry
    no round and are excluded by them.  ``small_below_threshold`` keeps amounts
    strictly below the threshold.
    """
    if rule.kind == "all":
        return list(txns)
    if rule.kind == "small_below_threshold":
        return [t for t in txns if t.amount < rule.threshold]
    wanted = ANGEL_SEED_ROUNDS if rule.kind == "angel_seed" else EARLY_GROWTH_ROUNDS
    out = []
    for t in txns:
        if t.source != "venture_capital":
            continue
        if not t.round_type:
            raise MissingRoundType(f"VC transaction dated {t.date} has no round_type")
        if t.round_type.strip().lower() in wanted:
            out.append(t)
    return out


def filter_category(txns: Sequence[Transaction], category: str | None) -> list[Transaction]:
    if category is None:
        return list(txns)
    return [t for t in txns if t.merged_category == category]


def _check_window(window):
    start, end = (Month.parse(w) for w in window)
    if end < start:
        raise InvertedWindow(f"window end {end} precedes start {start}")
    return start, end


def outside_window(txns: Sequence[Transaction], window) -> int:
    start, end = _check_window(window)
    return sum(1 for t in txns if not start <= t.month <= end)


def aggregate_monthly(txns: Sequence[Transaction], window, label: str = "volume") -> TimeSeries:
    """Sum amounts per month over the inclusive ``window``; empty months are 0.

    Monthly sums use ``math.fsum`` so totals are exact up to final rounding and
    independent of row order.
    """
    start, end = _check_window(window)
    n = end - start + 1
    buckets: list[list[float]] = [[] for _ in range(n)]
    dropped = 0
    for t in txns:
        i = t.month - start
        if 0 <= i < n:
            buckets[i].append(t.amount)
        else:
            dropped += 1
    if dropped:
        log.info("%s: %d transactions outside %s..%s dropped", label, dropped, start, end)
    return TimeSeries(label, start, [math.fsum(b) for b in buckets], volume=True)


def in_window(txns: Sequence[Transaction], window) -> list[Transaction]:
    start, end = _check_window(window)
    return [t for t in txns if start <= t.month <= end]


def describe(txns: Sequence[Transaction]) -> dict:
    """Project-level descriptive statistics: count, volume, mean, sd, quartiles."""
    amounts = np.array([t.amount for t in txns], dtype=float)
    if amounts.size == 0:
        return {"count": 0, "volume": 0.0, "mean": None, "sd": None, "p25": None, "p50": None, "p75": None}
    q25, q50, q75 = np.quantile(amounts, [0.25, 0.5, 0.75])
    return {
        "count": int(amounts.size),
        "volume": math.fsum(amounts),
        "mean": float(amounts.mean()),
        "sd": float(amounts.std(ddof=1)) if amounts.size > 1 else 0.0,
        "p25": float(q25),
        "p50": float(q50),
        "p75": float(q75),
    }
