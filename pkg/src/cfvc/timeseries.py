"""Monthly series type, log/difference transforms and the Pearson correlation test."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import total_ordering

import numpy as np

from .errors import ConstantSeries, Misaligned, NonPositiveValue, SeriesTooShort
from .numerics import dist_sf

_MONTH_RE = re.compile(r"^(\d{4})-(\d{1,2})$")


@total_ordering
@dataclass(frozen=True)
class Month:
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")

    @classmethod
    def parse(cls, text) -> "Month":
        if isinstance(text, Month):
            return text
        m = _MONTH_RE.match(str(text).strip())
        if m is None:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    @classmethod
    def of(cls, date) -> "Month":
        return cls(date.year, date.month)

    @property
    def ordinal(self) -> int:
        return self.year * 12 + self.month - 1

    @classmethod
    def from_ordinal(cls, value: int) -> "Month":
        return cls(value // 12, value % 12 + 1)

    def __add__(self, months: int) -> "Month":
        return Month.from_ordinal(self.ordinal + int(months))

    def __sub__(self, other):
        if isinstance(other, Month):
            return self.ordinal - other.ordinal
        return Month.from_ordinal(self.ordinal - int(other))

    def __lt__(self, other):
        return self.ordinal < other.ordinal

    def __str__(self):
        return f"{self.year:04d}-{self.month:02d}"


@dataclass(frozen=True)
class TimeSeries:
    """Gap-free monthly series; ``values[i]`` belongs to month ``start + i``.

    ``volume=True`` marks non-negative volume series (the aggregation output).
    The value array is stored read-only.
    """

    label: str
    start: Month
    values: np.ndarray = field(repr=False)
    volume: bool = False

    def __post_init__(self):
        start = Month.parse(self.start)
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("a series needs at least one value")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"series {self.label!r} contains non-finite values")
        if self.volume and np.any(v < 0):
            raise ValueError(f"volume series {self.label!r} has negative values")
        v.setflags(write=False)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @property
    def end(self) -> Month:
        return self.start + (len(self) - 1)

    @property
    def months(self) -> list[Month]:
        return [self.start + i for i in range(len(self))]

    def with_values(self, values, label=None, start=None, volume=False) -> "TimeSeries":
        return TimeSeries(label or self.label, start or self.start, values, volume)


def log_transform(s: TimeSeries) -> TimeSeries:
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        i = int(bad[0])
        raise NonPositiveValue(s.start + i, float(s.values[i]))
    return s.with_values(np.log(s.values), label=f"log({s.label})")


def difference(s: TimeSeries, order: int = 1) -> TimeSeries:
    if order < 1:
        raise ValueError("difference order must be >= 1")
    if len(s) <= order:
        raise SeriesTooShort(f"{s.label}: length {len(s)} cannot be differenced {order} times")
    label = f"d{order}({s.label})" if order > 1 else f"d({s.label})"
    return s.with_values(np.diff(s.values, n=order), label=label, start=s.start + order)


def check_aligned(series) -> None:
    first = series[0]
    for other in series[1:]:
        if other.start != first.start or len(other) != len(first):
            raise Misaligned(
                f"{first.label} [{first.start}..{first.end}] vs "
                f"{other.label} [{other.start}..{other.end}]"
            )


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int


def pearson(x: TimeSeries, y: TimeSeries) -> CorrelationResult:
    """Sample Pearson coefficient with a two-sided t-test on ``n - 2`` dof."""
    check_aligned([x, y])
    n = len(x)
    if n < 3:
        raise SeriesTooShort("pearson needs at least 3 observations")
    a = x.values - x.values.mean()
    b = y.values - y.values.mean()
    saa, sbb = float(a @ a), float(b @ b)
    if saa == 0.0 or sbb == 0.0:
        raise ConstantSeries(f"{x.label if saa == 0 else y.label} is constant")
    rho = float(a @ b) / math.sqrt(saa * sbb)
    rho = min(1.0, max(-1.0, rho))
    if abs(rho) == 1.0:
        return CorrelationResult(rho, 0.0, n)
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = min(1.0, 2.0 * dist_sf("student_t", abs(t), n - 2))
    return CorrelationResult(rho, p, n)
