"""Deterministic-term specification shared by the unit-root, VAR and Johansen code."""

from __future__ import annotations

from enum import Enum

import numpy as np


class Deterministic(str, Enum):
    NONE = "none"
    CONSTANT = "constant"
    CONSTANT_AND_TREND = "constant_and_trend"

    @classmethod
    def coerce(cls, value) -> "Deterministic":
        if isinstance(value, cls):
            return value
        aliases = {"n": cls.NONE, "c": cls.CONSTANT, "ct": cls.CONSTANT_AND_TREND}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown deterministic spec {value!r}") from None

    @property
    def n_terms(self) -> int:
        return {"none": 0, "constant": 1, "constant_and_trend": 2}[self.value]


def deterministic_columns(nobs: int, spec, first_trend: int = 1) -> np.ndarray:
    """Constant and/or linear trend columns; the trend counts up from ``first_trend``."""
    spec = Deterministic.coerce(spec)
    cols = []
    if spec.n_terms >= 1:
        cols.append(np.ones(nobs))
    if spec.n_terms == 2:
        cols.append(np.arange(first_trend, first_trend + nobs, dtype=float))
    if not cols:
        return np.empty((nobs, 0))
    return np.column_stack(cols)
