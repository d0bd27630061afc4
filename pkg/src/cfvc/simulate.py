"""Seeded data-generating processes for tests, simulations and the demo dataset.

Every generator draws from ``numpy.random.Generator(PCG64(SeedSequence(seed)))``;
Gaussian variates come from numpy's ziggurat transform of that stream, which is
platform-independent for a fixed numpy major version.  Independent streams for
parallel work are obtained with :func:`spawn_seeds`.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UnstableParameters
from .ingest import CategoryMapping
from .timeseries import Month, TimeSeries
from .var import companion_matrix

BURN_IN = 100
KINDS = ("white_noise", "ar", "random_walk", "var", "cointegrated_pair", "causal_pair")
STATIONARY_KINDS = frozenset({"white_noise", "ar", "var", "causal_pair"})

# the causal generator used for TY power checks
CAUSAL_PAIR_DEFAULTS = {"a_yy": 0.5, "a_yx": 0.4, "a_xx": 0.9}


def rng_for(seed) -> np.random.Generator:
    """PCG64 generator for an integer seed, a sequence of ints, or a spawned SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


def spawn_seeds(seed: int, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


@dataclass(frozen=True)
class Dgp:
    """Parameters of one process.

    ``params`` by kind:

    * ``white_noise``: ``mean`` (0)
    * ``ar``: ``phi`` (list of AR coefficients), ``const`` (0)
    * ``random_walk``: ``drift`` (0), ``start`` (0), ``order`` (1 or 2 for a doubly integrated walk)
    * ``var``: ``A`` (list of k x k lag matrices), ``const`` (zeros)
    * ``cointegrated_pair``: ``beta`` (1), ``phi`` (0, AR(1) coefficient of the equilibrium error), ``drift`` (0)
    * ``causal_pair``: ``a_yy`` (0.5), ``a_yx`` (0.4), ``a_xx`` (0.9)
    """

    kind: str
    params: dict = field(default_factory=dict)
    noise_scale: float = 1.0
    n: int = 200
    seed: int | np.random.SeedSequence = 0
    start: str = "2000-01"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown DGP kind {self.kind!r}")
        if self.n < 10:
            raise ValueError("n must be >= 10")
        if not self.noise_scale >= 0:
            raise ValueError("noise_scale must be >= 0")


def _check_stable(mats, what):
    mats = np.asarray(mats, dtype=float)
    root = np.max(np.abs(np.linalg.eigvals(companion_matrix(mats))))
    if root >= 1.0:
        raise UnstableParameters(f"{what} is not stable (largest root modulus {root:.6g})")
    return mats


def _simulate_var(mats, const, shocks):
    m, k, _ = mats.shape
    total = shocks.shape[0]
    y = np.zeros((total + m, k))
    for t in range(m, total + m):
        row = const + shocks[t - m]
        for j in range(m):
            row = row + mats[j] @ y[t - j - 1]
        y[t] = row
    return y[m:]


def generate(dgp: Dgp):
    """Draw one realization; pairs and VARs return a tuple of series."""
    rng = rng_for(dgp.seed)
    p = dgp.params
    n = dgp.n
    burn = BURN_IN if dgp.kind in STATIONARY_KINDS else 0
    sd = dgp.noise_scale

    def noise(*shape):
        return sd * rng.standard_normal(shape)

    def series(label, values):
        return TimeSeries(label, dgp.start, np.asarray(values)[burn:])

    if dgp.kind == "white_noise":
        return series("wn", p.get("mean", 0.0) + noise(n + burn))

    if dgp.kind == "ar":
        phi = np.atleast_1d(np.asarray(p.get("phi", [0.5]), dtype=float))
        mats = _check_stable(phi.reshape(-1, 1, 1), "AR polynomial")
        y = _simulate_var(mats, np.array([p.get("const", 0.0)]), noise(n + burn, 1))
        return series("ar", y[:, 0])

    if dgp.kind == "random_walk":
        order = int(p.get("order", 1))
        if order not in (1, 2):
            raise ValueError("random_walk order must be 1 or 2")
        y = p.get("start", 0.0) + np.cumsum(p.get("drift", 0.0) + noise(n))
        if order == 2:
            y = np.cumsum(y)
        return series("rw", y)

    if dgp.kind == "var":
        mats = _check_stable(np.asarray(p["A"], dtype=float).reshape(-1, *np.shape(p["A"])[-2:]), "VAR")
        k = mats.shape[1]
        const = np.asarray(p.get("const", np.zeros(k)), dtype=float)
        y = _simulate_var(mats, const, noise(n + burn, k))
        return tuple(series(f"y{i + 1}", y[:, i]) for i in range(k))

    if dgp.kind == "cointegrated_pair":
        phi = float(p.get("phi", 0.0))
        if abs(phi) >= 1:
            raise UnstableParameters("equilibrium error must be stationary (|phi| < 1)")
        x = np.cumsum(p.get("drift", 0.0) + noise(n))
        e = noise(n + BURN_IN)
        u = np.zeros(n + BURN_IN)
        for t in range(1, n + BURN_IN):
            u[t] = phi * u[t - 1] + e[t]
        y = p.get("beta", 1.0) * x + u[BURN_IN:]
        return TimeSeries("x", dgp.start, x), TimeSeries("y", dgp.start, y)

    # causal_pair: x drives y with a one-month delay
    c = {**CAUSAL_PAIR_DEFAULTS, **p}
    mats = _check_stable([[[c["a_xx"], 0.0], [c["a_yx"], c["a_yy"]]]], "causal pair")
    xy = _simulate_var(mats, np.zeros(2), noise(n + burn, 2))
    return series("x", xy[:, 0]), series("y", xy[:, 1])


# ---------------------------------------------------------------------------
# synthetic transaction files for the demo


DEMO_WINDOW = ("2012-04", "2015-06")
_UNMAPPED_RAW = {"crowdfunding": "food", "venture_capital": "biotechnology"}
_ROUNDS = ("Angel", "Seed", "Venture")
# log-scale location of a VC deal by round: roughly 60k, 160k and 1.2M
_ROUND_BASE = {"Angel": 11.0, "Seed": 12.0, "Venture": 14.0}


def _raw_categories(mapping: CategoryMapping, source: str) -> dict[str, list[str]]:
    by_cat: dict[str, list[str]] = {}
    for src, raw, merged in mapping.entries:
        if src == source:
            by_cat.setdefault(merged, []).append(raw)
    out = {cat: sorted(v) for cat, v in sorted(by_cat.items())}
    out["unmapped"] = [_UNMAPPED_RAW[source]]
    return out


def synthetic_transactions(seed: int = 2016, window=DEMO_WINDOW, per_category=(6, 3)):
    """Transaction rows for a crowdfunding and a VC file.

    A latent log-activity index for crowdfunding follows an AR(1); the VC index
    responds to it with a one-month delay, so the demo pipeline has a causal
    signal to find.  Each month carries ``per_category`` rows for every merged
    category (including unmapped) so that no category series has empty months.
    VC rounds cycle through Angel, Seed and Venture, each with its own typical
    deal size, so the small-deal segment is populated in every month.
    """
    rng = rng_for(seed)
    start, end = Month.parse(window[0]), Month.parse(window[1])
    n = end - start + 1
    z = np.zeros(n + BURN_IN)
    w = np.zeros(n + BURN_IN)
    for t in range(1, n + BURN_IN):
        z[t] = 0.8 * z[t - 1] + 0.3 * rng.standard_normal()
        w[t] = 0.4 * w[t - 1] + 0.9 * z[t - 1] + 0.2 * rng.standard_normal()
    z, w = z[BURN_IN:], w[BURN_IN:]

    mapping = CategoryMapping.bundled()
    rows = {"crowdfunding": [], "venture_capital": []}
    for source, count, base, spread, index in (
        ("crowdfunding", per_category[0], 8.5, 0.5, z),
        ("venture_capital", per_category[1], None, 0.6, w),
    ):
        cats = _raw_categories(mapping, source)
        for i in range(n):
            month = start + i
            for cat, raws in cats.items():
                for j in range(count):
                    day = int(rng.integers(1, 29))
                    raw = raws[int(rng.integers(0, len(raws)))]
                    rnd = _ROUNDS[(i + j) % len(_ROUNDS)] if source == "venture_capital" else ""
                    loc = _ROUND_BASE[rnd] if rnd else base
                    amount = round(float(np.exp(loc + index[i] + spread * rng.standard_normal())), 2)
                    rows[source].append((dt.date(month.year, month.month, day).isoformat(), amount, raw, rnd))
    return rows


def write_transactions_csv(rows, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("date", "amount", "category", "round_type"))
        for date, amount, raw, rnd in rows:
            writer.writerow((date, f"{amount:.2f}", raw, rnd))
    return path
