"""Time-series container and shared statistical primitives.

All functions here are pure; :class:`TimeSeries` is immutable after
construction, so everything is safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import AlignmentError, DegenerateInputError, DomainError

#: Below this |lambda| the Box-Cox transform switches to its logarithm branch.
#: Small enough that the jump at the switch stays under 1e-6 for x <= 100.
LAMBDA_EPS = 1e-8


class Frequency(Enum):
    MONTHLY = "monthly"
    ANNUAL = "annual"


@dataclass(frozen=True)
class Window:
    """Half-open index range [begin_index, end_index)."""

    begin_index: int
    end_index: int

    def __post_init__(self):
        if self.begin_index < 0:
            raise ValueError("begin_index must be >= 0")
        if self.end_index <= self.begin_index:
            raise ValueError("end_index must exceed begin_index")

    def contains(self, index: int) -> bool:
        return self.begin_index <= index < self.end_index


@dataclass(frozen=True)
class TimeSeries:
    """Gap-free sequence of scalar observations at a fixed frequency.

    ``start`` is a (year, month) pair; index ``t`` corresponds to ``start``
    advanced by ``t`` frequency units.  ``label`` carries the units
    (e.g. "FAO index points", "mmt") and is purely descriptive.
    """

    start: tuple[int, int]
    frequency: Frequency
    values: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        year, month = self.start
        if not 1 <= month <= 12:
            raise ValueError(f"month out of range: {month}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("TimeSeries requires at least one value")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("TimeSeries values must be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "start", (int(year), int(month)))

    def __len__(self) -> int:
        return len(self.values)

    def to_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def start_ordinal(self) -> int:
        """Position of the first observation on the frequency's calendar axis
        (months since year 0 for monthly series, the year for annual ones)."""
        year, month = self.start
        if self.frequency is Frequency.MONTHLY:
            return year * 12 + (month - 1)
        return year

    def date_at(self, index: int) -> tuple[int, int]:
        year, month = self.start
        if self.frequency is Frequency.MONTHLY:
            total = year * 12 + (month - 1) + index
            return divmod(total, 12)[0], divmod(total, 12)[1] + 1
        return year + index, month

    def index_of(self, date: tuple[int, int]) -> int:
        """Index of the observation at ``date``; raises if out of range."""
        year, month = date
        if self.frequency is Frequency.MONTHLY:
            idx = year * 12 + (month - 1) - self.start_ordinal
        else:
            idx = year - self.start[0]
        if not 0 <= idx < len(self):
            raise IndexError(f"date {date} outside series span")
        return int(idx)

    def with_values(self, values: Sequence[float], label: Optional[str] = None) -> "TimeSeries":
        return TimeSeries(self.start, self.frequency,
                          tuple(float(v) for v in values),
                          self.label if label is None else label)


def align(a: TimeSeries, b: TimeSeries) -> tuple[np.ndarray, np.ndarray, tuple[int, int]]:
    """Calendar-date alignment of two series.

    Returns the overlapping value arrays and the common start date.
    Frequency mismatch is an error, never silently resampled.
    """
    if a.frequency is not b.frequency:
        raise AlignmentError(
            f"frequency mismatch: {a.frequency.value} vs {b.frequency.value}")
    lo = max(a.start_ordinal, b.start_ordinal)
    hi = min(a.start_ordinal + len(a), b.start_ordinal + len(b))
    if hi <= lo:
        raise AlignmentError("series have no overlapping span")
    xs = a.to_array()[lo - a.start_ordinal: hi - a.start_ordinal]
    ys = b.to_array()[lo - b.start_ordinal: hi - b.start_ordinal]
    start = a.date_at(lo - a.start_ordinal)
    return xs, ys, start


def box_cox(x: float, lam: float) -> float:
    """Power transform (x**lam - 1)/lam, continuously extended to ln(x) at
    lam = 0."""
    if x <= 0:
        raise DomainError(f"box_cox requires x > 0, got {x}")
    if abs(lam) < LAMBDA_EPS:
        return math.log(x)
    # expm1 avoids cancellation for small lam * ln(x)
    return math.expm1(lam * math.log(x)) / lam


def inverse_box_cox(y: float, lam: float) -> float:
    """Exact inverse of :func:`box_cox`."""
    if abs(lam) < LAMBDA_EPS:
        return math.exp(y)
    base = lam * y + 1.0
    if base <= 0:
        raise DomainError(f"inverse_box_cox infeasible: lam*y + 1 = {base} <= 0")
    # log1p keeps the exponent accurate when lam * y is tiny
    return math.exp(math.log1p(lam * y) / lam)


def _pearson(xs: np.ndarray, ys: np.ndarray) -> float:
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("constant series has undefined correlation")
    return float(dx @ dy) / (sx * sy)


def pearson_correlation(xs: TimeSeries, ys: TimeSeries) -> float:
    """Sample Pearson correlation over the calendar-aligned span."""
    ax, ay, _ = align(xs, ys)
    if len(ax) < 2:
        raise DegenerateInputError("need at least 2 overlapping observations")
    return _pearson(ax, ay)


def normalize_unit_interval(s: TimeSeries, exclude: Optional[Window] = None) -> TimeSeries:
    """Affine map sending the min/max of the non-excluded points to 0/1.

    Excluded points are transformed by the same map and may land outside
    [0, 1].
    """
    values = s.to_array()
    if exclude is not None:
        if exclude.end_index > len(values):
            raise ValueError("exclusion window exceeds series length")
        mask = np.ones(len(values), dtype=bool)
        mask[exclude.begin_index:exclude.end_index] = False
    else:
        mask = np.ones(len(values), dtype=bool)
    kept = values[mask]
    if kept.size == 0:
        raise DegenerateInputError("exclusion window covers the whole series")
    lo, hi = kept.min(), kept.max()
    if hi == lo:
        raise DegenerateInputError("all non-excluded values are equal")
    return s.with_values((values - lo) / (hi - lo))


@dataclass(frozen=True)
class LagScan:
    """Result of a lagged cross-correlation sweep.

    ``entries`` holds (lag, rho) pairs; lags with fewer than 3 overlapping
    observations are listed in ``omitted`` instead.
    """

    entries: tuple[tuple[int, float], ...]
    omitted: tuple[int, ...] = field(default=())

    def peak_lag(self) -> int:
        if not self.entries:
            raise DegenerateInputError("empty lag scan")
        return max(self.entries, key=lambda e: e[1])[0]


def lagged_cross_correlation(xs: TimeSeries, ys: TimeSeries, max_lag: int) -> LagScan:
    """Pearson rho of xs(t) against ys(t + lag) for lag = 0..max_lag."""
    if xs.frequency is not ys.frequency:
        raise AlignmentError("lagged_cross_correlation requires equal frequencies")
    entries = []
    omitted = []
    ox, oy = xs.start_ordinal, ys.start_ordinal
    ax, ay = xs.to_array(), ys.to_array()
    for lag in range(max_lag + 1):
        # pair xs at ordinal o with ys at ordinal o + lag
        lo = max(ox, oy - lag)
        hi = min(ox + len(ax), oy + len(ay) - lag)
        if hi - lo < 3:
            omitted.append(lag)
            continue
        xi = slice(lo - ox, hi - ox)
        yi = slice(lo + lag - oy, hi + lag - oy)
        entries.append((lag, _pearson(ax[xi], ay[yi])))
    return LagScan(tuple(entries), tuple(omitted))


def deflate(nominal: TimeSeries, cpi: TimeSeries) -> TimeSeries:
    """Divide out a price index, re-based to the first common observation."""
    nv, cv, start = align(nominal, cpi)
    if np.any(cv <= 0):
        raise DomainError("CPI values must be strictly positive")
    deflated = nv / cv * cv[0]
    return TimeSeries(start, nominal.frequency, tuple(deflated), nominal.label)
