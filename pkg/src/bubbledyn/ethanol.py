"""Dominant-supply-shock ethanol model and quadratic-trend comparison.

When corn-to-ethanol diversion is the only material supply shift, the food
price is an affine function of the diverted quantity, and the price and
diversion series share one functional form: pure quadratic growth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateInputError
from .timeseries import TimeSeries, Window, align, normalize_unit_interval, _pearson


@dataclass(frozen=True)
class QuadraticTrend:
    """Least-squares fit of y = a + b*t**2 (no linear term)."""

    a: float
    b: float
    r_squared: float

    def __post_init__(self):
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValueError("r_squared must lie in [0, 1]")

    def value_at(self, t: float) -> float:
        return self.a + self.b * t * t


@dataclass(frozen=True)
class EthanolLinkParams:
    """Effective elasticity and constants linking diverted quantity to price."""

    beta_sum: float
    alpha_d: float
    q_total: float

    def __post_init__(self):
        if self.beta_sum <= 0:
            raise ValueError("beta_sum must be positive")


def quadratic_fit(s: TimeSeries, exclude: Optional[Window] = None) -> QuadraticTrend:
    """OLS on y = a + b*t**2 over non-excluded points, t in index units."""
    y = s.to_array()
    t = np.arange(len(y), dtype=float)
    if exclude is not None:
        if exclude.end_index > len(y):
            raise ValueError("exclusion window exceeds series length")
        mask = np.ones(len(y), dtype=bool)
        mask[exclude.begin_index:exclude.end_index] = False
        y, t = y[mask], t[mask]
    if len(y) < 3:
        raise DegenerateInputError("need at least 3 usable points")
    design = np.column_stack([np.ones_like(t), t * t])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    sst = float(np.sum((y - y.mean()) ** 2))
    sse = float(np.sum((y - fitted) ** 2))
    r2 = 1.0 if sst == 0.0 else max(0.0, 1.0 - sse / sst)
    return QuadraticTrend(a=float(coef[0]), b=float(coef[1]), r_squared=r2)


def implied_food_price(q_x: TimeSeries, link: EthanolLinkParams) -> TimeSeries:
    """Invert the supply-shock relation: P = (Q_x - Q_t + alpha_d)/beta_sum."""
    values = (q_x.to_array() - link.q_total + link.alpha_d) / link.beta_sum
    return q_x.with_values(values, "implied price")


@dataclass(frozen=True)
class TrendComparison:
    trend_a: QuadraticTrend
    trend_b: QuadraticTrend
    coefficient_gap: float
    rho: float

    def to_dict(self) -> dict:
        return {
            "series_a": {"a": self.trend_a.a, "b": self.trend_a.b,
                         "r_squared": self.trend_a.r_squared},
            "series_b": {"a": self.trend_b.a, "b": self.trend_b.b,
                         "r_squared": self.trend_b.r_squared},
            "coefficient_gap": self.coefficient_gap,
            "rho": self.rho,
        }


def trend_comparison(series_a: TimeSeries, series_b: TimeSeries,
                     exclude_b: Optional[Window] = None) -> TrendComparison:
    """Normalize both series to [0, 1], fit quadratic growth to each, and
    correlate them over the common non-excluded span.

    ``exclude_b`` (typically a price-bubble window) is left out of series_b's
    normalization and fit.
    """
    norm_a = normalize_unit_interval(series_a)
    norm_b = normalize_unit_interval(series_b, exclude=exclude_b)
    trend_a = quadratic_fit(norm_a)
    trend_b = quadratic_fit(norm_b, exclude=exclude_b)
    av, bv, start = align(norm_a, norm_b)
    if len(av) < 4:
        raise DegenerateInputError("overlapping span must have >= 4 points")
    if exclude_b is not None:
        offset = norm_b.index_of(start)
        idx = np.arange(len(bv)) + offset
        keep = ~((idx >= exclude_b.begin_index) & (idx < exclude_b.end_index))
        av, bv = av[keep], bv[keep]
    rho = _pearson(av, bv)
    return TrendComparison(trend_a=trend_a, trend_b=trend_b,
                           coefficient_gap=trend_a.b - trend_b.b, rho=rho)
