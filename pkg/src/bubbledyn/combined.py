"""Full food-price model: quadratic ethanol trend, trend-following
speculators, and coupling to alternative investment markets.

The recurrence is
    P(t+1) = k_c(t) + (1 - k_sd) P(t)
             + k_sp [P(t) - P(t-1)] + sum_i k_i [P_i(t) - P_i(t-1)]
with the speculator and coupling terms switched on at a single month index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import fitting
from .errors import AlignmentError, DegenerateInputError
from .ethanol import QuadraticTrend
from .speculators import RegimeClassification, classify
from .timeseries import Frequency, TimeSeries, Window


@dataclass(frozen=True)
class CombinedParams:
    k_sd: float
    k_sp: float
    couplings: tuple[float, ...]
    trend_a: float
    trend_b: float
    switch_index: int

    def __post_init__(self):
        if self.k_sd <= 0:
            raise ValueError("k_sd must be positive")
        if self.k_sp < 0:
            raise ValueError("k_sp must be non-negative")
        if self.switch_index < 1:
            raise ValueError("switch_index must be >= 1")


def kc_of_t(trend_a: float, trend_b: float, k_sd: float, t: int) -> float:
    """Time-dependent constant term that makes the dynamic model track the
    quadratic equilibrium a + b*t**2; the b(2t+1) term compensates for the
    one-step update lag."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return (trend_a + trend_b * t * t) * k_sd + trend_b * (2 * t + 1)


def _market_arrays(markets: Sequence[TimeSeries], start: tuple[int, int],
                   frequency: Frequency, length: int) -> list[np.ndarray]:
    arrays = []
    for i, m in enumerate(markets):
        if m.frequency is not frequency:
            raise AlignmentError(f"market {i} frequency mismatch")
        try:
            offset = m.index_of(start)
        except IndexError as exc:
            raise AlignmentError(f"market {i} does not cover the start date") from exc
        if offset + length > len(m):
            raise AlignmentError(
                f"market {i} too short: needs {length} values from {start}")
        arrays.append(m.to_array()[offset:offset + length])
    return arrays


def _iterate(params: CombinedParams, market_values: Sequence[np.ndarray],
             p0: float, p1: float, steps: int) -> np.ndarray:
    prices = np.empty(steps + 1)
    prices[0], prices[1] = p0, p1
    for t in range(1, steps):
        nxt = (kc_of_t(params.trend_a, params.trend_b, params.k_sd, t)
               + (1.0 - params.k_sd) * prices[t])
        if t >= params.switch_index:
            nxt += params.k_sp * (prices[t] - prices[t - 1])
            for k_i, series in zip(params.couplings, market_values):
                nxt += k_i * (series[t] - series[t - 1])
        prices[t + 1] = nxt
    return prices


def simulate_combined(params: CombinedParams, markets: Sequence[TimeSeries],
                      p0: float, p1: float, steps: int,
                      start: Optional[tuple[int, int]] = None) -> TimeSeries:
    """Run the full recurrence for ``steps`` updates (output length steps+1).

    Before ``switch_index`` the path is identical to the pure trend-tracking
    model; markets must each cover steps + 1 observations.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if len(params.couplings) != len(markets):
        raise ValueError("one coupling per market series is required")
    if start is None:
        start = markets[0].start if markets else (2004, 1)
    frequency = markets[0].frequency if markets else Frequency.MONTHLY
    arrays = _market_arrays(markets, start, frequency, steps + 1)
    prices = _iterate(params, arrays, p0, p1, steps)
    return TimeSeries(start, frequency, tuple(prices), "price")


@dataclass(frozen=True)
class CombinedFit:
    params: CombinedParams
    report: fitting.FitReport
    sse: float
    r2: float
    path: TimeSeries
    switch_date: tuple[int, int]
    regime: RegimeClassification

    def to_dict(self) -> dict:
        year, month = self.switch_date
        return {
            "k_sd": self.params.k_sd,
            "k_sp": self.params.k_sp,
            "couplings": list(self.params.couplings),
            "trend_a": self.params.trend_a,
            "trend_b": self.params.trend_b,
            "switch_index": self.params.switch_index,
            "switch_date": f"{year:04d}-{month:02d}",
            "sse": self.sse,
            "r2": self.r2,
            "period": self.regime.period,
            "regime": self.regime.label.value,
            "converged": self.report.converged,
            "evaluations": self.report.evaluations,
        }


def fit_background_trend(food: TimeSeries,
                         exclude: Sequence[Window] = ()) -> QuadraticTrend:
    """Quadratic trend of the raw index with bubble windows masked out."""
    y = food.to_array()
    t = np.arange(len(y), dtype=float)
    mask = np.ones(len(y), dtype=bool)
    for w in exclude:
        mask[w.begin_index:min(w.end_index, len(y))] = False
    y, t = y[mask], t[mask]
    if len(y) < 3:
        raise DegenerateInputError("need at least 3 points outside exclusions")
    design = np.column_stack([np.ones_like(t), t * t])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if sst == 0 else max(0.0, 1.0 - float(np.sum((y - fitted) ** 2)) / sst)
    return QuadraticTrend(a=float(coef[0]), b=float(coef[1]), r_squared=r2)


def _linear_seed(food: np.ndarray, arrays: Sequence[np.ndarray],
                 trend: QuadraticTrend, switch: int) -> Optional[np.ndarray]:
    """One-step-ahead regression estimate of (k_sd, k_sp, k_i).

    The recurrence is linear in the parameters when evaluated on the observed
    path, so ordinary least squares on the one-step differences recovers them
    exactly for noiseless data and gives a strong start otherwise.
    """
    n = len(food)
    rows = []
    rhs = []
    for t in range(1, n - 1):
        y = food[t + 1] - food[t] - trend.b * (2 * t + 1)
        gate = 1.0 if t >= switch else 0.0
        row = [trend.a + trend.b * t * t - food[t],
               gate * (food[t] - food[t - 1])]
        row += [gate * (m[t] - m[t - 1]) for m in arrays]
        rows.append(row)
        rhs.append(y)
    design = np.asarray(rows)
    try:
        coef, *_ = np.linalg.lstsq(design, np.asarray(rhs), rcond=None)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(coef)):
        return None
    return coef


def fit_combined(food: TimeSeries, markets: Sequence[TimeSeries],
                 trend: QuadraticTrend,
                 switch_candidates: Sequence[int]) -> CombinedFit:
    """Least-squares fit of (k_sd, k_sp, k_1..k_N) with the switch month
    selected over ``switch_candidates`` by best objective.

    Initial conditions come from the first two food observations; the trend
    coefficients are taken as given (fitted upstream with the bubble windows
    excluded).
    """
    if not switch_candidates:
        raise ValueError("switch_candidates must be non-empty")
    if len(food) < 4:
        raise DegenerateInputError("food series too short")
    fv = food.to_array()
    steps = len(fv) - 1
    arrays = _market_arrays(markets, food.start, food.frequency, steps + 1)
    p0, p1 = float(fv[0]), float(fv[1])
    n_markets = len(markets)
    bounds = ([(1e-4, 1.5), (0.0, 3.0)]
              + [(-1000.0, 100.0)] * n_markets)

    # precompute everything the recurrence needs besides the parameters
    t_axis = np.arange(1, steps, dtype=float)
    quad = trend.a + trend.b * t_axis * t_axis
    lag = trend.b * (2.0 * t_axis + 1.0)
    diffs = np.array([m[1:steps] - m[:steps - 1] for m in arrays]) \
        if n_markets else np.empty((0, steps - 1))

    def make_objective(switch: int):
        gate = (np.arange(1, steps) >= switch).astype(float)
        gated_diffs = diffs * gate

        def objective(v: np.ndarray) -> float:
            k_sd, k_sp = float(v[0]), float(v[1])
            if k_sd <= 0 or k_sp < 0:
                return fitting.PENALTY
            const = quad * k_sd + lag
            if n_markets:
                const = const + v[2:] @ gated_diffs
            coef1 = (1.0 - k_sd) + gate * k_sp
            coef2 = -gate * k_sp
            c_list = const.tolist()
            a_list = coef1.tolist()
            b_list = coef2.tolist()
            prev, cur = p0, p1
            sse = (fv[0] - p0) ** 2 + (fv[1] - p1) ** 2
            for i in range(steps - 1):
                prev, cur = cur, c_list[i] + a_list[i] * cur + b_list[i] * prev
                diff = fv[i + 2] - cur
                sse += diff * diff
            if not np.isfinite(sse):
                return fitting.PENALTY
            return float(sse)
        return objective

    best = None
    for switch in switch_candidates:
        if switch < 1:
            raise ValueError("switch candidates must be >= 1")
        objective = make_objective(switch)
        starts = []
        seed = _linear_seed(fv, arrays, trend, switch)
        if seed is not None:
            clipped = np.clip(seed, [b[0] for b in bounds], [b[1] for b in bounds])
            starts.append(tuple(clipped))
        grid_couplings = tuple(seed[2:]) if seed is not None else (-1.0,) * n_markets
        grid = [(k_sd, k_sp) + grid_couplings
                for k_sd, k_sp in itertools.product((0.05, 0.2, 0.45),
                                                    (0.6, 1.3, 1.9))]
        # polish only the most promising grid points; the linear seed is
        # usually already near the optimum
        grid.sort(key=lambda s: objective(np.asarray(s)))
        starts.extend(grid[:3])
        report = fitting.minimize(objective, starts, bounds, maxfev=5000)
        if best is None or report.objective_value < best[1].objective_value:
            best = (switch, report)

    switch, report = best
    v = report.parameter_vector
    params = CombinedParams(k_sd=v[0], k_sp=v[1], couplings=tuple(v[2:]),
                            trend_a=trend.a, trend_b=trend.b,
                            switch_index=switch)
    path_values = _iterate(params, arrays, p0, p1, steps)
    path = TimeSeries(food.start, food.frequency, tuple(path_values), "fitted price")
    sse = float(np.sum((fv - path_values) ** 2))
    sst = float(np.sum((fv - fv.mean()) ** 2))
    r2 = 1.0 - sse / sst if sst > 0 else float("nan")
    return CombinedFit(params=params, report=report, sse=sse, r2=r2, path=path,
                       switch_date=food.date_at(switch),
                       regime=classify(params.k_sd, max(params.k_sp, 0.0)))
