"""Equilibrium commodity-price model driven by surplus shocks.

Demand and supply curves are linear in Box-Cox-transformed price; the only
exogenous input is the annual surplus (production minus consumption), which
shifts the demand intercept under a shortage and the supply intercept under
a surplus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import fitting
from .errors import DegenerateInputError, DomainError
from .timeseries import TimeSeries, align, box_cox, inverse_box_cox


@dataclass(frozen=True)
class SupplyDemandParams:
    """Transform parameter plus intercepts/slopes of both curves."""

    lam: float
    alpha_d: float
    beta_d: float
    alpha_s: float
    beta_s: float

    def __post_init__(self):
        if self.beta_d < 0 or self.beta_s < 0:
            raise ValueError("slopes must be non-negative")
        if self.beta_d + self.beta_s <= 0:
            raise ValueError("beta_d + beta_s must be positive")


@dataclass(frozen=True)
class EquilibriumPath:
    """Simulated equilibrium prices/quantities in original units, with the
    per-step intercept trace (alpha_d(t), alpha_s(t))."""

    prices: TimeSeries
    quantities: TimeSeries
    intercept_trace: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "prices": list(self.prices.values),
            "quantities": list(self.quantities.values),
            "intercept_trace": [list(pair) for pair in self.intercept_trace],
        }


def shock_update(alpha_d: float, alpha_s: float, surplus_prev: float) -> tuple[float, float]:
    """Shift one intercept by the previous period's surplus.

    A shortage (negative surplus) raises the demand intercept; a surplus
    raises the supply intercept, lowering the equilibrium price.
    """
    if surplus_prev < 0:
        return alpha_d - surplus_prev, alpha_s
    if surplus_prev > 0:
        return alpha_d, alpha_s + surplus_prev
    return alpha_d, alpha_s


def equilibrium(params: SupplyDemandParams) -> tuple[float, float]:
    """Intersection of the two transformed curves: (P_e, Q_e)."""
    denom = params.beta_d + params.beta_s
    if denom == 0:
        raise DegenerateInputError("beta_d + beta_s is zero")
    p_e = (params.alpha_d - params.alpha_s) / denom
    q_e = (params.alpha_d * params.beta_s + params.alpha_s * params.beta_d) / denom
    return p_e, q_e


def _simulate_transformed(surplus: np.ndarray, lam: float, alpha_d0: float,
                          beta_d: float, alpha_s0: float, beta_s: float
                          ) -> tuple[np.ndarray, np.ndarray, list[tuple[float, float]]]:
    denom = beta_d + beta_s
    if denom <= 0:
        raise DegenerateInputError("beta_d + beta_s must be positive")
    alpha_d, alpha_s = alpha_d0, alpha_s0
    prices = np.empty(len(surplus))
    quantities = np.empty(len(surplus))
    trace = []
    for t in range(len(surplus)):
        if t > 0:
            alpha_d, alpha_s = shock_update(alpha_d, alpha_s, surplus[t - 1])
        trace.append((alpha_d, alpha_s))
        prices[t] = (alpha_d - alpha_s) / denom
        quantities[t] = (alpha_d * beta_s + alpha_s * beta_d) / denom
    return prices, quantities, trace


def simulate_equilibrium_path(surplus: TimeSeries, params0: SupplyDemandParams) -> EquilibriumPath:
    """Iterate shock_update + equilibrium over the surplus series.

    Transformed equilibria are mapped back to original units; an infeasible
    inverse transform reports the offending step.
    """
    p_tr, q_tr, trace = _simulate_transformed(
        surplus.to_array(), params0.lam, params0.alpha_d, params0.beta_d,
        params0.alpha_s, params0.beta_s)
    prices = np.empty(len(p_tr))
    quantities = np.empty(len(q_tr))
    for t in range(len(p_tr)):
        try:
            prices[t] = inverse_box_cox(p_tr[t], params0.lam)
            quantities[t] = inverse_box_cox(q_tr[t], params0.lam)
        except DomainError as exc:
            raise DomainError(f"inverse transform infeasible at step {t}: {exc}") from exc
    return EquilibriumPath(
        prices=TimeSeries(surplus.start, surplus.frequency, tuple(prices), "price"),
        quantities=TimeSeries(surplus.start, surplus.frequency, tuple(quantities), "quantity"),
        intercept_trace=tuple(trace))


def _determined_params(lam: float, beta_d: float, alpha_s0: float,
                       p0_raw: float, q0_raw: float) -> tuple[float, float]:
    """alpha_d(0) and beta_s pinned so the t=0 equilibrium reproduces the
    first data point exactly in transformed space."""
    p0 = box_cox(p0_raw, lam)
    q0 = box_cox(q0_raw, lam)
    if p0 == 0:
        raise DegenerateInputError("transformed initial price is zero")
    alpha_d0 = q0 + beta_d * p0
    beta_s = (q0 - alpha_s0) / p0
    return alpha_d0, beta_s


@dataclass(frozen=True)
class SupplyDemandFit:
    params: SupplyDemandParams
    report: fitting.FitReport
    r2_price: float
    r2_consumption: float
    residual_price: TimeSeries
    residual_consumption: TimeSeries
    path: EquilibriumPath

    def to_dict(self) -> dict:
        return {
            "lambda": self.params.lam,
            "alpha_d0": self.params.alpha_d,
            "beta_d": self.params.beta_d,
            "alpha_s0": self.params.alpha_s,
            "beta_s": self.params.beta_s,
            "objective": self.report.objective_value,
            "evaluations": self.report.evaluations,
            "converged": self.report.converged,
            "r2_price": self.r2_price,
            "r2_consumption": self.r2_consumption,
            "residual_price": list(self.residual_price.values),
            "residual_consumption": list(self.residual_consumption.values),
        }


def _align3(a: TimeSeries, b: TimeSeries, c: TimeSeries):
    av, bv, start = align(a, b)
    tmp = TimeSeries(start, a.frequency, tuple(av))
    av2, cv, start2 = align(tmp, c)
    offset = tmp.index_of(start2)
    return av2, bv[offset:offset + len(av2)], cv, start2


def fit_supply_demand(price: TimeSeries, consumption: TimeSeries,
                      surplus: TimeSeries) -> SupplyDemandFit:
    """Three-parameter joint fit of equilibrium price and consumption.

    Free parameters: (lambda, beta_d, alpha_s(0)).  alpha_d(0) and beta_s
    are determined from the first data point so P_e(0) and Q_e(0) match it
    exactly.  The objective is the variance-normalized SSE of price plus
    consumption, both in original units.
    """
    pv, qv, sv, start = _align3(price, consumption, surplus)
    if len(pv) < 5:
        raise DegenerateInputError("need at least 5 aligned observations")
    if np.any(pv <= 0) or np.any(qv <= 0):
        raise DomainError("prices and consumption must be positive")
    var_p = float(np.var(pv))
    var_q = float(np.var(qv))
    if var_p == 0 or var_q == 0:
        raise DegenerateInputError("constant observed series")
    p0_raw, q0_raw = float(pv[0]), float(qv[0])

    def objective(v: np.ndarray) -> float:
        lam, beta_d, alpha_s0 = v
        if beta_d < 0:
            return fitting.PENALTY
        try:
            alpha_d0, beta_s = _determined_params(lam, beta_d, alpha_s0,
                                                  p0_raw, q0_raw)
            if beta_s < 0 or beta_d + beta_s <= 0:
                return fitting.PENALTY
            p_tr, q_tr, _ = _simulate_transformed(sv, lam, alpha_d0, beta_d,
                                                  alpha_s0, beta_s)
            p_mod = np.array([inverse_box_cox(p, lam) for p in p_tr])
            q_mod = np.array([inverse_box_cox(q, lam) for q in q_tr])
        except (DomainError, DegenerateInputError, OverflowError):
            return fitting.PENALTY
        sse_p = float(np.sum((pv - p_mod) ** 2))
        sse_q = float(np.sum((qv - q_mod) ** 2))
        return sse_p / var_p / len(pv) + sse_q / var_q / len(qv)

    q_ref = q0_raw - 1.0  # transformed consumption scale at lambda = 1
    bounds = [(0.5, 1.2), (0.1, 5.0), (0.1 * q_ref, 2.0 * q_ref)]
    starts = [
        (lam, bd, a)
        for lam, bd, a in itertools.product(
            (0.6, 0.9, 1.1),
            (0.3, 1.0, 3.0),
            (0.3 * q_ref, 0.8 * q_ref))
    ]
    starts += [(1.0, 0.5, 0.5 * q_ref), (0.8, 2.0, 1.2 * q_ref)]
    report = fitting.minimize(objective, starts, bounds)

    lam, beta_d, alpha_s0 = report.parameter_vector
    alpha_d0, beta_s = _determined_params(lam, beta_d, alpha_s0, p0_raw, q0_raw)
    params = SupplyDemandParams(lam, alpha_d0, beta_d, alpha_s0, beta_s)
    surplus_common = TimeSeries(start, surplus.frequency, tuple(sv), surplus.label)
    path = simulate_equilibrium_path(surplus_common, params)
    obs_price = TimeSeries(start, price.frequency, tuple(pv), price.label)
    obs_cons = TimeSeries(start, consumption.frequency, tuple(qv), consumption.label)
    res_p = obs_price.with_values(pv - path.prices.to_array(), "price residual")
    res_q = obs_cons.with_values(qv - path.quantities.to_array(), "consumption residual")
    return SupplyDemandFit(
        params=params, report=report,
        r2_price=fitting.r_squared(obs_price, path.prices),
        r2_consumption=fitting.r_squared(obs_cons, path.quantities),
        residual_price=res_p, residual_consumption=res_q, path=path)
