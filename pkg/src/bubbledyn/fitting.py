"""Shared derivative-free optimization and regression utilities.

The models fit smooth but nonconvex objectives in 3-5 dimensions; a
multi-start simplex descent is enough, with box bounds enforced through an
additive quadratic penalty so the inner method stays unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import DegenerateInputError, FitError
from .timeseries import TimeSeries, align

#: Sentinel objective value marking an infeasible evaluation.
PENALTY = 1e15

#: Improvement threshold below which a start is considered converged.
DEFAULT_FTOL = 1e-10

#: Simplex size threshold, relative to the bounds span.
DEFAULT_XTOL = 1e-8

#: Evaluation cap per start.
DEFAULT_MAXFEV = 20_000


@dataclass(frozen=True)
class FitReport:
    """Outcome of a multi-start minimization."""

    parameter_vector: tuple[float, ...]
    objective_value: float
    evaluations: int
    converged: bool
    restarts_used: int


def _penalized(objective: Callable[[np.ndarray], float],
               bounds: Sequence[tuple[float, float]],
               scale: float) -> Callable[[np.ndarray], float]:
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    span = hi - lo

    def wrapped(x: np.ndarray) -> float:
        excess = np.maximum(0.0, lo - x) + np.maximum(0.0, x - hi)
        penalty = scale * float(np.sum((excess / span) ** 2))
        value = objective(np.asarray(x, dtype=float))
        if not np.isfinite(value):
            return PENALTY
        return value + penalty

    return wrapped


def minimize(objective: Callable[[np.ndarray], float],
             starts: Sequence[Sequence[float]],
             bounds: Sequence[tuple[float, float]],
             ftol: float = DEFAULT_FTOL,
             xtol: float = DEFAULT_XTOL,
             maxfev: int = DEFAULT_MAXFEV,
             penalty_scale: Optional[float] = None) -> FitReport:
    """Simplex descent from every start; returns the best terminal point.

    Deterministic given identical inputs.  Raises :class:`FitError` when no
    start escapes the penalty sentinel.
    """
    if not starts:
        raise FitError("minimize requires at least one start")
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    for lo, hi in bounds:
        if hi <= lo:
            raise ValueError("bounds must have lo < hi")
    for s in starts:
        if len(s) != len(bounds):
            raise ValueError("start dimensionality does not match bounds")

    if penalty_scale is None:
        # Must dominate the in-box objective range; estimate from the starts.
        probes = [objective(np.asarray(s, dtype=float)) for s in starts]
        finite = [p for p in probes if np.isfinite(p) and p < PENALTY]
        penalty_scale = 1e6 * (max(finite) + 1.0) if finite else 1e6

    wrapped = _penalized(objective, bounds, penalty_scale)
    span = max(hi - lo for lo, hi in bounds)

    best_x = None
    best_f = np.inf
    total_evals = 0
    converged = False
    for start in starts:
        res = _scipy_minimize(
            wrapped, np.asarray(start, dtype=float), method="Nelder-Mead",
            options={"fatol": ftol, "xatol": xtol * span,
                     "maxfev": maxfev, "maxiter": maxfev})
        total_evals += int(res.nfev)
        if res.fun < best_f:
            best_f = float(res.fun)
            best_x = np.asarray(res.x, dtype=float)
            converged = bool(res.success) or converged
    if best_x is None or best_f >= PENALTY:
        raise FitError("all starts remained in the infeasible region",
                       best_so_far=None if best_x is None else tuple(best_x))
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    best_x = np.clip(best_x, lo, hi)
    return FitReport(parameter_vector=tuple(float(v) for v in best_x),
                     objective_value=best_f,
                     evaluations=total_evals,
                     converged=converged,
                     restarts_used=len(starts))


def r_squared(observed: TimeSeries, modeled: TimeSeries) -> float:
    """Coefficient of determination, 1 - SSE/SST about the observed mean."""
    obs, mod, _ = align(observed, modeled)
    if len(obs) < 2:
        raise DegenerateInputError("need at least 2 observations")
    sst = float(np.sum((obs - obs.mean()) ** 2))
    if sst == 0.0:
        raise DegenerateInputError("constant observed series")
    sse = float(np.sum((obs - mod) ** 2))
    return 1.0 - sse / sst
