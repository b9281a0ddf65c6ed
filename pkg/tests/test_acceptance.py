"""End-to-end acceptance checks, one numbered test per criterion.

Each test prints a single ``acceptance N: PASS|FAIL|SKIP`` line (routed past
pytest's capture so the verdicts are visible in any run).  Data-dependent
checks skip with a notice when the corresponding fixture files are absent;
see the README for the expected fixture layout.
"""

import functools
import math
import sys
import time

import numpy as np
import pytest

from bubbledyn import (Frequency, QuadraticTrend, Regime, SeriesSpec,
                       TimeSeries, Transform, Window, box_cox, classify,
                       closed_form_second_order, fit_background_trend,
                       fit_combined, fit_supply_demand, inverse_box_cox,
                       lagged_cross_correlation, load_series,
                       normalize_unit_interval, oscillation_theta,
                       shock_update, simulate_first_order,
                       simulate_second_order, trend_comparison)
from bubbledyn import SpeculatorParams, emit
from bubbledyn.cli import default_bubble_windows, switch_candidates_for_year

import regime_sampling
from conftest import ACCEPTANCE_LINES, fixture_path, require_fixtures
from test_combined import TRUTH, make_food
from test_speculators import relative_gap


def criterion(num, title):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            def verdict(status, detail=""):
                line = f"acceptance {num}: {status:4s} {title}"
                if detail:
                    line += f" ({detail})"
                ACCEPTANCE_LINES.append(line)
                print(line, file=sys.__stdout__, flush=True)
            try:
                detail = fn(*args, **kwargs)
            except pytest.skip.Exception as exc:
                verdict("SKIP", str(exc))
                raise
            except BaseException:
                verdict("FAIL")
                raise
            verdict("PASS", detail or "")
        return wrapper
    return decorate


def clip(s: TimeSeries, begin, end) -> TimeSeries:
    """Inclusive calendar slice [begin, end]."""
    i, j = s.index_of(begin), s.index_of(end) + 1
    return TimeSeries(begin, s.frequency, s.values[i:j], s.label)


@criterion(1, "closed form matches iteration in every regime")
def test_01_closed_form_oracle():
    families = [
        regime_sampling.draw_case1_convergent,
        regime_sampling.draw_case1_divergent,
        lambda rng: regime_sampling.draw_case3(rng, 0.5),
        lambda rng: regime_sampling.draw_case3(rng, 1.0),
        lambda rng: regime_sampling.draw_case3(rng, 1.5),
        regime_sampling.draw_case2,
    ]
    started = time.perf_counter()
    rng = np.random.default_rng(20260824)
    worst = 0.0
    for draw in families:
        for _ in range(100):
            params = draw(rng)
            p_e = params.equilibrium_price
            sim = simulate_second_order(params, p_e, p_e + 1.0, 100).to_array()
            cf = np.array([closed_form_second_order(params, 1.0, t)
                           for t in range(101)])
            worst = max(worst, relative_gap(sim, cf))
    elapsed = time.perf_counter() - started
    assert worst < 1e-8, f"worst relative gap {worst:.3e}"
    assert elapsed < 5.0, f"took {elapsed:.1f}s"
    return f"worst gap {worst:.2e}, {elapsed:.2f}s"


@criterion(2, "oscillation period at the fitted parameter point")
def test_02_period_formula():
    period = 2.0 * math.pi / oscillation_theta(0.098, 1.29)
    assert abs(period - 23.6) <= 0.1, f"period {period:.3f}"
    return f"period {period:.2f} steps"


@criterion(3, "phase-diagram structure")
def test_03_phase_structure():
    started = time.perf_counter()
    # (a) at k_sd = 3 the convergent k_sp window is non-empty and within (0, 1]
    sweep = np.linspace(1e-3, 2.0, 1000)
    window = [float(k) for k in sweep if classify(3.0, float(k)).convergent]
    assert window, "no convergent k_sp found at k_sd = 3"
    assert min(window) > 0.0 and max(window) <= 1.0, \
        f"window [{min(window):.3f}, {max(window):.3f}] escapes (0, 1]"
    # (b) strong market damping: speculators can never stabilize
    for k_sd in (4.0, 4.5):
        for k_sp in np.linspace(0.0, 2.0, 1000):
            assert not classify(k_sd, float(k_sp)).convergent, \
                f"unexpected convergence at ({k_sd}, {k_sp})"
    # (c) the k_sp = 0 row reduces to first-order theory
    monotone_labels = {Regime.FIRST_ORDER_MONOTONE_CONVERGENT,
                       Regime.FIRST_ORDER_MONOTONE_DIVERGENT}
    for k_sd in np.linspace(0.013, 2.987, 300):  # off the 1.0/2.0 boundaries
        c = classify(float(k_sd), 0.0)
        assert c.convergent == (k_sd < 2.0), f"convergence wrong at {k_sd}"
        assert (c.label in monotone_labels) == (k_sd < 1.0), \
            f"monotonicity wrong at {k_sd}"
    elapsed = time.perf_counter() - started
    assert elapsed < 2.0, f"took {elapsed:.1f}s"
    return f"window ({min(window):.2f}, {max(window):.2f}], {elapsed:.2f}s"


@criterion(4, "parameter recovery on a synthetic noiseless path")
def test_04_fit_recovery_synthetic():
    started = time.perf_counter()
    food, markets = make_food()
    trend = QuadraticTrend(a=TRUTH["trend_a"], b=TRUTH["trend_b"],
                           r_squared=1.0)
    fit = fit_combined(food, markets, trend, switch_candidates=[38, 40, 42])
    elapsed = time.perf_counter() - started
    assert abs(fit.params.k_sd / TRUTH["k_sd"] - 1.0) < 0.05
    assert abs(fit.params.k_sp / TRUTH["k_sp"] - 1.0) < 0.05
    for got, want in zip(fit.params.couplings, TRUTH["couplings"]):
        assert abs(got / want - 1.0) < 0.10, f"coupling {got} vs {want}"
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    return (f"k_sd {fit.params.k_sd:.4f}, k_sp {fit.params.k_sp:.3f}, "
            f"{elapsed:.1f}s")


@criterion(5, "published-parameter reproduction on index fixtures")
def test_05_paper_parameters_on_fixtures():
    require_fixtures("fao_monthly.csv", "sp500_monthly.csv",
                     "note10y_yield_monthly.csv")
    started = time.perf_counter()
    food = clip(load_series(SeriesSpec(fixture_path("fao_monthly.csv"),
                                       Frequency.MONTHLY, label="food index")),
                (2004, 1), (2011, 4))
    sp500 = load_series(SeriesSpec(fixture_path("sp500_monthly.csv"),
                                   Frequency.MONTHLY, label="equity index"))
    bonds = load_series(SeriesSpec(fixture_path("note10y_yield_monthly.csv"),
                                   Frequency.MONTHLY, label="inverse yield",
                                   transform=Transform.INVERSE))
    trend = fit_background_trend(food, default_bubble_windows(food))
    fit = fit_combined(food, [sp500, bonds], trend,
                       switch_candidates_for_year(food, 2007))
    elapsed = time.perf_counter() - started
    assert 0.07 <= fit.params.k_sd <= 0.13, f"k_sd {fit.params.k_sd}"
    assert 1.1 <= fit.params.k_sp <= 1.5, f"k_sp {fit.params.k_sp}"
    assert all(k < 0 for k in fit.params.couplings), fit.params.couplings
    assert fit.switch_date[0] == 2007, f"switch {fit.switch_date}"
    assert fit.regime.label is Regime.AMPLIFIED_OSCILLATION
    assert elapsed < 300.0, f"took {elapsed:.1f}s"
    return (f"k_sd {fit.params.k_sd:.3f}, k_sp {fit.params.k_sp:.2f}, "
            f"switch {fit.switch_date}, {elapsed:.0f}s")


@criterion(6, "ethanol production trend matches the food-price trend")
def test_06_ethanol_trend_on_fixtures():
    require_fixtures("ethanol_annual.csv", "fao_annual.csv")
    ethanol = clip(load_series(SeriesSpec(fixture_path("ethanol_annual.csv"),
                                          Frequency.ANNUAL, label="ethanol")),
                   (1999, 1), (2010, 1))
    fao = clip(load_series(SeriesSpec(fixture_path("fao_annual.csv"),
                                      Frequency.ANNUAL, label="food index")),
               (1999, 1), (2010, 1))
    peak = int(np.argmax(fao.to_array()))
    cmp = trend_comparison(ethanol, fao, exclude_b=Window(peak, peak + 1))
    assert abs(cmp.coefficient_gap) <= 0.0006, \
        f"coefficient gap {cmp.coefficient_gap:.5f}"
    assert cmp.rho >= 0.95, f"rho {cmp.rho:.3f}"
    return f"gap {cmp.coefficient_gap:.5f}, rho {cmp.rho:.3f}"


@criterion(7, "wheat supply/demand fit and post-2000 breakdown")
def test_07_wheat_fit_on_fixtures():
    require_fixtures("wheat_price_annual.csv", "wheat_consumption_annual.csv",
                     "wheat_surplus_annual.csv")
    price = load_series(SeriesSpec(fixture_path("wheat_price_annual.csv"),
                                   Frequency.ANNUAL, label="price"))
    cons = load_series(SeriesSpec(fixture_path("wheat_consumption_annual.csv"),
                                  Frequency.ANNUAL, label="consumption"))
    surplus = load_series(SeriesSpec(fixture_path("wheat_surplus_annual.csv"),
                                     Frequency.ANNUAL, label="surplus"))
    fit = fit_supply_demand(price, cons, surplus)
    assert 0.95 <= fit.params.lam <= 1.05, f"lambda {fit.params.lam}"
    assert 0.75 <= fit.params.beta_d <= 1.27, f"beta_d {fit.params.beta_d}"

    def pooled_rms(year_cut, after):
        chunks = []
        for res, obs in ((fit.residual_price, price),
                         (fit.residual_consumption, cons)):
            cut = res.index_of((year_cut, 1))
            r = res.to_array() / np.std(obs.to_array())
            chunks.append(r[cut:] if after else r[:cut])
        stacked = np.concatenate(chunks)
        return float(np.sqrt(np.mean(stacked ** 2)))

    before, after = pooled_rms(2000, False), pooled_rms(2000, True)
    assert after >= 2.0 * before, f"RMS ratio {after / before:.2f}"
    return (f"lambda {fit.params.lam:.3f}, beta_d {fit.params.beta_d:.3f}, "
            f"RMS ratio {after / before:.1f}")


@criterion(8, "model invariants")
def test_08_invariants(tmp_path):
    started = time.perf_counter()
    # power-transform round trip and log-limit continuity
    for x in np.logspace(-2, 2, 25):
        for lam in (-2.0, -0.5, 0.0, 1e-7, 0.5, 1.0, 2.0):
            y = box_cox(float(x), lam)
            assert abs(inverse_box_cox(y, lam) - x) <= 1e-10 * x
        assert abs(box_cox(float(x), 2e-8) - math.log(x)) < 1e-6
    # fixed points of both price recurrences stay fixed
    p1 = SpeculatorParams(0.4, 0.0, 18.0)
    assert simulate_first_order(p1, p1.equilibrium_price, 50).values \
        == (p1.equilibrium_price,) * 51
    p2 = SpeculatorParams(0.3, 1.4, 24.0)
    p_e = p2.equilibrium_price
    assert simulate_second_order(p2, p_e, p_e, 50).values == (p_e,) * 51
    # shortage raises demand intercept, surplus raises supply intercept
    assert shock_update(10.0, 8.0, -2.0) == (12.0, 8.0)
    assert shock_update(10.0, 8.0, 3.0) == (10.0, 11.0)
    assert shock_update(10.0, 8.0, 0.0) == (10.0, 8.0)
    # unit-interval normalization is idempotent
    s = TimeSeries((2004, 1), Frequency.MONTHLY, (3.0, 9.0, 5.5, 4.0))
    once = normalize_unit_interval(s)
    assert normalize_unit_interval(once).values == pytest.approx(once.values)
    # emit/load round-trips a series bit-exactly
    ugly = TimeSeries((1999, 1), Frequency.ANNUAL, (1.0 / 3.0, 2.0 / 7.0, 0.1))
    dest = tmp_path / "roundtrip.csv"
    emit(ugly, "csv", dest)
    back = load_series(SeriesSpec(dest, Frequency.ANNUAL))
    assert back.values == ugly.values
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"took {elapsed:.1f}s"
    return f"{elapsed:.2f}s"


@criterion(9, "inventory response lags the price deviation by about a year")
def test_09_inventory_lag_on_fixtures():
    require_fixtures("fao_monthly.csv", "inventory_change_monthly.csv")
    food = load_series(SeriesSpec(fixture_path("fao_monthly.csv"),
                                  Frequency.MONTHLY, label="food index"))
    inventory = load_series(SeriesSpec(
        fixture_path("inventory_change_monthly.csv"), Frequency.MONTHLY,
        label="inventory change"))
    trend = fit_background_trend(food, default_bubble_windows(food))
    t = np.arange(len(food), dtype=float)
    deviation = food.with_values(
        food.to_array() - (trend.a + trend.b * t * t), "price deviation")
    scan = lagged_cross_correlation(deviation, inventory, 24)
    peak = scan.peak_lag()
    assert 9 <= peak <= 15, f"peak lag {peak} months"
    return f"peak lag {peak} months"
