"""Command-line entry point.

Subcommands map one-to-one onto the library operations; outputs are
plot-ready CSV or JSON.  Exit codes: 0 success, 2 usage error, 3 data
error, 4 fit failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import combined, data_io, ethanol, speculators, supply_demand, timeseries
from .errors import BubbledynError, DataError, DomainError, FitError
from .timeseries import Frequency, Window

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_FIT = 4

#: Environment variable naming the default directory for data files.
DATA_DIR_ENV = "BUBBLEDYN_DATA_DIR"


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    root = os.environ.get(DATA_DIR_ENV)
    if root:
        candidate = Path(root) / path
        if candidate.exists():
            return candidate
    return p


def _load(path: str, frequency: Frequency, label: str = "") -> timeseries.TimeSeries:
    transform = data_io.Transform.NONE
    if path.endswith(":inverse"):
        path = path[: -len(":inverse")]
        transform = data_io.Transform.INVERSE
    spec = data_io.SeriesSpec(path=_resolve(path), frequency=frequency,
                              label=label, transform=transform)
    return data_io.load_series(spec)


def _parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def _parse_window(text: str) -> Window:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected begin:end, got {text!r}")
    try:
        return Window(int(parts[0]), int(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _frequency(name: str) -> Frequency:
    return Frequency(name)


def _emit(obj, fmt: str, output: str | None) -> None:
    if output is None:
        data_io.emit(obj, fmt, sys.stdout)
    else:
        data_io.emit(obj, fmt, output)


def _add_output_args(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("-o", "--output", default=None,
                   help="destination file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default_format,
                   help=f"output format (default: {default_format})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bubbledyn",
        description="Commodity-price dynamics: supply/demand, ethanol and "
                    "speculator models.")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for any stochastic start grid (the default "
                             "grids are deterministic)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-sd", help="simulate the equilibrium path "
                       "driven by a surplus series")
    p.add_argument("--surplus", required=True, help="surplus CSV")
    p.add_argument("--frequency", type=_frequency, default=Frequency.ANNUAL)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--alpha-d", type=float, required=True)
    p.add_argument("--beta-d", type=float, required=True)
    p.add_argument("--alpha-s", type=float, required=True)
    p.add_argument("--beta-s", type=float, required=True)
    _add_output_args(p, "json")

    p = sub.add_parser("simulate-spec", help="simulate the speculator price "
                       "recurrence")
    p.add_argument("--ksd", type=float, required=True)
    p.add_argument("--ksp", type=float, default=0.0)
    p.add_argument("--kc", type=float, required=True)
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--p1", type=float, default=None,
                   help="second initial price (second-order only; default p0)")
    p.add_argument("--steps", type=int, required=True)
    _add_output_args(p, "csv")

    p = sub.add_parser("phase", help="regime classification over a "
                       "(k_sd, k_sp) grid")
    p.add_argument("--ksd", type=_parse_range, required=True, metavar="LO:HI:N")
    p.add_argument("--ksp", type=_parse_range, required=True, metavar="LO:HI:N")
    _add_output_args(p, "csv")

    p = sub.add_parser("fit-sd", help="joint supply/demand fit to price and "
                       "consumption")
    p.add_argument("--price", required=True)
    p.add_argument("--consumption", required=True)
    p.add_argument("--surplus", required=True)
    p.add_argument("--frequency", type=_frequency, default=Frequency.ANNUAL)
    _add_output_args(p, "json")

    p = sub.add_parser("fit-ethanol", help="compare quadratic trends of "
                       "ethanol and food-price series")
    p.add_argument("--ethanol", required=True)
    p.add_argument("--food", required=True)
    p.add_argument("--frequency", type=_frequency, default=Frequency.ANNUAL)
    p.add_argument("--exclude", type=_parse_window, default=None,
                   metavar="BEGIN:END",
                   help="index window of the food series to exclude")
    _add_output_args(p, "json")

    p = sub.add_parser("fit-combined", help="fit the speculator + ethanol "
                       "model to a monthly food index")
    p.add_argument("--food", required=True)
    p.add_argument("--market", action="append", default=[],
                   help="market CSV; append ':inverse' to invert values "
                        "(e.g. bond yields)")
    p.add_argument("--switch-year", type=int, default=2007,
                   help="calendar year searched for the switch-on month")
    p.add_argument("--exclude-window", action="append", type=_parse_window,
                   default=None, metavar="BEGIN:END",
                   help="index windows excluded from the background trend "
                        "(default: the 2007-08 and 2010-11 bubbles)")
    _add_output_args(p, "json")

    p = sub.add_parser("correlate", help="Pearson correlation of two series")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--frequency", type=_frequency, default=Frequency.ANNUAL)
    _add_output_args(p, "json")

    p = sub.add_parser("lagscan", help="lagged cross-correlation sweep")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--max-lag", type=int, required=True)
    p.add_argument("--frequency", type=_frequency, default=Frequency.MONTHLY)
    _add_output_args(p, "csv")

    return parser


def _run(args: argparse.Namespace) -> int:
    if args.command == "simulate-sd":
        surplus = _load(args.surplus, args.frequency, "surplus")
        params = supply_demand.SupplyDemandParams(
            args.lam, args.alpha_d, args.beta_d, args.alpha_s, args.beta_s)
        path = supply_demand.simulate_equilibrium_path(surplus, params)
        obj = path.prices if args.format == "csv" else path
        _emit(obj, args.format, args.output)

    elif args.command == "simulate-spec":
        params = speculators.SpeculatorParams(args.ksd, args.ksp, args.kc)
        if args.ksp == 0 and args.p1 is None:
            series = speculators.simulate_first_order(params, args.p0, args.steps)
        else:
            p1 = args.p0 if args.p1 is None else args.p1
            series = speculators.simulate_second_order(params, args.p0, p1,
                                                       args.steps)
        _emit(series, args.format, args.output)

    elif args.command == "phase":
        grid = speculators.phase_grid(args.ksd, args.ksp)
        _emit(grid, args.format, args.output)

    elif args.command == "fit-sd":
        fit = supply_demand.fit_supply_demand(
            _load(args.price, args.frequency, "price"),
            _load(args.consumption, args.frequency, "consumption"),
            _load(args.surplus, args.frequency, "surplus"))
        _emit(fit, "json", args.output)

    elif args.command == "fit-ethanol":
        report = ethanol.trend_comparison(
            _load(args.ethanol, args.frequency, "ethanol"),
            _load(args.food, args.frequency, "food"),
            exclude_b=args.exclude)
        _emit(report, "json", args.output)

    elif args.command == "fit-combined":
        food = _load(args.food, Frequency.MONTHLY, "food")
        markets = [_load(m, Frequency.MONTHLY) for m in args.market]
        if args.exclude_window is not None:
            windows = args.exclude_window
        else:
            windows = default_bubble_windows(food)
        trend = combined.fit_background_trend(food, windows)
        candidates = switch_candidates_for_year(food, args.switch_year)
        fit = combined.fit_combined(food, markets, trend, candidates)
        _emit(fit, "json", args.output)

    elif args.command == "correlate":
        rho = timeseries.pearson_correlation(
            _load(args.a, args.frequency), _load(args.b, args.frequency))
        payload = {"rho": rho}
        if args.output is None:
            json.dump(payload, sys.stdout, indent=2)
            sys.stdout.write("\n")
        else:
            Path(args.output).write_text(json.dumps(payload, indent=2) + "\n")

    elif args.command == "lagscan":
        scan = timeseries.lagged_cross_correlation(
            _load(args.a, args.frequency), _load(args.b, args.frequency),
            args.max_lag)
        _emit(scan, args.format, args.output)

    return EXIT_OK


def default_bubble_windows(food: timeseries.TimeSeries) -> list[Window]:
    """Index windows of the 2007-08 peak and the 2010-11 bubble, clipped to
    the series span."""
    windows = []
    span_end = food.start_ordinal + len(food)
    for begin, end in (((2007, 1), (2009, 1)), ((2010, 6), None)):
        b_ord = begin[0] * 12 + begin[1] - 1
        e_ord = span_end if end is None else end[0] * 12 + end[1] - 1
        b = max(b_ord, food.start_ordinal) - food.start_ordinal
        e = min(e_ord, span_end) - food.start_ordinal
        if e > b >= 0:
            windows.append(Window(b, e))
    return windows


def switch_candidates_for_year(food: timeseries.TimeSeries, year: int) -> list[int]:
    """Month indices of the given calendar year that lie inside the series."""
    candidates = []
    for month in range(1, 13):
        try:
            idx = food.index_of((year, month))
        except IndexError:
            continue
        if idx >= 1:
            candidates.append(idx)
    if not candidates:
        raise DataError(f"series does not cover any month of {year}")
    return candidates


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (DataError, DomainError) as exc:
        json.dump({"error": str(exc), "type": type(exc).__name__},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_DATA
    except FitError as exc:
        json.dump({"error": str(exc), "type": "FitError"}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_FIT
    except BubbledynError as exc:
        json.dump({"error": str(exc), "type": type(exc).__name__},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
