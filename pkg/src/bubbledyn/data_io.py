"""CSV/JSON ingestion and emission for series, grids, and fit reports.

All data arrives as local files; monthly dates are ISO "YYYY-MM" and annual
dates are "YYYY" (or "YYYY-01").  Series must be gap-free at their declared
frequency; nothing is ever resampled implicitly.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Union

from .errors import DataError, DomainError
from .speculators import PhaseGrid
from .timeseries import Frequency, LagScan, TimeSeries

_MONTHLY_RE = re.compile(r"^(\d{4})-(\d{2})$")
_ANNUAL_RE = re.compile(r"^(\d{4})(?:-01)?$")


class Transform(Enum):
    NONE = "none"
    INVERSE = "inverse"


@dataclass(frozen=True)
class SeriesSpec:
    path: Union[str, Path]
    frequency: Frequency
    date_column: str = "date"
    value_column: str = "value"
    label: str = ""
    transform: Transform = Transform.NONE


def _parse_date(raw: str, frequency: Frequency, row: int) -> tuple[int, int]:
    raw = raw.strip()
    if frequency is Frequency.MONTHLY:
        m = _MONTHLY_RE.match(raw)
        if not m:
            raise DataError(f"row {row}: bad monthly date {raw!r} (want YYYY-MM)")
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise DataError(f"row {row}: month out of range in {raw!r}")
        return year, month
    m = _ANNUAL_RE.match(raw)
    if not m:
        raise DataError(f"row {row}: bad annual date {raw!r} (want YYYY)")
    return int(m.group(1)), 1


def _ordinal(date: tuple[int, int], frequency: Frequency) -> int:
    year, month = date
    return year * 12 + month - 1 if frequency is Frequency.MONTHLY else year


def load_series(spec: SeriesSpec) -> TimeSeries:
    """Parse a CSV file into a gap-free TimeSeries per its spec."""
    path = Path(spec.path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    dates = []
    values = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or spec.date_column not in reader.fieldnames \
                or spec.value_column not in reader.fieldnames:
            raise DataError(
                f"{path}: missing column(s) {spec.date_column!r}/{spec.value_column!r}")
        for row_no, row in enumerate(reader, start=2):
            date = _parse_date(row[spec.date_column], spec.frequency, row_no)
            try:
                value = float(row[spec.value_column])
            except (TypeError, ValueError):
                raise DataError(
                    f"{path} row {row_no}: non-numeric value "
                    f"{row[spec.value_column]!r}") from None
            if dates:
                gap = _ordinal(date, spec.frequency) - _ordinal(dates[-1], spec.frequency)
                if gap == 0:
                    raise DataError(f"{path} row {row_no}: duplicate date")
                if gap < 0:
                    raise DataError(f"{path} row {row_no}: dates not increasing")
                if gap > 1:
                    raise DataError(f"{path} row {row_no}: gap before this date")
            dates.append(date)
            values.append(value)
    if not values:
        raise DataError(f"{path}: no data rows")
    if spec.transform is Transform.INVERSE:
        if any(v <= 0 for v in values):
            raise DomainError(f"{path}: inverse transform requires positive values")
        values = [1.0 / v for v in values]
    return TimeSeries(dates[0], spec.frequency, tuple(values), spec.label)


def derive_surplus(production: TimeSeries, consumption: TimeSeries) -> TimeSeries:
    """Production minus consumption, aligned by calendar year."""
    from .timeseries import align
    pv, cv, start = align(production, consumption)
    return TimeSeries(start, production.frequency,
                      tuple(p - c for p, c in zip(pv, cv)), "surplus")


def _format_date(date: tuple[int, int], frequency: Frequency) -> str:
    year, month = date
    if frequency is Frequency.MONTHLY:
        return f"{year:04d}-{month:02d}"
    return f"{year:04d}"


def _series_rows(series: TimeSeries):
    for i, v in enumerate(series.values):
        yield _format_date(series.date_at(i), series.frequency), repr(v)


def _grid_rows(grid: PhaseGrid):
    for node in grid.nodes:
        yield (repr(node.k_sd), repr(node.k_sp), repr(node.discriminant),
               node.label.value, "" if node.period is None else repr(node.period))


def _to_jsonable(obj):
    if isinstance(obj, TimeSeries):
        return {
            "start": _format_date(obj.start, obj.frequency),
            "frequency": obj.frequency.value,
            "label": obj.label,
            "values": list(obj.values),
        }
    if isinstance(obj, PhaseGrid):
        return {
            "k_sd_axis": list(obj.k_sd_axis),
            "k_sp_axis": list(obj.k_sp_axis),
            "nodes": [{"k_sd": n.k_sd, "k_sp": n.k_sp,
                       "delta": n.discriminant, "label": n.label.value,
                       "period": n.period, "convergent": n.convergent}
                      for n in obj.nodes],
        }
    if isinstance(obj, LagScan):
        return {"entries": [{"lag": lag, "rho": rho} for lag, rho in obj.entries],
                "omitted": list(obj.omitted)}
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write(obj, fmt: str, fh) -> None:
    if fmt == "json":
        json.dump(_to_jsonable(obj), fh, indent=2)
        fh.write("\n")
    elif fmt == "csv":
        writer = csv.writer(fh)
        if isinstance(obj, TimeSeries):
            writer.writerow(["date", "value"])
            writer.writerows(_series_rows(obj))
        elif isinstance(obj, PhaseGrid):
            writer.writerow(["k_sd", "k_sp", "delta", "label", "period"])
            writer.writerows(_grid_rows(obj))
        elif isinstance(obj, LagScan):
            writer.writerow(["lag", "rho"])
            writer.writerows((lag, repr(rho)) for lag, rho in obj.entries)
        else:
            raise TypeError(f"no CSV layout for {type(obj).__name__}; use json")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def emit(obj, fmt: str, destination) -> None:
    """Write a series, phase grid, lag scan, or report to CSV or JSON.

    ``destination`` may be a path or an open text stream.
    """
    if hasattr(destination, "write"):
        _write(obj, fmt, destination)
        return
    path = Path(destination)
    try:
        with path.open("w", newline="") as fh:
            _write(obj, fmt, fh)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
