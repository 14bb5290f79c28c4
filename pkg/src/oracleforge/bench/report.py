"""Render benchmark CSVs as summary tables or box-plot JSON."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .harness import COLUMNS, InvariantViolation, Measurement, summary_table_rows
from .stats import SummaryStats, boxplot, format_table, summarize

FORMATS = ("table", "boxplot")
NUMERIC = ("dt_seconds", "gas_used", "cost_eur")


class ReportError(ValueError):
    pass


def _float(text: str) -> float | None:
    return None if text == "" else float(text)


def _int(text: str) -> int | None:
    return None if text == "" else int(text)


def read_measurements(path: str | Path) -> list[Measurement]:
    """Parse a benchmark CSV; errors name the offending line."""
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise ReportError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ReportError(f"{path}: empty file")
        if tuple(header) != COLUMNS:
            raise ReportError(f"{path}:1: expected header {','.join(COLUMNS)}")
        measurements = []
        for row in reader:
            line = reader.line_num
            if len(row) != len(COLUMNS):
                raise ReportError(f"{path}:{line}: expected {len(COLUMNS)} fields, got {len(row)}")
            cells = dict(zip(COLUMNS, row))
            try:
                measurements.append(Measurement(
                    pattern=cells["pattern"],
                    kind=cells["kind"],
                    t1=_float(cells["t1"]),
                    t2=_float(cells["t2"]),
                    t3=_float(cells["t3"]),
                    t4=_float(cells["t4"]),
                    dt=float(cells["dt_seconds"]),
                    gas_used=_int(cells["gas_used"]),
                    gas_price_wei=_int(cells["gas_price_wei"]),
                    cost_eur=_float(cells["cost_eur"]),
                ))
            except (ValueError, InvariantViolation) as exc:
                raise ReportError(f"{path}:{line}: {exc}") from exc
    if not measurements:
        raise ReportError(f"{path}: no measurements")
    return measurements


def _by_pattern(measurements: list[Measurement]) -> dict[str, list[Measurement]]:
    groups: dict[str, list[Measurement]] = {}
    for m in measurements:
        groups.setdefault(m.pattern.value, []).append(m)
    return groups


def _column(group: list[Measurement], column: str) -> list[float]:
    attr = "dt" if column == "dt_seconds" else column
    return [getattr(m, attr) for m in group if getattr(m, attr) is not None]


def column_stats(group: list[Measurement]) -> dict[str, SummaryStats | None]:
    out = {}
    for column in NUMERIC:
        values = _column(group, column)
        out[column] = summarize(values) if values else None
    return out


def render_table(measurements: list[Measurement]) -> str:
    rows = []
    for pattern, group in _by_pattern(measurements).items():
        rows.extend(summary_table_rows(pattern, column_stats(group)))
    return format_table(rows)


def render_boxplot(measurements: list[Measurement]) -> str:
    out = {}
    for pattern, group in _by_pattern(measurements).items():
        out[pattern] = {c: boxplot(v).to_json() for c in NUMERIC if (v := _column(group, c))}
    return json.dumps(out, indent=2, sort_keys=True)


def render(path: str | Path, fmt: str = "table") -> str:
    if fmt not in FORMATS:
        raise ReportError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    measurements = read_measurements(path)
    return render_table(measurements) if fmt == "table" else render_boxplot(measurements)
