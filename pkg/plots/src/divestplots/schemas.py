"""Readers for the simulator's CSV schemas, strict about drift."""

from __future__ import annotations

import csv
from pathlib import Path

RUN_COLUMNS = ["month", "price", "fci", "cce", "reserve", "budget", "policy", "held_shares"]
SWEEP_STAT_COLUMNS = [
    "mean_cce",
    "q1",
    "median",
    "q3",
    "n_runs",
    "crash_fraction",
    "type_A",
    "type_B",
    "type_C",
    "type_D",
    "type_E",
    "type_F",
    "bimodal",
]


class SchemaError(ValueError):
    """Input file does not match the expected simulator schema."""


def _column_diff(expected: list[str], got: list[str]) -> str:
    missing = [c for c in expected if c not in got]
    extra = [c for c in got if c not in expected]
    parts = []
    if missing:
        parts.append(f"missing columns: {missing}")
    if extra:
        parts.append(f"unexpected columns: {extra}")
    if not parts:
        parts.append(f"column order differs: expected {expected}, got {got}")
    return "; ".join(parts)


def read_run_csv(path: str | Path) -> dict[str, list[float]]:
    """Load a single-run trajectory CSV into column lists."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        if header != RUN_COLUMNS:
            raise SchemaError(f"{path}: {_column_diff(RUN_COLUMNS, header)}")
        columns: dict[str, list[float]] = {name: [] for name in RUN_COLUMNS}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RUN_COLUMNS):
                raise SchemaError(f"{path}:{lineno}: expected {len(RUN_COLUMNS)} fields")
            for name, value in zip(RUN_COLUMNS, row):
                try:
                    columns[name].append(float(value))
                except ValueError:
                    raise SchemaError(f"{path}:{lineno}: non-numeric value {value!r}") from None
    if not columns["month"]:
        raise SchemaError(f"{path}: no data rows")
    return columns


def read_sweep_csv(path: str | Path, n_axes: int) -> tuple[list[str], list[dict[str, float]]]:
    """Load a sweep grid CSV; returns axis names and one dict per cell."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        if len(header) != n_axes + len(SWEEP_STAT_COLUMNS) or header[n_axes:] != SWEEP_STAT_COLUMNS:
            expected = [f"<axis{i+1}>" for i in range(n_axes)] + SWEEP_STAT_COLUMNS
            raise SchemaError(f"{path}: {_column_diff(expected, header)}")
        axes = header[:n_axes]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(f"{path}:{lineno}: expected {len(header)} fields")
            try:
                rows.append({name: float(value) for name, value in zip(header, row)})
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: non-numeric value") from None
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return axes, rows
