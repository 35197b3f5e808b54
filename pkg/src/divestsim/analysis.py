"""Run classification and ensemble statistics.

Maps completed trajectories onto the six qualitative outcome regimes,
aggregates ensembles into mean/quartile summaries with outcome histograms,
and drives 1D/2D parameter sweeps with reproducible per-cell seeding.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from itertools import product
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import config as config_mod
from . import engine

if TYPE_CHECKING:
    from .engine import RunRecord, SimConfig

#: seed stride between sweep cells; run r of cell c uses seed + c*stride + r
CELL_SEED_STRIDE = 1_000_003

#: bimodality flag: a cell is bimodal when at least this fraction of runs
#: ends below budget+margin AND at least this fraction ends above
#: ceiling-margin
BIMODAL_MIN_FRAC = 0.08
BIMODAL_CCE_MARGIN = 50.0


class BehaviorType(Enum):
    """The six outcome regimes, from failed divestment at full extraction (A)
    down to emissions kept below the carbon budget (F)."""

    A = "A"  # no lasting price collapse, extraction runs to the horizon
    B = "B"  # bubble bursts but the price recovers; budget exceeded anyway
    C = "C"  # collapse and delisting only after the budget is exceeded, policy late or absent
    D = "D"  # policy arrives on a negative budget and forces the delisting
    E = "E"  # collapse before budget exhaustion; firm dies the month the budget runs out
    F = "F"  # emissions stay below the budget


@dataclass(frozen=True)
class EnsembleSummary:
    fingerprint: str
    n_runs: int
    mean_cce: float
    q1: float
    median: float
    q3: float
    type_counts: dict[str, int]
    crash_fraction: float
    bimodal: bool


@dataclass(frozen=True)
class SweepCell:
    coords: dict[str, float]
    summary: EnsembleSummary


@dataclass(frozen=True)
class SweepResult:
    axes: list[tuple[str, list[float]]]
    cells: list[SweepCell]  # row-major over the axis product


def detect_crash(
    prices: Sequence[float], window: int = 12, drop_frac: float = 0.5
) -> int | None:
    """First index where the price sits more than drop_frac below its
    maximum over the trailing ``window`` entries; None if that never happens."""
    for t in range(1, len(prices)):
        lo = max(0, t - window)
        if prices[t] < (1.0 - drop_frac) * max(prices[lo:t]):
            return t
    return None


def fingerprint(config: SimConfig) -> str:
    """Content hash of a config, stable across processes and sessions."""
    payload = json.dumps(asdict(config), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _full_price_series(record: RunRecord) -> list[float]:
    return [record.initial_quote] + record.price


def price_recovered(record: RunRecord, config: SimConfig) -> bool:
    """True when the price climbed back above recovery_frac of its pre-crash
    maximum at some month after the crash."""
    crash = record.first_crash_month
    if crash is None:
        return False
    series = _full_price_series(record)
    idx = crash + 1
    ref = max(series[max(0, idx - config.crash_window):idx])
    threshold = config.recovery_frac * ref
    return any(p >= threshold for p in series[idx + 1:])


def classify(record: RunRecord, config: SimConfig) -> BehaviorType:
    """Map a completed run to its outcome regime.

    The checks run in the fixed order F, E, D, C, B with A as the fallback,
    which makes the six categories exclusive and exhaustive.
    """
    b0 = config.firm.b0
    final = record.final_cce
    crash = record.first_crash_month
    exceeded = record.budget_exceeded_month
    delisted = record.delisting_month
    policy = record.policy_month

    if final < b0:
        return BehaviorType.F
    if (
        final <= b0 + config.firm.q
        and crash is not None
        and exceeded is not None
        and crash < exceeded
    ):
        return BehaviorType.E
    if (
        policy is not None
        and record.budget[policy] <= 0.0
        and delisted is not None
        and delisted >= policy
    ):
        return BehaviorType.D
    if (
        delisted is not None
        and exceeded is not None
        and delisted > exceeded
        and (policy is None or policy > delisted)
    ):
        return BehaviorType.C
    if crash is not None and final > b0 and price_recovered(record, config):
        return BehaviorType.B
    return BehaviorType.A


def is_bimodal(
    finals: Sequence[float],
    config: SimConfig,
    margin: float = BIMODAL_CCE_MARGIN,
    min_frac: float = BIMODAL_MIN_FRAC,
) -> bool:
    """Tipping-region flag: the run-level CCE distribution has substantial
    mass both near the budget and near the full-extraction ceiling."""
    if not finals:
        return False
    low_cut = config.firm.b0 + margin
    high_cut = config.firm.q * config.horizon - margin
    n = len(finals)
    n_low = sum(1 for v in finals if v < low_cut)
    n_high = sum(1 for v in finals if v > high_cut)
    return n_low >= min_frac * n and n_high >= min_frac * n


def summarize(records: Sequence[RunRecord], config: SimConfig) -> EnsembleSummary:
    """Aggregate an ensemble: exact mean, linearly interpolated quartiles,
    outcome histogram, and crash fraction of final emissions."""
    if not records:
        raise ValueError("summarize needs at least one run")
    finals = [rec.final_cce for rec in records]
    q1, median, q3 = np.percentile(finals, [25.0, 50.0, 75.0])
    counts = {t.value: 0 for t in BehaviorType}
    for rec in records:
        counts[classify(rec, config).value] += 1
    n_crashed = sum(1 for rec in records if rec.first_crash_month is not None)
    return EnsembleSummary(
        fingerprint=fingerprint(config),
        n_runs=len(records),
        mean_cce=math.fsum(finals) / len(finals),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        type_counts=counts,
        crash_fraction=n_crashed / len(records),
        bimodal=is_bimodal(finals, config),
    )


def sweep(
    axes: Sequence[tuple[str, Sequence[float]]],
    config: SimConfig,
    n_runs: int,
    threads: int = 1,
) -> SweepResult:
    """Run an ensemble per grid cell over one or two config axes.

    Cell c (row-major) uses seeds config.seed + c*CELL_SEED_STRIDE + r, so
    every cell is reproducible independently of execution order and worker
    count.
    """
    if not 1 <= len(axes) <= 2:
        raise ValueError(f"sweep supports 1 or 2 axes, got {len(axes)}")
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    for name, values in axes:
        config_mod.get_field(config, name)  # rejects unknown field names
        if not values:
            raise ValueError(f"axis {name!r} has no values")

    cell_coords = [
        dict(zip((name for name, _ in axes), combo))
        for combo in product(*(values for _, values in axes))
    ]
    cell_configs = []
    for coords in cell_coords:
        cfg = config
        for name, value in coords.items():
            cfg = config_mod.with_field(cfg, name, value)
        cell_configs.append(cfg)

    jobs = []
    for c, cfg in enumerate(cell_configs):
        base = config.seed + c * CELL_SEED_STRIDE
        jobs.extend((cfg, base + r) for r in range(n_runs))
    records = engine.run_jobs(jobs, threads=threads)

    cells = []
    for c, (coords, cfg) in enumerate(zip(cell_coords, cell_configs)):
        chunk = records[c * n_runs:(c + 1) * n_runs]
        cells.append(SweepCell(coords=coords, summary=summarize(chunk, cfg)))
    return SweepResult(axes=[(n, list(v)) for n, v in axes], cells=cells)
