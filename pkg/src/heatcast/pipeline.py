"""Dataset + schedule -> normalized learn/validation/test matrices for one model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from heatcast.dataset import Dataset, NormStats, SplitSpec, day_blocks, fit_norm
from heatcast.features import FeatureMatrix, TransitionalConfig, assemble, transitional_series
from heatcast.schedules import ScheduleSet, covering_calendar, sample_schedules

BLOCKS = ("learn", "validation", "test")


@dataclass(frozen=True, eq=False)
class Prepared:
    """Raw feature blocks plus the learning-block normalization."""

    model_id: int
    blocks: dict  # block name -> FeatureMatrix (raw units)
    input_stats: NormStats
    target_stats: NormStats

    @property
    def column_names(self) -> tuple[str, ...]:
        return self.blocks["learn"].column_names

    @property
    def l_x(self) -> int:
        return len(self.column_names)

    @property
    def m_learn(self) -> int:
        return len(self.blocks["learn"])

    def X(self, block: str) -> np.ndarray:
        return self.input_stats.apply(self.blocks[block].rows)

    def y(self, block: str) -> np.ndarray:
        return self.target_stats.apply(self.blocks[block].target)

    def y_raw(self, block: str) -> np.ndarray:
        return self.blocks[block].target


def schedule_features(ds: Dataset, schedule: ScheduleSet, tcfg: TransitionalConfig = TransitionalConfig()):
    """(occupancy, oplevel, dayflag) and the per-day beta staircase."""
    schedule = covering_calendar(schedule, [ds.dates[0], ds.dates[-1]])
    schedule.check_cadence(ds.ts)
    occ, op, flag = sample_schedules(schedule, ds)
    _, day_idx = np.unique(ds.dates, return_inverse=True)
    beta = transitional_series(op, tcfg, day_index=day_idx)
    return (occ, op, flag), beta


def full_matrix(ds: Dataset, schedule: ScheduleSet, model_id: int, tcfg=TransitionalConfig()) -> FeatureMatrix:
    series, beta = schedule_features(ds, schedule, tcfg)
    return assemble(ds, series, beta, model_id)


def prepare(
    ds: Dataset,
    schedule: ScheduleSet,
    model_id: int,
    split_spec: SplitSpec = SplitSpec(),
    tcfg: TransitionalConfig = TransitionalConfig(),
) -> Prepared:
    """Assemble on the whole series, then cut rows into day blocks.

    Lag warm-up rows are lost from the start of the learning block only.
    """
    fm = full_matrix(ds, schedule, model_id, tcfg)
    labels = day_blocks(ds, split_spec)[len(ds) - len(fm) :]
    blocks = {name: fm.take(labels == i) for i, name in enumerate(BLOCKS)}
    learn = blocks["learn"]
    input_stats = fit_norm(learn.rows, learn.column_names)
    target_stats = fit_norm(learn.target, ["heat_kw"])
    return Prepared(model_id, blocks, input_stats, target_stats)
