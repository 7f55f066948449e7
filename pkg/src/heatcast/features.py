"""Transitional characteristic, pseudo-dynamic lags and model input matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BASE_COLUMNS = ("t_out", "g_solar", "dayflag", "occupancy", "oplevel")
# model id -> number of lagged beta columns (None: no beta at all)
MODEL_LAGS = {1: None, 2: 0, 3: 1, 4: 2, 5: 3, 6: 4}


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionalConfig:
    beta0: float = 25.0
    delta_beta: float = 25.0

    def __post_init__(self):
        if not (self.beta0 > 0 and self.delta_beta > 0):
            raise FeatureError("beta0 and delta_beta must be positive")


@dataclass(frozen=True)
class DynamicsSpec:
    """First-order building response times, in minutes."""

    tau: float = 15.0
    t_settle: float = 45.0
    t_steady: float = 60.0

    def __post_init__(self):
        if self.tau <= 0:
            raise FeatureError("tau must be positive")
        if not 2 * self.tau <= self.t_settle <= 5 * self.tau:
            raise FeatureError(f"settling time {self.t_settle} outside [2tau, 5tau]")
        if not 3 * self.tau <= self.t_steady <= 6 * self.tau:
            raise FeatureError(f"steady-state time {self.t_steady} outside [3tau, 6tau]")
        if self.t_settle > self.t_steady:
            raise FeatureError("settling time exceeds steady-state time")


def transitional_series(oplevel, cfg: TransitionalConfig = TransitionalConfig(), day_index=None) -> np.ndarray:
    """Staircase beta series: starts at beta0 and climbs by 2*delta_beta*|jump|
    at every change of the operational level.

    With ``day_index`` the staircase restarts at beta0 on the first sample of
    each day, and the change across midnight is not counted.
    """
    op = np.asarray(oplevel, dtype=float)
    if op.size == 0:
        raise FeatureError("empty operational level series")
    inc = np.zeros_like(op)
    inc[1:] = 2.0 * cfg.delta_beta * np.abs(np.diff(op))
    if day_index is None:
        return cfg.beta0 + np.cumsum(inc)
    day = np.asarray(day_index)
    starts = np.ones(op.size, dtype=bool)
    starts[1:] = day[1:] != day[:-1]
    inc[starts] = 0.0
    total = np.cumsum(inc)
    # subtract the running total reached at each day's first sample
    anchor = np.maximum.accumulate(np.where(starts, np.arange(op.size), 0))
    return cfg.beta0 + total - total[anchor]


def pdl_bounds(d: DynamicsSpec, ts: int) -> tuple[int, int]:
    """Lag range in samples spanned by settling and steady-state times."""
    if ts <= 0:
        raise FeatureError("ts must be positive")
    for label, t in (("settling", d.t_settle), ("steady-state", d.t_steady)):
        if t % ts:
            raise FeatureError(f"ts={ts} does not divide the {label} time {t}")
    return int(d.t_settle // ts), int(d.t_steady // ts)


def pdl_band(tau: float, ts: int) -> tuple[float, float]:
    """Widest admissible lag band, tau/ts * [3, 6]."""
    return 3 * tau / ts, 6 * tau / ts


def column_names(model_id: int) -> tuple[str, ...]:
    if model_id not in MODEL_LAGS:
        raise FeatureError(f"model id must be in 1..6, got {model_id}")
    lags = MODEL_LAGS[model_id]
    if lags is None:
        return BASE_COLUMNS
    return BASE_COLUMNS + ("beta",) + tuple(f"beta_lag{k}" for k in range(1, lags + 1))


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    rows: np.ndarray
    target: np.ndarray
    timestamps: np.ndarray
    column_names: tuple[str, ...]
    model_id: int

    @property
    def l_x(self) -> int:
        return len(self.column_names)

    def __len__(self) -> int:
        return len(self.rows)

    def take(self, mask) -> "FeatureMatrix":
        return FeatureMatrix(self.rows[mask], self.target[mask], self.timestamps[mask], self.column_names, self.model_id)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(("timestamp",) + self.column_names + ("heat_kw",)) + "\n")
            for ts, row, y in zip(self.timestamps, self.rows, self.target):
                fh.write(",".join([str(ts)] + [repr(float(v)) for v in row] + [repr(float(y))]) + "\n")


def assemble(ds, sched_series, beta, model_id: int) -> FeatureMatrix:
    """Input matrix for one model variant.

    ``sched_series`` is the (occupancy, oplevel, dayflag) triple.  Models 3-6
    append beta lagged by 1..M samples and drop the first M rows.
    """
    names = column_names(model_id)
    occ, op, flag = (np.asarray(s, dtype=float) for s in sched_series)
    beta = np.asarray(beta, dtype=float)
    n = len(ds)
    if not (len(occ) == len(op) == len(flag) == len(beta) == n):
        raise FeatureError("schedule and beta series must align with the dataset")
    cols = [ds.t_out, ds.g_solar, flag, occ, op]
    lags = MODEL_LAGS[model_id]
    drop = 0
    if lags is not None:
        drop = lags
        if n <= drop:
            raise FeatureError(f"dataset of {n} samples too short for {lags} lags")
        cols.append(beta)
        for k in range(1, lags + 1):
            lagged = np.empty(n)
            lagged[k:] = beta[:-k]
            lagged[:k] = np.nan
            cols.append(lagged)
    x = np.column_stack(cols)[drop:]
    x.setflags(write=False)
    y = np.array(ds.p_heat[drop:])
    return FeatureMatrix(x, y, np.array(ds.timestamps[drop:]), names, model_id)
