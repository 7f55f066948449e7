"""Time-series ingestion, day-snapped partitioning and z-score normalization."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

CSV_HEADER = ("timestamp", "t_out_c", "solar_wm2", "heat_kw")
MINUTES_PER_DAY = 1440


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


@dataclass(frozen=True)
class Sample:
    timestamp: datetime
    t_out: float
    g_solar: float
    p_heat: float


def _readonly(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Evenly sampled weather and heat-demand series.

    Arrays are stored read-only; ``ts`` is the sampling interval in minutes.
    """

    timestamps: np.ndarray
    t_out: np.ndarray
    g_solar: np.ndarray
    p_heat: np.ndarray
    ts: int

    def __post_init__(self):
        object.__setattr__(self, "timestamps", _readonly(self.timestamps, "datetime64[m]"))
        for name in ("t_out", "g_solar", "p_heat"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        n = len(self.timestamps)
        if not (len(self.t_out) == len(self.g_solar) == len(self.p_heat) == n):
            raise DataError("all channels must have the same length")
        if int(self.ts) != self.ts or self.ts <= 0:
            raise DataError(f"sampling interval must be a positive integer, got {self.ts}")
        object.__setattr__(self, "ts", int(self.ts))
        if n > 1:
            steps = np.diff(self.timestamps).astype(int)
            bad = np.flatnonzero(steps != self.ts)
            if bad.size:
                i = bad[0]
                a, b = self.timestamps[i], self.timestamps[i + 1]
                if steps[i] <= 0:
                    raise DataError(f"timestamps not strictly increasing: {a} then {b}")
                raise DataError(f"cadence gap between {a} and {b} (expected {self.ts} min)")
        for name in ("t_out", "g_solar", "p_heat"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DataError(f"non-finite value in {name}")
        if np.any(self.g_solar < 0):
            raise DataError("solar radiation must be non-negative")
        if np.any(self.p_heat < 0):
            raise DataError("heat demand must be non-negative")

    @classmethod
    def from_samples(cls, samples: Sequence[Sample], ts: int) -> "Dataset":
        return cls(
            timestamps=[np.datetime64(s.timestamp, "m") for s in samples],
            t_out=[s.t_out for s in samples],
            g_solar=[s.g_solar for s in samples],
            p_heat=[s.p_heat for s in samples],
            ts=ts,
        )

    def __len__(self) -> int:
        return len(self.timestamps)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Dataset(
                self.timestamps[item], self.t_out[item], self.g_solar[item], self.p_heat[item], self.ts
            )
        return Sample(
            self.timestamps[item].astype(datetime),
            float(self.t_out[item]),
            float(self.g_solar[item]),
            float(self.p_heat[item]),
        )

    def samples(self) -> Iterator[Sample]:
        for i in range(len(self)):
            yield self[i]

    @property
    def dates(self) -> np.ndarray:
        return self.timestamps.astype("datetime64[D]")

    @property
    def minute_of_day(self) -> np.ndarray:
        return (self.timestamps - self.dates).astype(int)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for i in range(len(self)):
                w.writerow(
                    [
                        str(self.timestamps[i]),
                        repr(float(self.t_out[i])),
                        repr(float(self.g_solar[i])),
                        repr(float(self.p_heat[i])),
                    ]
                )


def load_csv(path, ts: int | None = None) -> Dataset:
    """Read a ``timestamp,t_out_c,solar_wm2,heat_kw`` file.

    The sampling interval is inferred from the first two rows unless given.
    Missing values are rejected, not imputed.
    """
    path = Path(path)
    stamps, t_out, solar, heat = [], [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise DataError(f"{path}: expected header {','.join(CSV_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"{path}: row {lineno}: expected 4 columns, got {len(row)}")
            try:
                stamp = datetime.fromisoformat(row[0].strip())
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise DataError(f"{path}: row {lineno}: {exc}") from None
            if stamp.tzinfo is not None:
                raise DataError(f"{path}: row {lineno}: timestamps must be naive local time")
            if not all(math.isfinite(v) for v in values):
                raise DataError(f"{path}: row {lineno}: missing or non-finite value")
            stamps.append(np.datetime64(stamp, "m"))
            t_out.append(values[0])
            solar.append(values[1])
            heat.append(values[2])
    if not stamps:
        raise DataError(f"{path}: no data rows")
    if ts is None:
        ts = int((stamps[1] - stamps[0]).astype(int)) if len(stamps) > 1 else 15
        if ts <= 0:
            raise DataError(f"{path}: timestamps not strictly increasing: {stamps[0]} then {stamps[1]}")
    return Dataset(np.array(stamps), t_out, solar, heat, ts)


@dataclass(frozen=True)
class SplitSpec:
    learn_fraction: float = 0.70
    validation_fraction: float = 0.15
    test_fraction: float = 0.15

    def __post_init__(self):
        fr = self.fractions
        if any(not 0 < f < 1 for f in fr):
            raise DataError(f"split fractions must lie in (0, 1): {fr}")
        if abs(sum(fr) - 1) > 1e-9:
            raise DataError(f"split fractions must sum to 1: {fr}")

    @property
    def fractions(self) -> tuple[float, float, float]:
        return (self.learn_fraction, self.validation_fraction, self.test_fraction)

    def day_counts(self, n_days: int) -> tuple[int, int, int]:
        """Largest-remainder apportionment of whole days; ties go to the earlier block."""
        quotas = [f * n_days for f in self.fractions]
        counts = [math.floor(q + 1e-9) for q in quotas]
        rest = n_days - sum(counts)
        order = sorted(range(3), key=lambda i: (-(quotas[i] - counts[i]), i))
        for i in order[:rest]:
            counts[i] += 1
        return tuple(counts)


def day_blocks(ds: Dataset, spec: SplitSpec) -> np.ndarray:
    """Per-sample block label: 0 learn, 1 validation, 2 test."""
    dates = ds.dates
    uniq, day_idx = np.unique(dates, return_inverse=True)
    if len(uniq) < 3:
        raise DataError(f"need at least 3 days to split, got {len(uniq)}")
    counts = spec.day_counts(len(uniq))
    if min(counts) == 0:
        raise DataError(f"{len(uniq)} days cannot form three non-empty blocks with {spec.fractions}")
    edges = np.cumsum(counts)
    return np.searchsorted(edges, day_idx, side="right")


def split(ds: Dataset, spec: SplitSpec = SplitSpec()) -> tuple[Dataset, Dataset, Dataset]:
    """Contiguous learn/validation/test blocks snapped to whole days."""
    labels = day_blocks(ds, spec)
    bounds = np.searchsorted(labels, [1, 2])
    return ds[: bounds[0]], ds[bounds[0] : bounds[1]], ds[bounds[1] :]


@dataclass(frozen=True, eq=False)
class NormStats:
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _readonly(np.atleast_1d(self.mean)))
        object.__setattr__(self, "std", _readonly(np.atleast_1d(self.std)))
        if np.any(self.std <= 0):
            raise DataError("normalization std must be positive")

    def apply(self, values) -> np.ndarray:
        return (np.asarray(values, dtype=float) - self._b(self.mean, values)) / self._b(self.std, values)

    def invert(self, values) -> np.ndarray:
        return np.asarray(values, dtype=float) * self._b(self.std, values) + self._b(self.mean, values)

    @staticmethod
    def _b(stat, values):
        return stat[0] if np.ndim(values) < 2 and stat.size == 1 else stat

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        return cls(np.array(d["mean"], dtype=float), np.array(d["std"], dtype=float))


def fit_norm(values, names: Sequence[str] | None = None) -> NormStats:
    """Per-column mean and sample (n-1) standard deviation."""
    x = np.asarray(values, dtype=float)
    cols = x.reshape(len(x), -1)
    if len(cols) < 2:
        raise DataError("need at least 2 values to normalize")
    mean = cols.mean(axis=0)
    std = cols.std(axis=0, ddof=1)
    flat = np.flatnonzero(~(std > 0))
    if flat.size:
        j = int(flat[0])
        label = names[j] if names is not None else f"channel {j}"
        raise DataError(f"cannot normalize constant {label}")
    return NormStats(mean, std)


def normalize(values, names: Sequence[str] | None = None) -> tuple[np.ndarray, NormStats]:
    stats = fit_norm(values, names)
    return stats.apply(values), stats


def denormalize(values, stats: NormStats) -> np.ndarray:
    return stats.invert(values)
