"""Synthetic building with first-order, delayed heat-demand response.

The plant target follows the schedule and weather; the delivered demand
tracks the target delayed by ``delay`` minutes through a first-order lag with
time constant ``tau``.  The lag is discretized exactly for a piecewise-constant
target, so one time constant closes 63.2 % of a step.  ``scheme="euler"``
selects the forward-Euler gain ``ts / tau`` instead (needs ``ts <= tau``).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from heatcast.dataset import Dataset
from heatcast.schedules import ScheduleSet, covering_calendar, sample_schedules

DEFAULT_START = datetime(2013, 1, 14)


@dataclass(frozen=True)
class BuildingParams:
    tau: float = 15.0
    delay: float = 15.0
    ua: float = 50.0
    t_set: float = 20.0
    g_ap: float = 0.5
    g_occ: float = 100.0
    p_max: float = 1200.0
    noise_std: float = 36.0
    seed: int = 0
    scheme: str = "exact"

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.delay < 0:
            raise ValueError("delay must be non-negative")
        if self.ua <= 0 or self.p_max <= 0:
            raise ValueError("ua and p_max must be positive")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if self.scheme not in ("exact", "euler"):
            raise ValueError(f"unknown scheme {self.scheme!r}; use 'exact' or 'euler'")

    def step_gain(self, ts: int) -> float:
        """Fraction of the remaining gap closed per sample."""
        if self.scheme == "euler":
            if ts > self.tau:
                raise ValueError(f"euler scheme needs ts <= tau (ts={ts}, tau={self.tau})")
            return ts / self.tau
        return 1.0 - float(np.exp(-ts / self.tau))


@dataclass(frozen=True)
class WeatherModel:
    t_mean: float = 8.95
    t_amplitude: float = 3.0
    solar_peak: float = 438.0
    day_length: float = 9.0
    # std of the slow (multi-day) temperature anomaly
    weather_noise_std: float = 2.5

    def __post_init__(self):
        if self.solar_peak < 0 or not 0 < self.day_length < 24:
            raise ValueError("need solar_peak >= 0 and 0 < day_length < 24")
        if self.weather_noise_std < 0:
            raise ValueError("weather_noise_std must be non-negative")


def weather(wm: WeatherModel, hours: np.ndarray, day_idx: np.ndarray, ts: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Outside temperature and global solar radiation per sample."""
    n = len(hours)
    # AR(1) anomaly with a one-day correlation time
    phi = np.exp(-ts / 1440.0)
    anomaly = np.zeros(n)
    if wm.weather_noise_std > 0:
        shocks = rng.normal(0.0, wm.weather_noise_std * np.sqrt(1 - phi**2), n)
        anomaly[0] = rng.normal(0.0, wm.weather_noise_std)
        for i in range(1, n):
            anomaly[i] = phi * anomaly[i - 1] + shocks[i]
    # coldest around 03:00, warmest around 15:00
    t_out = wm.t_mean + wm.t_amplitude * np.sin(2 * np.pi * (hours - 9.0) / 24.0) + anomaly

    sunrise = 12.0 - wm.day_length / 2
    phase = (hours - sunrise) / wm.day_length
    daylight = (phase > 0) & (phase < 1)
    n_days = int(day_idx.max()) + 1 if n else 0
    clearness = rng.uniform(0.15, 1.0, n_days) if wm.weather_noise_std > 0 else np.ones(n_days)
    shape = np.where(daylight, np.sin(np.pi * np.clip(phase, 0, 1)), 0.0)
    flicker = 1.0 + (rng.normal(0.0, 0.1, n) if wm.weather_noise_std > 0 else 0.0)
    solar = np.clip(wm.solar_peak * clearness[day_idx] * shape * flicker, 0.0, None)
    solar[~daylight] = 0.0
    return t_out, solar


def target_demand(bp: BuildingParams, t_out, solar, occupancy, oplevel) -> np.ndarray:
    load = bp.ua * (bp.t_set - np.asarray(t_out)) - bp.g_ap * np.asarray(solar) - bp.g_occ * np.asarray(occupancy)
    return np.asarray(oplevel) * np.clip(load, 0.0, bp.p_max)


def respond(target, bp: BuildingParams, ts: int, rng=None, initial=None) -> np.ndarray:
    """Delayed first-order response of the delivered demand to ``target``."""
    target = np.asarray(target, dtype=float)
    if bp.delay % ts:
        raise ValueError(f"delay {bp.delay} is not a multiple of ts={ts}")
    lag = int(bp.delay // ts)
    a = bp.step_gain(ts)
    n = len(target)
    noise = rng.normal(0.0, bp.noise_std, n) if (rng is not None and bp.noise_std > 0) else np.zeros(n)
    d = np.empty(n)
    d[0] = target[0] if initial is None else initial
    for i in range(n - 1):
        drive = target[max(i - lag, 0)]
        d[i + 1] = min(max(d[i] + a * (drive - d[i]) + noise[i + 1], 0.0), bp.p_max)
    return d


def generate(
    days: int,
    schedules: ScheduleSet,
    bp: BuildingParams = BuildingParams(),
    wm: WeatherModel = WeatherModel(),
    ts: int = 15,
    start: datetime = DEFAULT_START,
    initial_demand: float | None = None,
) -> Dataset:
    """Simulate ``days`` whole days at ``ts``-minute cadence; fully determined by ``bp.seed``."""
    if days < 1:
        raise ValueError("days must be at least 1")
    if 1440 % ts:
        raise ValueError(f"ts={ts} does not divide a day")
    per_day = 1440 // ts
    n = days * per_day
    stamps = np.datetime64(start, "m") + np.arange(n) * np.timedelta64(ts, "m")
    rng = np.random.default_rng(bp.seed)
    skeleton = Dataset(stamps, np.zeros(n), np.zeros(n), np.zeros(n), ts)
    schedules = covering_calendar(schedules, [skeleton.dates[0], skeleton.dates[-1]])
    occ, op, _ = sample_schedules(schedules, skeleton)
    hours = skeleton.minute_of_day / 60.0
    day_idx = np.arange(n) // per_day
    t_out, solar = weather(wm, hours, day_idx, ts, rng)
    demand = respond(target_demand(bp, t_out, solar, occ, op), bp, ts, rng, initial_demand)
    return Dataset(stamps, t_out, solar, demand, ts)


def write_sidecar(path, bp: BuildingParams, wm: WeatherModel, schedules: ScheduleSet, ts: int, days: int, start=DEFAULT_START):
    """Ground-truth record written next to a generated CSV."""
    payload = {
        "generator": "heatcast.synth",
        "days": days,
        "ts": ts,
        "start": start.isoformat(),
        "building": asdict(bp),
        "weather": asdict(wm),
        "schedule": schedules.to_dict(),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
