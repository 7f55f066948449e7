"""Day-type calendar, piecewise-constant daily profiles and transition shifting.

Profiles are closed-open step functions over minutes since midnight: a
breakpoint's level takes effect at its own minute and holds until the next one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MINUTES_PER_DAY = 1440
WORK_FLAG = 10.0
OFF_FLAG = 5.0

PROFILE_NAMES = ("occupancy_working", "occupancy_off", "oplevel_working", "oplevel_off")

# factor fN -> (profile, breakpoint index); index 0 is the midnight anchor
FACTOR_BINDING: tuple[tuple[str, int], ...] = (
    ("occupancy_working", 1),
    ("occupancy_working", 2),
    ("occupancy_working", 3),
    ("occupancy_working", 4),
    ("oplevel_working", 1),
    ("oplevel_working", 2),
    ("oplevel_working", 3),
    ("oplevel_working", 4),
    ("oplevel_off", 1),
    ("oplevel_off", 2),
)
N_FACTORS = len(FACTOR_BINDING)


class ScheduleError(ValueError):
    pass


class DayType(Enum):
    WORKING = "working"
    OFF = "off"


@dataclass(frozen=True)
class StepProfile:
    breakpoints: tuple[tuple[int, float], ...]

    def __post_init__(self):
        bps = tuple((int(t), float(v)) for t, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if not bps or bps[0][0] != 0:
            raise ScheduleError("a profile must start with a breakpoint at minute 0")
        times = [t for t, _ in bps]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScheduleError(f"breakpoint times must be strictly increasing: {times}")
        if times[-1] >= MINUTES_PER_DAY:
            raise ScheduleError(f"breakpoint time {times[-1]} is not within the day")
        if any(v < 0 for _, v in bps):
            raise ScheduleError("profile levels must be non-negative")

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.breakpoints])

    @property
    def levels(self) -> np.ndarray:
        return np.array([v for _, v in self.breakpoints])

    def values(self, minutes) -> np.ndarray:
        idx = np.searchsorted(self.times, np.asarray(minutes), side="right") - 1
        return self.levels[idx]

    def check_cadence(self, ts: int, label: str = "profile") -> None:
        off = [t for t, _ in self.breakpoints if t % ts]
        if off:
            raise ScheduleError(f"{label}: breakpoint at minute {off[0]} is not a multiple of ts={ts}")

    def to_list(self) -> list[list]:
        return [[t, v] for t, v in self.breakpoints]


def profile_value(p: StepProfile, minute_of_day: int) -> float:
    """Level of the last breakpoint at or before ``minute_of_day``."""
    if not 0 <= minute_of_day < MINUTES_PER_DAY:
        raise ScheduleError(f"minute of day out of range: {minute_of_day}")
    return float(p.values(minute_of_day))


@dataclass(frozen=True)
class Calendar:
    """Maps dates to day types: weekends off unless overridden.

    ``start``/``end`` bound the calendar (inclusive); ``None`` leaves a side open.
    """

    start: date | None = None
    end: date | None = None
    off_dates: frozenset = field(default_factory=frozenset)
    working_dates: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "off_dates", frozenset(_as_date(d) for d in self.off_dates))
        object.__setattr__(self, "working_dates", frozenset(_as_date(d) for d in self.working_dates))
        if self.start is not None:
            object.__setattr__(self, "start", _as_date(self.start))
        if self.end is not None:
            object.__setattr__(self, "end", _as_date(self.end))
        clash = self.off_dates & self.working_dates
        if clash:
            raise ScheduleError(f"dates listed as both off and working: {sorted(clash)}")

    def __contains__(self, d) -> bool:
        d = _as_date(d)
        return (self.start is None or d >= self.start) and (self.end is None or d <= self.end)

    def day_type(self, d) -> DayType:
        d = _as_date(d)
        if d not in self:
            raise ScheduleError(f"date {d} outside calendar range {self.start}..{self.end}")
        if d in self.off_dates:
            return DayType.OFF
        if d in self.working_dates:
            return DayType.WORKING
        return DayType.OFF if d.weekday() >= 5 else DayType.WORKING

    def to_dict(self) -> dict:
        return {
            "start": self.start.isoformat() if self.start else None,
            "end": self.end.isoformat() if self.end else None,
            "off_dates": sorted(d.isoformat() for d in self.off_dates),
            "working_dates": sorted(d.isoformat() for d in self.working_dates),
        }

    @classmethod
    def from_dict(cls, d: dict | None) -> "Calendar":
        d = d or {}
        return cls(
            start=d.get("start"),
            end=d.get("end"),
            off_dates=frozenset(d.get("off_dates", ())),
            working_dates=frozenset(d.get("working_dates", ())),
        )


def _as_date(d) -> date:
    if isinstance(d, np.datetime64):
        return d.astype("datetime64[D]").astype(date)
    if isinstance(d, str):
        return date.fromisoformat(d)
    if hasattr(d, "date") and callable(d.date):
        return d.date()
    return d


def day_flag(d, calendar: Calendar) -> float:
    """10 for a working day, 5 for an off day."""
    return WORK_FLAG if calendar.day_type(d) is DayType.WORKING else OFF_FLAG


@dataclass(frozen=True)
class ScheduleSet:
    occupancy_working: StepProfile
    occupancy_off: StepProfile
    oplevel_working: StepProfile
    oplevel_off: StepProfile
    calendar: Calendar = field(default_factory=Calendar)

    def __post_init__(self):
        if len(self.occupancy_off.breakpoints) != 1:
            raise ScheduleError("occupancy_off must be constant (no transitions on off days)")

    def profile(self, name: str) -> StepProfile:
        return getattr(self, name)

    def check_cadence(self, ts: int) -> None:
        for name in PROFILE_NAMES:
            self.profile(name).check_cadence(ts, name)

    def to_dict(self) -> dict:
        out = {"calendar": self.calendar.to_dict()}
        out.update({name: self.profile(name).to_list() for name in PROFILE_NAMES})
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ScheduleSet":
        missing = [n for n in PROFILE_NAMES if n not in d]
        if missing:
            raise ScheduleError(f"schedule is missing profiles: {missing}")
        return cls(
            **{n: StepProfile(tuple(map(tuple, d[n]))) for n in PROFILE_NAMES},
            calendar=Calendar.from_dict(d.get("calendar")),
        )


def load_schedule(path) -> ScheduleSet:
    try:
        return ScheduleSet.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"{path}: invalid JSON: {exc}") from None


def save_schedule(s: ScheduleSet, path) -> None:
    Path(path).write_text(json.dumps(s.to_dict(), indent=2) + "\n", encoding="utf-8")


def default_schedule() -> ScheduleSet:
    """Nominal working/off-day profiles with the nominal transition times."""
    text = resources.files("heatcast.data").joinpath("default_schedule.json").read_text(encoding="utf-8")
    return ScheduleSet.from_dict(json.loads(text))


@dataclass(frozen=True)
class FactorAssignment:
    """Signed minute offsets for the ten transitions t1..t10."""

    shifts: tuple[int, ...] = (0,) * N_FACTORS

    def __post_init__(self):
        object.__setattr__(self, "shifts", tuple(int(s) for s in self.shifts))
        if len(self.shifts) != N_FACTORS:
            raise ScheduleError(f"expected {N_FACTORS} shifts, got {len(self.shifts)}")

    @classmethod
    def from_levels(cls, levels: Sequence[int], ts: int, base: int = 1) -> "FactorAssignment":
        """Levels ``base, base+1, base+2`` map to ``-ts, 0, +ts``."""
        shifts = []
        for j, lv in enumerate(levels):
            code = int(lv) - base
            if code not in (0, 1, 2):
                raise ScheduleError(f"factor f{j + 1}: level {lv} outside {base}..{base + 2}")
            shifts.append((code - 1) * ts)
        return cls(tuple(shifts))

    def __neg__(self) -> "FactorAssignment":
        return FactorAssignment(tuple(-s for s in self.shifts))


def apply_shifts(s: ScheduleSet, a: FactorAssignment) -> ScheduleSet:
    """Return a copy of ``s`` with each bound transition moved by its offset."""
    moved: dict[str, list[list]] = {}
    owners: dict[str, dict[int, int]] = {}
    for j, (name, idx) in enumerate(FACTOR_BINDING):
        bps = moved.setdefault(name, [list(bp) for bp in s.profile(name).breakpoints])
        if idx >= len(bps):
            raise ScheduleError(f"factor f{j + 1}: {name} has no transition #{idx}")
        bps[idx][0] += a.shifts[j]
        owners.setdefault(name, {})[idx] = j
    changes = {}
    for name, bps in moved.items():
        times = [t for t, _ in bps]
        for idx, j in owners[name].items():
            if a.shifts[j] == 0:
                # untouched breakpoints were valid, so only a moved one can collide
                continue
            t = times[idx]
            lo = times[idx - 1] if idx > 0 else -1
            hi = times[idx + 1] if idx + 1 < len(times) else MINUTES_PER_DAY
            if not (lo < t < hi) or t <= 0:
                raise ScheduleError(
                    f"factor f{j + 1}: shifting {name} transition to minute {t} "
                    "collides with a neighboring breakpoint"
                )
        changes[name] = StepProfile(tuple(map(tuple, bps)))
    return replace(s, **changes)


def sample_schedules(s: ScheduleSet, ds) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-sample (occupancy, oplevel, dayflag) aligned with ``ds``."""
    dates = ds.dates
    minutes = ds.minute_of_day
    uniq, inv = np.unique(dates, return_inverse=True)
    working = np.array([s.calendar.day_type(d) is DayType.WORKING for d in uniq], dtype=bool)[inv]
    occ = np.where(working, s.occupancy_working.values(minutes), s.occupancy_off.values(minutes))
    op = np.where(working, s.oplevel_working.values(minutes), s.oplevel_off.values(minutes))
    flag = np.where(working, WORK_FLAG, OFF_FLAG)
    return occ, op, flag


def covering_calendar(s: ScheduleSet, dates: Iterable) -> ScheduleSet:
    """Fill an open-ended calendar's bounds from the given dates."""
    dates = [_as_date(d) for d in dates]
    cal = s.calendar
    return replace(s, calendar=replace(cal, start=cal.start or min(dates), end=cal.end or max(dates)))
