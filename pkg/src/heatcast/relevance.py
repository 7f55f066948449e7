"""Pearson screening of candidate inputs against heat demand."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

# |r| within this of 1 counts as a perfect correlation
PERFECT_TOL = 1e-12


class Band(str, Enum):
    PERFECT_POS = "PerfectPos"
    STRONG_POS = "StrongPos"
    MEDIUM_POS = "MediumPos"
    SMALL_POS = "SmallPos"
    NEGLIGIBLE = "Negligible"
    NEGATIVE = "Negative"
    PERFECT_NEG = "PerfectNeg"


def pearson(x, y, names=("x", "y")) -> float:
    """Sample covariance over the product of sample standard deviations."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-D series of equal length")
    n = len(x)
    if n < 2:
        raise ValueError("pearson needs at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    for label, ss in zip(names, (sxx, syy)):
        if ss == 0:
            raise ValueError(f"series {label!r} is constant")
    # the (n-1) factors of covariance and both deviations cancel
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def band(r: float) -> Band:
    """Positive bands are half-open on the left: (0.1, 0.25], (0.25, 0.6], (0.6, 1)."""
    if r >= 1 - PERFECT_TOL:
        return Band.PERFECT_POS
    if r <= -1 + PERFECT_TOL:
        return Band.PERFECT_NEG
    if r < 0:
        return Band.NEGATIVE
    if r > 0.6:
        return Band.STRONG_POS
    if r > 0.25:
        return Band.MEDIUM_POS
    if r > 0.1:
        return Band.SMALL_POS
    return Band.NEGLIGIBLE


@dataclass(frozen=True)
class RelevanceEntry:
    variable: str
    r: float
    band: Band


def relevance_report(ds, sched_series) -> list[RelevanceEntry]:
    """Correlation of t_out, g_solar, occupancy and oplevel with p_heat.

    ``sched_series`` is the (occupancy, oplevel, dayflag) triple.
    """
    occ, op, _ = sched_series
    candidates = {
        "t_out": ds.t_out,
        "g_solar": ds.g_solar,
        "occupancy": occ,
        "oplevel": op,
    }
    out = []
    for name, series in candidates.items():
        r = pearson(series, ds.p_heat, names=(name, "p_heat"))
        out.append(RelevanceEntry(name, r, band(r)))
    return out
