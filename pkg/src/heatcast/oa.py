"""Orthogonal-array loading, strength verification and schedule robust design."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from heatcast.dataset import Dataset, SplitSpec
from heatcast.features import TransitionalConfig
from heatcast.mlp import TrainConfig
from heatcast.pipeline import prepare
from heatcast.schedules import N_FACTORS, FactorAssignment, ScheduleError, ScheduleSet, apply_shifts
from heatcast.selection import run_one

BUNDLED = {
    "oa_729_10_3_5": "oa_729_10_3_5.txt",
    "oa_81_10_3_2": "oa_81_10_3_2.txt",
}


class OAError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OrthogonalArray:
    """N x k matrix of levels ``0..s-1`` with declared strength ``t``."""

    rows: np.ndarray
    n_levels: int
    strength: int

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.int64, ndmin=2)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if self.n_levels < 2:
            raise OAError("an array needs at least 2 levels")
        bad = np.argwhere((rows < 0) | (rows >= self.n_levels))
        if bad.size:
            i, j = bad[0]
            raise OAError(f"row {i + 1}, column {j + 1}: level {rows[i, j]} outside 0..{self.n_levels - 1}")
        if not 0 <= self.strength <= rows.shape[1]:
            raise OAError(f"strength {self.strength} impossible with {rows.shape[1]} factors")

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_factors(self) -> int:
        return self.rows.shape[1]

    @property
    def index(self) -> int:
        """lambda = N / s^t."""
        return self.n_rows // self.n_levels**self.strength


def _parse_row(line: str, lineno: int, path) -> list[int]:
    parts = line.split()
    if len(parts) == 1 and len(parts[0]) > 1:
        parts = list(parts[0])
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise OAError(f"{path}: line {lineno}: non-integer level in {line!r}") from None


def load_oa(path) -> OrthogonalArray:
    """Read an array file: optional ``N k s t`` header, then one row per line.

    Without a header the metadata come from a ``<file>.json`` sidecar holding
    ``N``, ``k``, ``s`` and ``t``; failing that, s is inferred and t is 0.
    """
    path = Path(path)
    lines = [(i, ln.strip()) for i, ln in enumerate(path.read_text(encoding="utf-8").splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise OAError(f"{path}: empty array file")
    meta = None
    first = lines[0][1].split()
    if len(first) == 4 and len(lines) > 1:
        following = _parse_row(lines[1][1], lines[1][0], path)
        # a 4-factor array row looks like a header; trust it only if N matches
        if len(following) != 4 or _parse_row(lines[0][1], lines[0][0], path)[0] == len(lines) - 1:
            meta = _parse_row(lines[0][1], lines[0][0], path)
            lines = lines[1:]
    sidecar = path.with_suffix(path.suffix + ".json")
    if meta is None and sidecar.exists():
        d = json.loads(sidecar.read_text(encoding="utf-8"))
        meta = [int(d["N"]), int(d["k"]), int(d["s"]), int(d["t"])]
    rows = [_parse_row(ln, i, path) for i, ln in lines]
    width = len(rows[0])
    for (i, _), r in zip(lines, rows):
        if len(r) != width:
            raise OAError(f"{path}: line {i}: ragged row ({len(r)} levels, expected {width})")
    if meta is None:
        n, k, s, t = len(rows), width, max(max(r) for r in rows) + 1, 0
    else:
        n, k, s, t = meta
    if len(rows) != n:
        raise OAError(f"{path}: header declares {n} rows, found {len(rows)}")
    if width != k:
        raise OAError(f"{path}: header declares {k} factors, rows have {width}")
    try:
        return OrthogonalArray(np.array(rows), s, t)
    except OAError as exc:
        raise OAError(f"{path}: {exc}") from None


def bundled_array(name: str) -> OrthogonalArray:
    if name not in BUNDLED:
        raise OAError(f"unknown bundled array {name!r}; choose from {sorted(BUNDLED)}")
    with resources.as_file(resources.files("heatcast.data").joinpath(BUNDLED[name])) as p:
        return load_oa(p)


def resolve_array(spec: str) -> OrthogonalArray:
    """A bundled array name or a path."""
    return bundled_array(spec) if spec in BUNDLED else load_oa(spec)


@dataclass(frozen=True)
class StrengthReport:
    passed: bool
    strength: int
    index: float
    subsets_checked: int
    violation: tuple | None = None  # (columns, level tuple, count)

    def summary(self) -> str:
        if self.passed:
            return f"strength {self.strength} verified, λ={self.index:g}"
        if self.violation is None:
            return f"strength {self.strength} failed: N is not a multiple of s^t"
        cols, tup, count = self.violation
        cols1 = ",".join(str(c + 1) for c in cols)
        return (
            f"strength {self.strength} failed: columns ({cols1}) show level tuple {tup} "
            f"{count} times, expected {self.index:g}"
        )


def verify_strength(a: OrthogonalArray, t: int | None = None) -> StrengthReport:
    """Exhaustive check that every t-column projection is balanced."""
    t = a.strength if t is None else t
    s = a.n_levels
    cells = s**t
    lam = a.n_rows / cells
    if a.n_rows % cells:
        return StrengthReport(False, t, lam, 0)
    lam = a.n_rows // cells
    weights = s ** np.arange(t - 1, -1, -1)
    checked = 0
    for cols in itertools.combinations(range(a.n_factors), t):
        checked += 1
        codes = a.rows[:, cols] @ weights if t else np.zeros(a.n_rows, dtype=np.int64)
        counts = np.bincount(codes, minlength=cells)
        bad = np.flatnonzero(counts != lam)
        if bad.size:
            code = int(bad[0])
            tup = tuple(int(code // s**p % s) for p in range(t - 1, -1, -1))
            return StrengthReport(False, t, lam, checked, (cols, tup, int(counts[code])))
    return StrengthReport(True, t, lam, checked)


@dataclass(frozen=True)
class ExperimentOutcome:
    row_index: int  # 1-based, as experiments are numbered
    levels: tuple  # 1-based levels
    r2_learn: float = float("nan")
    r2_validation: float = float("nan")
    r2_test: float = float("nan")
    winner: bool = False
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_row(args) -> ExperimentOutcome:
    i, row, base, ds, model_id, hidden, cfg, split_spec, tcfg = args
    levels = tuple(int(v) + 1 for v in row)
    try:
        shifted = apply_shifts(base, FactorAssignment.from_levels(row, ds.ts, base=0))
        prep = prepare(ds, shifted, model_id, split_spec, tcfg)
    except (ScheduleError, ValueError) as exc:
        return ExperimentOutcome(i + 1, levels, error=str(exc))
    rec = run_one(prep, hidden, cfg.seed, cfg)
    if not rec.ok:
        return ExperimentOutcome(i + 1, levels, error=rec.error)
    m = rec.metrics
    return ExperimentOutcome(
        i + 1, levels, m["learn"].r2_modified, m["validation"].r2_modified, m["test"].r2_modified
    )


def run_robust_design(
    a: OrthogonalArray,
    base: ScheduleSet,
    ds: Dataset,
    model_id: int = 6,
    hidden_size: int = 9,
    cfg: TrainConfig = TrainConfig(),
    split_spec: SplitSpec = SplitSpec(),
    tcfg: TransitionalConfig = TransitionalConfig(),
    jobs: int = 1,
) -> list[ExperimentOutcome]:
    """Train once per array row on the correspondingly shifted schedule.

    Levels 0/1/2 of the array shift each transition by -ts/0/+ts.  The winner
    maximizes validation r2_modified (ties: learning r2_modified, then row).
    """
    if a.n_factors != N_FACTORS or a.n_levels != 3:
        raise OAError(f"robust design needs a {N_FACTORS}-factor 3-level array")
    tasks = [(i, row, base, ds, model_id, hidden_size, cfg, split_spec, tcfg) for i, row in enumerate(a.rows)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            out = list(pool.map(_run_row, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        out = [_run_row(t) for t in tasks]
    out.sort(key=lambda o: o.row_index)
    ok = [o for o in out if o.ok]
    if ok:
        win = min(ok, key=lambda o: (-o.r2_validation, -o.r2_learn, o.row_index))
        out = [replace(o, winner=True) if o is win else o for o in out]
    return out


def winner(outcomes) -> ExperimentOutcome | None:
    return next((o for o in outcomes if o.winner), None)
