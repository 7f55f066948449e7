"""Degree-of-freedom accounting, adjusted metrics and the hidden-size sweep."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from heatcast.mlp import MlpParams, TrainConfig, TrainingError, forward, n_params, train
from heatcast.pipeline import BLOCKS, Prepared
from heatcast.relevance import pearson

DEFAULT_SEEDS = (0, 1, 2, 3, 4)


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class DofSpec:
    l_e: int
    l_theta: int
    dof: int
    delta: float
    w_max: int
    w_min: int = 3

    @property
    def ratio(self) -> float:
        """Learning equations per degree of freedom, l_e / dof."""
        return self.l_e / self.dof


def max_hidden(m_learn: int, l_x: int, l_y: int = 1, delta: float = 8) -> int:
    """Largest hidden size keeping parameters within l_e / delta."""
    l_e = m_learn * l_y
    return math.floor((l_e - l_y) / (delta * (l_x + l_y + 1)))


def dof_spec(m_learn: int, l_x: int, l_w: int, l_y: int = 1, delta: float = 8, w_min: int = 3) -> DofSpec:
    if m_learn < 1:
        raise SelectionError("need at least one learning sample")
    l_e = m_learn * l_y
    l_theta = n_params(l_x, l_w, l_y)
    dof = l_e - l_theta
    if dof < 1:
        raise SelectionError(
            f"{l_theta} parameters for {l_e} learning equations leaves no degrees of freedom"
        )
    return DofSpec(l_e, l_theta, dof, delta, max_hidden(m_learn, l_x, l_y, delta), w_min)


def performance_goal(y_learn_raw, spec: DofSpec) -> float:
    """Training-stop threshold on the raw learning SSE: 0.01 * dof * sum(y) / l_e."""
    return 0.01 * spec.dof * float(np.sum(y_learn_raw)) / spec.l_e


def residual_ratio(y_pred, y_actual, spec: DofSpec) -> float:
    y_pred = np.asarray(y_pred, dtype=float)
    y_actual = np.asarray(y_actual, dtype=float)
    denom = float(y_actual @ y_actual)
    if denom == 0:
        raise SelectionError("sum of squared targets is zero")
    r = y_pred - y_actual
    return spec.ratio * float(r @ r) / denom


def modified_metrics(y_pred, y_actual, spec: DofSpec) -> tuple[float, float]:
    """(mse_modified, r2_modified), both scaled by l_e / dof.

    ``r2_modified`` is one minus the scaled residual-to-signal ratio.
    """
    y_pred = np.asarray(y_pred, dtype=float)
    y_actual = np.asarray(y_actual, dtype=float)
    if len(y_pred) != len(y_actual) or len(y_actual) == 0:
        raise SelectionError("predictions and targets must have equal non-zero length")
    r = y_pred - y_actual
    mse = spec.ratio * float(r @ r) / len(r)
    return mse, 1.0 - residual_ratio(y_pred, y_actual, spec)


def energy_error(y_pred_raw, y_actual_raw) -> float:
    """Percentage gap between integrated predicted and actual energy."""
    total = float(np.sum(y_actual_raw))
    if total <= 0:
        raise SelectionError("actual energy must be positive")
    return 100.0 * abs(float(np.sum(y_pred_raw)) - total) / total


@dataclass(frozen=True)
class BlockMetrics:
    r2_modified: float
    mse_modified: float
    residual_ratio: float
    energy_error_pct: float
    pearson_r: float


def evaluate(prep: Prepared, params: MlpParams, spec: DofSpec | None = None) -> dict[str, BlockMetrics]:
    if spec is None:
        spec = dof_spec(prep.m_learn, prep.l_x, params.l_w)
    out = {}
    for block in BLOCKS:
        y = prep.y(block)
        pred = forward(params, prep.X(block))
        mse, r2 = modified_metrics(pred, y, spec)
        raw = prep.target_stats.invert(pred)
        try:
            r = pearson(pred, y)
        except ValueError:
            r = float("nan")
        out[block] = BlockMetrics(r2, mse, 1.0 - r2, energy_error(raw, prep.y_raw(block)), r)
    return out


@dataclass(frozen=True, eq=False)
class RunRecord:
    model_id: int
    hidden_size: int
    seed: int
    metrics: dict | None = None
    stop_reason: str | None = None
    epochs: int = 0
    error: str | None = None
    params: MlpParams | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        d = {
            "model_id": self.model_id,
            "hidden_size": self.hidden_size,
            "seed": self.seed,
            "stop_reason": self.stop_reason,
            "epochs": self.epochs,
            "error": self.error,
        }
        if self.metrics is not None:
            d["metrics"] = {b: asdict(m) for b, m in self.metrics.items()}
        return d


def run_one(prep: Prepared, hidden: int, seed: int, template: TrainConfig = TrainConfig()) -> RunRecord:
    """Train one network with the degree-of-freedom adjusted performance goal."""
    try:
        spec = dof_spec(prep.m_learn, prep.l_x, hidden)
        cfg = replace(template, seed=seed, performance_goal=performance_goal(prep.y_raw("learn"), spec))
        res = train(
            prep.X("learn"), prep.y("learn"), prep.X("validation"), prep.y("validation"),
            cfg, hidden, target_std=float(prep.target_stats.std[0]),
        )
        metrics = evaluate(prep, res.params, spec)
    except (TrainingError, SelectionError, ValueError) as exc:
        return RunRecord(prep.model_id, hidden, seed, error=str(exc))
    return RunRecord(prep.model_id, hidden, seed, metrics, res.stop_reason.value, res.epochs_run, params=res.params)


def _run_task(args):
    return run_one(*args)


def run_many(tasks: Sequence[tuple], jobs: int = 1) -> list:
    """Evaluate ``(prep, hidden, seed, cfg)`` tasks, results in task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _run_key(r: RunRecord):
    v = r.metrics["validation"]
    return (-v.r2_modified, v.mse_modified, r.seed)


def best_run(runs: Iterable[RunRecord]) -> RunRecord | None:
    """Highest validation r2_modified; ties by lower validation mse, then seed."""
    ok = [r for r in runs if r.ok]
    return min(ok, key=_run_key) if ok else None


def select_size(per_size: dict[int, RunRecord]) -> RunRecord:
    """Pick the hidden size with the best validation r2_modified.

    Ties go to the higher learning r2_modified, then to the smaller network.
    """
    cands = [r for r in per_size.values() if r is not None]
    if not cands:
        raise SelectionError("every run failed")
    return min(
        cands,
        key=lambda r: (
            -r.metrics["validation"].r2_modified,
            -r.metrics["learn"].r2_modified,
            r.hidden_size,
        ),
    )


@dataclass(frozen=True, eq=False)
class ModelReport:
    model_id: int
    hidden_size: int
    seed: int
    metrics: dict
    w_max: int
    params: MlpParams | None = None

    def row(self) -> dict:
        m = self.metrics
        return {
            "model": self.model_id,
            "hidden_neurons": self.hidden_size,
            "r2_learning": m["learn"].r2_modified,
            "r2_validation": m["validation"].r2_modified,
            "r2_testing": m["test"].r2_modified,
            "mse_learning": m["learn"].mse_modified,
            "mse_validation": m["validation"].mse_modified,
            "mse_testing": m["test"].mse_modified,
            "energy_error_learning_pct": m["learn"].energy_error_pct,
            "energy_error_validation_pct": m["validation"].energy_error_pct,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class SweepResult:
    reports: list
    runs: list = field(default_factory=list)
    per_size: dict = field(default_factory=dict)


def hidden_range(prep: Prepared, w_min: int = 3, delta: float = 8, sizes: Iterable[int] | None = None) -> list[int]:
    w_max = max_hidden(prep.m_learn, prep.l_x, 1, delta)
    if w_max < w_min:
        raise SelectionError(f"maximum hidden size {w_max} is below the minimum {w_min}")
    full = range(w_min, w_max + 1)
    return list(full) if sizes is None else [h for h in full if h in set(sizes)]


def sweep(
    prepared: dict[int, Prepared] | Sequence[Prepared],
    template: TrainConfig = TrainConfig(),
    seeds: Sequence[int] = DEFAULT_SEEDS,
    sizes: Iterable[int] | None = None,
    jobs: int = 1,
    w_min: int = 3,
    delta: float = 8,
) -> SweepResult:
    """Train every (model, hidden size, seed) and pick one configuration per model.

    ``sizes`` restricts the hidden sizes to a subset of ``w_min..w_max``.
    """
    preps = list(prepared.values()) if isinstance(prepared, dict) else list(prepared)
    tasks = []
    ranges = {}
    for prep in sorted(preps, key=lambda p: p.model_id):
        ranges[prep.model_id] = hidden_range(prep, w_min, delta, sizes)
        for h in ranges[prep.model_id]:
            for s in seeds:
                tasks.append((prep, h, s, template))
    runs = run_many(tasks, jobs)
    runs.sort(key=lambda r: (r.model_id, r.hidden_size, r.seed))

    reports, per_size = [], {}
    for prep in sorted(preps, key=lambda p: p.model_id):
        mid = prep.model_id
        sizes_best = {
            h: best_run(r for r in runs if r.model_id == mid and r.hidden_size == h) for h in ranges[mid]
        }
        per_size[mid] = sizes_best
        win = select_size(sizes_best)
        reports.append(
            ModelReport(mid, win.hidden_size, win.seed, win.metrics, max_hidden(prep.m_learn, prep.l_x, 1, delta), win.params)
        )
    return SweepResult(reports, runs, per_size)
