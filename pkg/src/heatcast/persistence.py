"""Versioned JSON model files and prediction from a saved model."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from heatcast.dataset import Dataset, NormStats, SplitSpec, day_blocks
from heatcast.features import TransitionalConfig
from heatcast.mlp import MlpParams, TrainConfig, forward
from heatcast.pipeline import BLOCKS, Prepared, full_matrix
from heatcast.relevance import pearson
from heatcast.schedules import ScheduleSet
from heatcast.selection import BlockMetrics, dof_spec, energy_error, modified_metrics

FORMAT_VERSION = 1


class ModelFileError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SavedModel:
    model_id: int
    params: MlpParams
    input_stats: NormStats
    target_stats: NormStats
    column_names: tuple
    m_learn: int
    train_config: TrainConfig
    split_spec: SplitSpec = SplitSpec()
    transitional: TransitionalConfig = TransitionalConfig()

    @classmethod
    def from_prepared(cls, prep: Prepared, params: MlpParams, cfg: TrainConfig, split_spec=SplitSpec(), tcfg=TransitionalConfig()):
        return cls(prep.model_id, params, prep.input_stats, prep.target_stats, prep.column_names, prep.m_learn, cfg, split_spec, tcfg)

    def to_dict(self) -> dict:
        # floats go through repr, which round-trips exactly
        return {
            "format": "heatcast-model",
            "version": FORMAT_VERSION,
            "model_id": self.model_id,
            "l_x": self.params.l_x,
            "l_w": self.params.l_w,
            "theta": [float(v) for v in self.params.theta],
            "input_stats": self.input_stats.to_dict(),
            "target_stats": self.target_stats.to_dict(),
            "column_names": list(self.column_names),
            "m_learn": self.m_learn,
            "train_config": self.train_config.to_dict(),
            "split": list(self.split_spec.fractions),
            "transitional": asdict(self.transitional),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SavedModel":
        if d.get("format") != "heatcast-model":
            raise ModelFileError("not a heatcast model file")
        if d.get("version") != FORMAT_VERSION:
            raise ModelFileError(f"unsupported model file version {d.get('version')!r}")
        try:
            params = MlpParams.from_theta(d["theta"], int(d["l_x"]), int(d["l_w"]))
            return cls(
                int(d["model_id"]),
                params,
                NormStats.from_dict(d["input_stats"]),
                NormStats.from_dict(d["target_stats"]),
                tuple(d["column_names"]),
                int(d["m_learn"]),
                TrainConfig(**d["train_config"]),
                SplitSpec(*d["split"]),
                TransitionalConfig(**d["transitional"]),
            )
        except (KeyError, TypeError) as exc:
            raise ModelFileError(f"model file is missing or mangles field {exc}") from None


def save_model(model: SavedModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_model(path) -> SavedModel:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return SavedModel.from_dict(d)


@dataclass(frozen=True, eq=False)
class Prediction:
    timestamps: np.ndarray
    actual: np.ndarray  # raw kW
    predicted: np.ndarray  # raw kW
    block: np.ndarray  # block label per row
    metrics: dict


def predict(model: SavedModel, ds: Dataset, schedule: ScheduleSet) -> Prediction:
    """Rebuild the features, apply the stored normalization and score every block."""
    fm = full_matrix(ds, schedule, model.model_id, model.transitional)
    if fm.column_names != model.column_names:
        raise ModelFileError(f"feature columns {fm.column_names} do not match the model's {model.column_names}")
    labels = day_blocks(ds, model.split_spec)[len(ds) - len(fm) :]
    X = model.input_stats.apply(fm.rows)
    y = model.target_stats.apply(fm.target)
    pred = np.asarray(forward(model.params, X))
    spec = dof_spec(model.m_learn, model.params.l_x, model.params.l_w)
    metrics = {}
    for i, name in enumerate(BLOCKS):
        sel = labels == i
        if not sel.any():
            continue
        mse, r2 = modified_metrics(pred[sel], y[sel], spec)
        try:
            r = pearson(pred[sel], y[sel])
        except ValueError:
            r = float("nan")
        raw = model.target_stats.invert(pred[sel])
        metrics[name] = BlockMetrics(r2, mse, 1.0 - r2, energy_error(raw, fm.target[sel]), r)
    block = np.array(BLOCKS, dtype=object)[labels]
    return Prediction(fm.timestamps, fm.target, model.target_stats.invert(pred), block, metrics)
