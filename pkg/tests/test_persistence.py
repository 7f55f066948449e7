import json

import numpy as np
import pytest

from heatcast.mlp import TrainConfig
from heatcast.persistence import ModelFileError, SavedModel, load_model, predict, save_model
from heatcast.pipeline import prepare
from heatcast.report import line_chart, write_prediction_report
from heatcast.selection import run_one


@pytest.fixture(scope="module")
def trained(schedule, small_ds):
    cfg = TrainConfig(max_epochs=30, seed=2)
    prep = prepare(small_ds, schedule, 4)
    rec = run_one(prep, 5, 2, cfg)
    return prep, rec, SavedModel.from_prepared(prep, rec.params, cfg)


def test_round_trip_is_exact(tmp_path, trained):
    _, _, model = trained
    p = tmp_path / "m.json"
    save_model(model, p)
    back = load_model(p)
    np.testing.assert_array_equal(back.params.theta, model.params.theta)
    np.testing.assert_array_equal(back.input_stats.mean, model.input_stats.mean)
    np.testing.assert_array_equal(back.target_stats.std, model.target_stats.std)
    assert back.column_names == model.column_names
    assert back.train_config == model.train_config
    d = json.loads(p.read_text())
    assert d["version"] == 1 and d["l_x"] == 8 and d["l_w"] == 5


def test_predict_reproduces_training_metrics(tmp_path, schedule, small_ds, trained):
    _, rec, model = trained
    p = tmp_path / "m.json"
    save_model(model, p)
    pred = predict(load_model(p), small_ds, schedule)
    for block in ("learn", "validation", "test"):
        a, b = pred.metrics[block], rec.metrics[block]
        assert abs(a.r2_modified - b.r2_modified) < 1e-9
        assert abs(a.mse_modified - b.mse_modified) < 1e-9
        assert abs(a.energy_error_pct - b.energy_error_pct) < 1e-9


def test_bad_files(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{")
    with pytest.raises(ModelFileError):
        load_model(p)
    p.write_text(json.dumps({"format": "heatcast-model", "version": 99}))
    with pytest.raises(ModelFileError, match="version"):
        load_model(p)
    p.write_text(json.dumps({"format": "heatcast-model", "version": 1}))
    with pytest.raises(ModelFileError):
        load_model(p)


def test_report_files(tmp_path, schedule, small_ds, trained):
    _, _, model = trained
    files = write_prediction_report(tmp_path, predict(model, small_ds, schedule))
    names = sorted(f.name for f in files)
    assert names == ["prediction.csv", "prediction_learn.svg", "prediction_test.svg", "prediction_validation.svg"]
    svg = (tmp_path / "prediction_test.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 2


def test_line_chart_escapes_title():
    svg = line_chart("a < b", {"actual": np.arange(5.0)})
    assert "a &lt; b" in svg
