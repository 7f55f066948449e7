import json

import numpy as np
import pytest

from heatcast.schedules import ScheduleSet, StepProfile
from heatcast.synth import BuildingParams, WeatherModel, generate, respond, target_demand, write_sidecar


def flat_schedule(level=1.0):
    p = StepProfile(((0, level),))
    return ScheduleSet(p, StepProfile(((0, 0.0),)), p, p)


def test_length_and_cadence(schedule):
    ds = generate(27, schedule, BuildingParams(seed=7))
    assert len(ds) == 27 * 96
    assert ds.ts == 15


def test_same_seed_same_data(schedule):
    a = generate(3, schedule, BuildingParams(seed=11))
    b = generate(3, schedule, BuildingParams(seed=11))
    c = generate(3, schedule, BuildingParams(seed=12))
    np.testing.assert_array_equal(a.p_heat, b.p_heat)
    np.testing.assert_array_equal(a.g_solar, b.g_solar)
    assert not np.array_equal(a.p_heat, c.p_heat)


@pytest.mark.parametrize("seed", range(5))
def test_bounds_and_night_solar(schedule, seed):
    bp = BuildingParams(seed=seed)
    ds = generate(7, schedule, bp)
    assert np.all(ds.p_heat >= 0) and np.all(ds.p_heat <= bp.p_max)
    hours = ds.minute_of_day / 60
    night = (hours < 12 - 4.5) | (hours > 12 + 4.5)
    assert np.all(ds.g_solar[night] == 0)
    assert np.all(ds.g_solar >= 0)


def test_one_time_constant_closes_63_percent():
    bp = BuildingParams(tau=15, delay=0, noise_std=0)
    d = respond(np.r_[0.0, np.ones(10)], bp, 15, initial=0.0)
    assert d[2] == pytest.approx(1 - np.exp(-1), abs=1e-12)
    assert d[2] == pytest.approx(0.632, abs=1e-3)


def test_exact_step_response():
    bp = BuildingParams(tau=30, delay=0, noise_std=0)
    d = respond(np.ones(20), bp, 15, initial=0.0)
    k = np.arange(20)
    np.testing.assert_allclose(d, 1 - np.exp(-15 * k / 30), rtol=0, atol=1e-12)


def test_euler_step_response():
    bp = BuildingParams(tau=30, delay=0, noise_std=0, scheme="euler")
    d = respond(np.ones(20), bp, 15, initial=0.0)
    k = np.arange(20)
    np.testing.assert_allclose(d, 1 - (1 - 15 / 30) ** k, rtol=0, atol=1e-12)
    with pytest.raises(ValueError):
        BuildingParams(tau=10, scheme="euler").step_gain(15)


def test_delay_shifts_response():
    bp = BuildingParams(tau=15, delay=30, noise_std=0)
    target = np.r_[np.zeros(5), np.ones(10)]
    d = respond(target, bp, 15, initial=0.0)
    # the step at sample 5 reaches the plant two samples later
    assert np.all(d[:8] == 0) and d[8] > 0


def test_settles_within_two_percent_after_four_tau():
    bp = BuildingParams(tau=15, delay=15, noise_std=0, seed=0)
    wm = WeatherModel(t_amplitude=0, solar_peak=0, weather_noise_std=0)
    ds = generate(1, flat_schedule(), bp, wm, initial_demand=0.0)
    d_star = target_demand(bp, ds.t_out, ds.g_solar, 1.0, 1.0)
    k = int((bp.delay + 4 * bp.tau) // 15) + 1
    assert np.all(np.abs(ds.p_heat[k:] - d_star[k:]) < 0.02 * d_star[k:])


def test_param_validation():
    for bad in (dict(tau=0), dict(delay=-1), dict(ua=0), dict(noise_std=-1), dict(scheme="rk4")):
        with pytest.raises(ValueError):
            BuildingParams(**bad)
    with pytest.raises(ValueError):
        respond(np.ones(3), BuildingParams(delay=10), 15)


def test_sidecar(tmp_path, schedule):
    p = tmp_path / "truth.json"
    write_sidecar(p, BuildingParams(seed=3), WeatherModel(), schedule, 15, 27)
    d = json.loads(p.read_text())
    assert d["building"]["seed"] == 3
    assert ScheduleSet.from_dict(d["schedule"]) == schedule
