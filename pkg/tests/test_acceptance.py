"""Acceptance gate: one test per criterion, each reporting a pass/fail line."""

import time

import numpy as np
import pytest

from heatcast.cli import main
from heatcast.dataset import NormStats
from heatcast.features import transitional_series
from heatcast.mlp import MlpParams, StopReason, TrainConfig, forward, jacobian, n_params, train
from heatcast.oa import OrthogonalArray, bundled_array, run_robust_design, verify_strength, winner
from heatcast.pipeline import prepare
from heatcast.relevance import Band, band, pearson
from heatcast.schedules import FactorAssignment, apply_shifts, default_schedule
from heatcast.selection import dof_spec, max_hidden, modified_metrics, performance_goal, sweep
from heatcast.synth import BuildingParams, generate

JOBS = 4


def fd_jacobian(params, X, h=1e-6):
    theta = params.theta
    out = np.empty((len(X), len(theta)))
    for j in range(len(theta)):
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        out[:, j] = (
            forward(MlpParams.from_theta(tp, params.l_x, params.l_w), X)
            - forward(MlpParams.from_theta(tm, params.l_x, params.l_w), X)
        ) / (2 * h)
    return out


def test_criterion_01_jacobian(criterion):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        l_x, l_w = int(rng.integers(5, 11)), int(rng.integers(3, 14))
        p = MlpParams.from_theta(rng.uniform(-0.5, 0.5, n_params(l_x, l_w)), l_x, l_w)
        X = rng.normal(size=(20, l_x))
        F = fd_jacobian(p, X)
        rel = np.abs(jacobian(p, X) - F) / np.maximum(np.abs(F), 1.0)
        worst = max(worst, float(rel.max()))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 10
    criterion(1, "analytic Jacobian vs central differences", ok, f"max rel err {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_criterion_02_lm_sanity(criterion):
    t0 = time.perf_counter()
    hits = 0
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        X = rng.normal(size=(250, 5))
        y_raw = 300.0 + X @ rng.normal(20.0, 5.0, 5)
        x_stats = NormStats(X[:200].mean(0), X[:200].std(0, ddof=1))
        y_stats = NormStats(y_raw[:200].mean(), y_raw[:200].std(ddof=1))
        spec = dof_spec(200, 5, 5)
        cfg = TrainConfig(seed=seed, max_epochs=50, performance_goal=performance_goal(y_raw[:200], spec))
        res = train(
            x_stats.apply(X[:200]), y_stats.apply(y_raw[:200]),
            x_stats.apply(X[200:]), y_stats.apply(y_raw[200:]),
            cfg, 5, target_std=float(y_stats.std[0]),
        )
        sse_raw = 2 * 200 * res.learn_cost[-1] * y_stats.std[0] ** 2
        hits += res.stop_reason is StopReason.PERFORMANCE_GOAL and sse_raw < cfg.performance_goal and res.epochs_run <= 50
    elapsed = time.perf_counter() - t0
    ok = hits >= 4 and elapsed < 5
    criterion(2, "LM reaches the performance goal on a noiseless linear target", ok, f"{hits}/5 seeds, {elapsed:.2f}s")
    assert ok


def test_criterion_03_dof(criterion):
    l_theta = dof_spec(1824, 5, 10).l_theta
    w_max = max_hidden(1824, 5, 1, 8)
    ok = l_theta == 71 and w_max == 32
    criterion(3, "parameter count and maximum hidden size", ok, f"L_theta={l_theta}, W_max={w_max}")
    assert ok


def test_criterion_04_metric_consistency(criterion):
    # checked exactly as stated: r2_modified = 1 - mse_modified * (m - 1) / m
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(20, 3000))
        y = rng.normal(size=m)
        y = (y - y.mean()) / y.std(ddof=1)
        pred = rng.normal(size=m)
        spec = dof_spec(1824, 10, int(rng.integers(3, 20)))
        mse, r2 = modified_metrics(pred, y, spec)
        worst = max(worst, abs(r2 - (1 - mse * (m - 1) / m)))
    ok = worst < 1e-9
    criterion(4, "r2_modified vs 1 - mse_modified*(m-1)/m", ok, f"max gap {worst:.2e}")
    assert ok


def test_criterion_05_oa_verification(criterion):
    t0 = time.perf_counter()
    a = bundled_array("oa_729_10_3_5")
    rep = verify_strength(a)
    rng = np.random.default_rng(5)
    caught = 0
    for _ in range(100):
        rows = a.rows.copy()
        i, j = rng.integers(a.n_rows), rng.integers(a.n_factors)
        rows[i, j] = (rows[i, j] + rng.integers(1, 3)) % 3
        caught += not verify_strength(OrthogonalArray(rows, 3, 5)).passed
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.index == 3 and rep.subsets_checked == 252 and caught == 100 and elapsed < 5
    criterion(5, "OA(729,10,3,5) strength and perturbation detection", ok, f"{rep.summary()}, {caught}/100 caught, {elapsed:.2f}s")
    assert ok


def test_criterion_06_transitional_oracle(criterion):
    beta = transitional_series([1, 1, 2, 2, 1, 1, 3, 3])
    levels = [float(beta[0])] + [float(beta[i]) for i in range(1, len(beta)) if beta[i] != beta[i - 1]]
    ok = levels == [25.0, 75.0, 125.0, 225.0]
    criterion(6, "transition levels 25, 75, 125, 225", ok, f"{levels}")
    assert ok


@pytest.mark.slow
def test_criterion_07_pseudo_dynamic_trend(criterion):
    t0 = time.perf_counter()
    sched = default_schedule()
    gaps = []
    for seed in range(5):
        bp = BuildingParams(tau=15, delay=15, noise_std=0.03 * 1200, p_max=1200, seed=seed)
        ds = generate(27, sched, bp)
        preps = [prepare(ds, sched, m) for m in (1, 6)]
        res = sweep(preps, TrainConfig(), sizes=range(3, 14), jobs=JOBS)
        r2 = {r.model_id: r.metrics["validation"].r2_modified for r in res.reports}
        gaps.append(r2[6] - r2[1])
    elapsed = time.perf_counter() - t0
    wins = sum(g >= 0.03 for g in gaps)
    ok = wins >= 4 and elapsed <= 600
    criterion(7, "model 6 beats model 1 by >= 0.03 validation r2", ok,
              f"gaps {', '.join(f'{g:+.3f}' for g in gaps)}; {wins}/5, {elapsed:.0f}s")
    assert ok


@pytest.mark.slow
def test_criterion_08_oa_schedule_recovery(criterion):
    t0 = time.perf_counter()
    base = default_schedule()
    truth = np.array([1, 1, 1, 1, 2, 1, 1, 1, 1, 1])  # f5 at +ts, the rest neutral
    true_sched = apply_shifts(base, FactorAssignment.from_levels(truth, 15, base=0))
    a = bundled_array("oa_729_10_3_5")
    assert verify_strength(a).passed
    summary, good = [], 0
    for seed in range(5):
        ds = generate(27, true_sched, BuildingParams(seed=seed))
        w = winner(run_robust_design(a, base, ds, 6, 9, TrainConfig(seed=0), jobs=JOBS))
        codes = np.array(w.levels) - 1
        matches = int(np.sum(codes == truth))
        f5_ok = w.levels[4] == 3
        good += f5_ok and matches >= 7
        summary.append(f"seed {seed}: row {w.row_index} f5={w.levels[4]} {matches}/10")
    elapsed = time.perf_counter() - t0
    ok = good >= 3 and elapsed <= 1800
    criterion(8, "robust design recovers a shifted t5", ok, f"{'; '.join(summary)}; {good}/5, {elapsed:.0f}s")
    assert ok


def test_criterion_09_determinism(criterion, tmp_path):
    data = tmp_path / "data.csv"
    assert main(["synth", "--days", "27", "--seed", "9", "-o", str(data), "--out", str(tmp_path)]) == 0
    sweep_args = ["sweep", "--model", "6", "--sizes", "3-5", "--data", str(data), "--seed", "3"]
    oa_args = ["oa-run", "--array", "oa_81_10_3_2", "--data", str(data), "--seed", "3"]
    outputs = {}
    for tag, jobs in (("a", "1"), ("b", "1"), ("c", str(JOBS))):
        assert main(sweep_args + ["--jobs", jobs, "--out", str(tmp_path / f"sweep_{tag}")]) == 0
        assert main(oa_args + ["--jobs", jobs, "--out", str(tmp_path / f"oa_{tag}")]) == 0
        outputs[tag] = (
            (tmp_path / f"sweep_{tag}" / "sweep.csv").read_bytes(),
            (tmp_path / f"oa_{tag}" / "oa_outcomes.csv").read_bytes(),
        )
    ok = outputs["a"] == outputs["b"] == outputs["c"]
    criterion(9, "byte-identical sweep and oa-run CSVs", ok, f"3 invocations each, jobs 1/1/{JOBS}")
    assert ok


def test_criterion_10_pearson_oracle(criterion):
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 500))
        x = rng.normal(size=n)
        y = rng.normal(size=n) + rng.uniform(-2, 2) * x
        mx, my = sum(x) / n, sum(y) / n
        cov = sum((a - mx) * (b - my) for a, b in zip(x, y)) / (n - 1)
        sx = (sum((a - mx) ** 2 for a in x) / (n - 1)) ** 0.5
        sy = (sum((b - my) ** 2 for b in y) / (n - 1)) ** 0.5
        worst = max(worst, abs(pearson(x, y) - cov / (sx * sy)))
    bands = [band(v) for v in (0.1, 0.25, 0.6)]
    above = [band(np.nextafter(v, 1)) for v in (0.1, 0.25, 0.6)]
    bands_ok = bands == [Band.NEGLIGIBLE, Band.SMALL_POS, Band.MEDIUM_POS] and above == [
        Band.SMALL_POS, Band.MEDIUM_POS, Band.STRONG_POS
    ]
    ok = worst < 1e-12 and bands_ok
    criterion(10, "Pearson vs brute force and band cut points", ok, f"max gap {worst:.1e}, bands {'ok' if bands_ok else 'wrong'}")
    assert ok

