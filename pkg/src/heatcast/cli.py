"""Command-line front end: ``heatcast <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from datetime import datetime
from pathlib import Path

from heatcast.dataset import SplitSpec, load_csv
from heatcast.features import TransitionalConfig
from heatcast.mlp import TrainConfig
from heatcast.oa import resolve_array, run_robust_design, verify_strength, winner
from heatcast.persistence import SavedModel, load_model, predict, save_model
from heatcast.pipeline import full_matrix, prepare, schedule_features
from heatcast.relevance import relevance_report
from heatcast.report import write_prediction_report, write_table
from heatcast.schedules import FactorAssignment, apply_shifts, default_schedule, load_schedule
from heatcast.selection import run_one, sweep
from heatcast.synth import DEFAULT_START, BuildingParams, WeatherModel, generate, write_sidecar

MODELS = range(1, 7)


class CliError(Exception):
    pass


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _data(args):
    if not args.data:
        raise CliError("--data is required")
    return load_csv(args.data)


def _schedule(args):
    return load_schedule(args.schedule) if args.schedule else default_schedule()


def _split(args) -> SplitSpec:
    return SplitSpec(*args.split)


def _sizes(text: str | None):
    if text is None:
        return None
    out = set()
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        try:
            out.update(range(int(lo), int(hi or lo) + 1))
        except ValueError:
            raise CliError(f"bad --sizes entry {part!r}; use e.g. 3-13 or 3,5,9") from None
    return sorted(out)


def _levels(text: str) -> list[int]:
    """Ten printed levels 1/2/3 (e.g. 2222322222) to array codes 0/1/2."""
    digits = text.replace(",", "").replace(" ", "")
    if len(digits) != 10 or set(digits) - set("123"):
        raise CliError(f"--levels needs ten digits from 1..3, got {text!r}")
    return [int(c) - 1 for c in digits]


def _metrics_dict(metrics) -> dict:
    return {b: asdict(m) for b, m in metrics.items()}


def cmd_synth(args) -> int:
    out = _out_dir(args)
    path = Path(args.output) if args.output else out / "data.csv"
    sched = _schedule(args)
    if args.levels:
        sched = apply_shifts(sched, FactorAssignment.from_levels(_levels(args.levels), args.ts, base=0))
    bp = BuildingParams(
        tau=args.tau, delay=args.delay, noise_std=args.noise if args.noise is not None else 0.03 * args.p_max,
        p_max=args.p_max, seed=args.seed, scheme=args.scheme,
    )
    wm = WeatherModel()
    start = datetime.fromisoformat(args.start) if args.start else DEFAULT_START
    ds = generate(args.days, sched, bp, wm, args.ts, start)
    ds.to_csv(path)
    sidecar = path.with_name(path.name + ".truth.json")
    write_sidecar(sidecar, bp, wm, sched, args.ts, args.days, start)
    print(f"wrote {len(ds)} samples to {path} (ground truth in {sidecar})")
    return 0


def cmd_features(args) -> int:
    ds = _data(args)
    fm = full_matrix(ds, _schedule(args), args.model, _tcfg(args))
    path = _out_dir(args) / f"features_model{args.model}.csv"
    fm.to_csv(path)
    print(f"wrote {len(fm)} rows x {fm.l_x} inputs to {path}")
    return 0


def cmd_relevance(args) -> int:
    ds = _data(args)
    series, _ = schedule_features(ds, _schedule(args), _tcfg(args))
    entries = relevance_report(ds, series)
    width = max(len(e.variable) for e in entries)
    for e in entries:
        print(f"{e.variable:<{width}}  {e.r:+.4f}  {e.band.value}")
    rows = [{"variable": e.variable, "r": e.r, "band": e.band.value} for e in entries]
    write_table(_out_dir(args) / "relevance.csv", rows)
    return 0


def _train_config(args) -> TrainConfig:
    return TrainConfig(max_epochs=args.max_epochs, seed=args.seed)


def _tcfg(args) -> TransitionalConfig:
    return TransitionalConfig(args.beta0, args.delta_beta)


def cmd_train(args) -> int:
    ds = _data(args)
    prep = prepare(ds, _schedule(args), args.model, _split(args), _tcfg(args))
    rec = run_one(prep, args.hidden, args.seed, _train_config(args))
    if not rec.ok:
        raise CliError(rec.error)
    out = _out_dir(args)
    stem = f"model{args.model}_h{args.hidden}_s{args.seed}"
    save_model(SavedModel.from_prepared(prep, rec.params, _train_config(args), _split(args), _tcfg(args)), out / f"{stem}.json")
    _dump_json(rec.to_dict(), out / f"{stem}_metrics.json")
    m = rec.metrics
    print(
        f"model {args.model}, {args.hidden} hidden, seed {args.seed}: stop {rec.stop_reason} after {rec.epochs} epochs; "
        f"r2_modified learn {m['learn'].r2_modified:.4f} validation {m['validation'].r2_modified:.4f} "
        f"test {m['test'].r2_modified:.4f}"
    )
    print(f"saved {out / (stem + '.json')}")
    return 0


def cmd_sweep(args) -> int:
    ds = _data(args)
    sched = _schedule(args)
    models = [args.model] if args.model else list(MODELS)
    preps = [prepare(ds, sched, m, _split(args), _tcfg(args)) for m in models]
    seeds = tuple(range(args.seed, args.seed + args.n_seeds))
    res = sweep(preps, _train_config(args), seeds, _sizes(args.sizes), args.jobs)
    out = _out_dir(args)
    write_table(out / "sweep.csv", [r.row() for r in res.reports])
    _dump_json([r.to_dict() for r in res.runs], out / "sweep_runs.json")
    for r in res.reports:
        row = r.row()
        print(
            f"model {r.model_id}: {r.hidden_size} hidden (w_max {r.w_max}), seed {r.seed}, "
            f"r2_modified validation {row['r2_validation']:.4f}"
        )
    print(f"wrote {out / 'sweep.csv'}")
    return 0


def cmd_oa_verify(args) -> int:
    a = resolve_array(args.array)
    rep = verify_strength(a, args.strength)
    print(rep.summary())
    return 0 if rep.passed else 1


def cmd_oa_run(args) -> int:
    a = resolve_array(args.array)
    rep = verify_strength(a)
    if not rep.passed:
        raise CliError(f"array rejected: {rep.summary()}")
    ds = _data(args)
    outcomes = run_robust_design(
        a, _schedule(args), ds, args.model or 6, args.hidden or 9, _train_config(args), _split(args), _tcfg(args), args.jobs
    )
    rows = []
    for o in outcomes:
        row = {"experiment": o.row_index}
        row.update({f"f{j + 1}": lv for j, lv in enumerate(o.levels)})
        row.update(
            r2_learning=o.r2_learn, r2_validation=o.r2_validation, r2_testing=o.r2_test,
            winner=int(o.winner), error=o.error or "",
        )
        rows.append(row)
    out = _out_dir(args)
    write_table(out / "oa_outcomes.csv", rows)
    w = winner(outcomes)
    if w is None:
        raise CliError("every experiment failed")
    print(
        f"experiment {w.row_index} wins with levels {''.join(map(str, w.levels))}: "
        f"r2_modified validation {w.r2_validation:.4f}, learn {w.r2_learn:.4f} ({rep.summary()}, seed {args.seed})"
    )
    print(f"wrote {out / 'oa_outcomes.csv'}")
    return 0


def _prediction(args):
    if not args.model_file:
        raise CliError("--model-file is required")
    return predict(load_model(args.model_file), _data(args), _schedule(args))


def cmd_predict(args) -> int:
    pred = _prediction(args)
    out = _out_dir(args)
    rows = [
        {"timestamp": str(t), "block": b, "actual_kw": a, "predicted_kw": p}
        for t, b, a, p in zip(pred.timestamps, pred.block, pred.actual, pred.predicted)
    ]
    write_table(out / "predictions.csv", rows)
    _dump_json(_metrics_dict(pred.metrics), out / "predict_metrics.json")
    for b, m in pred.metrics.items():
        print(f"{b}: r2_modified {m.r2_modified:.6f}, mse_modified {m.mse_modified:.6f}, energy error {m.energy_error_pct:.3f}%")
    return 0


def cmd_report(args) -> int:
    pred = _prediction(args)
    files = write_prediction_report(_out_dir(args), pred, stem="report")
    for f in files:
        print(f"wrote {f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for sweep and oa-run")
    g.add_argument("--out", default=os.environ.get("HEATCAST_OUT", "."), help="output directory (default $HEATCAST_OUT or .)")
    g.add_argument("--data", help="input CSV (timestamp,t_out_c,solar_wm2,heat_kw)")
    g.add_argument("--schedule", help="schedule JSON (default: bundled nominal schedule)")
    g.add_argument("--array", default="oa_729_10_3_5", help="bundled array name or array file")
    g.add_argument("--model", type=int, choices=MODELS, help="model variant 1..6")
    g.add_argument("--hidden", type=int, help="hidden neurons")
    g.add_argument("--split", type=float, nargs=3, default=(0.70, 0.15, 0.15), metavar=("LEARN", "VAL", "TEST"))
    g.add_argument("--beta0", type=float, default=25.0)
    g.add_argument("--delta-beta", type=float, default=25.0)
    g.add_argument("--max-epochs", type=int, default=1000)

    p = argparse.ArgumentParser(prog="heatcast", description="Schedule-aware heat demand forecasting.")
    sub = p.add_subparsers(dest="command", metavar="command", required=True)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic building dataset")
    s.add_argument("--days", type=int, default=27)
    s.add_argument("-o", "--output", help="CSV path (default <out>/data.csv)")
    s.add_argument("--ts", type=int, default=15)
    s.add_argument("--tau", type=float, default=15.0)
    s.add_argument("--delay", type=float, default=15.0)
    s.add_argument("--p-max", type=float, default=1200.0)
    s.add_argument("--noise", type=float, help="process noise std in kW (default 3%% of p_max)")
    s.add_argument("--scheme", choices=("exact", "euler"), default="exact")
    s.add_argument("--start", help="first day, ISO date (default 2013-01-14)")
    s.add_argument("--levels", help="true schedule as ten factor levels 1/2/3, e.g. 2222322222")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("features", parents=[common], help="write the input matrix of one model")
    s.set_defaults(func=cmd_features)

    s = sub.add_parser("relevance", parents=[common], help="Pearson screening of candidate inputs")
    s.set_defaults(func=cmd_relevance)

    s = sub.add_parser("train", parents=[common], help="train one network and save it")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("sweep", parents=[common], help="hidden-size sweep and model selection")
    s.add_argument("--sizes", help="restrict hidden sizes, e.g. 3-13")
    s.add_argument("--n-seeds", type=int, default=5, help="initializations per size, from --seed upward")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("oa-verify", parents=[common], help="check the strength of an orthogonal array")
    s.add_argument("--strength", type=int, help="strength to check (default: declared)")
    s.set_defaults(func=cmd_oa_verify)

    s = sub.add_parser("oa-run", parents=[common], help="robust-design search over schedule transitions")
    s.set_defaults(func=cmd_oa_run)

    for name, func, text in (
        ("predict", cmd_predict, "score a saved model on a dataset"),
        ("report", cmd_report, "CSV and SVG charts of predicted vs actual demand"),
    ):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--model-file", help="model JSON written by train")
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    needs = {"features": ("model",), "train": ("model", "hidden")}
    for flag in needs.get(args.command, ()):
        if getattr(args, flag) is None:
            parser.error(f"{args.command} needs --{flag}")
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except (CliError, ValueError, RuntimeError, OSError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"heatcast: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
