"""CSV tables and dependency-free SVG line charts of predicted vs actual demand."""

from __future__ import annotations

import csv
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 900, 320
MARGIN = dict(left=60, right=20, top=30, bottom=40)
COLORS = {"actual": "#1f4e79", "predicted": "#c0504d"}


def fmt(v) -> str:
    """Stable text for a CSV cell."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(path, rows: list[dict]) -> None:
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([fmt(v) for v in r.values()])


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    step = 10 ** np.floor(np.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (m * step) <= n:
            step *= m
            break
    return np.arange(np.ceil(lo / step) * step, hi + step * 1e-9, step)


def line_chart(title: str, series: dict[str, np.ndarray], x_label: str = "sample", y_label: str = "kW") -> str:
    """One SVG document with a polyline per named series sharing the same x index."""
    n = max(len(v) for v in series.values())
    allv = np.concatenate([np.asarray(v, dtype=float) for v in series.values()])
    lo, hi = float(min(0.0, allv.min())), float(allv.max())
    if hi <= lo:
        hi = lo + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(i):
        return MARGIN["left"] + pw * i / max(n - 1, 1)

    def sy(v):
        return MARGIN["top"] + ph * (1 - (v - lo) / (hi - lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
    ]
    for t in _ticks(lo, hi):
        y = sy(t)
        out.append(f'<line x1="{MARGIN["left"]}" x2="{WIDTH - MARGIN["right"]}" y1="{y:.2f}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(
            f'<text x="{MARGIN["left"] - 6}" y="{y + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="10">{t:g}</text>'
        )
    x0, y0 = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<line x1="{x0}" x2="{WIDTH - MARGIN["right"]}" y1="{y0}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" x2="{x0}" y1="{MARGIN["top"]}" y2="{y0}" stroke="black"/>')
    out.append(
        f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 8}" text-anchor="middle" font-family="sans-serif" font-size="11">{escape(x_label)}</text>'
    )
    out.append(
        f'<text x="14" y="{HEIGHT / 2:.1f}" transform="rotate(-90 14 {HEIGHT / 2:.1f})" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{escape(y_label)}</text>'
    )
    for k, (name, vals) in enumerate(series.items()):
        vals = np.asarray(vals, dtype=float)
        pts = " ".join(f"{sx(i):.2f},{sy(v):.2f}" for i, v in enumerate(vals))
        color = COLORS.get(name, "#555")
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>')
        lx = WIDTH - MARGIN["right"] - 110
        ly = MARGIN["top"] + 14 * k + 6
        out.append(f'<line x1="{lx}" x2="{lx + 18}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 22}" y="{ly + 4}" font-family="sans-serif" font-size="10">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_prediction_report(out_dir, prediction, stem: str = "prediction") -> list[Path]:
    """Per-block CSV and SVG of actual vs predicted demand; returns the files written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    rows = [
        {"timestamp": str(t), "block": b, "actual_kw": a, "predicted_kw": p}
        for t, b, a, p in zip(prediction.timestamps, prediction.block, prediction.actual, prediction.predicted)
    ]
    path = out_dir / f"{stem}.csv"
    write_table(path, rows)
    written.append(path)
    for block in ("learn", "validation", "test"):
        sel = prediction.block == block
        if not sel.any():
            continue
        svg = line_chart(
            f"{block}: actual vs predicted heat demand",
            {"actual": prediction.actual[sel], "predicted": prediction.predicted[sel]},
            x_label=f"sample ({block} block)",
        )
        path = out_dir / f"{stem}_{block}.svg"
        path.write_text(svg, encoding="utf-8")
        written.append(path)
    return written
