"""Text tables of portfolio results and native SVG box plots."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .features import FEATURE_NAMES


def size_table(sizes: dict, dimensions: Sequence[int], multipliers: Sequence[int]) -> str:
    """Grid of minimal portfolio sizes; ``sizes[(d, m)]`` is an int or None."""
    head = ["dim"] + [f"{m}d" for m in multipliers]
    rows = [head]
    for d in dimensions:
        row = [str(d)]
        for m in multipliers:
            v = sizes.get((d, m), "")
            row.append("-" if v is None else str(v) if v != "" else "")
        rows.append(row)
    return _grid(rows)


def portfolio_table(entries: Sequence[tuple]) -> str:
    """One line per passing subset; ``entries`` holds ``(d, m, subsets)``."""
    rows = [["dim", "n"] + list(FEATURE_NAMES)]
    for d, m, subsets in entries:
        if not subsets:
            rows.append([str(d), f"{m}d"] + ["-"] * len(FEATURE_NAMES))
        for s in subsets:
            rows.append([str(d), f"{m}d"] + ["X" if f in s else "" for f in FEATURE_NAMES])
    return _grid(rows)


def _grid(rows) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for k, r in enumerate(rows):
        lines.append(" | ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
        if k == 0:
            lines.append("-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# box plots


def box_stats(values) -> dict:
    """Quartiles, 1.5 IQR whiskers clipped to the data, and outliers."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("box plot of an empty group")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    return {
        "n": int(v.size), "q1": float(q1), "median": float(med), "q3": float(q3),
        "whisker_lo": float(inside.min()), "whisker_hi": float(inside.max()),
        "outliers": [float(x) for x in v[(v < lo_fence) | (v > hi_fence)]],
    }


def _f(x: float) -> str:
    return f"{x:.2f}"


def boxplot_svg(groups: Sequence[tuple], title: str = "", ylabel: str = "",
                ylim: tuple | None = None, width_per_box: int = 28, height: int = 320) -> str:
    """SVG with one box per ``(label, values)`` group."""
    if not groups:
        raise ValueError("no groups to plot")
    stats = [(str(lbl), box_stats(vals)) for lbl, vals in groups]
    if ylim is None:
        lo = min(min(s["whisker_lo"], *s["outliers"]) if s["outliers"] else s["whisker_lo"]
                 for _, s in stats)
        hi = max(max(s["whisker_hi"], *s["outliers"]) if s["outliers"] else s["whisker_hi"]
                 for _, s in stats)
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        ylim = (lo - pad, hi + pad)
    y0, y1 = ylim
    left, top, bottom = 60, 30, 50
    plot_h = height - top - bottom
    W = left + width_per_box * len(stats) + 20

    def Y(v):
        return top + plot_h * (1.0 - (v - y0) / (y1 - y0))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{height}" '
           f'viewBox="0 0 {W} {height}" font-family="sans-serif" font-size="10">',
           f'<rect x="0" y="0" width="{W}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{W / 2:.1f}" y="16" text-anchor="middle" font-size="12">'
                   f'{escape(title)}</text>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>')
    out.append(f'<line x1="{left}" y1="{top + plot_h}" x2="{W - 10}" y2="{top + plot_h}" '
               f'stroke="black"/>')
    for t in np.linspace(y0, y1, 5):
        out.append(f'<line x1="{left - 4}" y1="{_f(Y(t))}" x2="{left}" y2="{_f(Y(t))}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{_f(Y(t) + 3)}" text-anchor="end">{t:.3g}</text>')
    if ylabel:
        out.append(f'<text x="14" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {top + plot_h / 2:.1f})">{escape(ylabel)}</text>')
    half = width_per_box * 0.3
    for k, (lbl, s) in enumerate(stats):
        cx = left + width_per_box * (k + 0.5)
        out.append(f'<g class="box" data-label="{escape(lbl)}" data-n="{s["n"]}">')
        out.append(f'<line x1="{_f(cx)}" y1="{_f(Y(s["whisker_hi"]))}" x2="{_f(cx)}" '
                   f'y2="{_f(Y(s["q3"]))}" stroke="black"/>')
        out.append(f'<line x1="{_f(cx)}" y1="{_f(Y(s["q1"]))}" x2="{_f(cx)}" '
                   f'y2="{_f(Y(s["whisker_lo"]))}" stroke="black"/>')
        for w in ("whisker_lo", "whisker_hi"):
            out.append(f'<line x1="{_f(cx - half / 2)}" y1="{_f(Y(s[w]))}" '
                       f'x2="{_f(cx + half / 2)}" y2="{_f(Y(s[w]))}" stroke="black"/>')
        out.append(f'<rect x="{_f(cx - half)}" y="{_f(Y(s["q3"]))}" width="{_f(2 * half)}" '
                   f'height="{_f(max(Y(s["q1"]) - Y(s["q3"]), 0.5))}" fill="#9ecae1" '
                   f'stroke="black"/>')
        out.append(f'<line x1="{_f(cx - half)}" y1="{_f(Y(s["median"]))}" x2="{_f(cx + half)}" '
                   f'y2="{_f(Y(s["median"]))}" stroke="#d62728" stroke-width="2"/>')
        for o in s["outliers"]:
            out.append(f'<circle cx="{_f(cx)}" cy="{_f(Y(o))}" r="1.5" fill="none" '
                       f'stroke="black"/>')
        out.append("</g>")
        out.append(f'<text x="{_f(cx)}" y="{top + plot_h + 14}" text-anchor="middle">'
                   f'{escape(lbl)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def feature_boxplot(ds, feature: str, title: str | None = None) -> str:
    """One box per function of ``feature`` over all rows of ``ds``."""
    groups = [(str(int(f)), ds.column(feature)[ds.labels == f]) for f in np.unique(ds.labels)]
    return boxplot_svg(groups, title or f"{feature} d={ds.dimension} n={ds.sample_size}",
                       ylabel=feature)


def accuracy_boxplot(reports: Sequence[tuple], title: str = "accuracy") -> str:
    """One box per ``(label, accuracies)``."""
    return boxplot_svg(reports, title, ylabel="accuracy")
