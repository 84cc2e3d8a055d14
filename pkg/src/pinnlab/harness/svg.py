"""Minimal self-contained SVG polyline charts (optionally log-scale y)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 40, 50

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f")

_FLOOR = 1e-16   # log-scale clip for zero/negative values


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / n))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * span:
        out.append(t)
        t += step
    return out


def _log_ticks(lo, hi):
    return [10.0 ** e for e in range(math.floor(lo), math.ceil(hi) + 1)]


def line_chart(path, series, title="", xlabel="", ylabel="", logy=True):
    """Write a polyline chart. ``series`` is a list of (label, xs, ys)."""
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys)]
    if not pts:
        raise ValueError("no data to plot")
    xs_all = [p[0] for p in pts]
    if logy:
        ys_all = [math.log10(max(p[1], _FLOOR)) for p in pts]
    else:
        ys_all = [p[1] for p in pts]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + pw * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        v = math.log10(max(y, _FLOOR)) if logy else y
        return MARGIN_T + ph * (1.0 - (v - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{escape(title)}</text>',
    ]
    ax = f'{MARGIN_L},{MARGIN_T} {MARGIN_L},{MARGIN_T + ph} ' \
         f'{MARGIN_L + pw},{MARGIN_T + ph}'
    parts.append(f'<polyline points="{ax}" fill="none" stroke="black"/>')

    for t in _ticks(x_lo, x_hi):
        x = px(t)
        parts.append(f'<line x1="{x:.1f}" y1="{MARGIN_T + ph}" x2="{x:.1f}" '
                     f'y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{MARGIN_T + ph + 18}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{t:g}</text>')
    yticks = _log_ticks(y_lo, y_hi) if logy else _ticks(y_lo, y_hi)
    for t in yticks:
        v = math.log10(t) if logy else t
        if not y_lo - 1e-9 <= v <= y_hi + 1e-9:
            continue
        y = MARGIN_T + ph * (1.0 - (v - y_lo) / (y_hi - y_lo))
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.1f}" '
                     f'x2="{MARGIN_L}" y2="{y:.1f}" stroke="black"/>')
        label = f"1e{int(round(math.log10(t)))}" if logy else f"{t:g}"
        parts.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.1f}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">{label}</text>')
    parts.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 12}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12">{escape(xlabel)}</text>')
    parts.append(f'<text x="18" y="{MARGIN_T + ph / 2:.1f}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12" transform="rotate(-90 18 '
                 f'{MARGIN_T + ph / 2:.1f})">{escape(ylabel)}</text>')

    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN_T + 16 * (i + 1)
        lx = MARGIN_L + pw + 10
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 22}" y="{ly}" font-family="sans-serif" '
                     f'font-size="11">{escape(label)}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
