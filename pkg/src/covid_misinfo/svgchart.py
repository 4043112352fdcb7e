"""Minimal deterministic SVG line charts for dated series."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

WIDTH = 800
HEIGHT = 400
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _fmt(x):
    return f"{x:.2f}"


def _nice_step(span, target=5):
    if span <= 0:
        return 1.0
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


def _tick_label(v):
    if float(v).is_integer():
        return f"{int(v):,}"
    return f"{v:.3g}"


def render_line_chart(traces, title="", y_label=""):
    """Render ``traces`` (list of ``(label, [(date, value), ...])``) as SVG text.

    One ``<polyline>`` per non-empty trace, one vertex per point. Output
    depends only on the input, so identical data gives identical bytes.
    """
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    x0, y0 = MARGIN_LEFT, MARGIN_TOP + plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="black"/>',
        f'<line class="axis" x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}" stroke="black"/>',
        f'<text x="{x0 + plot_w // 2}" y="{HEIGHT - 8}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">date</text>',
        f'<text x="16" y="{MARGIN_TOP + plot_h // 2}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 16 {MARGIN_TOP + plot_h // 2})">{escape(y_label)}</text>',
    ]

    points = [(d, float(v)) for _, pts in traces for d, v in pts]
    if not points:
        out.append(f'<text class="no-data" x="{x0 + plot_w // 2}" y="{MARGIN_TOP + plot_h // 2}" '
                   f'text-anchor="middle" font-family="sans-serif" font-size="14">no data</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    d_min = min(d for d, _ in points)
    d_max = max(d for d, _ in points)
    days = max((d_max - d_min).days, 1)
    v_min = min(0.0, min(v for _, v in points))
    v_max = max(v for _, v in points)
    step = _nice_step(v_max - v_min)
    v_lo = math.floor(v_min / step) * step
    v_hi = math.ceil(v_max / step) * step
    if v_hi == v_lo:
        v_hi = v_lo + step

    def sx(d):
        return x0 + plot_w * (d - d_min).days / days

    def sy(v):
        return y0 - plot_h * (v - v_lo) / (v_hi - v_lo)

    n_ticks = int(round((v_hi - v_lo) / step))
    for i in range(n_ticks + 1):
        v = v_lo + i * step
        y = _fmt(sy(v))
        out.append(f'<line x1="{x0 - 4}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{x0 - 6}" y="{y}" text-anchor="end" dominant-baseline="middle" '
                   f'font-family="sans-serif" font-size="10">{_tick_label(v)}</text>')

    n_xticks = min(6, days + 1)
    seen = set()
    for i in range(n_xticks):
        offset = round(i * days / max(n_xticks - 1, 1))
        if offset in seen:
            continue
        seen.add(offset)
        d = d_min.fromordinal(d_min.toordinal() + offset)
        x = _fmt(sx(d))
        out.append(f'<line x1="{x}" y1="{y0}" x2="{x}" y2="{y0 + 4}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{y0 + 16}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="10">{d.isoformat()}</text>')

    for i, (label, pts) in enumerate(traces):
        color = COLORS[i % len(COLORS)]
        ly = MARGIN_TOP + 14 * i
        out.append(f'<text x="{x0 + plot_w - 4}" y="{ly + 4}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11" fill="{color}">{escape(label)}</text>')
        if not pts:
            continue
        coords = " ".join(f"{_fmt(sx(d))},{_fmt(sy(float(v)))}" for d, v in pts)
        out.append(f'<polyline data-label={quoteattr(label)} fill="none" stroke="{color}" '
                   f'stroke-width="1.5" points="{coords}"/>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
