"""Minimal self-contained SVG output: Wigner heatmaps and EP line plots."""

from __future__ import annotations

from typing import Dict, Sequence
from xml.sax.saxutils import escape

import numpy as np

_NEG = (33, 102, 172)
_POS = (178, 24, 43)
_MID = (255, 255, 255)


def diverging_color(t: float) -> str:
    """Blue for t=-1, white for t=0, red for t=+1."""
    t = float(np.clip(t, -1.0, 1.0))
    end = _POS if t >= 0 else _NEG
    s = abs(t)
    r, g, b = (round(_MID[i] + (end[i] - _MID[i]) * s) for i in range(3))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(values, q, p, title: str = "") -> str:
    """Heatmap with a color scale symmetric about zero; q runs left to right,
    p bottom to top."""
    values = np.asarray(values, dtype=float)
    nq, np_ = values.shape
    vmax = float(np.max(np.abs(values))) or 1.0
    cell = max(1, min(4, 640 // max(nq, np_)))
    left, top = 50, 30
    w, h = nq * cell, np_ * cell
    bar_x = left + w + 20
    width, height = bar_x + 80, top + h + 40
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{left}" y="20" font-family="sans-serif" font-size="13">{escape(title)}</text>',
        f'<g shape-rendering="crispEdges">',
    ]
    for i in range(nq):
        for j in range(np_):
            x = left + i * cell
            y = top + (np_ - 1 - j) * cell
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{diverging_color(values[i, j] / vmax)}"/>'
            )
    out.append("</g>")
    for k in range(101):
        t = 1.0 - k / 50.0
        y = top + k * h / 101
        out.append(
            f'<rect x="{bar_x}" y="{y:.2f}" width="15" height="{h / 101 + 0.5:.2f}" fill="{diverging_color(t)}"/>'
        )
    for t, label in ((1.0, f"{vmax:.3g}"), (0.0, "0"), (-1.0, f"{-vmax:.3g}")):
        y = top + (1 - t) / 2 * h
        out.append(f'<text x="{bar_x + 20}" y="{y + 4:.1f}" font-family="sans-serif" font-size="11">{label}</text>')
    out.append(
        f'<text x="{left}" y="{top + h + 18}" font-family="sans-serif" font-size="11">'
        f"q in [{q[0]:.3g}, {q[-1]:.3g}], p in [{p[0]:.3g}, {p[-1]:.3g}]</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_plot(x: Sequence[float], series: Dict[str, Sequence[float]], xlabel: str, ylabel: str, title: str = "") -> str:
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    left, top, w, h = 60, 30, 480, 300
    xmin, xmax = float(x.min()), float(x.max())
    if xmax == xmin:
        xmax = xmin + 1.0
    allv = np.concatenate(list(ys.values()))
    ymin, ymax = min(0.0, float(allv.min())), float(allv.max())
    if ymax == ymin:
        ymax = ymin + 1.0

    def sx(v):
        return left + (v - xmin) / (xmax - xmin) * w

    def sy(v):
        return top + h - (v - ymin) / (ymax - ymin) * h

    colors = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{left + w + 140}" height="{top + h + 50}">',
        f'<text x="{left}" y="20" font-family="sans-serif" font-size="13">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="#333"/>',
    ]
    for k, (name, y) in enumerate(ys.items()):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        color = colors[k % len(colors)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        out.append(
            f'<text x="{left + w + 10}" y="{top + 15 + 16 * k}" font-family="sans-serif" font-size="11" '
            f'fill="{color}">{escape(name)}</text>'
        )
    for v in (xmin, xmax):
        out.append(f'<text x="{sx(v) - 10:.1f}" y="{top + h + 15}" font-family="sans-serif" font-size="11">{v:.3g}</text>')
    for v in (ymin, ymax):
        out.append(f'<text x="{left - 45}" y="{sy(v) + 4:.1f}" font-family="sans-serif" font-size="11">{v:.3g}</text>')
    out.append(f'<text x="{left + w / 2 - 20:.0f}" y="{top + h + 35}" font-family="sans-serif" font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="10" y="{top - 8}" font-family="sans-serif" font-size="12">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
