"""Minimal static SVG plots: log-y line charts and scatter plots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
MARKERS = ("circle", "square", "diamond", "triangle")

W, H = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 30, 55


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=mag)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:g}"


def _marker(kind: str, x: float, y: float, color: str) -> str:
    if kind == "square":
        return f'<rect x="{x - 3.5:.2f}" y="{y - 3.5:.2f}" width="7" height="7" fill="{color}"/>'
    if kind == "diamond":
        return (f'<polygon points="{x:.2f},{y - 4.5:.2f} {x + 4.5:.2f},{y:.2f} '
                f'{x:.2f},{y + 4.5:.2f} {x - 4.5:.2f},{y:.2f}" fill="{color}"/>')
    if kind == "triangle":
        return (f'<polygon points="{x:.2f},{y - 4.5:.2f} {x + 4.5:.2f},{y + 4:.2f} '
                f'{x - 4.5:.2f},{y + 4:.2f}" fill="{color}"/>')
    return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" fill="{color}"/>'


def render(series: Sequence[Series], title: str, xlabel: str, ylabel: str,
           log_y: bool = False, lines: bool = True, y_floor: float = 1e-12) -> str:
    """Render ``series`` into an SVG document string."""
    pts = []
    for s in series:
        clean = []
        for x, y in zip(s.x, s.y):
            if y is None or not math.isfinite(y) or not math.isfinite(x):
                continue
            if log_y:
                if y <= 0:
                    continue
                y = math.log10(max(y, y_floor))
            clean.append((float(x), float(y)))
        pts.append(clean)
    xs = [p[0] for c in pts for p in c] or [0.0, 1.0]
    ys = [p[1] for c in pts for p in c] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if log_y:
        y0, y1 = math.floor(y0), math.ceil(y1)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return TOP + (1 - (y - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{LEFT + pw / 2:.1f}" y="18" text-anchor="middle" font-size="13">'
           f'{escape(title)}</text>']
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.2f}" y1="{TOP}" x2="{X:.2f}" y2="{TOP + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{X:.2f}" y="{TOP + ph + 15}" text-anchor="middle">{_fmt(t)}</text>')
    yt = range(int(y0), int(y1) + 1) if log_y else _ticks(y0, y1)
    for t in yt:
        Y = sy(t)
        lab = f"1e{int(t)}" if log_y else _fmt(t)
        out.append(f'<line x1="{LEFT}" y1="{Y:.2f}" x2="{LEFT + pw}" y2="{Y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 6}" y="{Y + 4:.2f}" text-anchor="end">{lab}</text>')
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{H - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(16,{TOP + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    for i, (s, c) in enumerate(zip(series, pts)):
        color = PALETTE[i % len(PALETTE)]
        marker = MARKERS[i % len(MARKERS)]
        if lines and len(c) > 1:
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in c)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        if not lines:
            out.extend(_marker(marker, sx(x), sy(y), color) for x, y in c)
        ly = TOP + 14 + 18 * i
        out.append(f'<line x1="{LEFT + pw + 12}" y1="{ly - 4}" x2="{LEFT + pw + 30}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="3"/>')
        out.append(f'<text x="{LEFT + pw + 35}" y="{ly}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
