"""Minimal self-contained SVG line and point plots."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = (60, 20, 30, 50)  # left, right, top, bottom
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _ticks(lo: float, hi: float, k: int = 5):
    return np.linspace(lo, hi, k)


class Panel:
    def __init__(self, x0, y0, w, h, xlim, ylim):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim

    def px(self, x):
        lo, hi = self.xlim
        return self.x0 + (np.asarray(x, float) - lo) / (hi - lo) * self.w

    def py(self, y):
        lo, hi = self.ylim
        return self.y0 + self.h - (np.asarray(y, float) - lo) / (hi - lo) * self.h


def _limits(arrays):
    vals = np.concatenate([np.asarray(a, float).ravel() for a in arrays])
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        pad = abs(lo) * 0.05 or 0.5
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _axes(panel: Panel, title, xlabel, ylabel) -> list:
    out = [f'<rect x="{_fmt(panel.x0)}" y="{_fmt(panel.y0)}" width="{_fmt(panel.w)}" '
           f'height="{_fmt(panel.h)}" fill="none" stroke="#333"/>']
    for t in _ticks(*panel.xlim):
        x = panel.px(t)
        yb = panel.y0 + panel.h
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(yb)}" x2="{_fmt(x)}" y2="{_fmt(yb + 4)}" '
                   'stroke="#333"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(yb + 16)}" font-size="10" '
                   f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(*panel.ylim):
        y = panel.py(t)
        out.append(f'<line x1="{_fmt(panel.x0 - 4)}" y1="{_fmt(y)}" x2="{_fmt(panel.x0)}" '
                   f'y2="{_fmt(y)}" stroke="#333"/>')
        out.append(f'<text x="{_fmt(panel.x0 - 6)}" y="{_fmt(y + 3)}" font-size="10" '
                   f'text-anchor="end">{_fmt(t)}</text>')
    if title:
        out.append(f'<text x="{_fmt(panel.x0 + panel.w / 2)}" y="{_fmt(panel.y0 - 8)}" '
                   f'font-size="12" text-anchor="middle">{escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{_fmt(panel.x0 + panel.w / 2)}" y="{_fmt(panel.y0 + panel.h + 30)}" '
                   f'font-size="11" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        cx, cy = panel.x0 - 45, panel.y0 + panel.h / 2
        out.append(f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" font-size="11" text-anchor="middle" '
                   f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{escape(ylabel)}</text>')
    return out


def _series(panel: Panel, x, y, color, style) -> str:
    x, y = np.asarray(x, float), np.asarray(y, float)
    keep = np.isfinite(x) & np.isfinite(y)
    px, py = panel.px(x[keep]), panel.py(y[keep])
    if style == "points":
        return "".join(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="2" fill="{color}"/>'
                       for a, b in zip(px, py))
    if style == "bars":
        return "".join(f'<line x1="{_fmt(a)}" y1="{_fmt(panel.py(panel.ylim[0]))}" '
                       f'x2="{_fmt(a)}" y2="{_fmt(b)}" stroke="{color}" stroke-width="3"/>'
                       for a, b in zip(px, py))
    pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>'


def plot(series: Sequence[dict], title: str = "", xlabel: str = "", ylabel: str = "",
         width: int = WIDTH, height: int = HEIGHT) -> str:
    """One panel. Each series is a dict with x, y and optional label, style."""
    return panels([dict(series=series, title=title, xlabel=xlabel, ylabel=ylabel)],
                  width, height)


def panels(specs: Sequence[dict], width: int = WIDTH, height_each: int = HEIGHT) -> str:
    """Vertically stacked panels, each described like the arguments of :func:`plot`."""
    left, right, top, bottom = MARGIN
    total = height_each * len(specs)
    body = []
    for k, spec in enumerate(specs):
        series = spec["series"]
        xlim = _limits([s["x"] for s in series])
        ylim = _limits([s["y"] for s in series])
        if any(s.get("style") == "bars" for s in series):
            ylim = (min(0.0, ylim[0]), ylim[1])
        panel = Panel(left, k * height_each + top, width - left - right,
                      height_each - top - bottom, xlim, ylim)
        body += _axes(panel, spec.get("title"), spec.get("xlabel"), spec.get("ylabel"))
        for j, s in enumerate(series):
            color = COLORS[j % len(COLORS)]
            body.append(_series(panel, s["x"], s["y"], color, s.get("style", "line")))
            if s.get("label"):
                ly = panel.y0 + 14 + 14 * j
                body.append(f'<text x="{_fmt(panel.x0 + panel.w - 6)}" y="{_fmt(ly)}" '
                            f'font-size="10" text-anchor="end" fill="{color}">'
                            f'{escape(s["label"])}</text>')
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{total}" '
            f'viewBox="0 0 {width} {total}">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>'] + body
                     + ["</svg>"]) + "\n"
