"""Minimal, dependency-free SVG line plots.

One polyline series per file with axes, tick marks and labels. Output is
deterministic: no timestamps, fixed float formatting, stable attribute order.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_WIDTH = 640
_HEIGHT = 440
_MARGIN_LEFT = 72
_MARGIN_RIGHT = 24
_MARGIN_TOP = 28
_MARGIN_BOTTOM = 56


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi == lo:
        hi = lo + 1.0
    raw = (hi - lo) / (n - 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s for s in (1.0, 2.0, 2.5, 5.0, 10.0) if s * mag >= raw) * mag
    start = np.ceil(lo / step) * step
    vals = np.arange(start, hi + step / 2, step)
    return vals[(vals >= lo - 1e-12 * step) & (vals <= hi + 1e-12 * step)]


def write_polyline_svg(path, x, y, xlabel: str = "", ylabel: str = "",
                       title: str = "") -> None:
    """Write a single-series line plot to an SVG file."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 1:
        raise ValueError("x and y must be equal-length, nonempty")
    x_lo, x_hi = float(np.min(x)), float(np.max(x))
    y_lo, y_hi = float(np.min(y)), float(np.max(y))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        pad = abs(y_lo) * 0.1 or 1.0
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    px0, px1 = _MARGIN_LEFT, _WIDTH - _MARGIN_RIGHT
    py0, py1 = _HEIGHT - _MARGIN_BOTTOM, _MARGIN_TOP

    def sx(v):
        return px0 + (v - x_lo) / (x_hi - x_lo) * (px1 - px0)

    def sy(v):
        return py0 + (v - y_lo) / (y_hi - y_lo) * (py1 - py0)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{px0}" y1="{py0}" x2="{px1}" y2="{py0}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{px0}" y1="{py0}" x2="{px0}" y2="{py1}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for tv in _ticks(x_lo, x_hi):
        tx = _fmt(sx(tv))
        lines.append(f'<line x1="{tx}" y1="{py0}" x2="{tx}" y2="{py0 + 5}" '
                     'stroke="black" stroke-width="1"/>')
        lines.append(f'<text x="{tx}" y="{py0 + 20}" font-size="12" '
                     f'text-anchor="middle" font-family="monospace">'
                     f'{_fmt(tv)}</text>')
    for tv in _ticks(y_lo, y_hi):
        ty = _fmt(sy(tv))
        lines.append(f'<line x1="{px0 - 5}" y1="{ty}" x2="{px0}" y2="{ty}" '
                     'stroke="black" stroke-width="1"/>')
        lines.append(f'<text x="{px0 - 8}" y="{ty}" font-size="12" '
                     f'text-anchor="end" dominant-baseline="middle" '
                     f'font-family="monospace">{_fmt(tv)}</text>')
    pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(x, y))
    lines.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" '
                 'stroke-width="1.5"/>')
    if xlabel:
        lines.append(f'<text x="{(px0 + px1) // 2}" y="{_HEIGHT - 12}" '
                     'font-size="13" text-anchor="middle" '
                     f'font-family="monospace">{xlabel}</text>')
    if ylabel:
        cy = (py0 + py1) // 2
        lines.append(f'<text x="16" y="{cy}" font-size="13" '
                     f'text-anchor="middle" font-family="monospace" '
                     f'transform="rotate(-90 16 {cy})">{ylabel}</text>')
    if title:
        lines.append(f'<text x="{(px0 + px1) // 2}" y="18" font-size="13" '
                     f'text-anchor="middle" font-family="monospace">'
                     f'{title}</text>')
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n")
