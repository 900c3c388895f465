"""Minimal SVG line charts with shaded bands, no plotting dependency.

Output is deterministic: fixed precision coordinates, no timestamps or
generator metadata, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import numpy as np

from . import fileio

PALETTE = ("#1f6fb4", "#d9541f", "#2a8f4b", "#8452a8", "#b01e4e")
BAND_PALETTE = ("#aecde8", "#f5c4a8", "#b4dec2", "#d3bfe6", "#ecafc4")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def line_chart(x, lines, bands=(), *, diagonal: bool = False,
               x_label: str = "", y_label: str = "", title: str = "",
               width: int = 640, height: int = 440) -> str:
    """Render series sharing one x axis.

    ``lines``: (label, y-values) pairs. ``bands``: (label, lower, upper)
    triples drawn behind the lines, first band most opaque.
    """
    x = np.asarray(x, dtype=np.float64)
    margin_l, margin_r, margin_t, margin_b = 64, 16, 34 if title else 16, 48
    pw = width - margin_l - margin_r
    ph = height - margin_t - margin_b

    ys = [np.asarray(y, dtype=np.float64) for _, y in lines]
    for _, lo, hi in bands:
        ys.append(np.asarray(lo, dtype=np.float64))
        ys.append(np.asarray(hi, dtype=np.float64))
    ally = np.concatenate(ys) if ys else np.array([0.0, 1.0])
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = float(ally.min()), float(ally.max())
    if diagonal:
        y_lo, y_hi = min(y_lo, x_lo), max(y_hi, x_hi)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(v):
        return margin_l + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return margin_t + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="14">{title}</text>')

    # axes and ticks
    out.append(f'<rect x="{margin_l}" y="{margin_t}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="#888" stroke-width="1"/>')
    for tv in _ticks(x_lo, x_hi):
        px = sx(tv)
        out.append(f'<line x1="{_fmt(px)}" y1="{margin_t + ph}" x2="{_fmt(px)}" '
                   f'y2="{margin_t + ph + 5}" stroke="#888"/>')
        out.append(f'<text x="{_fmt(px)}" y="{margin_t + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{tv:.3g}</text>')
    for tv in _ticks(y_lo, y_hi):
        py = sy(tv)
        out.append(f'<line x1="{margin_l - 5}" y1="{_fmt(py)}" x2="{margin_l}" '
                   f'y2="{_fmt(py)}" stroke="#888"/>')
        out.append(f'<text x="{margin_l - 8}" y="{_fmt(py + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{tv:.3g}</text>')
    if x_label:
        out.append(f'<text x="{margin_l + pw / 2:.0f}" y="{height - 8}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{x_label}</text>')
    if y_label:
        cy = margin_t + ph / 2
        out.append(f'<text x="14" y="{cy:.0f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12" '
                   f'transform="rotate(-90 14 {cy:.0f})">{y_label}</text>')

    for bi, (_, lo, hi) in enumerate(bands):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        pts = [f"{_fmt(sx(xv))},{_fmt(sy(yv))}" for xv, yv in zip(x, hi)]
        pts += [f"{_fmt(sx(xv))},{_fmt(sy(yv))}" for xv, yv in zip(x[::-1], lo[::-1])]
        color = BAND_PALETTE[bi % len(BAND_PALETTE)]
        out.append(f'<polygon points="{" ".join(pts)}" fill="{color}" '
                   f'fill-opacity="0.5" stroke="none"/>')

    if diagonal:
        out.append(f'<line x1="{_fmt(sx(x_lo))}" y1="{_fmt(sy(x_lo))}" '
                   f'x2="{_fmt(sx(x_hi))}" y2="{_fmt(sy(x_hi))}" '
                   f'stroke="#999" stroke-width="1" stroke-dasharray="5,4"/>')

    for li, (_, y) in enumerate(lines):
        y = np.asarray(y, dtype=np.float64)
        pts = " ".join(f"{_fmt(sx(xv))},{_fmt(sy(yv))}" for xv, yv in zip(x, y))
        color = PALETTE[li % len(PALETTE)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.8"/>')

    # legend for named series
    entries = [(label, PALETTE[i % len(PALETTE)], "line")
               for i, (label, _) in enumerate(lines) if label]
    entries += [(label, BAND_PALETTE[i % len(BAND_PALETTE)], "band")
                for i, (label, _, _) in enumerate(bands) if label]
    ly = margin_t + 14
    for label, color, kind in entries:
        lx = margin_l + pw - 130
        if kind == "line":
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                       f'stroke="{color}" stroke-width="2"/>')
        else:
            out.append(f'<rect x="{lx}" y="{ly - 10}" width="22" height="10" '
                       f'fill="{color}" fill-opacity="0.5"/>')
        out.append(f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
                   f'font-size="11">{label}</text>')
        ly += 16

    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_chart(path, svg_text: str):
    fileio.atomic_write_text(path, svg_text)
