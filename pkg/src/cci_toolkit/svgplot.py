"""Dependency-free SVG rendering of impulse-response panels.

One small panel per variable, laid out in two columns: a shaded confidence
band, the point response, and a zero line. Output is deterministic (fixed
float formatting), so rendered files are byte-stable across runs.
"""

from __future__ import annotations

import numpy as np

from .svar import IrfBundle

PANEL_W = 320
PANEL_H = 200
MARGIN = 42
GAP = 24
BAND_COLOR = "#7cc47f"
LINE_COLOR = "#1a4a8a"


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _panel(
    bundle: IrfBundle, var: int, x0: float, y0: float
) -> list[str]:
    h = bundle.horizons
    lo = bundle.lower[:, var]
    hi = bundle.upper[:, var]
    pt = bundle.point[:, var]
    ymin = float(min(lo.min(), pt.min(), 0.0))
    ymax = float(max(hi.max(), pt.max(), 0.0))
    if ymax == ymin:
        ymax = ymin + 1.0
    pad = 0.08 * (ymax - ymin)
    ymin -= pad
    ymax += pad
    inner_w = PANEL_W - MARGIN - 10
    inner_h = PANEL_H - MARGIN - 16

    def sx(t: float) -> float:
        return x0 + MARGIN + inner_w * t / max(len(h) - 1, 1)

    def sy(v: float) -> float:
        return y0 + 16 + inner_h * (ymax - v) / (ymax - ymin)

    band = " ".join(
        f"{_fmt(sx(t))},{_fmt(sy(hi[t]))}" for t in h
    ) + " " + " ".join(f"{_fmt(sx(t))},{_fmt(sy(lo[t]))}" for t in h[::-1])
    line = " ".join(f"{_fmt(sx(t))},{_fmt(sy(pt[t]))}" for t in h)

    parts = [
        f'<rect x="{_fmt(x0 + MARGIN)}" y="{_fmt(y0 + 16)}" width="{_fmt(inner_w)}" '
        f'height="{_fmt(inner_h)}" fill="none" stroke="#444" stroke-width="1"/>',
        f'<polygon points="{band}" fill="{BAND_COLOR}" fill-opacity="0.45" stroke="none"/>',
        f'<line x1="{_fmt(sx(0))}" y1="{_fmt(sy(0.0))}" x2="{_fmt(sx(len(h) - 1))}" '
        f'y2="{_fmt(sy(0.0))}" stroke="#888" stroke-width="0.8" stroke-dasharray="4,3"/>',
        f'<polyline points="{line}" fill="none" stroke="{LINE_COLOR}" stroke-width="1.6"/>',
        f'<text x="{_fmt(x0 + MARGIN)}" y="{_fmt(y0 + 11)}" font-size="12" '
        f'font-family="sans-serif">{bundle.names[var]}</text>',
    ]
    for t in range(0, len(h), max(len(h) // 6, 1)):
        parts.append(
            f'<text x="{_fmt(sx(t))}" y="{_fmt(y0 + PANEL_H - 8)}" font-size="9" '
            f'text-anchor="middle" font-family="sans-serif">{int(h[t])}</text>'
        )
    for v in np.linspace(ymin + pad, ymax - pad, 3):
        parts.append(
            f'<text x="{_fmt(x0 + MARGIN - 4)}" y="{_fmt(sy(float(v)) + 3)}" font-size="9" '
            f'text-anchor="end" font-family="sans-serif">{v:.2g}</text>'
        )
    return parts


def irf_svg(bundle: IrfBundle) -> str:
    """Render the bundle as a two-column grid of band+line panels."""
    n = len(bundle.names)
    cols = 2 if n > 1 else 1
    rows = -(-n // cols)
    width = cols * PANEL_W + (cols + 1) * GAP
    height = rows * PANEL_H + (rows + 1) * GAP + 18
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{GAP}" y="{GAP - 6}" font-size="12" font-family="sans-serif">'
        f"responses to a one-standard-deviation shock, "
        f"{int(round(bundle.level * 100))}% moving-block-bootstrap bands</text>",
    ]
    for var in range(n):
        row, col = divmod(var, cols)
        x0 = GAP + col * (PANEL_W + GAP)
        y0 = GAP + 12 + row * (PANEL_H + GAP)
        parts.extend(_panel(bundle, var, x0, y0))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
