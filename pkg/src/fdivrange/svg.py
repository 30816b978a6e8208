"""Deterministic SVG rendering of an atlas.

Hand-written markup with a fixed 800x600 viewport and every coordinate
rounded to 1e-3, so equal inputs give byte-identical files.  Samples are
binned to whole pixels before drawing; a half-million-sample atlas becomes
a few thousand light squares.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .jointrange import RangeAtlas

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 30, 30, 60


def _r(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _nice_ticks(hi: float, n: int = 5) -> list[float]:
    if hi <= 0:
        return [0.0]
    raw = hi / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    return [i * step for i in range(int(math.floor(hi / step + 1e-9)) + 1)]


def render_atlas_svg(
    atlas: RangeAtlas,
    exact: Optional[Callable[[float], float]] = None,
    title: Optional[str] = None,
) -> str:
    """SVG with sample scatter, hull outline and an optional dashed exact curve."""
    hull = atlas.hull
    x_hi = float(hull[:, 0].max()) if len(hull) else 1.0
    y_hi = float(hull[:, 1].max()) if len(hull) else 1.0
    x_hi = x_hi if x_hi > 0 else 1.0
    y_hi = y_hi if y_hi > 0 else 1.0
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x):
        return MARGIN_LEFT + np.asarray(x) / x_hi * pw

    def sy(y):
        return MARGIN_TOP + ph - np.asarray(y) / y_hi * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]

    # samples, pulled radially into the plotted box and binned to pixels
    fin = atlas.finite
    xs, ys = atlas.x[fin], atlas.y[fin]
    with np.errstate(divide="ignore"):
        s = np.minimum(1.0, np.minimum(x_hi / xs, y_hi / ys))
    px = np.floor(sx(xs * s)).astype(np.int64)
    py = np.floor(sy(ys * s)).astype(np.int64)
    cells = np.unique(np.column_stack([px, py]), axis=0)
    out.append('<g fill="#c8d4e3" stroke="none">')
    for cx, cy in cells.tolist():
        out.append(f'<rect x="{cx}" y="{cy}" width="1" height="1"/>')
    out.append("</g>")

    if len(hull) >= 2:
        pts = " ".join(f"{_r(a)},{_r(b)}" for a, b in zip(sx(hull[:, 0]).tolist(), sy(hull[:, 1]).tolist()))
        out.append(f'<polygon points="{pts}" fill="none" stroke="#1f3b73" stroke-width="1.5"/>')

    if exact is not None:
        grid = np.linspace(0.0, x_hi, 401)
        vals = np.array([exact(float(v)) for v in grid])
        keep = vals <= y_hi
        pts = " ".join(
            f"{_r(a)},{_r(b)}" for a, b in zip(sx(grid[keep]).tolist(), sy(vals[keep]).tolist())
        )
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="#b22222" stroke-width="1.5" '
            f'stroke-dasharray="6,4"/>'
        )

    # axes
    x0, y0 = MARGIN_LEFT, MARGIN_TOP + ph
    out.append('<g stroke="black" stroke-width="1">')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}"/>')
    out.append(f'<line x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}"/>')
    out.append("</g>")
    out.append('<g font-family="sans-serif" font-size="12" fill="black">')
    for t in _nice_ticks(x_hi):
        X = _r(float(sx(t)))
        out.append(f'<line x1="{X}" y1="{y0}" x2="{X}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{y0 + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_hi):
        Y = _r(float(sy(t)))
        out.append(f'<line x1="{x0 - 5}" y1="{Y}" x2="{x0}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">{t:g}</text>')
    out.append(
        f'<text x="{_r(x0 + pw / 2)}" y="{HEIGHT - 15}" text-anchor="middle">'
        f"D_{_escape(atlas.f.name)}</text>"
    )
    out.append(
        f'<text x="18" y="{_r(MARGIN_TOP + ph / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_r(MARGIN_TOP + ph / 2)})">D_{_escape(atlas.g.name)}</text>'
    )
    if title:
        out.append(f'<text x="{_r(WIDTH / 2)}" y="18" text-anchor="middle">{_escape(title)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
