"""Minimal deterministic SVG output: line charts and grid heat maps.

Hand-rolled on purpose: the bytes depend only on the data, so charts can be
diffed in CI.  Coordinates and labels are formatted with %.6g; series longer
than ``max_points`` are thinned at a fixed stride (keeping the final point).
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

__all__ = ["line_chart", "stacked_chart", "heatmap", "PALETTE"]

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"]

_MARGIN_L = 72
_MARGIN_R = 16
_MARGIN_T = 34
_MARGIN_B = 46
_FONT = 'font-family="sans-serif"'

Series = tuple[str, Sequence[float], Sequence[float]]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _data_range(values) -> tuple[float, float]:
    lo = min(values)
    hi = max(values)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("cannot scale non-finite data")
    if hi == lo:
        pad = 1.0 if hi == 0.0 else abs(hi) * 0.1
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    stepf = (hi - lo) / (n - 1)
    return [lo + i * stepf for i in range(n)]


def _thin(xs: Sequence[float], ys: Sequence[float], max_points: int):
    if len(xs) <= max_points:
        return list(xs), list(ys)
    stride = -(-len(xs) // max_points)
    tx = list(xs[::stride])
    ty = list(ys[::stride])
    if tx[-1] != xs[-1] or ty[-1] != ys[-1]:
        tx.append(xs[-1])
        ty.append(ys[-1])
    return tx, ty


def _draw_panel(
    parts: list[str],
    left: float,
    top: float,
    plot_w: float,
    plot_h: float,
    series: Sequence[Series],
    x_label: str,
    y_label: str,
    vlines: Sequence[float],
    max_points: int,
    draw_x_ticks: bool,
) -> None:
    if not series or any(len(xs) == 0 for _, xs, _ in series):
        raise ValueError("a panel needs at least one non-empty series")
    x_lo, x_hi = _data_range([v for _, xs, _ in series for v in (min(xs), max(xs))])
    y_lo, y_hi = _data_range([v for _, _, ys in series for v in (min(ys), max(ys))])

    def sx(v: float) -> float:
        return left + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v: float) -> float:
        return top + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts.append(
        f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(plot_w)}" height="{_fmt(plot_h)}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    for tv in _ticks(x_lo, x_hi):
        px = sx(tv)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(top + plot_h)}" x2="{_fmt(px)}" '
            f'y2="{_fmt(top + plot_h + 5)}" stroke="#333333"/>'
        )
        if draw_x_ticks:
            parts.append(
                f'<text x="{_fmt(px)}" y="{_fmt(top + plot_h + 18)}" {_FONT} '
                f'font-size="11" text-anchor="middle">{_fmt(tv)}</text>'
            )
    for tv in _ticks(y_lo, y_hi):
        py = sy(tv)
        parts.append(
            f'<line x1="{_fmt(left - 5)}" y1="{_fmt(py)}" x2="{_fmt(left)}" '
            f'y2="{_fmt(py)}" stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{_fmt(left - 8)}" y="{_fmt(py + 4)}" {_FONT} '
            f'font-size="11" text-anchor="end">{_fmt(tv)}</text>'
        )
    if x_label and draw_x_ticks:
        parts.append(
            f'<text x="{_fmt(left + plot_w / 2)}" y="{_fmt(top + plot_h + 36)}" {_FONT} '
            f'font-size="12" text-anchor="middle">{_esc(x_label)}</text>'
        )
    if y_label:
        ly = top + plot_h / 2
        parts.append(
            f'<text x="16" y="{_fmt(ly)}" {_FONT} font-size="12" '
            f'text-anchor="middle" transform="rotate(-90 16 {_fmt(ly)})">{_esc(y_label)}</text>'
        )
    for tv in vlines:
        if x_lo <= tv <= x_hi:
            px = sx(tv)
            parts.append(
                f'<line x1="{_fmt(px)}" y1="{_fmt(top)}" x2="{_fmt(px)}" '
                f'y2="{_fmt(top + plot_h)}" stroke="#999999" stroke-dasharray="4,3"/>'
            )
    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        txs, tys = _thin(xs, ys, max_points)
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(txs, tys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.4"/>'
        )
        lx = left + 10
        lyy = top + 14 + 16 * i
        parts.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(lyy - 4)}" x2="{_fmt(lx + 18)}" '
            f'y2="{_fmt(lyy - 4)}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_fmt(lx + 24)}" y="{_fmt(lyy)}" {_FONT} font-size="11">{_esc(label)}</text>'
        )


def _svg_open(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width // 2}" y="20" {_FONT} font-size="14" '
        f'text-anchor="middle">{_esc(title)}</text>',
    ]


def line_chart(
    path: str | Path,
    title: str,
    series: Sequence[Series],
    x_label: str = "",
    y_label: str = "",
    vlines: Sequence[float] = (),
    width: int = 760,
    height: int = 420,
    max_points: int = 2000,
) -> None:
    """Write one chart with any number of (label, xs, ys) series."""
    parts = _svg_open(width, height, title)
    _draw_panel(
        parts,
        _MARGIN_L,
        _MARGIN_T,
        width - _MARGIN_L - _MARGIN_R,
        height - _MARGIN_T - _MARGIN_B,
        series,
        x_label,
        y_label,
        vlines,
        max_points,
        draw_x_ticks=True,
    )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def stacked_chart(
    path: str | Path,
    title: str,
    panels: Sequence[tuple[str, Sequence[Series]]],
    x_label: str = "",
    vlines: Sequence[float] = (),
    width: int = 760,
    panel_height: int = 240,
    max_points: int = 2000,
) -> None:
    """Write vertically stacked panels sharing the x axis; ``panels`` is a
    sequence of (y_label, series)."""
    if not panels:
        raise ValueError("stacked_chart needs at least one panel")
    n = len(panels)
    height = _MARGIN_T + n * panel_height + _MARGIN_B
    parts = _svg_open(width, height, title)
    plot_w = width - _MARGIN_L - _MARGIN_R
    gap = 26
    ph = panel_height - gap
    for i, (y_label, series) in enumerate(panels):
        top = _MARGIN_T + i * panel_height
        _draw_panel(
            parts,
            _MARGIN_L,
            top,
            plot_w,
            ph,
            series,
            x_label,
            y_label,
            vlines,
            max_points,
            draw_x_ticks=(i == n - 1),
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def heatmap(
    path: str | Path,
    title: str,
    x_values: Sequence[float],
    y_values: Sequence[float],
    cell_colors: Sequence[Sequence[str]],
    legend: Sequence[tuple[str, str]],
    x_label: str = "",
    y_label: str = "",
    width: int = 820,
    height: int = 480,
) -> None:
    """Write a colored grid: cell_colors[i][j] paints (x_values[i], y_values[j])."""
    legend_w = 190
    plot_w = width - _MARGIN_L - _MARGIN_R - legend_w
    plot_h = height - _MARGIN_T - _MARGIN_B
    nx, ny = len(x_values), len(y_values)
    cw = plot_w / nx
    ch = plot_h / ny
    parts = _svg_open(width, height, title)
    for i in range(nx):
        for j in range(ny):
            px = _MARGIN_L + i * cw
            py = _MARGIN_T + plot_h - (j + 1) * ch
            parts.append(
                f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{_fmt(cw)}" height="{_fmt(ch)}" '
                f'fill="{cell_colors[i][j]}"/>'
            )
    parts.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{_fmt(plot_w)}" height="{_fmt(plot_h)}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    for idx in range(0, nx, max(1, nx // 6)):
        px = _MARGIN_L + (idx + 0.5) * cw
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(_MARGIN_T + plot_h + 18)}" {_FONT} '
            f'font-size="11" text-anchor="middle">{_fmt(x_values[idx])}</text>'
        )
    for idx in range(0, ny, max(1, ny // 6)):
        py = _MARGIN_T + plot_h - (idx + 0.5) * ch
        parts.append(
            f'<text x="{_fmt(_MARGIN_L - 8)}" y="{_fmt(py + 4)}" {_FONT} '
            f'font-size="11" text-anchor="end">{_fmt(y_values[idx])}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{_fmt(_MARGIN_L + plot_w / 2)}" y="{height - 8}" {_FONT} '
            f'font-size="12" text-anchor="middle">{_esc(x_label)}</text>'
        )
    if y_label:
        ly = _MARGIN_T + plot_h / 2
        parts.append(
            f'<text x="16" y="{_fmt(ly)}" {_FONT} font-size="12" '
            f'text-anchor="middle" transform="rotate(-90 16 {_fmt(ly)})">{_esc(y_label)}</text>'
        )
    lx = _MARGIN_L + plot_w + 20
    for i, (label, color) in enumerate(legend):
        lyy = _MARGIN_T + 10 + 20 * i
        parts.append(f'<rect x="{lx}" y="{lyy}" width="14" height="14" fill="{color}"/>')
        parts.append(
            f'<text x="{lx + 20}" y="{lyy + 11}" {_FONT} font-size="11">{_esc(label)}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
