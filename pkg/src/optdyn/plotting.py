"""Native SVG rendering of trajectories: no plotting dependency, so figure
output is byte-reproducible from a run's flags alone.

Layout: left panel traces the iterate path (x1, y1) inside the unit square,
right panel plots the duality gap against the iteration count, optionally on
a log scale.  Values are converted to floats for pixel placement only; data
files are the precise record of a run.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional, Sequence

_W, _H = 900, 420
_PANEL = 320
_MARGIN_L, _MARGIN_T = 70, 50
_GAP_PANEL_X = 500


def _polyline(points: list[tuple[float, float]], color: str, width: str = "1") -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{pts}"/>'


def _text(x: float, y: float, s: str, size: int = 12, anchor: str = "middle") -> str:
    return (
        f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" '
        f'font-family="sans-serif" text-anchor="{anchor}">{s}</text>'
    )


def render_trajectory_svg(
    records: Sequence,
    *,
    title: str = "",
    log_gap: bool = False,
    nash: Optional[tuple[float, float]] = None,
) -> str:
    """Render recorded iterates to an SVG string (two panels)."""
    if not records:
        raise ValueError("cannot plot an empty trajectory")
    path_pts = []
    gap_pts = []
    for r in records:
        x1 = float(r.x[0])
        y1 = float(r.y[0])
        path_pts.append((x1, y1))
        gap_pts.append((r.t, float(r.gap)))

    def sq_px(x: float, y: float) -> tuple[float, float]:
        return (_MARGIN_L + x * _PANEL, _MARGIN_T + (1.0 - y) * _PANEL)

    t_max = max(t for t, _ in gap_pts)
    gaps = [g for _, g in gap_pts]
    if log_gap:
        positive = [g for g in gaps if g > 0.0]
        g_floor = min(positive) if positive else 1e-30
        g_lo = math.log10(max(g_floor, 1e-300))
        g_hi = math.log10(max(max(gaps), g_floor * 10))
        if g_hi <= g_lo:
            g_hi = g_lo + 1.0

        def g_coord(g: float) -> float:
            gl = math.log10(g) if g > 0 else g_lo
            return (gl - g_lo) / (g_hi - g_lo)

        g_label_lo, g_label_hi = f"1e{g_lo:.0f}", f"1e{g_hi:.0f}"
    else:
        g_hi = max(max(gaps), 1e-30)

        def g_coord(g: float) -> float:
            return g / g_hi

        g_label_lo, g_label_hi = "0", f"{g_hi:.3g}"

    def gap_px(t: int, g: float) -> tuple[float, float]:
        fx = _GAP_PANEL_X + (t / t_max) * _PANEL
        fy = _MARGIN_T + (1.0 - min(max(g_coord(g), 0.0), 1.0)) * _PANEL
        return fx, fy

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        parts.append(_text(_W / 2, 24, title, size=15))

    # left: iterate path in the unit square
    x0, y0 = sq_px(0, 1)
    parts.append(
        f'<rect x="{x0}" y="{y0}" width="{_PANEL}" height="{_PANEL}" '
        f'fill="none" stroke="black"/>'
    )
    parts.append(_polyline([sq_px(x, y) for x, y in path_pts], "#1f6fb2"))
    sx, sy = sq_px(*path_pts[0])
    parts.append(f'<circle cx="{sx:.2f}" cy="{sy:.2f}" r="4" fill="#1f6fb2"/>')
    if nash is not None:
        nx, ny = sq_px(*nash)
        parts.append(f'<circle cx="{nx:.2f}" cy="{ny:.2f}" r="4" fill="black"/>')
        parts.append(_text(nx + 10, ny - 6, "equilibrium", size=11, anchor="start"))
    parts.append(_text(_MARGIN_L + _PANEL / 2, _MARGIN_T + _PANEL + 34, "x[1]"))
    parts.append(_text(_MARGIN_L - 34, _MARGIN_T + _PANEL / 2, "y[1]"))
    for v, lbl in ((0.0, "0"), (1.0, "1")):
        px, py = sq_px(v, 0)
        parts.append(_text(px, _MARGIN_T + _PANEL + 16, lbl, size=11))
        px, py = sq_px(0, v)
        parts.append(_text(_MARGIN_L - 12, py + 4, lbl, size=11))

    # right: duality gap vs iteration
    parts.append(
        f'<rect x="{_GAP_PANEL_X}" y="{_MARGIN_T}" width="{_PANEL}" height="{_PANEL}" '
        f'fill="none" stroke="black"/>'
    )
    parts.append(_polyline([gap_px(t, g) for t, g in gap_pts], "#b23b3b"))
    parts.append(_text(_GAP_PANEL_X + _PANEL / 2, _MARGIN_T + _PANEL + 34, "iteration t"))
    parts.append(
        _text(_GAP_PANEL_X - 34, _MARGIN_T + _PANEL / 2, "gap" + (" (log)" if log_gap else ""))
    )
    parts.append(_text(_GAP_PANEL_X - 12, _MARGIN_T + _PANEL + 4, g_label_lo, size=11, anchor="end"))
    parts.append(_text(_GAP_PANEL_X - 12, _MARGIN_T + 10, g_label_hi, size=11, anchor="end"))
    parts.append(_text(_GAP_PANEL_X, _MARGIN_T + _PANEL + 16, "1", size=11))
    parts.append(_text(_GAP_PANEL_X + _PANEL, _MARGIN_T + _PANEL + 16, str(t_max), size=11))

    parts.append("</svg>")
    return "\n".join(parts)


def write_trajectory_svg(records: Sequence, path: str | Path, **kwargs) -> None:
    Path(path).write_text(render_trajectory_svg(records, **kwargs) + "\n")
