"""Figure-style outputs from results CSVs: box tables, depth curves, success curves.

SVG files are emitted from rect/line/text primitives with fixed-precision
coordinates, so identical record sets produce byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractViolation
from .harness import SUMMARY_FIELDS, aggregate

BOXPLOT_TABLE = "boxplot_table"
DEPTH_CURVE = "depth_curve"
SUCCESS_CURVE = "success_curve"
REPORT_KINDS = (BOXPLOT_TABLE, DEPTH_CURVE, SUCCESS_CURVE)

DEFAULT_GROUP_BY = ("optimizer", "depth", "backend")


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def boxplot_table(records, group_by=DEFAULT_GROUP_BY) -> list[dict]:
    return aggregate(records, tuple(group_by))


def boxplot_table_csv(records, group_by=DEFAULT_GROUP_BY) -> str:
    rows = boxplot_table(records, group_by)
    has_success = any(f"success_{f}" in row for row in rows for f in SUMMARY_FIELDS)
    fields = list(SUMMARY_FIELDS) + ([f"success_{f}" for f in SUMMARY_FIELDS] if has_success else [])
    header = list(group_by) + fields
    lines = [",".join(header)]
    for row in rows:
        cells = [str(row[k]) for k in group_by]
        for f in fields:
            value = row.get(f, "")
            cells.append(_fmt(value) if isinstance(value, float) else str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _curve_points(records, value_field: str) -> list[dict]:
    usable = [r for r in records if r.get(value_field) is not None]
    if not usable:
        raise ContractViolation(f"no records carry the {value_field!r} column")
    groups: dict[tuple, list[float]] = {}
    for r in usable:
        groups.setdefault((r["backend"], r["depth"]), []).append(float(r[value_field]))
    out = []
    for backend, depth in sorted(groups):
        values = np.array(groups[(backend, depth)], dtype=float)
        stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
        out.append({
            "backend": backend,
            "depth": depth,
            "mean": float(values.mean()),
            "stderr": stderr,
            "count": int(values.size),
        })
    return out


def depth_curve(records) -> list[dict]:
    """Mean final expectation vs depth, one series per backend."""
    return _curve_points(records, "final_expectation")


def success_curve(records) -> list[dict]:
    """Mean success probability vs depth; requires the success_prob column."""
    return _curve_points(records, "success_prob")


def curve_csv(points: list[dict]) -> str:
    lines = ["backend,depth,mean,stderr,count"]
    for p in points:
        lines.append(f"{p['backend']},{p['depth']},{_fmt(p['mean'])},{_fmt(p['stderr'])},{p['count']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SVG rendering.
# ---------------------------------------------------------------------------

_MARGIN_LEFT = 70.0
_MARGIN_TOP = 30.0
_MARGIN_BOTTOM = 60.0
_PLOT_HEIGHT = 280.0

_SERIES_COLORS = ("#1f6fb2", "#c23b22", "#3a913f", "#8a5fb0", "#b58a00")


class _SvgCanvas:
    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
            f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
            f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, color="#333333", width=1.0):
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width:.2f}"/>'
        )

    def rect(self, x, y, w, h, fill="none", stroke="#333333"):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def text(self, x, y, s, size=11, anchor="middle", color="#111111"):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" font-family="monospace" '
            f'text-anchor="{anchor}" fill="{color}">{_escape(s)}</text>'
        )

    def polyline(self, pts, color):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _value_scale(lo: float, hi: float):
    if hi <= lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    def to_y(v):
        return _MARGIN_TOP + _PLOT_HEIGHT * (hi - v) / (hi - lo)

    return lo, hi, to_y


def boxplot_svg(records, group_by=DEFAULT_GROUP_BY) -> str:
    rows = boxplot_table(records, group_by)
    slot = 80.0
    width = _MARGIN_LEFT + slot * len(rows) + 30.0
    height = _MARGIN_TOP + _PLOT_HEIGHT + _MARGIN_BOTTOM
    lo, hi, to_y = _value_scale(min(r["min"] for r in rows), max(r["max"] for r in rows))
    canvas = _SvgCanvas(width, height)
    canvas.line(_MARGIN_LEFT, _MARGIN_TOP, _MARGIN_LEFT, _MARGIN_TOP + _PLOT_HEIGHT)
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = lo + frac * (hi - lo)
        canvas.text(_MARGIN_LEFT - 8, to_y(v) + 4, _fmt(v), anchor="end", size=10)
        canvas.line(_MARGIN_LEFT - 4, to_y(v), _MARGIN_LEFT, to_y(v))
    for i, row in enumerate(rows):
        cx = _MARGIN_LEFT + slot * (i + 0.5)
        half = 22.0
        canvas.line(cx, to_y(row["min"]), cx, to_y(row["max"]), color="#777777")
        canvas.rect(cx - half, to_y(row["q3"]), 2 * half, to_y(row["q1"]) - to_y(row["q3"]),
                    fill="#cfe2f3", stroke="#1f6fb2")
        canvas.line(cx - half, to_y(row["median"]), cx + half, to_y(row["median"]),
                    color="#c23b22", width=1.5)
        label = "/".join(str(row[k]) for k in group_by)
        canvas.text(cx, _MARGIN_TOP + _PLOT_HEIGHT + 18 + 12 * (i % 2), label, size=9)
    return canvas.render()


def curve_svg(points: list[dict], ylabel: str) -> str:
    depths = sorted({p["depth"] for p in points})
    backends = sorted({p["backend"] for p in points})
    width = _MARGIN_LEFT + 60.0 * max(1, len(depths)) + 140.0
    height = _MARGIN_TOP + _PLOT_HEIGHT + _MARGIN_BOTTOM
    lo, hi, to_y = _value_scale(min(p["mean"] for p in points), max(p["mean"] for p in points))

    def to_x(depth):
        i = depths.index(depth)
        return _MARGIN_LEFT + 60.0 * (i + 0.5)

    canvas = _SvgCanvas(width, height)
    axis_y = _MARGIN_TOP + _PLOT_HEIGHT
    canvas.line(_MARGIN_LEFT, _MARGIN_TOP, _MARGIN_LEFT, axis_y)
    canvas.line(_MARGIN_LEFT, axis_y, width - 140.0, axis_y)
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = lo + frac * (hi - lo)
        canvas.text(_MARGIN_LEFT - 8, to_y(v) + 4, _fmt(v), anchor="end", size=10)
    for depth in depths:
        canvas.text(to_x(depth), axis_y + 16, str(depth), size=10)
    canvas.text(_MARGIN_LEFT + 30, height - 14, f"depth vs {ylabel}", anchor="start", size=11)
    for si, backend in enumerate(backends):
        color = _SERIES_COLORS[si % len(_SERIES_COLORS)]
        series = sorted((p for p in points if p["backend"] == backend), key=lambda p: p["depth"])
        canvas.polyline([(to_x(p["depth"]), to_y(p["mean"])) for p in series], color)
        for p in series:
            canvas.rect(to_x(p["depth"]) - 2, to_y(p["mean"]) - 2, 4, 4, fill=color, stroke=color)
        canvas.text(width - 130.0, _MARGIN_TOP + 16 + 16 * si, backend, anchor="start",
                    size=11, color=color)
    return canvas.render()
