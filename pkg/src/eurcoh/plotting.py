"""Four-panel SVG rendering of a sweep CSV, written without a plotting library."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import MalformedCsv
from .infotheory import DELTA_VARIANTS
from .sweep import SweepTable, analytic_row, read_sweep_csv

EUR_SERIES = ("elhs", "erhs1", "erhs2")
CUR_SERIES = ("clhs", "crhs1", "crhs2")
COLORS = {"elhs": "#1f77b4", "erhs1": "#2ca02c", "erhs2": "#d62728",
          "clhs": "#1f77b4", "crhs1": "#2ca02c", "crhs2": "#d62728"}
MARKERS = {"elhs": "circle", "clhs": "circle", "erhs1": "square", "crhs1": "square",
           "erhs2": "triangle", "crhs2": "triangle"}
DENSE_POINTS = 91

PANEL_W, PANEL_H = 360, 260
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 56, 16, 30, 40


@dataclass(frozen=True)
class Panel:
    tag: str
    branch_value: float
    series: tuple[str, ...]
    xs: list[float]
    ys: dict[str, list[float]]
    errs: dict[str, list[float]]
    dense_x: list[float]
    dense_y: dict[str, list[float]]


def _branches(table: SweepTable) -> list[float]:
    key = "p" if table.kind == "theta" else "theta_deg"
    seen: list[float] = []
    for r in table.rows:
        if r[key] not in seen:
            seen.append(r[key])
    return seen


def _dense_curves(kind: str, branch: float, lo: float, hi: float, variant: str, series):
    xs = list(np.linspace(lo, hi, DENSE_POINTS)) if hi > lo else [lo]
    ys: dict[str, list[float]] = {s: [] for s in series}
    for x in xs:
        p, theta = (branch, x) if kind == "theta" else (x, branch)
        row = analytic_row(min(max(p, 0.0), 1.0), min(max(theta, 0.0), 90.0), variant)
        for s in series:
            ys[s].append(row.values[s])
    return xs, ys


def build_panels(table: SweepTable) -> list[Panel]:
    if table.kind not in ("theta", "p"):
        raise MalformedCsv(f"unknown sweep kind {table.kind!r}")
    variant = table.meta.get("delta_variant", "consistent")
    if variant not in DELTA_VARIANTS:
        raise MalformedCsv(f"unknown delta variant {variant!r}")
    missing = [c for c in EUR_SERIES + CUR_SERIES if c not in table.columns]
    if missing:
        raise MalformedCsv(f"sweep CSV lacks columns {missing}")
    xkey, bkey = ("theta_deg", "p") if table.kind == "theta" else ("p", "theta_deg")
    branches = _branches(table)[:2]
    panels = []
    for letter, bval in zip("ab", branches):
        rows = [r for r in table.rows if r[bkey] == bval]
        xs = [r[xkey] for r in rows]
        if any(not math.isfinite(x) for x in xs):
            raise MalformedCsv("non-finite grid value")
        for idx, series in (("1", EUR_SERIES), ("2", CUR_SERIES)):
            ys = {s: [r[s] for r in rows] for s in series}
            errs = {s: [r[f"{s}_std"] for r in rows] for s in series if f"{s}_std" in table.columns}
            dx, dy = _dense_curves(table.kind, bval, min(xs), max(xs), variant, series)
            panels.append(Panel(f"({letter}{idx})", bval, series, xs, ys, errs, dx, dy))
    return panels


class _Axes:
    def __init__(self, ox, oy, xlo, xhi, ylo, yhi):
        self.ox, self.oy = ox, oy
        self.xlo, self.xhi = xlo, (xhi if xhi > xlo else xlo + 1.0)
        self.ylo, self.yhi = ylo, (yhi if yhi > ylo else ylo + 1.0)
        self.w = PANEL_W - MARGIN_L - MARGIN_R
        self.h = PANEL_H - MARGIN_T - MARGIN_B

    def x(self, v):
        return self.ox + MARGIN_L + (v - self.xlo) / (self.xhi - self.xlo) * self.w

    def y(self, v):
        return self.oy + MARGIN_T + (self.yhi - v) / (self.yhi - self.ylo) * self.h


def _ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    step = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if m * step >= raw:
            step *= m
            break
    start = math.ceil(lo / step - 1e-9) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out


def _marker(kind, x, y, color):
    r = 3.5
    if kind == "circle":
        return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}"/>'
    if kind == "square":
        return f'<rect x="{x - r:.2f}" y="{y - r:.2f}" width="{2 * r}" height="{2 * r}" fill="none" stroke="{color}"/>'
    pts = f"{x:.2f},{y - r:.2f} {x - r:.2f},{y + r:.2f} {x + r:.2f},{y + r:.2f}"
    return f'<polygon points="{pts}" fill="none" stroke="{color}"/>'


def _panel_svg(panel: Panel, ox: float, oy: float, kind: str) -> list[str]:
    vals = [v for s in panel.series for v in panel.ys[s] + panel.dense_y[s] if math.isfinite(v)]
    for s, e in panel.errs.items():
        vals += [y + sd for y, sd in zip(panel.ys[s], e) if math.isfinite(y + sd)]
        vals += [y - sd for y, sd in zip(panel.ys[s], e) if math.isfinite(y - sd)]
    ylo, yhi = (min(vals), max(vals)) if vals else (0.0, 1.0)
    pad = 0.05 * (yhi - ylo or 1.0)
    ax = _Axes(ox, oy, min(panel.xs), max(panel.xs), ylo - pad, yhi + pad)
    out = [f'<g id="panel-{panel.tag.strip("()")}">']
    x0, x1 = ax.x(ax.xlo), ax.x(ax.xhi)
    y0, y1 = ax.y(ax.ylo), ax.y(ax.yhi)
    out.append(f'<rect x="{x0:.2f}" y="{y1:.2f}" width="{x1 - x0:.2f}" height="{y0 - y1:.2f}" '
               f'fill="none" stroke="black"/>')
    for t in _ticks(ax.xlo, ax.xhi):
        out.append(f'<line x1="{ax.x(t):.2f}" y1="{y0:.2f}" x2="{ax.x(t):.2f}" y2="{y0 + 4:.2f}" stroke="black"/>')
        out.append(f'<text x="{ax.x(t):.2f}" y="{y0 + 16:.2f}" font-size="10" text-anchor="middle">{t:g}</text>')
    for t in _ticks(ax.ylo, ax.yhi):
        out.append(f'<line x1="{x0 - 4:.2f}" y1="{ax.y(t):.2f}" x2="{x0:.2f}" y2="{ax.y(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 6:.2f}" y="{ax.y(t) + 3:.2f}" font-size="10" text-anchor="end">{t:g}</text>')
    xlabel = "theta (deg)" if kind == "theta" else "p"
    blabel = f"p = {panel.branch_value:g}" if kind == "theta" else f"theta = {panel.branch_value:g} deg"
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{y0 + 32:.2f}" font-size="11" text-anchor="middle">'
               f'{escape(xlabel)}</text>')
    out.append(f'<text x="{ox + 8:.2f}" y="{oy + 18:.2f}" font-size="13" font-weight="bold">'
               f'{escape(panel.tag)}</text>')
    out.append(f'<text x="{x1:.2f}" y="{oy + 18:.2f}" font-size="11" text-anchor="end">{escape(blabel)}</text>')

    for s in panel.series:
        color = COLORS[s]
        pts = " ".join(f"{ax.x(x):.2f},{ax.y(y):.2f}" for x, y in zip(panel.dense_x, panel.dense_y[s])
                       if math.isfinite(y))
        out.append(f'<polyline class="analytic" data-series="{s}" points="{pts}" fill="none" '
                   f'stroke="{color}" stroke-width="1.2"/>')
        for i, (x, y) in enumerate(zip(panel.xs, panel.ys[s])):
            if not math.isfinite(y):
                continue
            if s in panel.errs and math.isfinite(panel.errs[s][i]):
                e = panel.errs[s][i]
                out.append(f'<line class="errorbar" x1="{ax.x(x):.2f}" y1="{ax.y(y - e):.2f}" '
                           f'x2="{ax.x(x):.2f}" y2="{ax.y(y + e):.2f}" stroke="{color}"/>')
            out.append(_marker(MARKERS[s], ax.x(x), ax.y(y), color))

    lx, ly = x0 + 8, y1 + 12
    for k, s in enumerate(panel.series):
        out.append(_marker(MARKERS[s], lx, ly + 13 * k, COLORS[s]))
        out.append(f'<text x="{lx + 8:.2f}" y="{ly + 13 * k + 3:.2f}" font-size="10">{s}</text>')
    out.append("</g>")
    return out


def render_svg(table: SweepTable) -> str:
    panels = build_panels(table)
    cols = 2
    nrows = max(1, math.ceil(len(panels) / cols))
    width, height = cols * PANEL_W, nrows * PANEL_H
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for k, panel in enumerate(panels):
        out += _panel_svg(panel, (k % cols) * PANEL_W, (k // cols) * PANEL_H, table.kind)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_csv_text(text: str) -> str:
    """Render sweep CSV text to an SVG document."""
    return render_svg(read_sweep_csv(text))
