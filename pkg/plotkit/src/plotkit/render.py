"""Deterministic CSV -> figure rendering.

Reads an experiment CSV (schema
family,n,d,eps,m,trials,reject_rate,mean_runtime_ms,seed), groups rows by
one column, and draws reject_rate against a chosen x column as one polyline
per group.  The SVG is assembled by hand with fixed float formatting, so
identical inputs always produce identical output text; PNG output (optional)
goes through matplotlib if it is installed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

from .errors import MissingColumn, NoData, PlotkitError

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 30, 50

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")

X_AXES = ("m", "n", "eps")
Y_COLUMN = "reject_rate"


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    x_axis: str
    group_by: str
    output: str
    format: str = "svg"

    def __post_init__(self):
        if self.x_axis not in X_AXES:
            raise MissingColumn(
                f"x axis must be one of {', '.join(X_AXES)}, "
                f"got {self.x_axis!r}")
        if self.format not in ("svg", "png"):
            raise PlotkitError(
                f"unsupported format {self.format!r}; use svg or png")


def read_rows(path: str, x_axis: str, group_by: str) -> list:
    """Parse the CSV into (group, x, y) triples, skipping NA rates."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for col in (x_axis, group_by, Y_COLUMN):
                if col not in header:
                    raise MissingColumn(f"column {col!r} not in CSV header "
                                        f"{header}")
            rows = []
            for rec in reader:
                if rec[Y_COLUMN] == "NA":
                    continue
                rows.append((rec[group_by], float(rec[x_axis]),
                             float(rec[Y_COLUMN])))
    except OSError as exc:
        raise NoData(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise NoData("NoData: the CSV has no plottable rows")
    return rows


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _scale(v, lo, hi, out_lo, out_hi):
    if hi == lo:
        return 0.5 * (out_lo + out_hi)
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)


def build_svg(rows, x_axis: str, group_by: str) -> str:
    """Assemble the SVG text: axes, one polyline + markers per group,
    and a legend, in deterministic (sorted) order."""
    groups: dict = {}
    for g, x, y in rows:
        groups.setdefault(g, []).append((x, y))
    for pts in groups.values():
        pts.sort()
    xs = [x for _, x, _ in rows]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, 1.0
    px_lo, px_hi = MARGIN_L, WIDTH - MARGIN_R
    py_lo, py_hi = HEIGHT - MARGIN_B, MARGIN_T  # y grows downward

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        # axes
        f'<line x1="{px_lo}" y1="{py_lo}" x2="{px_hi}" y2="{py_lo}" '
        'stroke="black"/>',
        f'<line x1="{px_lo}" y1="{py_lo}" x2="{px_lo}" y2="{py_hi}" '
        'stroke="black"/>',
        f'<text x="{(px_lo + px_hi) // 2}" y="{HEIGHT - 12}" '
        f'text-anchor="middle" font-size="14">{x_axis}</text>',
        f'<text x="18" y="{(py_lo + py_hi) // 2}" text-anchor="middle" '
        f'font-size="14" transform="rotate(-90 18 '
        f'{(py_lo + py_hi) // 2})">{Y_COLUMN}</text>',
    ]
    # y ticks at 0, 0.5, 1
    for yv in (0.0, 0.5, 1.0):
        py = _scale(yv, y_lo, y_hi, py_lo, py_hi)
        parts.append(f'<line x1="{px_lo - 4}" y1="{_fmt(py)}" '
                     f'x2="{px_lo}" y2="{_fmt(py)}" stroke="black"/>')
        parts.append(f'<text x="{px_lo - 8}" y="{_fmt(py + 4)}" '
                     f'text-anchor="end" font-size="12">{yv:g}</text>')
    # x ticks at min and max
    for xv in sorted({x_lo, x_hi}):
        px = _scale(xv, x_lo, x_hi, px_lo, px_hi)
        parts.append(f'<line x1="{_fmt(px)}" y1="{py_lo}" x2="{_fmt(px)}" '
                     f'y2="{py_lo + 4}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{py_lo + 18}" '
                     f'text-anchor="middle" font-size="12">{xv:g}</text>')
    for gi, name in enumerate(sorted(groups)):
        color = PALETTE[gi % len(PALETTE)]
        pts = groups[name]
        coords = " ".join(
            f"{_fmt(_scale(x, x_lo, x_hi, px_lo, px_hi))},"
            f"{_fmt(_scale(y, y_lo, y_hi, py_lo, py_hi))}"
            for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            parts.append(
                f'<circle cx="{_fmt(_scale(x, x_lo, x_hi, px_lo, px_hi))}" '
                f'cy="{_fmt(_scale(y, y_lo, y_hi, py_lo, py_hi))}" r="3" '
                f'fill="{color}"/>')
        ly = MARGIN_T + 16 + 18 * gi
        parts.append(f'<line x1="{px_hi + 10}" y1="{ly - 4}" '
                     f'x2="{px_hi + 30}" y2="{ly - 4}" stroke="{color}" '
                     'stroke-width="2"/>')
        parts.append(f'<text x="{px_hi + 36}" y="{ly}" font-size="12">'
                     f'{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(spec: PlotSpec) -> str:
    """Render the figure file described by the spec; returns the output path."""
    rows = read_rows(spec.input_csv, spec.x_axis, spec.group_by)
    svg = build_svg(rows, spec.x_axis, spec.group_by)
    if spec.format == "svg":
        with open(spec.output, "w", encoding="utf-8") as fh:
            fh.write(svg)
        return spec.output
    # PNG path: draw the same data through matplotlib
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise NoData("PNG output needs matplotlib "
                     "(pip install plotkit[png])") from exc
    groups: dict = {}
    for g, x, y in rows:
        groups.setdefault(g, []).append((x, y))
    fig, ax = plt.subplots(figsize=(WIDTH / 100, HEIGHT / 100))
    for gi, name in enumerate(sorted(groups)):
        pts = sorted(groups[name])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                color=PALETTE[gi % len(PALETTE)], label=str(name))
    ax.set_xlabel(spec.x_axis)
    ax.set_ylabel(Y_COLUMN)
    ax.set_ylim(0, 1)
    ax.legend()
    fig.savefig(spec.output, dpi=100)
    plt.close(fig)
    return spec.output
