"""Matplotlib rendering of regions and robustness reports to files.

Geometry stays exact until the last moment: cells are clipped against the
viewing window with rational arithmetic and only converted to floats for
drawing.  Strict boundaries are dashed, closed ones solid, matching the usual
presentation of open half-planes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Polygon as MplPolygon

from .geometry import Cell, Region, lincon, lp_inf, lp_sup


def _clip_polygon(points, coeffs, rhs):
    """Sutherland-Hodgman clip against sum(coeffs*pt) <= rhs, exact."""

    def inside(pt):
        return coeffs[0] * pt[0] + coeffs[1] * pt[1] <= rhs

    def intersect(p, q):
        fp = coeffs[0] * p[0] + coeffs[1] * p[1] - rhs
        fq = coeffs[0] * q[0] + coeffs[1] * q[1] - rhs
        t = fp / (fp - fq)
        return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

    out = []
    n = len(points)
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        pin, qin = inside(p), inside(q)
        if pin:
            out.append(p)
            if not qin:
                out.append(intersect(p, q))
        elif qin:
            out.append(intersect(p, q))
    return out


def cell_window_polygon(cell: Cell, xvar: str, yvar: str, window) -> list[tuple[float, float]]:
    """Clip the cell to the window rectangle; strictness is ignored for area."""
    x0, x1, y0, y1 = (Fraction(w) for w in window)
    poly = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    for con in cell.constraints:
        cmap = con.coeff_map()
        extra = set(cmap) - {xvar, yvar}
        if extra:
            raise ValueError(f"cell mentions non-plot variables {extra}")
        a, b = cmap.get(xvar, Fraction(0)), cmap.get(yvar, Fraction(0))
        pieces = []
        if con.rel in ("<", "<="):
            pieces.append(((a, b), con.rhs))
        elif con.rel in (">", ">="):
            pieces.append(((-a, -b), -con.rhs))
        else:
            pieces.append(((a, b), con.rhs))
            pieces.append(((-a, -b), -con.rhs))
        for coeffs, rhs in pieces:
            poly = _clip_polygon(poly, coeffs, rhs)
            if not poly:
                return []
    return [(float(x), float(y)) for x, y in poly]


def auto_window(regions: Sequence[Region], pad: Fraction = Fraction(1)) -> tuple:
    xs, ys = [], []
    for reg in regions:
        xvar, yvar = reg.variables[:2]
        for func in (lp_inf, lp_sup):
            for var, acc in ((xvar, xs), (yvar, ys)):
                value, _ = func(reg, var)
                if value not in (math.inf, -math.inf):
                    acc.append(value)
    if not xs:
        xs = [Fraction(-5), Fraction(5)]
    if not ys:
        ys = [Fraction(-5), Fraction(5)]
    span_x = max(xs) - min(xs) or Fraction(2)
    span_y = max(ys) - min(ys) or Fraction(2)
    return (
        min(xs) - span_x / 4 - pad,
        max(xs) + span_x / 4 + pad,
        min(ys) - span_y / 4 - pad,
        max(ys) + span_y / 4 + pad,
    )


def render_regions(
    path: str,
    layers: Sequence[tuple[str, Region, str]],
    window=None,
    title: str | None = None,
):
    """Draw labeled 2-variable regions to a file (format from the extension)."""
    if window is None:
        window = auto_window([reg for _, reg, _ in layers])
    fig, ax = plt.subplots(figsize=(6, 5))
    seen_labels = set()
    for label, reg, color in layers:
        xvar, yvar = reg.variables[:2]
        for cell in reg.cells:
            pts = cell_window_polygon(cell, xvar, yvar, window)
            if len(pts) < 3:
                continue
            ax.add_patch(
                MplPolygon(
                    pts,
                    closed=True,
                    facecolor=color,
                    alpha=0.3,
                    edgecolor=color,
                    label=None if label in seen_labels else label,
                )
            )
            seen_labels.add(label)
            for con in cell.constraints:
                if con.rel in ("<", ">"):
                    boundary = Cell((lincon(dict(con.coeffs), "=", con.rhs),))
                    seg = cell_window_polygon(boundary, xvar, yvar, window)
                    if len(seg) >= 2:
                        ax.plot([p[0] for p in seg], [p[1] for p in seg], linestyle="--", color=color, linewidth=1)
    if layers:
        ax.set_xlabel(layers[0][1].variables[0])
        ax.set_ylabel(layers[0][1].variables[1])
    ax.set_xlim(float(window[0]), float(window[1]))
    ax.set_ylim(float(window[2]), float(window[3]))
    ax.axhline(0, color="gray", linewidth=0.5)
    ax.axvline(0, color="gray", linewidth=0.5)
    if title:
        ax.set_title(title)
    if seen_labels:
        ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_margins(path: str, rows, title: str = "perturbation margins"):
    """Per-sample margin plot for a robustness report."""
    fig, ax = plt.subplots(figsize=(6, 4))
    by_check: dict[str, list] = {}
    for row in rows:
        by_check.setdefault(row.check, []).append(row)
    for check, items in sorted(by_check.items()):
        ax.plot(
            [r.sample_index for r in items],
            [float(r.margin) for r in items],
            marker="o",
            linestyle="-",
            label=check,
        )
    ax.axhline(0, color="red", linewidth=1)
    ax.set_xlabel("sample")
    ax.set_ylabel("margin")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
