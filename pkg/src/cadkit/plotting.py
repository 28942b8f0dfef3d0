"""Figure rendering for two-variable decompositions.

Renders the input curves (zero contours on a fixed grid) and one marker per
cell sample point, written as SVG.  Output is byte-identical across runs:
the SVG hash salt and metadata are pinned and everything drawn is a
deterministic function of the result.
"""
from __future__ import annotations

import csv
from fractions import Fraction
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .engine import CADResult, EngineError  # noqa: E402


def _float_sample(coord) -> float:
    lo, hi = coord.interval
    if lo != hi:
        coord.refine_below(Fraction(1, 512))
        lo, hi = coord.interval
    return float((lo + hi) / 2)


def render_plot(result: CADResult, out_path: str,
                viewport: Optional[Sequence[float]] = None,
                grid: int = 400,
                table_path: Optional[str] = None) -> dict:
    """Write the figure (and optionally a CSV of the cell samples).  Only
    two-variable results can be plotted."""
    if len(result.order) != 2:
        raise EngineError("plotting needs a two-variable result")
    if result.status != "OK":
        raise EngineError("cannot plot a FAIL result")
    pts = [(_float_sample(c.sample.coords[0]), _float_sample(c.sample.coords[1]))
           for c in result.cells]
    if viewport is None:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        viewport = (min(xs) - 1.0, max(xs) + 1.0, min(ys) - 1.0, max(ys) + 1.0)
    xmin, xmax, ymin, ymax = (float(v) for v in viewport)

    with plt.rc_context({"svg.hashsalt": "cadkit", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.0, 6.0))
        gx = [xmin + (xmax - xmin) * i / (grid - 1) for i in range(grid)]
        gy = [ymin + (ymax - ymin) * j / (grid - 1) for j in range(grid)]
        for name, poly in sorted(result.poly_names.items()):
            fn = _fast_eval(poly)
            z = [[fn(x, y) for x in gx] for y in gy]
            ax.contour(gx, gy, z, levels=[0.0], linewidths=1.0)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        markers = ax.scatter(xs, ys, s=9.0, zorder=3)
        markers.set_gid("cell-samples")
        ax.set_xlim(xmin, xmax)
        ax.set_ylim(ymin, ymax)
        ax.set_xlabel(result.order.vars[0])
        ax.set_ylabel(result.order.vars[1])
        ax.set_title(f"{result.algorithm}: {result.cell_count} cells")
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)

    if table_path:
        with open(table_path, "w", newline="") as fh:
            w = csv.writer(fh, delimiter=";")
            w.writerow(["index", "dimension", result.order.vars[0], result.order.vars[1]])
            for cell, (x, y) in zip(result.cells, pts):
                w.writerow([".".join(map(str, cell.index)), cell.dimension, x, y])
    return {"points": len(pts), "viewport": [xmin, xmax, ymin, ymax], "file": out_path}


def _fast_eval(poly):
    terms = [(e, float(c)) for e, c in poly.terms]

    def fn(x: float, y: float) -> float:
        total = 0.0
        for (ex, ey), c in terms:
            total += c * (x ** ex) * (y ** ey)
        return total

    return fn
