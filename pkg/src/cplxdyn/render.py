"""SVG figure rendering for the complex-x plane.

Every artist carries a stable SVG id so downstream tooling can count and
style elements: trajectory-<k> (dashed), separatrix-<k> (solid),
turning-point-<k> (filled dot), pole-<k> (hollow circle), and
transit-grid-0 for raster scans.  Markers outside the requested region
are dropped before plotting; a figure with no visible data raises
EmptyPlot instead of writing an empty file.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import EmptyPlot
from .transit import GridScanResult

Region = tuple[float, float, float, float]

__all__ = ["render_figure"]

_TRAJ_COLOR = "#1f5fa8"
_SEP_COLOR = "#b03030"


def _in_region(z: complex, region: Region) -> bool:
    re_min, re_max, im_min, im_max = region
    return re_min <= z.real <= re_max and im_min <= z.imag <= im_max


def _finite(points: Iterable[complex]) -> list[complex]:
    return [z for z in points
            if math.isfinite(z.real) and math.isfinite(z.imag)]


def _curve_visible(points: Sequence[complex], region: Region) -> bool:
    return any(_in_region(z, region) for z in points)


def _grid_overlaps(grid: GridScanResult, region: Region) -> bool:
    a, b, c, d = grid.region
    re_min, re_max, im_min, im_max = region
    return a < re_max and b > re_min and c < im_max and d > im_min


def render_figure(out_path: str | Path, *, region: Region,
                  trajectories: Sequence[Sequence[complex]] = (),
                  separatrices: Sequence[Sequence[complex]] = (),
                  turning_points: Sequence[complex] = (),
                  poles: Sequence[complex] = (),
                  grid: GridScanResult | None = None,
                  title: str | None = None) -> None:
    """Write an SVG of curves and markers over the rectangle ``region``."""
    re_min, re_max, im_min, im_max = region
    if not (re_min < re_max and im_min < im_max):
        raise ValueError("region must satisfy re_min < re_max and im_min < im_max")

    curves_t = [_finite(c) for c in trajectories]
    curves_s = [_finite(c) for c in separatrices]
    marks_tp = [z for z in turning_points if _in_region(z, region)]
    marks_pole = [z for z in poles if _in_region(z, region)]

    visible = (
        any(_curve_visible(c, region) for c in curves_t)
        or any(_curve_visible(c, region) for c in curves_s)
        or bool(marks_tp) or bool(marks_pole)
        or (grid is not None and _grid_overlaps(grid, region))
    )
    if not visible:
        raise EmptyPlot("no data intersects the render region")

    fig, ax = plt.subplots(figsize=(6.4, 6.4 * (im_max - im_min) / (re_max - re_min)
                                    if re_max > re_min else 6.4))
    try:
        if grid is not None:
            a, b, c, d = grid.region
            ny, nx = grid.times.shape
            xs = np.linspace(a, b, nx + 1)
            ys = np.linspace(c, d, ny + 1)
            masked = np.ma.masked_invalid(grid.times)
            mesh = ax.pcolormesh(xs, ys, masked, cmap="viridis", shading="flat")
            mesh.set_gid("transit-grid-0")
            fig.colorbar(mesh, ax=ax, label="transit time")

        for k, pts in enumerate(curves_t):
            line, = ax.plot([z.real for z in pts], [z.imag for z in pts],
                            linestyle="--", linewidth=1.0, color=_TRAJ_COLOR)
            line.set_gid(f"trajectory-{k}")
        for k, pts in enumerate(curves_s):
            line, = ax.plot([z.real for z in pts], [z.imag for z in pts],
                            linestyle="-", linewidth=1.4, color=_SEP_COLOR)
            line.set_gid(f"separatrix-{k}")
        for k, z in enumerate(marks_tp):
            dot, = ax.plot([z.real], [z.imag], marker="o", markersize=6,
                           color="black", linestyle="none")
            dot.set_gid(f"turning-point-{k}")
        for k, z in enumerate(marks_pole):
            ring, = ax.plot([z.real], [z.imag], marker="o", markersize=8,
                            markerfacecolor="none", markeredgecolor="black",
                            markeredgewidth=1.4, linestyle="none")
            ring.set_gid(f"pole-{k}")

        ax.set_xlim(re_min, re_max)
        ax.set_ylim(im_min, im_max)
        ax.set_xlabel("Re x")
        ax.set_ylabel("Im x")
        if title:
            ax.set_title(title)
        ax.set_aspect("auto")
        fig.savefig(out_path, format="svg")
    finally:
        plt.close(fig)
