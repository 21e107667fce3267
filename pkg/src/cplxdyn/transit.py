"""Transit times to the mirror point and their discontinuities.

A westward trajectory launched from x0 in the right half-plane is timed
to its closest approach to the mirror point -conj(x0).  Whether the path
ducks below the upper pole or detours above it splits starting points
into two classes whose transit times differ by a fixed jump; the boundary
between the classes is located by bisection and mapped over a grid.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoBracket, Unreached, UnsupportedPower
from .hamiltonian import Hamiltonian
from .potential import find_poles
from .trajectory import IntegratorConfig, Trajectory, _golden_min, integrate_toward

__all__ = [
    "GridScanResult",
    "TransitResult",
    "transit_discontinuity",
    "transit_grid",
    "transit_time",
]

BELOW = "BelowSeparatrix"
ABOVE = "AboveSeparatrix"
UNKNOWN = "Unknown"

# a transit counts only if the path gets this close to the mirror point
APPROACH_TOL = 1e-4

# probe trajectories near the discontinuity legitimately pass within
# ~5e-4 of the upper pole; the default guard of 1e-3 would eat them
PROBE_POLE_RADIUS = 1e-5


@dataclass(frozen=True)
class TransitResult:
    start: complex
    mirror_target: complex
    transit_time: float | None
    closest_approach: float
    branch_side: str = UNKNOWN

    def __post_init__(self) -> None:
        if self.transit_time is not None and self.transit_time <= 0:
            raise ValueError("transit_time must be positive when present")


def _branch_side(traj: Trajectory, h: Hamiltonian) -> str:
    """Above or below the upper pole, judged by the path's highest point."""
    uppers = [p.location.imag for p in find_poles(h.potential)
              if not p.essential and p.location.imag > 0]
    if not uppers:
        return UNKNOWN
    top = max(uppers)
    peak = max(s.x.imag for s in traj.samples)
    return ABOVE if peak > top else BELOW


def transit_time(
    h: Hamiltonian, x0: complex, cfg: IntegratorConfig | None = None
) -> TransitResult:
    """Time the westward trajectory from x0 to its mirror point -conj(x0).

    The closest approach is localized on the dense output; the transit is
    valid only if it comes within APPROACH_TOL.  Raises Unreached (with
    the partial result attached) when the trajectory terminates first.
    """
    if h.momentum_power != 2:
        raise UnsupportedPower("transit timing is defined for momentum power 2")
    if x0.real <= 0:
        raise DomainError("start must lie in the open right half-plane")
    target = -x0.conjugate()
    traj = integrate_toward(h, x0, -1 + 0j, cfg)

    k = min(range(len(traj.samples)), key=lambda i: abs(traj.samples[i].x - target))
    lo = traj.samples[max(k - 1, 0)].t
    hi = traj.samples[min(k + 1, len(traj.samples) - 1)].t

    def dist(t: float) -> float:
        return abs(traj.position_at(t) - target)

    if hi > lo:
        t_best, d_best = _golden_min(dist, lo, hi)
    else:
        t_best, d_best = traj.samples[k].t, abs(traj.samples[k].x - target)

    side = _branch_side(traj, h)
    if d_best > APPROACH_TOL:
        result = TransitResult(x0, target, None, d_best, side)
        raise Unreached(
            f"trajectory from {x0} stopped {d_best:.3g} away from {target} "
            f"({traj.termination.kind})",
            result,
        )
    return TransitResult(x0, target, t_best, d_best, side)


def _probe_cfg(cfg: IntegratorConfig | None) -> IntegratorConfig:
    cfg = cfg if cfg is not None else IntegratorConfig()
    if cfg.pole_radius > PROBE_POLE_RADIUS:
        cfg = dataclasses.replace(cfg, pole_radius=PROBE_POLE_RADIUS)
    return cfg


def transit_discontinuity(
    h: Hamiltonian,
    scan_line: tuple[complex, complex],
    cfg: IntegratorConfig | None = None,
) -> tuple[complex, float]:
    """Locate the transit-time jump along a segment by bisection.

    The segment endpoints must transit on opposite sides of the pole.
    Returns (location, jump) where the jump is the difference of transit
    times probed 1e-4 on either side of the located point.
    """
    cfg = _probe_cfg(cfg)
    a, b = scan_line
    span = b - a
    if span == 0:
        raise DomainError("scan segment is degenerate")

    def side_at(s: float) -> str | None:
        try:
            return transit_time(h, a + s * span, cfg).branch_side
        except Unreached:
            return None  # on (or tangled with) the boundary itself

    lo, hi = 0.0, 1.0
    side_lo, side_hi = side_at(lo), side_at(hi)
    if side_lo == side_hi or side_lo in (None, UNKNOWN) or side_hi in (None, UNKNOWN):
        raise NoBracket(
            f"segment ends classify as {side_lo} and {side_hi}; no crossing bracketed"
        )
    while abs(span) * (hi - lo) > 1e-6:
        # right at the boundary a probe can fail to transit (it rides the
        # knife edge into the pole or slingshots away); fan outward from
        # the midpoint until a classifiable probe shrinks the bracket
        w = hi - lo
        progressed = False
        for ds in (0.0, w / 16, -w / 16, w / 8, -w / 8, w / 4, -w / 4):
            s = 0.5 * (lo + hi) + ds
            if not lo < s < hi:
                continue
            side = side_at(s)
            if side == side_lo:
                lo = s
                progressed = True
                break
            if side == side_hi:
                hi = s
                progressed = True
                break
        if not progressed:
            break  # the rest of the bracket is boundary sliver; good enough
    s_star = 0.5 * (lo + hi)
    location = a + s_star * span
    unit = span / abs(span)
    t_plus = transit_time(h, location + 1e-4 * unit, cfg).transit_time
    t_minus = transit_time(h, location - 1e-4 * unit, cfg).transit_time
    return location, abs(t_plus - t_minus)


@dataclass(frozen=True)
class GridScanResult:
    region: tuple[float, float, float, float]
    resolution: tuple[int, int]
    times: np.ndarray  # shape (ny, nx); NaN marks unreached pixels
    boundary_estimate: list[complex]

    def __post_init__(self) -> None:
        ny, nx = self.times.shape
        if (nx, ny) != self.resolution:
            raise ValueError("times matrix does not match resolution")


def _scan_row(
    h: Hamiltonian, xs: np.ndarray, y: float, cfg: IntegratorConfig
) -> list[float]:
    """Transit times along one grid row; pure in its arguments."""
    row = []
    for x in xs:
        try:
            row.append(transit_time(h, complex(x, y), cfg).transit_time)
        except Unreached:
            row.append(math.nan)
    return row


def transit_grid(
    h: Hamiltonian,
    region: tuple[float, float, float, float],
    resolution: tuple[int, int],
    cfg: IntegratorConfig | None = None,
) -> GridScanResult:
    """Transit times at pixel centers over a right-half-plane rectangle.

    Neighboring pixels whose times differ by more than 0.5 contribute the
    midpoint of their shared edge to the discontinuity-locus estimate.
    """
    re_min, re_max, im_min, im_max = region
    if re_min < 0:
        raise DomainError("grid region must lie in the closed right half-plane")
    nx, ny = resolution
    if nx < 1 or ny < 1:
        raise DomainError("resolution must be at least 1x1")
    cfg = _probe_cfg(cfg)
    dx = (re_max - re_min) / nx
    dy = (im_max - im_min) / ny
    xs = re_min + (np.arange(nx) + 0.5) * dx
    ys = im_min + (np.arange(ny) + 0.5) * dy

    times = np.array([_scan_row(h, xs, y, cfg) for y in ys])

    boundary: list[complex] = []
    jump = 0.5
    for j in range(ny):
        for i in range(nx - 1):
            t0, t1 = times[j, i], times[j, i + 1]
            if math.isfinite(t0) and math.isfinite(t1) and abs(t1 - t0) > jump:
                boundary.append(complex(0.5 * (xs[i] + xs[i + 1]), ys[j]))
    for j in range(ny - 1):
        for i in range(nx):
            t0, t1 = times[j, i], times[j + 1, i]
            if math.isfinite(t0) and math.isfinite(t1) and abs(t1 - t0) > jump:
                boundary.append(complex(xs[i], 0.5 * (ys[j] + ys[j + 1])))
    return GridScanResult(region, resolution, times, boundary)
