"""Deflection of trajectories passing a simple turning point.

A probe trajectory grazing a simple turning point has its velocity
direction and its bearing from the turning point locked in the ratio
(n - 1)/n: locally x - x_tp ~ (t - tau)^n while xdot ~ (t - tau)^(n-1).
The deflection per full encirclement is therefore 360 (n - 1)/n degrees,
measured here as 360 * (velocity sweep)/(bearing sweep) between the
probe's entry into and exit from a circle around the turning point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ProbeMiss
from .hamiltonian import Hamiltonian, TurningPoint
from .trajectory import (
    IntegratorConfig,
    Trajectory,
    _bisect_time,
    _golden_min,
    integrate_toward,
)

__all__ = ["DeflectionProbe", "deflection_angle"]


@dataclass(frozen=True)
class DeflectionProbe:
    """Launch condition for a grazing pass of a turning point."""

    start: complex
    direction: complex
    capture_radius: float = 0.5  # measurement circle around the turning point
    graze_distance: float = 0.05  # probe must pass at least this close

    def __post_init__(self) -> None:
        if not 0 < self.graze_distance < self.capture_radius:
            raise ValueError("need 0 < graze_distance < capture_radius")


def _principal(a: float) -> float:
    return math.remainder(a, 2 * math.pi)


def _bearing_sweep(traj: Trajectory, center: complex, t_in: float, t_out: float,
                   knots: list[float], scale: float) -> float:
    """Unwrapped change of arg(x - center) from t_in to t_out.

    An interval's bearing increment is trusted only when (a) the chord is
    short next to both radii, so no wrap can hide between the endpoints,
    and (b) the radial motion does not reverse inside, so the path cannot
    dive toward the center and swing fast while returning to nearly the
    same spot (a head-on bounce does exactly that).  Untrusted intervals
    are bisected on the dense output.  Below 1e-9 * scale the radius is
    interpolation noise and the bearing carries no information, so such
    intervals are taken at face value; a probe that actually dives that
    deep fails the encirclement check downstream instead.
    """
    n = traj.hamiltonian.momentum_power
    floor = 1e-9 * scale

    def node(t: float) -> tuple[float, complex, float]:
        x, p = traj.state_at(t)
        w = x - center
        v = n * p ** (n - 1)
        return t, w, (w.conjugate() * v).real  # radial rate sign

    times = [t_in] + [t for t in knots if t_in < t < t_out] + [t_out]
    nodes = [node(t) for t in times]
    total = 0.0
    for k in range(len(nodes) - 1):
        stack = [(nodes[k], nodes[k + 1], 0)]
        while stack:
            (ta, wa, ra), (tb, wb, rb), depth = stack.pop()
            step = _principal(cmath.phase(wb) - cmath.phase(wa))
            short_chord = abs(wb - wa) <= 0.7 * min(abs(wa), abs(wb))
            no_dive = not (ra <= 0.0 <= rb)
            trusted = short_chord and no_dive and abs(step) <= math.pi / 2
            if trusted or depth >= 60 or min(abs(wa), abs(wb)) <= floor:
                total += step
                continue
            mid = node(0.5 * (ta + tb))
            stack.append((mid, (tb, wb, rb), depth + 1))
            stack.append(((ta, wa, ra), mid, depth + 1))
    return total


def _phase_at(traj: Trajectory, t: float) -> float:
    """Unwrapped momentum phase at an interior time.

    Anchored to the preceding sample's unwrapped phase and corrected by
    the principal-value difference against the dense output, which is
    exact because accepted steps never change the phase by pi/2 or more.
    """
    samples = traj.samples
    if t <= samples[0].t:
        return samples[0].phase
    for a, b in zip(samples, samples[1:]):
        if t <= b.t:
            _, p = traj.state_at(t)
            if p == 0:
                return a.phase
            return a.phase + _principal(cmath.phase(p) - cmath.phase(a.p))
    return samples[-1].phase


def deflection_angle(
    h: Hamiltonian,
    turning_point: TurningPoint,
    probe: DeflectionProbe,
    cfg: IntegratorConfig | None = None,
) -> float:
    """Measured deflection, in degrees, of a probe grazing a turning point.

    Returns 360 * (velocity-direction sweep)/(bearing sweep) across the
    measurement circle, which is insensitive to where exactly the circle
    is crossed.  Raises ProbeMiss if the probe never enters the circle,
    never grazes the turning point, or starts/terminates inside.
    """
    c = turning_point.location
    traj = integrate_toward(h, probe.start, probe.direction, cfg)
    samples = traj.samples
    dist = [abs(s.x - c) for s in samples]
    inside = [i for i, d in enumerate(dist) if d <= probe.capture_radius]
    if not inside:
        raise ProbeMiss("probe never entered the measurement circle")
    # perihelion can sit between samples (a head-on bounce passes through
    # the turning point mid-step); refine on the dense output
    k = min(range(len(dist)), key=dist.__getitem__)
    lo = samples[max(k - 1, 0)].t
    hi = samples[min(k + 1, len(samples) - 1)].t
    graze = min(dist) if hi <= lo else _golden_min(
        lambda t: abs(traj.position_at(t) - c), lo, hi)[1]
    if graze > probe.graze_distance:
        raise ProbeMiss(
            f"probe passed {graze:.3g} from the turning point; "
            f"needs {probe.graze_distance:g}"
        )
    i_in, i_out = inside[0], inside[-1]
    if i_in == 0:
        raise ProbeMiss("probe starts inside the measurement circle")
    if i_out == len(samples) - 1:
        raise ProbeMiss("probe terminated inside the measurement circle")

    def radial(t: float) -> float:
        return abs(traj.position_at(t) - c) - probe.capture_radius

    t_in = _bisect_time(radial, samples[i_in - 1].t, samples[i_in].t)
    t_out = _bisect_time(radial, samples[i_out].t, samples[i_out + 1].t)

    knots = [samples[i].t for i in range(i_in, i_out + 1)]
    sweep_w = _bearing_sweep(traj, c, t_in, t_out, knots, probe.capture_radius)
    if abs(sweep_w) < math.pi / 2:
        raise ProbeMiss("probe did not sweep around the turning point")
    sweep_v = (h.momentum_power - 1) * (_phase_at(traj, t_out) - _phase_at(traj, t_in))
    return 360.0 * sweep_v / sweep_w
