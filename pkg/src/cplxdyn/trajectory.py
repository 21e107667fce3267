"""Trajectory integration with event detection and phase bookkeeping.

integrate() drives the Dormand-Prince stepper and watches for the six
ways a complex trajectory can end: escape past a radius, running into a
pole's guard circle, Zeno capture (asymptotic stall at a turning point),
closure onto the initial state (periodic orbit), and the time/step
budgets.  Along the way it maintains the continuously unwrapped argument
of p, the Riemann-sheet bookkeeping that same_sheet_intersections uses
to tell genuine self-intersections from crossings that only look like
intersections in the x projection.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Union

from .dp54 import DenseStep, Dopri54
from .errors import PoleProximity, StepSizeCollapse
from .hamiltonian import (
    Hamiltonian,
    find_turning_points,
    make_rhs,
    momentum_branches,
)
from .potential import eval_potential, find_poles

_TWO_PI = 2 * math.pi
_PHASE_CAP = math.pi / 2


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, guards and budgets for integrate().

    zeno_speed = 0 disables the capture event.  max_step is an optional
    ceiling on the adaptive step, useful when a caller wants sample
    spacing bounded for interpolation.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    t_max: float = 50.0
    escape_radius: float = 50.0
    pole_radius: float = 1e-3
    zeno_speed: float = 1e-6
    closure_tol: float = 1e-6
    max_steps: int = 10_000_000
    max_step: float = math.inf

    def __post_init__(self):
        if self.rtol < 1e-14:
            raise ValueError("rtol must be >= 1e-14")
        for name in ("atol", "t_max", "escape_radius", "pole_radius",
                     "closure_tol", "max_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.zeno_speed < 0 or self.max_steps < 1:
            raise ValueError("zeno_speed must be >= 0 and max_steps >= 1")


class Sample(NamedTuple):
    t: float
    x: complex
    p: complex
    phase: float
    energy_error: float
    speed_inverse: float


@dataclass(frozen=True)
class Escape:
    direction: complex
    kind: str = field(default="escape", repr=False)


@dataclass(frozen=True)
class ZenoCapture:
    turning_point: complex
    kind: str = field(default="zeno-capture", repr=False)


@dataclass(frozen=True)
class PoleEncounter:
    pole: complex
    kind: str = field(default="pole-encounter", repr=False)


@dataclass(frozen=True)
class Periodic:
    period: float
    kind: str = field(default="periodic", repr=False)


@dataclass(frozen=True)
class MaxTime:
    kind: str = field(default="max-time", repr=False)


@dataclass(frozen=True)
class MaxSteps:
    kind: str = field(default="max-steps", repr=False)


Termination = Union[Escape, ZenoCapture, PoleEncounter, Periodic, MaxTime, MaxSteps]


@dataclass
class Trajectory:
    """An integrated path with its termination and provenance."""

    samples: list[Sample]
    termination: Termination
    hamiltonian: Hamiltonian
    x0: complex
    branch: int
    config: IntegratorConfig

    @property
    def t_final(self) -> float:
        return self.samples[-1].t

    @property
    def x_final(self) -> complex:
        return self.samples[-1].x

    def _bracket(self, t: float) -> int:
        lo, hi = 0, len(self.samples) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.samples[mid].t <= t:
                lo = mid
            else:
                hi = mid
        return lo

    def state_at(self, t: float) -> tuple[complex, complex]:
        """Cubic-Hermite (x, p) between recorded samples; ends clamp."""
        s = self.samples
        if t <= s[0].t:
            return s[0].x, s[0].p
        if t >= s[-1].t:
            return s[-1].x, s[-1].p
        k = self._bracket(t)
        a, b = s[k], s[k + 1]
        h = b.t - a.t
        if h <= 0:
            return a.x, a.p
        rhs = make_rhs(self.hamiltonian)
        fax, fap = rhs(a.x, a.p)
        fbx, fbp = rhs(b.x, b.p)
        u = (t - a.t) / h
        h00 = (1 + 2 * u) * (1 - u) ** 2
        h10 = u * (1 - u) ** 2
        h01 = u * u * (3 - 2 * u)
        h11 = u * u * (u - 1)
        x = h00 * a.x + h10 * h * fax + h01 * b.x + h11 * h * fbx
        p = h00 * a.p + h10 * h * fap + h01 * b.p + h11 * h * fbp
        return x, p

    def position_at(self, t: float) -> complex:
        return self.state_at(t)[0]

    def momentum_at(self, t: float) -> complex:
        return self.state_at(t)[1]


def _principal(a: float) -> float:
    a = math.fmod(a, _TWO_PI)
    if a <= -math.pi:
        a += _TWO_PI
    elif a > math.pi:
        a -= _TWO_PI
    return a


def _state_norm(dx: complex, dp: complex) -> float:
    return math.sqrt(abs(dx) ** 2 + abs(dp) ** 2)


def _bisect_time(f: Callable[[float], float], t_lo: float, t_hi: float,
                 tol: float = 1e-10) -> float:
    """First root of f in [t_lo, t_hi] given f(t_lo), f(t_hi) opposite signs."""
    f_lo = f(t_lo)
    for _ in range(200):
        if t_hi - t_lo <= tol:
            break
        mid = 0.5 * (t_lo + t_hi)
        f_mid = f(mid)
        if (f_lo <= 0) == (f_mid <= 0):
            t_lo, f_lo = mid, f_mid
        else:
            t_hi = mid
    return t_hi


def _golden_min(f: Callable[[float], float], a: float, b: float,
                tol: float = 1e-12) -> tuple[float, float]:
    """Golden-section minimum of a unimodal-enough f on [a, b]."""
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    t = c if fc < fd else d
    return t, min(fc, fd)


class _EventHit(NamedTuple):
    t: float
    priority: int
    termination: Termination


def integrate(h: Hamiltonian, x0: complex, branch: int = 0,
              cfg: IntegratorConfig | None = None, *,
              p0: complex | None = None) -> Trajectory:
    """Integrate Hamilton's equations from x0 on the given momentum branch.

    Samples are recorded at every accepted step plus the localized event
    point.  The momentum phase is unwrapped by continuity; a step whose
    phase jump would reach pi/2 is retried at half size, except across an
    exact momentum zero (a degenerate bounce through a turning point)
    where the jump is the genuine pi sign flip and is accepted as such.

    p0 overrides the branch table (used by separatrix tracing, which
    starts on states that are not exactly on a branch of the initial x).
    """
    cfg = cfg or IntegratorConfig()
    x0 = complex(x0)
    poles = find_poles(h.potential)
    for pl in poles:
        if abs(x0 - pl.location) <= cfg.pole_radius:
            raise PoleProximity(
                f"x0 = {x0} is within pole_radius of pole {pl.location}")

    n = h.momentum_power
    branches = momentum_branches(h, x0)
    if p0 is None:
        if not 0 <= branch < n:
            raise ValueError(f"branch must be in [0, {n})")
        p0 = branches[branch]
    else:
        p0 = complex(p0)
        branch = min(range(n), key=lambda k: abs(branches[k] - p0))

    try:
        turning_pts = [tp.location for tp in find_turning_points(h)]
    except Exception:
        turning_pts = []

    rhs = make_rhs(h)
    solver = Dopri54(rhs, 0.0, x0, p0, cfg.rtol, cfg.atol, cfg.max_step)

    def sample_from(t: float, x: complex, p: complex, phase: float) -> Sample:
        try:
            v, _ = eval_potential(h.potential, x)
            e_err = abs(p ** n + v - h.energy)
        except Exception:
            e_err = math.inf
        speed = abs(n * p ** (n - 1))
        return Sample(t, x, p, phase, e_err, 1.0 / speed if speed > 0 else math.inf)

    phase = cmath.phase(p0)
    samples = [sample_from(0.0, x0, p0, phase)]
    prev_dense: DenseStep | None = None
    t_armed: float | None = None  # closure watched only after leaving this ball
    arm_radius = 100 * cfg.closure_tol
    termination: Termination | None = None
    steps = 0

    def nearest_pole(x: complex):
        best = None
        for pl in poles:
            d = abs(x - pl.location)
            if best is None or d < best[0]:
                best = (d, pl)
        return best

    def collapse(h_size: float, t: float, x: complex) -> Termination:
        near = nearest_pole(x)
        if near is not None and near[0] <= 0.5:
            return PoleEncounter(near[1].location)
        raise StepSizeCollapse(
            f"step collapsed to {h_size:.2e} at t = {t:.6g}, x = {x} "
            "away from any pole")

    while termination is None:
        steps += 1
        if steps > cfg.max_steps:
            termination = MaxSteps()
            break
        t = solver.t
        remaining = cfg.t_max - t
        if remaining <= 1e-13 * max(1.0, cfg.t_max):
            termination = MaxTime()
            break
        h_try = min(solver.h, remaining)

        # accept/reject loop: error control plus the phase-jump constraint
        halvings = 0
        dphi = 0.0
        while True:
            if h_try < 1e-14 * max(1.0, abs(t)):
                termination = collapse(h_try, t, solver.x)
                break
            a = solver.attempt_safe(h_try)
            if a is None:
                h_try *= 0.25
                continue
            if a.err > 1.0:
                h_try = solver.shrink_after_rejection(a)
                continue
            if solver.p != 0 and a.p1 != 0:
                dphi = _principal(cmath.phase(a.p1) - cmath.phase(solver.p))
            else:
                dphi = 0.0
            if abs(dphi) >= _PHASE_CAP:
                _, p_mid = solver.interp_attempt(a, 0.5)
                bounce = abs(p_mid) < 0.2 * min(abs(solver.p), abs(a.p1))
                if not bounce and halvings < 30:
                    halvings += 1
                    h_try = 0.5 * a.h
                    continue
            break
        if termination is not None:
            break

        t_prev, x_prev, p_prev = solver.t, solver.x, solver.p
        solver.commit(a)
        phase += dphi
        dense = solver.dense
        samples.append(sample_from(solver.t, solver.x, solver.p, phase))

        # ---- terminal events at the new endpoint ----
        hits: list[_EventHit] = []
        x1, p1 = solver.x, solver.p

        if abs(x1) >= cfg.escape_radius:
            t_ev = _bisect_time(
                lambda tt: abs(dense.eval(tt)[0]) - cfg.escape_radius,
                t_prev, solver.t)
            x_ev = dense.eval(t_ev)[0]
            hits.append(_EventHit(t_ev, 1, Escape(x_ev / abs(x_ev))))

        for pl in poles:
            if abs(x1 - pl.location) <= cfg.pole_radius:
                t_ev = _bisect_time(
                    lambda tt: cfg.pole_radius - abs(dense.eval(tt)[0] - pl.location),
                    t_prev, solver.t)
                hits.append(_EventHit(t_ev, 0, PoleEncounter(pl.location)))

        if cfg.zeno_speed > 0 and turning_pts:
            speed1 = abs(n * p1 ** (n - 1))
            speed0 = abs(n * p_prev ** (n - 1))
            if speed1 <= cfg.zeno_speed < speed0:
                t_ev = _bisect_time(
                    lambda tt: cfg.zeno_speed - abs(
                        n * dense.eval(tt)[1] ** (n - 1)),
                    t_prev, solver.t)
                x_ev = dense.eval(t_ev)[0]
                tp_near = min(turning_pts, key=lambda z: abs(x_ev - z))
                if abs(x_ev - tp_near) <= 0.1:
                    hits.append(_EventHit(t_ev, 2, ZenoCapture(tp_near)))

        d_now = _state_norm(x1 - x0, p1 - p0)
        if t_armed is None:
            if d_now > arm_radius:
                t_armed = solver.t
        else:
            chord = _state_norm(x1 - x_prev, p1 - p_prev)
            if d_now <= max(4 * chord, 10 * cfg.closure_tol):
                window_lo = prev_dense.t0 if prev_dense is not None else t_prev
                window_lo = max(window_lo, t_armed)

                def dist(tt: float) -> float:
                    if prev_dense is not None and tt < dense.t0:
                        xx, pp = prev_dense.eval(tt)
                    else:
                        xx, pp = dense.eval(tt)
                    return _state_norm(xx - x0, pp - p0)

                if window_lo < solver.t:
                    t_min, d_min = _golden_min(dist, window_lo, solver.t)
                    if d_min <= cfg.closure_tol and t_min > t_armed:
                        hits.append(_EventHit(t_min, 3, Periodic(t_min)))

        if hits:
            hits.sort(key=lambda e: (e.t, e.priority))
            hit = hits[0]
            termination = hit.termination
            # rewrite the endpoint sample as the localized event state
            if prev_dense is not None and hit.t < dense.t0:
                x_ev, p_ev = prev_dense.eval(hit.t)
                samples.pop()
                while samples and samples[-1].t > hit.t:
                    samples.pop()
            else:
                x_ev, p_ev = dense.eval(hit.t)
                samples.pop()
            base = samples[-1]
            phi = base.phase + (_principal(cmath.phase(p_ev) - cmath.phase(base.p))
                                if base.p != 0 and p_ev != 0 else 0.0)
            samples.append(sample_from(hit.t, x_ev, p_ev, phi))
            break

        prev_dense = dense

    return Trajectory(samples, termination, h, x0, branch, cfg)


def integrate_toward(h: Hamiltonian, x0: complex, direction: complex,
                     cfg: IntegratorConfig | None = None) -> Trajectory:
    """integrate() with the branch resolved from an initial heading hint."""
    from .hamiltonian import resolve_branch

    return integrate(h, x0, resolve_branch(h, x0, direction), cfg)


def same_sheet_intersections(traj: Trajectory, x_tol: float,
                             phase_tol: float) -> list[tuple[int, int]]:
    """Sample index pairs that coincide in x AND unwrapped momentum phase.

    Beyond the spatial and phase windows, a pair only counts if the path
    between the two samples actually leaves a 10*x_tol neighborhood, so a
    slowly drifting cluster of consecutive samples is not reported as a
    self-intersection.  Geometric crossings whose phases disagree are
    Riemann-sheet artifacts and are excluded by the phase window.
    """
    s = traj.samples
    if len(s) < 2:
        return []
    cell = max(x_tol, 1e-300)
    buckets: dict[tuple[int, int], list[int]] = {}
    pairs: list[tuple[int, int]] = []
    for i, smp in enumerate(s):
        key = (math.floor(smp.x.real / cell), math.floor(smp.x.imag / cell))
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for j in buckets.get((key[0] + di, key[1] + dj), ()):
                    if i - j <= 1:
                        continue
                    if abs(smp.x - s[j].x) > x_tol:
                        continue
                    if abs(smp.phase - s[j].phase) > phase_tol:
                        continue
                    escape_r = 10 * x_tol
                    if any(abs(s[k].x - s[j].x) > escape_r
                           for k in range(j + 1, i)):
                        pairs.append((j, i))
        buckets.setdefault(key, []).append(i)
    return pairs
