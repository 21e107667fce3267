"""Separatrix seeding near simple poles, tracing, and trajectory taxonomy.

Near a simple pole of the potential the basin boundaries collapse onto a
small set of straight rays.  For quadratic kinetic energy the local orbit
law along each ray is eps(t) = (9 |r| t^2)^(1/3) e^{i theta}, with r the
pole residue and three ray angles spaced 120 degrees apart.  A seed placed
a small offset down one of those rays, integrated with the outward
momentum branch, traces the full separatrix curve.
"""

from __future__ import annotations

import cmath
import dataclasses
import math
from dataclasses import dataclass

from .errors import UnsupportedOrder, UnsupportedPower
from .hamiltonian import Hamiltonian
from .potential import PoleInfo
from .trajectory import (
    Escape,
    IntegratorConfig,
    MaxSteps,
    MaxTime,
    Periodic,
    PoleEncounter,
    Trajectory,
    ZenoCapture,
    integrate_toward,
)

__all__ = [
    "SeparatrixSeed",
    "TrajectoryClass",
    "classify_trajectory",
    "pole_separatrix_seeds",
    "separatrix_ray_angles",
    "trace_separatrix",
]


@dataclass(frozen=True)
class SeparatrixSeed:
    """One separatrix branch: a ray direction anchored at a pole.

    ``time_scale`` is the (small) time at which the local growth law
    reaches ``offset``; it documents how deep into the asymptotic regime
    the seed sits.
    """

    pole: complex
    direction_angle: float
    offset: float = 1e-4
    time_scale: float = 0.0

    def __post_init__(self) -> None:
        # too small drowns in roundoff, too large leaves the local regime
        if not 1e-8 <= self.offset <= 1e-2:
            raise ValueError("offset must lie in [1e-8, 1e-2]")

    @property
    def start(self) -> complex:
        return self.pole + self.offset * cmath.exp(1j * self.direction_angle)


def _wrap_angle(a: float) -> float:
    return math.remainder(a, 2 * math.pi)


def separatrix_ray_angles(h: Hamiltonian, pole: PoleInfo) -> list[float]:
    """Ray angles of the separatrix branches at a simple pole.

    For momentum power n there are 2n - 1 rays at angles
    ((n - 1) arg(-r) + 2 pi j) / (2n - 1); n = 2 reduces to the familiar
    three rays 120 degrees apart.
    """
    if pole.essential or pole.order != 1 or pole.residue is None:
        raise UnsupportedOrder("separatrix rays require a simple pole")
    n = h.momentum_power
    count = 2 * n - 1
    base = (n - 1) * cmath.phase(-pole.residue)
    return [_wrap_angle((base + 2 * math.pi * j) / count) for j in range(count)]


def pole_separatrix_seeds(
    h: Hamiltonian, pole: PoleInfo, offset: float = 1e-4
) -> list[SeparatrixSeed]:
    """Three separatrix seeds at a simple pole (quadratic kinetic energy).

    The local law eps(t) = (9 |r| t^2)^(1/3) e^{i(arg(-r) + 2 pi k)/3}
    fixes both the ray angles and the time scale at which a given offset
    is reached.
    """
    if pole.essential or pole.order != 1 or pole.residue is None:
        raise UnsupportedOrder("separatrix seeding requires a simple pole")
    if h.momentum_power != 2:
        raise UnsupportedPower(
            "closed-form seeding holds for momentum power 2; "
            "use separatrix_ray_angles for the general ray law"
        )
    r = abs(pole.residue)
    # eps(t) = (9 r t^2)^(1/3)  =>  t = eps^(3/2) / (3 sqrt(r))
    t_scale = offset ** 1.5 / (3.0 * math.sqrt(r))
    return [
        SeparatrixSeed(pole.location, angle, offset, t_scale)
        for angle in separatrix_ray_angles(h, pole)
    ]


def trace_separatrix(
    h: Hamiltonian, seed: SeparatrixSeed, cfg: IntegratorConfig | None = None
) -> Trajectory:
    """Integrate a separatrix branch outward from its seed.

    The momentum branch is the one whose velocity points away from the
    pole, i.e. maximizing Re(conj(xdot) (x0 - pole)).  The pole guard is
    shrunk below the seed offset so the start point is admissible.
    """
    cfg = cfg if cfg is not None else IntegratorConfig()
    if cfg.pole_radius >= seed.offset:
        cfg = dataclasses.replace(cfg, pole_radius=seed.offset / 10.0)
    x0 = seed.start
    return integrate_toward(h, x0, x0 - seed.pole, cfg)


@dataclass(frozen=True)
class TrajectoryClass:
    """Coarse fate of a trajectory, mirroring its termination."""

    label: str  # Escape | ZenoCapture | Periodic | PoleEncounter | Timeout
    detail: object

    @property
    def annotation(self) -> str | None:
        """'east'/'west' for escapes, by the sign of Re(direction)."""
        if isinstance(self.detail, Escape):
            return "east" if self.detail.direction.real >= 0 else "west"
        return None


_LABELS = {
    Escape: "Escape",
    ZenoCapture: "ZenoCapture",
    Periodic: "Periodic",
    PoleEncounter: "PoleEncounter",
    MaxTime: "Timeout",
    MaxSteps: "Timeout",
}


def classify_trajectory(traj: Trajectory) -> TrajectoryClass:
    label = _LABELS[type(traj.termination)]
    return TrajectoryClass(label, traj.termination)
