"""Hamiltonians H = p^n + V(x) on the complex x plane.

Turning points are the zeros of E - V(x); momentum branches are the n
complex roots p = (E - V)^{1/n}.  Everything here is geometry of the
energy surface; time evolution lives in the trajectory module.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

from . import polyroots
from .errors import DegenerateEnergy, DomainError, PoleProximity
from .potential import (
    EssentialExpPotential,
    Potential,
    RationalPotential,
    derivative_rhs,
    eval_potential,
    find_poles,
)

#: plot/search regions are (re_min, re_max, im_min, im_max)
Region = tuple[float, float, float, float]


class State(NamedTuple):
    t: float
    x: complex
    p: complex


@dataclass(frozen=True)
class Hamiltonian:
    """H = p^momentum_power + potential(x) at fixed complex energy."""

    momentum_power: int
    potential: Potential
    energy: complex

    def __post_init__(self):
        if self.momentum_power < 2:
            raise ValueError("momentum_power must be an integer >= 2")
        object.__setattr__(self, "energy", complex(self.energy))


@dataclass(frozen=True)
class TurningPoint:
    location: complex
    multiplicity: int


def in_region(z: complex, region: Region | None) -> bool:
    if region is None:
        return True
    re_min, re_max, im_min, im_max = region
    return re_min <= z.real <= re_max and im_min <= z.imag <= im_max


@lru_cache(maxsize=None)
def _turning_points_cached(h: Hamiltonian, max_count: int) -> tuple[TurningPoint, ...]:
    pot = h.potential
    if isinstance(pot, EssentialExpPotential):
        if abs(h.energy) == 0:
            raise DegenerateEnergy("E = 0 has no finite turning points for e^{1/x}")
        log_e = cmath.log(h.energy)
        points = []
        for k in range(-max_count, max_count + 1):
            denom = log_e - 2j * math.pi * k
            if abs(denom) < 1e-12:
                continue  # that family member sits at infinity
            points.append(TurningPoint(1 / denom, 1))
    else:
        # roots of E*Q - P
        f = polyroots.polysub(
            polyroots.polyscale(pot.denom, h.energy), pot.numer
        )
        f = polyroots.trim(f)
        if not f:
            raise DegenerateEnergy("E*Q - P vanishes identically")
        points = [
            TurningPoint(loc, mult)
            for loc, mult in polyroots.roots_with_multiplicity(f)
        ]
    points.sort(key=lambda tp: (abs(tp.location), cmath.phase(tp.location)))
    return tuple(points)


def find_turning_points(h: Hamiltonian, region: Region | None = None,
                        max_count: int = 3) -> list[TurningPoint]:
    """Zeros of E - V(x) with multiplicities, sorted by |location|.

    For rational potentials these are all roots of E*Q - P.  For the
    essential potential the closed-form family x_k = 1/(log E - 2*pi*i*k)
    is returned for |k| <= max_count (the k = 0 member disappears to
    infinity when log E = 0).  ``region`` filters the output rectangle.
    """
    pts = _turning_points_cached(h, max_count)
    return [tp for tp in pts if in_region(tp.location, region)]


def momentum_branches(h: Hamiltonian, x: complex) -> list[complex]:
    """The n momentum values at x, ordered by branch index k = 0..n-1.

    Branch k is |E-V|^{1/n} e^{i(Arg(E-V)+2*pi*i*k)/n} with principal Arg, so
    consecutive branches differ in phase by exactly 2*pi/n.  At a turning
    point (E - V = 0) all branches degenerate to zero and a list of zeros
    is returned; callers detect that case from the values themselves.
    """
    n = h.momentum_power
    w, _ = eval_potential(h.potential, x)
    w = h.energy - w
    if w == 0:
        return [0j] * n
    mag = abs(w) ** (1.0 / n)
    base = cmath.phase(w) / n
    step = 2 * math.pi / n
    return [mag * cmath.exp(1j * (base + step * k)) for k in range(n)]


def resolve_branch(h: Hamiltonian, x: complex, direction: complex) -> int:
    """Branch index whose initial velocity best aligns with ``direction``.

    Alignment is the real part of conj(direction_hat) * xdot; ties break
    toward the lowest index, so the choice is deterministic.
    """
    d = complex(direction)
    if d == 0:
        raise ValueError("direction hint must be nonzero")
    d /= abs(d)
    n = h.momentum_power
    best_k, best_score = 0, -math.inf
    for k, p in enumerate(momentum_branches(h, x)):
        v = n * p ** (n - 1)
        score = (v * d.conjugate()).real
        if score > best_score + 1e-15:
            best_k, best_score = k, score
    return best_k


def hamilton_rhs(h: Hamiltonian, s: State) -> tuple[complex, complex]:
    """Exact right-hand side (xdot, pdot) = (n p^{n-1}, -V'(x)).

    Raises PoleProximity inside the default guard radius of a pole, where
    the equations are valid but a caller almost certainly lost control.
    """
    for pole in find_poles(h.potential):
        if abs(s.x - pole.location) <= 1e-3:
            raise PoleProximity(f"state within 1e-3 of pole {pole.location}")
    _, dv = eval_potential(h.potential, s.x)
    n = h.momentum_power
    return n * s.p ** (n - 1), -dv


def make_rhs(h: Hamiltonian) -> Callable[[complex, complex], tuple[complex, complex]]:
    """Compile the unguarded RHS closure used by the integrator hot loop."""
    neg_dv = derivative_rhs(h.potential)
    n = h.momentum_power
    if n == 2:
        def rhs2(x: complex, p: complex) -> tuple[complex, complex]:
            return 2 * p, neg_dv(x)

        return rhs2

    def rhs(x: complex, p: complex) -> tuple[complex, complex]:
        return n * p ** (n - 1), neg_dv(x)

    return rhs


def energy_error(h: Hamiltonian, x: complex, p: complex) -> float:
    """|p^n + V(x) - E|, the pointwise conservation defect."""
    v, _ = eval_potential(h.potential, x)
    return abs(p ** h.momentum_power + v - h.energy)


def classical_probability(energy: float, x: float) -> float:
    """Stationary position density for H = p^2 - x^4 on the real line.

    The density is proportional to 1/|xdot| and normalizes over the whole
    line to 2 E^{1/4} sqrt(pi) / (Gamma(1/4)^2 sqrt(E + x^4)).
    """
    if not energy > 0:
        raise DomainError("closed form requires E > 0")
    g = math.gamma(0.25)
    return 2 * energy**0.25 * math.sqrt(math.pi) / (g * g * math.sqrt(energy + float(x) ** 4))
