"""Contour integrals of branch-tracked momentum functions.

Travel time along a path is t = ∫ dx / (n p^{n-1}); the quantization
integral is ∮ dx sqrt(E - V).  Both need p = (E - V)^{1/n} continued
CONTINUOUSLY along the contour rather than evaluated principally, so each
segment carries an adaptively refined grid of unwrapped arg(E - V)
values.  Endpoint singularities (turning points, poles) are flattened
with a u^n substitution before handing the legs to adaptive
Gauss-Kronrod quadrature.
"""

from __future__ import annotations

import bisect
import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

from scipy.integrate import IntegrationWarning, quad

from .errors import BranchDiscontinuity, DomainError
from .hamiltonian import Hamiltonian, find_turning_points
from .potential import CATALOG, eval_potential, find_poles

_TWO_PI = 2 * math.pi
#: vertex within this distance of a turning point / pole counts as singular
_VERTEX_TOL = 1e-8


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def point(self, s: float) -> complex:
        return self.start + (self.end - self.start) * s

    def velocity(self, s: float) -> complex:
        return self.end - self.start


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, s: float) -> complex:
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return self.center + self.radius * cmath.exp(1j * th)

    def velocity(self, s: float) -> complex:
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return 1j * self.radius * (self.theta1 - self.theta0) * cmath.exp(1j * th)


@dataclass(frozen=True)
class Ray:
    """Half-infinite segment start + direction*s/(1-s), s in [0, 1)."""

    start: complex
    direction: complex

    def point(self, s: float) -> complex:
        return self.start + self.direction * s / (1.0 - s)

    def velocity(self, s: float) -> complex:
        return self.direction / (1.0 - s) ** 2


Segment = Union[Line, Arc, Ray]


@dataclass(frozen=True)
class Contour:
    segments: tuple[Segment, ...]

    @classmethod
    def polyline(cls, points) -> "Contour":
        pts = [complex(z) for z in points]
        if len(pts) < 2:
            raise ValueError("polyline needs at least two points")
        return cls(tuple(Line(a, b) for a, b in zip(pts, pts[1:])))

    @classmethod
    def circle(cls, center: complex, radius: float, ccw: bool = True) -> "Contour":
        t1 = _TWO_PI if ccw else -_TWO_PI
        return cls((Arc(complex(center), float(radius), 0.0, t1),))

    @classmethod
    def ray(cls, start: complex, direction: complex) -> "Contour":
        return cls((Ray(complex(start), complex(direction)),))


class _SegmentTrack:
    """Unwrapped arg(E - V) along one segment, queryable at any parameter.

    The grid starts uniform and is refined until adjacent nodes differ in
    phase by less than pi/2; failure to get there by spacing 1e-12 means
    the segment runs through a zero or pole of E - V and is reported as a
    branch discontinuity.  start_offset shifts the whole segment's phase
    to glue it onto the previous segment (and to absorb the 2*pi jump a
    trajectory picks up when a vertex sits exactly on a turning point).
    """

    def __init__(self, w_of_s: Callable[[float], complex], s_lo: float, s_hi: float,
                 phase_start: float):
        self._w = w_of_s
        params = [s_lo + (s_hi - s_lo) * k / 32 for k in range(33)]
        values = [w_of_s(s) for s in params]
        args = [cmath.phase(w) for w in values]
        # refine until each adjacent principal-phase gap drops below pi/2
        k = 0
        while k < len(params) - 1:
            gap = _principal(args[k + 1] - args[k])
            if abs(gap) < math.pi / 2 or params[k + 1] - params[k] < 1e-12:
                k += 1
                continue
            mid = 0.5 * (params[k] + params[k + 1])
            params.insert(k + 1, mid)
            w = w_of_s(mid)
            values.insert(k + 1, w)
            args.insert(k + 1, cmath.phase(w))
        for a, b, da, db in zip(params, params[1:], args, args[1:]):
            if abs(_principal(db - da)) >= math.pi / 2:
                raise BranchDiscontinuity(
                    f"phase jump {abs(_principal(db - da)):.3f} rad persists at "
                    f"node spacing {b - a:.2e}")
        phases = [phase_start]
        for k in range(1, len(params)):
            phases.append(phases[-1] + _principal(args[k] - args[k - 1]))
        self.params = params
        self.phases = phases
        self.values = values

    @property
    def phase_end(self) -> float:
        return self.phases[-1]

    def phase_at(self, s: float, w: complex) -> float:
        """Unwrapped phase at parameter s, given w = (E-V)(s)."""
        k = bisect.bisect_right(self.params, s) - 1
        if k < 0:
            est = self.phases[0]
        elif k >= len(self.params) - 1:
            est = self.phases[-1]
        else:
            f = (s - self.params[k]) / (self.params[k + 1] - self.params[k])
            est = self.phases[k] + f * (self.phases[k + 1] - self.phases[k])
        a = cmath.phase(w)
        return a + _TWO_PI * round((est - a) / _TWO_PI)


def _principal(a: float) -> float:
    """Reduce an angle difference to (-pi, pi]."""
    a = math.fmod(a, _TWO_PI)
    if a <= -math.pi:
        a += _TWO_PI
    elif a > math.pi:
        a -= _TWO_PI
    return a


class _BranchedMomentum:
    """p(s) on every contour segment for one global branch index."""

    def __init__(self, h: Hamiltonian, contour: Contour, branch: int, root_power: int):
        self.h = h
        self.n = root_power
        self.branch = branch % root_power
        singular = self._singular_points()
        self.tracks: list[_SegmentTrack] = []
        self.vertex_kinds: list[tuple[str | None, str | None]] = []
        phase = None
        for seg in contour.segments:
            k_lo = self._vertex_kind(seg.point(0.0), singular)
            k_hi = ("infinity" if isinstance(seg, Ray)
                    else self._vertex_kind(seg.point(1.0), singular))
            s_lo = 1e-9 if k_lo else 0.0
            s_hi = (1 - 1e-9) if k_hi else 1.0
            w_of_s = self._w_on(seg)
            if phase is None:
                phase = cmath.phase(w_of_s(s_lo))
            elif self.tracks:
                # glue to the previous segment across the shared vertex
                prev = self.tracks[-1]
                jump = _principal(cmath.phase(w_of_s(s_lo)) - cmath.phase(prev.values[-1]))
                phase = prev.phase_end + jump
                if self.vertex_kinds[-1][1] == "turning-point":
                    if self.n != 2:
                        raise BranchDiscontinuity(
                            "turning-point vertex continuation requires n = 2")
                    phase += _TWO_PI  # bounce: p -> -p through the zero
            self.tracks.append(_SegmentTrack(w_of_s, s_lo, s_hi, phase))
            self.vertex_kinds.append((k_lo, k_hi))

    def _singular_points(self) -> list[tuple[complex, str]]:
        pts = [(p.location, "pole") for p in find_poles(self.h.potential)]
        try:
            pts += [(tp.location, "turning-point")
                    for tp in find_turning_points(self.h)]
        except Exception:
            pass  # degenerate-energy cases have no isolated turning points
        return pts

    def _vertex_kind(self, z: complex, singular) -> str | None:
        for loc, kind in singular:
            if abs(z - loc) <= _VERTEX_TOL:
                return kind
        return None

    def _w_on(self, seg: Segment) -> Callable[[float], complex]:
        h = self.h

        def w_of_s(s: float) -> complex:
            v, _ = eval_potential(h.potential, seg.point(s))
            return h.energy - v

        return w_of_s

    def eval(self, seg_index: int, seg: Segment, s: float) -> complex:
        v, _ = eval_potential(self.h.potential, seg.point(s))
        w = self.h.energy - v
        phi = self.tracks[seg_index].phase_at(s, w)
        return abs(w) ** (1.0 / self.n) * cmath.exp(
            1j * (phi + _TWO_PI * self.branch) / self.n)


def _integrate_segment(f: Callable[[float], complex], singular_lo: bool,
                       singular_hi: bool, order: int) -> complex:
    """Integrate f over [0,1] flattening singular endpoints by s = u^order."""
    if singular_lo and singular_hi:
        return (_integrate_segment(lambda s: f(0.5 * s) * 0.5, True, False, order)
                + _integrate_segment(lambda s: f(1 - 0.5 * s) * 0.5, True, False, order))
    if singular_hi:
        return _integrate_segment(lambda s: f(1.0 - s), True, False, order)
    if singular_lo:
        g = f
        f = lambda u: g(u ** order) * order * u ** (order - 1)

    with warnings.catch_warnings():
        # near-zero components hit QUADPACK's roundoff detector; accuracy
        # is asserted against oracles in the tests instead
        warnings.simplefilter("ignore", IntegrationWarning)
        re = quad(lambda s: f(s).real, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=300)[0]
        im = quad(lambda s: f(s).imag, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=300)[0]
    return complex(re, im)


def _contour_integral(h: Hamiltonian, contour: Contour, branch: int,
                      root_power: int,
                      integrand_of_p: Callable[[complex], complex]) -> complex:
    pm = _BranchedMomentum(h, contour, branch, root_power)
    total = 0j
    for k, seg in enumerate(contour.segments):
        def f(s: float, k=k, seg=seg) -> complex:
            p = pm.eval(k, seg, s)
            return integrand_of_p(p) * seg.velocity(s)

        k_lo, k_hi = pm.vertex_kinds[k]
        total += _integrate_segment(f, k_lo is not None,
                                    k_hi is not None and k_hi != "infinity",
                                    root_power)
    return total


def contour_travel_time(h: Hamiltonian, contour: Contour, branch: int = 0) -> complex:
    """Travel time ∫ dx / (n p^{n-1}) along the contour.

    The contour must avoid poles except at endpoints and may touch turning
    points only at segment vertices, where the momentum continues through
    its zero the way a bouncing trajectory does (p -> -p, n = 2 only).
    Physical legs give a real positive result; the opposite branch negates
    it.
    """
    n = h.momentum_power

    def integrand(p: complex) -> complex:
        return 1.0 / (n * p ** (n - 1))

    return _contour_integral(h, contour, branch, n, integrand)


def wkb_action(h: Hamiltonian, contour: Contour, branch: int = 0) -> complex:
    """The quantization integral ∮ dx sqrt(E - V) along the contour.

    Always uses the square-root branch structure regardless of the
    Hamiltonian's momentum power; callers compare against (m + 1/2)*pi.
    """
    return _contour_integral(h, contour, branch, 2, lambda p: p)


_GOLDEN = (1 + math.sqrt(5)) / 2

PRESETS = ("eq14", "tof-quartic", "wkb")


def preset_value(name: str, energy: complex = 1.0) -> complex:
    """Named quadratures exposed by the command line.

    eq14        round trip i -> i*phi -> i for H = p^2 + ix/(x^2+1), E = 1.
                The value is the full up-and-back time; each leg
                contributes exactly half, so no additional factor of 2
                multiplies the one-leg integral (the equal-magnitude
                integrand on both legs is what the branch flip encodes).
    tof-quartic time of flight 0 -> +infinity for H = p^2 - x^4.
    wkb         ∮ dx sqrt(E - x^2) around both turning points of the
                harmonic well (analytically pi*E).
    """
    if name == "eq14":
        h = Hamiltonian(2, CATALOG["two-pole-pt"], energy)
        contour = Contour.polyline([1j, 1j * _GOLDEN, 1j])
        t = contour_travel_time(h, contour, branch=0)
        return -t if t.real < 0 else t
    if name == "tof-quartic":
        h = Hamiltonian(2, CATALOG["neg-quartic"], energy)
        t = contour_travel_time(h, Contour.ray(0j, 1 + 0j), branch=0)
        return -t if t.real < 0 else t
    if name == "wkb":
        if not (complex(energy).imag == 0 and complex(energy).real > 0):
            raise DomainError("harmonic preset needs real positive energy")
        h = Hamiltonian(2, CATALOG["harmonic"], energy)
        radius = math.sqrt(complex(energy).real) + 1.0
        return wkb_action(h, Contour.circle(0j, radius), branch=0)
    raise DomainError(f"unknown quadrature preset {name!r}")
