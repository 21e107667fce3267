"""Potential specifications: rational functions of x and the essential e^{1/x}.

A rational potential is stored as two ascending-degree coefficient tuples
in reduced form (no common roots, monic denominator).  The essential
potential is the single fixed form e^{1/x}; its singularity at the origin
is not a pole of any finite order and is reported with an ``essential``
flag instead.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

from . import polyroots
from .errors import NonFinite, PoleEvaluation
from .polyroots import Coeffs


@dataclass(frozen=True)
class RationalPotential:
    """V(x) = P(x)/Q(x) with ascending coefficient tuples, Q monic."""

    numer: Coeffs
    denom: Coeffs = (1 + 0j,)

    def __str__(self) -> str:
        from .exprparse import potential_source

        return potential_source(self)


@dataclass(frozen=True)
class EssentialExpPotential:
    """V(x) = e^{1/x}; essential singularity at the origin."""

    def __str__(self) -> str:
        return "exp(1/x)"


Potential = Union[RationalPotential, EssentialExpPotential]


@dataclass(frozen=True)
class PoleInfo:
    """A singularity of V: location, order, and residue for simple poles.

    ``order`` is the polynomial pole order (>= 1); the essential
    singularity of e^{1/x} carries order 0 with ``essential`` set.
    """

    location: complex
    order: int
    residue: complex | None = None
    essential: bool = False


def rational(numer, denom=(1,)) -> RationalPotential:
    """Build a reduced rational potential from coefficient sequences.

    Common factors of numerator and denominator are removed with a
    tolerance-based polynomial GCD, then the denominator is made monic so
    equal potentials compare equal.
    """
    p = polyroots.trim(numer)
    q = polyroots.trim(denom)
    if not q:
        raise ZeroDivisionError("denominator is the zero polynomial")
    if p:
        g = polyroots.poly_gcd(p, q)
        if polyroots.degree(g) >= 1:
            p, _ = polyroots.poly_divmod(p, g)
            q, _ = polyroots.poly_divmod(q, g)
    lead = q[-1]
    q = tuple(v / lead for v in q)
    p = tuple(v / lead for v in p)
    if not p:
        p = (0j,)
    return RationalPotential(p, q)


def eval_potential(pot: Potential, x: complex) -> tuple[complex, complex]:
    """Return (V(x), V'(x)).

    Rational potentials use Horner evaluation and the quotient rule; the
    essential potential returns (e^{1/x}, -e^{1/x}/x^2).
    """
    x = complex(x)
    if isinstance(pot, EssentialExpPotential):
        if x == 0:
            raise PoleEvaluation("e^{1/x} evaluated at its singularity")
        try:
            v = cmath.exp(1 / x)
        except OverflowError:
            raise NonFinite(f"e^(1/x) overflowed at x = {x}") from None
        return v, -v / (x * x)
    pv = polyroots.polyval(pot.numer, x)
    qv = polyroots.polyval(pot.denom, x)
    if abs(qv) < 1e-300:
        raise PoleEvaluation(f"denominator vanished at x = {x}")
    dp = polyroots.polyval(polyroots.polyder(pot.numer), x)
    dq = polyroots.polyval(polyroots.polyder(pot.denom), x)
    v = pv / qv
    dv = (dp - v * dq) / qv
    if not (cmath.isfinite(v) and cmath.isfinite(dv)):
        raise NonFinite(f"potential overflowed at x = {x}")
    return v, dv


def derivative_rhs(pot: Potential) -> Callable[[complex], complex]:
    """Compile -V'(x) into a closure for the integrator hot loop."""
    if isinstance(pot, EssentialExpPotential):
        def neg_dv_essential(x: complex) -> complex:
            inv = 1 / x
            return cmath.exp(inv) * inv * inv

        return neg_dv_essential

    np_ = pot.numer
    nq = pot.denom
    dp_ = polyroots.polyder(np_)
    dq = polyroots.polyder(nq)

    def neg_dv(x: complex) -> complex:
        pv = 0j
        for c in reversed(np_):
            pv = pv * x + c
        qv = 0j
        for c in reversed(nq):
            qv = qv * x + c
        dpv = 0j
        for c in reversed(dp_):
            dpv = dpv * x + c
        dqv = 0j
        for c in reversed(dq):
            dqv = dqv * x + c
        v = pv / qv
        return (v * dqv - dpv) / qv

    return neg_dv


@lru_cache(maxsize=None)
def find_poles(pot: Potential) -> tuple[PoleInfo, ...]:
    """Poles of V with orders; residues filled in for simple poles."""
    if isinstance(pot, EssentialExpPotential):
        return (PoleInfo(0j, order=0, residue=None, essential=True),)
    if polyroots.degree(pot.denom) < 1:
        return ()
    dq = polyroots.polyder(pot.denom)
    poles = []
    for loc, mult in polyroots.roots_with_multiplicity(pot.denom):
        residue = None
        if mult == 1:
            residue = polyroots.polyval(pot.numer, loc) / polyroots.polyval(dq, loc)
        poles.append(PoleInfo(loc, order=mult, residue=residue))
    poles.sort(key=lambda p: (abs(p.location), cmath.phase(p.location)))
    return tuple(poles)


def _inverse_power(m: int, sign: int) -> RationalPotential:
    denom = (0j,) * m + (1 + 0j,)
    return rational((complex(sign),), denom)


#: Named potentials used throughout the examples and scenarios.
CATALOG: dict[str, Potential] = {
    "two-pole": rational((0, 1), (1, 0, 1)),            # x/(x^2+1)
    "two-pole-pt": rational((0, 1j), (1, 0, 1)),        # ix/(x^2+1)
    "inverse": _inverse_power(1, 1),                    # 1/x
    "neg-inverse": _inverse_power(1, -1),               # -1/x
    "inverse-square": _inverse_power(2, 1),             # 1/x^2
    "neg-inverse-square": _inverse_power(2, -1),        # -1/x^2
    "inverse-cube": _inverse_power(3, 1),               # 1/x^3
    "neg-inverse-cube": _inverse_power(3, -1),          # -1/x^3
    "neg-quartic": rational((0, 0, 0, 0, -1)),          # -x^4
    "harmonic": rational((0, 0, 1)),                    # x^2
    "free": rational((0,)),                             # V = 0
    "essential": EssentialExpPotential(),               # e^{1/x}
}
