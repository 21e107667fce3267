"""Closed-form late-time behavior of barrier-top escape trajectories.

For quadratic kinetic energy with the two-pole potential at the
barrier-top energy 1/2, the time of flight integrates exactly to

    G(x) - G(x0) = sqrt(2) t,
    G(x) = sqrt(1 + x^2) + log(x + sqrt(1 + x^2))
           + sqrt(2) log((x - 1) / (x + 1 + sqrt(2) sqrt(1 + x^2))),

and inverting for large real t gives the asymptotic escape position

    x(t) ~ sqrt(2) t - log t + sqrt(2) log(1 + sqrt(2)) - (3/2) log 2 + K,

with K = G(x0).  All evaluations use principal branches, so the caller
must stay on a path along which no logarithm argument crosses the
negative real axis; crossings raise BranchAmbiguity.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable

from .errors import BranchAmbiguity, DomainError

__all__ = ["escape_constant", "separatrix_asymptotics"]

_SQRT2 = math.sqrt(2.0)


def _log_arguments(x: complex) -> tuple[complex, complex, complex]:
    """Arguments whose principal cuts G(x) is sensitive to."""
    s = cmath.sqrt(1 + x * x)
    return 1 + x * x, x + s, (x - 1) / (x + 1 + _SQRT2 * s)


def _closed_form(x: complex) -> complex:
    if x == 1:
        raise DomainError("the time-of-flight integral diverges at x = 1")
    s = cmath.sqrt(1 + x * x)
    return s + cmath.log(x + s) + _SQRT2 * cmath.log((x - 1) / (x + 1 + _SQRT2 * s))


def _check_cut_free(z0: complex, z1: complex, steps: int = 64) -> None:
    """Raise if any log argument crosses the negative real axis on [z0, z1]."""
    prev = _log_arguments(z0)
    for k in range(1, steps + 1):
        cur = _log_arguments(z0 + (z1 - z0) * (k / steps))
        for a, b in zip(prev, cur):
            if a.imag * b.imag < 0:
                # linear-interpolated crossing point of the real axis
                w = a.imag / (a.imag - b.imag)
                if a.real + w * (b.real - a.real) < 0:
                    raise BranchAmbiguity(
                        "a log argument crosses the negative real axis "
                        f"between {z0} and {z1}; segment the path"
                    )
        prev = cur


def escape_constant(x0: complex) -> complex:
    """The integration constant K = G(x0) of the escape asymptotics."""
    return _closed_form(x0)


def separatrix_asymptotics(
    x0: complex, t: float
) -> tuple[complex, complex, Callable[[complex, float], complex]]:
    """Late-time escape position and the exact implicit relation.

    Returns (K, x_asym, implicit_residual).  The residual function
    evaluates G(x) - sqrt(2) t - K, which vanishes along the trajectory
    through x0 as long as the straight segment from x0 to x crosses no
    branch cut (checked; BranchAmbiguity otherwise).
    """
    K = escape_constant(x0)
    x_asym = (
        _SQRT2 * t
        - cmath.log(t)
        + _SQRT2 * math.log(1 + _SQRT2)
        - 1.5 * math.log(2.0)
        + K
    )

    def implicit_residual(x: complex, tt: float) -> complex:
        _check_cut_free(x0, x)
        return _closed_form(x) - _SQRT2 * tt - K

    return K, x_asym, implicit_residual
