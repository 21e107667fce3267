"""Dormand-Prince 5(4) embedded Runge-Kutta on a complex (x, p) pair.

The stepper is specialized to the two-component complex Hamilton system
and fully unrolled: at the tolerances this package runs (1e-10 relative)
a generic array solver spends more time in bookkeeping than arithmetic,
and grid scans take millions of steps.  FSAL reuse and the quartic dense
interpolant follow Hairer, Norsett & Wanner (Solving Ordinary
Differential Equations I, 2nd ed., Sect. II.5), coefficients from the
published DOPRI5 code.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

Rhs = Callable[[complex, complex], tuple[complex, complex]]

# stage weights (b row) and error row b - bhat
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)
# dense-output weights for the fifth interpolation coefficient
_D1 = -12715105075 / 11282082432
_D3 = 87487479700 / 32700410799
_D4 = -10690763975 / 1880347072
_D5 = 701980252875 / 199316789632
_D6 = -1453857185 / 822651844
_D7 = 69997945 / 29380423

_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (9017 / 3168, -355 / 33, 46732 / 5247,
                                49 / 176, -5103 / 18656)


class StepAttempt(NamedTuple):
    """One trial step; commit() advances the solver to (x1, p1)."""

    h: float
    x1: complex
    p1: complex
    err: float
    k1x: complex; k1p: complex
    k3x: complex; k3p: complex
    k4x: complex; k4p: complex
    k5x: complex; k5p: complex
    k6x: complex; k6p: complex
    k7x: complex; k7p: complex


class DenseStep(NamedTuple):
    """Quartic Hermite-type interpolant over one accepted step."""

    t0: float
    h: float
    x0: complex; dx: complex; bx: complex; cx: complex; ex: complex
    p0: complex; dp: complex; bp: complex; cp: complex; ep: complex

    def eval(self, t: float) -> tuple[complex, complex]:
        th = (t - self.t0) / self.h
        th1 = 1.0 - th
        x = self.x0 + th * (self.dx + th1 * (self.bx + th * (self.cx + th1 * self.ex)))
        p = self.p0 + th * (self.dp + th1 * (self.bp + th * (self.cp + th1 * self.ep)))
        return x, p


class Dopri54:
    """Adaptive stepper; the caller owns the accept/reject loop.

    attempt(h) evaluates one trial step and its scaled error estimate
    (err <= 1 means acceptable); commit() advances and reuses the last
    stage (FSAL).  The caller may reject an acceptable attempt (phase
    constraint) and retry with a smaller h.
    """

    def __init__(self, rhs: Rhs, t: float, x: complex, p: complex,
                 rtol: float, atol: float, max_step: float = math.inf):
        self.rhs = rhs
        self.t = t
        self.x = x
        self.p = p
        self.rtol = rtol
        self.atol = atol
        self.max_step = max_step
        self.k1x, self.k1p = rhs(x, p)
        self.h = self._initial_step()
        self.dense: DenseStep | None = None

    def _initial_step(self) -> float:
        # crude version of Hairer's HINIT: match the first-derivative scale
        sx = self.atol + self.rtol * abs(self.x)
        sp = self.atol + self.rtol * abs(self.p)
        d0 = math.hypot(abs(self.x) / sx, abs(self.p) / sp) / math.sqrt(2)
        d1 = math.hypot(abs(self.k1x) / sx, abs(self.k1p) / sp) / math.sqrt(2)
        h0 = 1e-6 if d1 < 1e-10 else 0.01 * d0 / d1
        h0 = min(h0, self.max_step, 0.1)
        xe = self.x + h0 * self.k1x
        pe = self.p + h0 * self.k1p
        try:
            k2x, k2p = self.rhs(xe, pe)
        except Exception:
            return max(h0 * 1e-3, 1e-12)
        d2 = math.hypot(abs(k2x - self.k1x) / sx, abs(k2p - self.k1p) / sp) / h0
        dm = max(d1, d2)
        h1 = (0.01 / dm) ** 0.2 if dm > 1e-15 else h0 * 100
        return min(100 * h0, h1, self.max_step)

    def attempt(self, h: float) -> StepAttempt:
        """Evaluate one trial step of size h from the current state."""
        rhs = self.rhs
        x, p = self.x, self.p
        k1x, k1p = self.k1x, self.k1p

        k2x, k2p = rhs(x + h * (_A21 * k1x), p + h * (_A21 * k1p))
        k3x, k3p = rhs(x + h * (_A31 * k1x + _A32 * k2x),
                       p + h * (_A31 * k1p + _A32 * k2p))
        k4x, k4p = rhs(x + h * (_A41 * k1x + _A42 * k2x + _A43 * k3x),
                       p + h * (_A41 * k1p + _A42 * k2p + _A43 * k3p))
        k5x, k5p = rhs(x + h * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x),
                       p + h * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p))
        k6x, k6p = rhs(x + h * (_A61 * k1x + _A62 * k2x + _A63 * k3x
                                + _A64 * k4x + _A65 * k5x),
                       p + h * (_A61 * k1p + _A62 * k2p + _A63 * k3p
                                + _A64 * k4p + _A65 * k5p))
        x1 = x + h * (_B1 * k1x + _B3 * k3x + _B4 * k4x + _B5 * k5x + _B6 * k6x)
        p1 = p + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p + _B6 * k6p)
        k7x, k7p = rhs(x1, p1)

        ex = h * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x
                  + _E6 * k6x + _E7 * k7x)
        ep = h * (_E1 * k1p + _E3 * k3p + _E4 * k4p + _E5 * k5p
                  + _E6 * k6p + _E7 * k7p)
        sx = self.atol + self.rtol * max(abs(x), abs(x1))
        sp = self.atol + self.rtol * max(abs(p), abs(p1))
        err = math.sqrt(0.5 * ((abs(ex) / sx) ** 2 + (abs(ep) / sp) ** 2))
        return StepAttempt(h, x1, p1, err,
                           k1x, k1p, k3x, k3p, k4x, k4p,
                           k5x, k5p, k6x, k6p, k7x, k7p)

    def attempt_safe(self, h: float) -> StepAttempt | None:
        """attempt(), but evaluation blow-ups read as a rejected step."""
        try:
            a = self.attempt(h)
        except (ArithmeticError, ValueError) as exc:
            from .errors import CplxdynError
            if isinstance(exc, CplxdynError):
                raise
            return None
        except Exception:
            return None
        if not (math.isfinite(a.err)
                and math.isfinite(abs(a.x1)) and math.isfinite(abs(a.p1))):
            return None
        return a

    def commit(self, a: StepAttempt) -> None:
        """Advance to the attempted state and build the dense interpolant."""
        h = a.h
        dx = a.x1 - self.x
        dp = a.p1 - self.p
        bx = h * a.k1x - dx
        bp = h * a.k1p - dp
        cx = dx - h * a.k7x - bx
        cp = dp - h * a.k7p - bp
        ex = h * (_D1 * a.k1x + _D3 * a.k3x + _D4 * a.k4x + _D5 * a.k5x
                  + _D6 * a.k6x + _D7 * a.k7x)
        ep = h * (_D1 * a.k1p + _D3 * a.k3p + _D4 * a.k4p + _D5 * a.k5p
                  + _D6 * a.k6p + _D7 * a.k7p)
        self.dense = DenseStep(self.t, h, self.x, dx, bx, cx, ex,
                               self.p, dp, bp, cp, ep)
        self.t += h
        self.x = a.x1
        self.p = a.p1
        self.k1x, self.k1p = a.k7x, a.k7p  # FSAL
        # standard I-controller for the next proposal
        fac = 0.9 * (a.err ** -0.2) if a.err > 1e-10 else 5.0
        self.h = min(h * min(5.0, max(0.2, fac)), self.max_step)

    def shrink_after_rejection(self, a: StepAttempt) -> float:
        """Step size to retry with after an error-based rejection."""
        fac = 0.9 * (a.err ** -0.2)
        return a.h * max(0.1, min(0.9, fac))

    def interp_attempt(self, a: StepAttempt, theta: float) -> tuple[complex, complex]:
        """Dense evaluation inside an uncommitted attempt, theta in [0, 1]."""
        h = a.h
        dx = a.x1 - self.x
        dp = a.p1 - self.p
        bx = h * a.k1x - dx
        bp = h * a.k1p - dp
        cx = dx - h * a.k7x - bx
        cp = dp - h * a.k7p - bp
        ex = h * (_D1 * a.k1x + _D3 * a.k3x + _D4 * a.k4x + _D5 * a.k5x
                  + _D6 * a.k6x + _D7 * a.k7x)
        ep = h * (_D1 * a.k1p + _D3 * a.k3p + _D4 * a.k4p + _D5 * a.k5p
                  + _D6 * a.k6p + _D7 * a.k7p)
        th1 = 1.0 - theta
        x = self.x + theta * (dx + th1 * (bx + theta * (cx + th1 * ex)))
        p = self.p + theta * (dp + th1 * (bp + theta * (cp + th1 * ep)))
        return x, p
