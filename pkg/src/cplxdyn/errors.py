"""Exception hierarchy shared across the package."""


class CplxdynError(Exception):
    """Base class for all package-specific failures."""


class PoleEvaluation(CplxdynError):
    """Potential evaluated on (or numerically at) a pole of V."""


class NonFinite(CplxdynError):
    """A computation overflowed or produced non-finite components."""


class DegenerateEnergy(CplxdynError):
    """E*Q - P vanishes identically; every point is a turning point."""


class NoConvergence(CplxdynError):
    """Newton polishing failed to reach the requested residual."""


class DomainError(CplxdynError):
    """Argument outside the mathematical domain of the formula."""


class BranchDiscontinuity(CplxdynError):
    """Continuous branch selection failed along a contour."""


class PoleProximity(CplxdynError):
    """State is inside the guard radius of a pole."""


class StepSizeCollapse(CplxdynError):
    """Adaptive step collapsed below resolution away from any pole."""


class UnsupportedOrder(CplxdynError):
    """Operation requires a simple pole."""


class UnsupportedPower(CplxdynError):
    """Operation is only defined for a specific momentum power."""


class Unreached(CplxdynError):
    """Trajectory terminated before approaching the requested target.

    Carries the partial result (closest approach, branch side) when the
    caller may still want it.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class NoBracket(CplxdynError):
    """Bisection endpoints classify identically; nothing to localize."""


class ProbeMiss(CplxdynError):
    """Deflection probe never entered the measurement circle."""


class BranchAmbiguity(CplxdynError):
    """A logarithm argument crossed the negative real axis."""


class ExpressionError(CplxdynError):
    """Potential expression rejected; carries the character offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class NonRational(ExpressionError):
    """exp(1/x) mixed with other terms."""


class ScenarioError(CplxdynError):
    """Scenario file failed validation."""


class EmptyPlot(CplxdynError):
    """No data intersects the requested plot region."""
