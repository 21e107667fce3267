"""Complex classical mechanics of H = p^n + V(x).

Trajectories in the complex position plane, turning points and poles,
separatrix tracing, Zeno capture, transit-time phase transitions, and the
quadrature machinery backing them.
"""

from .errors import (
    BranchAmbiguity,
    BranchDiscontinuity,
    CplxdynError,
    DegenerateEnergy,
    DomainError,
    EmptyPlot,
    ExpressionError,
    NoBracket,
    NoConvergence,
    NonFinite,
    NonRational,
    PoleEvaluation,
    PoleProximity,
    ProbeMiss,
    ScenarioError,
    StepSizeCollapse,
    UnsupportedOrder,
    UnsupportedPower,
    Unreached,
)
from .hamiltonian import (
    Hamiltonian,
    State,
    TurningPoint,
    classical_probability,
    energy_error,
    find_turning_points,
    hamilton_rhs,
    momentum_branches,
    resolve_branch,
)
from .potential import (
    CATALOG,
    EssentialExpPotential,
    PoleInfo,
    Potential,
    RationalPotential,
    eval_potential,
    find_poles,
    rational,
)
from .asymptotics import escape_constant, separatrix_asymptotics
from .deflection import DeflectionProbe, deflection_angle
from .exprparse import parse_potential, potential_source
from .quadrature import (
    Arc,
    Contour,
    Line,
    Ray,
    contour_travel_time,
    preset_value,
    wkb_action,
)
from .scenario import Scenario, Start, load_scenario, run
from .separatrix import (
    SeparatrixSeed,
    TrajectoryClass,
    classify_trajectory,
    pole_separatrix_seeds,
    separatrix_ray_angles,
    trace_separatrix,
)
from .trajectory import (
    Escape,
    IntegratorConfig,
    MaxSteps,
    MaxTime,
    Periodic,
    PoleEncounter,
    Trajectory,
    ZenoCapture,
    integrate,
    integrate_toward,
    same_sheet_intersections,
)
from .transit import (
    GridScanResult,
    TransitResult,
    transit_discontinuity,
    transit_grid,
    transit_time,
)

__version__ = "0.1.0"
