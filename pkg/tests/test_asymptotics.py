import cmath

import pytest

from cplxdyn import (
    BranchAmbiguity,
    DomainError,
    Hamiltonian,
    IntegratorConfig,
    escape_constant,
    integrate_toward,
    separatrix_asymptotics,
)
from oracles import ASYM_CLOSED_500, ASYM_NUMERIC_500, gauss_legendre

ESCAPE_CFG = IntegratorConfig(rtol=1e-12, atol=1e-14, t_max=510.0,
                              escape_radius=750.0, closure_tol=1e-300)


@pytest.fixture(scope="module")
def escape_traj(two_pole):
    h = Hamiltonian(2, two_pole, 0.5)
    return integrate_toward(h, 1.1j, 1 + 0j, ESCAPE_CFG)


class TestClosedForm:
    def test_escape_constant_is_time_of_flight_integral(self):
        # oracle: G(x1) - G(x0) = sqrt(2) t = integral of dx / sqrt(1 - 2V)
        # along a straight segment, by composite Gauss-Legendre
        x0, x1 = 2.0 + 1j, 6.0 + 2j

        def integrand(x):
            return 1.0 / cmath.sqrt(1.0 - 2.0 * x / (1 + x * x))

        line = gauss_legendre(lambda s: integrand(x0 + (x1 - x0) * s) * (x1 - x0),
                              0.0, 1.0, panels=128)
        assert escape_constant(x1) - escape_constant(x0) == pytest.approx(
            line, abs=1e-10)

    def test_singular_at_one(self):
        with pytest.raises(DomainError):
            escape_constant(1 + 0j)

    def test_asymptotic_position_reference_value(self):
        _, x_asym, _ = separatrix_asymptotics(1.1j, 500.0)
        assert x_asym == pytest.approx(ASYM_CLOSED_500, abs=1e-3)

    def test_constant_equals_g_at_start(self):
        K, _, _ = separatrix_asymptotics(2 + 2j, 100.0)
        assert K == escape_constant(2 + 2j)


class TestAgainstIntegration:
    def test_numeric_escape_position(self, escape_traj):
        assert escape_traj.position_at(500.0) == pytest.approx(
            ASYM_NUMERIC_500, abs=0.05)

    def test_asymptotic_matches_numeric_to_first_order(self, escape_traj):
        _, x_asym, _ = separatrix_asymptotics(1.1j, 500.0)
        assert abs(x_asym - escape_traj.position_at(500.0)) < 0.02

    def test_implicit_relation_constant_along_trajectory(self, escape_traj):
        _, _, resid = separatrix_asymptotics(1.1j, 500.0)
        worst = max(
            abs(resid(escape_traj.position_at(100.0 + 20.0 * k), 100.0 + 20.0 * k))
            for k in range(1, 21)
        )
        assert worst < 1e-6


class TestBranchGuard:
    def test_cut_crossing_is_flagged(self):
        _, _, resid = separatrix_asymptotics(1.1j, 500.0)
        with pytest.raises(BranchAmbiguity):
            resid(-2 - 1j, 1.0)

    def test_cut_free_segment_passes(self):
        _, _, resid = separatrix_asymptotics(1.1j, 500.0)
        resid(-2 + 0.5j, 1.0)  # same quadrant path, no crossing
