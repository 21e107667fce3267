import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cplxdyn import (
    CATALOG,
    DomainError,
    Hamiltonian,
    State,
    classical_probability,
    energy_error,
    find_turning_points,
    hamilton_rhs,
    momentum_branches,
    rational,
    resolve_branch,
)
from oracles import ESSENTIAL_TP_R, ESSENTIAL_TP_THETA

SQRT5 = math.sqrt(5)


class TestTurningPoints:
    def test_two_pole_third_energy(self, two_pole):
        h = Hamiltonian(2, two_pole, 1 / 3)
        locs = sorted(tp.location.real for tp in find_turning_points(h))
        assert locs == pytest.approx([(3 - SQRT5) / 2, (3 + SQRT5) / 2], abs=1e-8)

    def test_two_pole_half_energy_double_root(self, two_pole):
        h = Hamiltonian(2, two_pole, 0.5)
        (tp,) = find_turning_points(h)
        assert abs(tp.location - 1) < 1e-8
        assert tp.multiplicity == 2

    def test_pt_pole_unit_energy(self, two_pole_pt):
        h = Hamiltonian(2, two_pole_pt, 1.0)
        locs = sorted(tp.location.imag for tp in find_turning_points(h))
        assert locs == pytest.approx([(1 - SQRT5) / 2, (1 + SQRT5) / 2], abs=1e-8)

    def test_quartic_eighth_roots(self, quartic):
        points = find_turning_points(quartic)
        assert len(points) == 4
        for tp in points:
            assert abs(abs(tp.location) - 1) < 1e-10
            assert math.isclose(abs(abs(cmath.phase(tp.location))) % (math.pi / 2),
                                math.pi / 4, abs_tol=1e-8)

    def test_essential_family(self):
        h = Hamiltonian(2, CATALOG["essential"], math.e)
        points = find_turning_points(h, max_count=3)
        # k = 0 member at x = 1, then conjugate pairs marching into the origin
        assert any(abs(tp.location - 1) < 1e-12 for tp in points)
        (x1,) = [tp.location for tp in points
                 if tp.location.imag > 0 and abs(tp.location) < 0.5
                 and abs(tp.location) > 0.1]
        assert abs(abs(x1) - ESSENTIAL_TP_R) < 1e-5
        assert abs(cmath.phase(x1) - ESSENTIAL_TP_THETA) < 1e-5

    def test_region_filter(self, two_pole):
        h = Hamiltonian(2, two_pole, 1 / 3)
        points = find_turning_points(h, region=(0.0, 1.0, -1.0, 1.0))
        assert [tp.location.real for tp in points] == pytest.approx([(3 - SQRT5) / 2])


class TestMomentumBranches:
    def test_branch_count_and_energy(self, two_pole):
        h = Hamiltonian(3, two_pole, 1 / 3)
        branches = momentum_branches(h, 1 - 1j)
        assert len(branches) == 3
        for p in branches:
            assert energy_error(h, 1 - 1j, p) < 1e-12

    @given(re=st.floats(-3, 3), im=st.floats(-3, 3),
           n=st.integers(min_value=2, max_value=5))
    @settings(max_examples=80, deadline=None)
    def test_branches_evenly_spaced(self, re, im, n):
        x = complex(re, im)
        h = Hamiltonian(n, CATALOG["neg-quartic"], 1.0)
        if abs(1 + x**4) < 1e-6:
            return
        branches = momentum_branches(h, x)
        base = branches[0]
        for k, p in enumerate(branches):
            rotated = base * cmath.exp(2j * math.pi * k / n)
            assert cmath.isclose(p, rotated, rel_tol=1e-9, abs_tol=1e-12)

    def test_resolve_branch_eastward(self, two_pole):
        h = Hamiltonian(3, two_pole, 1 / 3)
        k = resolve_branch(h, -1 + 1j, 1 + 0j)
        xdot = 3 * momentum_branches(h, -1 + 1j)[k] ** 2
        assert xdot.real > 0
        others = [3 * p**2 for i, p in enumerate(momentum_branches(h, -1 + 1j))
                  if i != k]
        assert all(xdot.real >= o.real - 1e-12 for o in others)


class TestRhs:
    def test_quartic_rhs(self, quartic):
        xdot, pdot = hamilton_rhs(quartic, State(0.0, 0.3 + 0.2j, 0.5 - 0.1j))
        assert xdot == 2 * (0.5 - 0.1j)
        assert abs(pdot - 4 * (0.3 + 0.2j) ** 3) < 1e-14

    def test_free_cubic_rhs(self):
        h = Hamiltonian(3, CATALOG["free"], 1.0)
        xdot, pdot = hamilton_rhs(h, State(0.0, 0j, 1 + 0j))
        assert xdot == 3 and pdot == 0

    def test_stationary_at_barrier_top(self, two_pole):
        h = Hamiltonian(2, two_pole, 0.5)
        _, pdot = hamilton_rhs(h, State(0.0, 1 + 0j, 0j))
        assert abs(pdot) < 1e-14


class TestProbability:
    @pytest.mark.parametrize("energy", [0.5, 1.0, 2.0])
    def test_normalization(self, energy):
        total, err = quad(lambda x: classical_probability(energy, x),
                          -math.inf, math.inf)
        assert abs(total - 1) < 1e-6

    def test_peak_at_origin(self):
        assert classical_probability(1.0, 0.0) > classical_probability(1.0, 2.0)

    def test_requires_positive_energy(self):
        with pytest.raises(DomainError):
            classical_probability(-1.0, 0.0)
