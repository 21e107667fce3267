import math

import pytest

from cplxdyn import (
    CATALOG,
    Escape,
    Hamiltonian,
    IntegratorConfig,
    MaxTime,
    Periodic,
    PoleEncounter,
    StepSizeCollapse,
    ZenoCapture,
    energy_error,
    integrate,
    integrate_toward,
    momentum_branches,
    same_sheet_intersections,
)
from oracles import QUARTIC_PERIOD, rhs_quartic, rhs_two_pole_pt, rk4


class TestConfig:
    def test_defaults_valid(self):
        IntegratorConfig()

    @pytest.mark.parametrize("field,value", [
        ("t_max", 0.0), ("escape_radius", -1.0), ("pole_radius", 0.0),
        ("closure_tol", 0.0), ("max_step", 0.0), ("zeno_speed", -1e-9),
        ("max_steps", 0), ("rtol", 1e-16),
    ])
    def test_invalid_fields_rejected(self, field, value):
        with pytest.raises(ValueError):
            IntegratorConfig(**{field: value})


class TestTerminations:
    def test_quartic_orbit_closes(self, quartic):
        traj = integrate(quartic, 0.5j, 0)
        assert isinstance(traj.termination, Periodic)
        assert traj.termination.period == pytest.approx(QUARTIC_PERIOD, abs=1e-6)

    def test_escape_direction(self):
        h = Hamiltonian(2, CATALOG["free"], 1.0)
        traj = integrate(h, 0j, 0, IntegratorConfig(escape_radius=5.0))
        assert isinstance(traj.termination, Escape)
        d = traj.termination.direction
        assert abs(d - 1) < 1e-9  # rightward unit vector
        assert abs(abs(traj.samples[-1].x) - 5.0) < 1e-6

    def test_pole_encounter(self):
        # V = 1/x dives to -inf on the negative real axis, so an eastward
        # start falls into the origin pole in finite time
        h = Hamiltonian(2, CATALOG["inverse"], 1.0)
        traj = integrate_toward(h, -1 + 0j, 1 + 0j)
        assert isinstance(traj.termination, PoleEncounter)
        assert traj.termination.pole == 0j
        assert abs(traj.samples[-1].x) < 2e-3

    def test_zeno_capture_at_double_turning_point(self, two_pole):
        h = Hamiltonian(2, two_pole, 0.5)
        cfg = IntegratorConfig(rtol=1e-12, atol=1e-14, zeno_speed=1e-5,
                               t_max=30.0)
        traj = integrate_toward(h, -2 + 0j, 1 + 0j, cfg)
        assert isinstance(traj.termination, ZenoCapture)
        assert abs(traj.termination.turning_point - 1) < 1e-6
        assert abs(traj.samples[-1].x - 1) < 1e-3

    def test_max_time(self, quartic):
        traj = integrate(quartic, 0.5j, 0, IntegratorConfig(
            t_max=0.5, closure_tol=1e-300))
        assert isinstance(traj.termination, MaxTime)
        assert traj.samples[-1].t == pytest.approx(0.5)

    def test_step_collapse_reported_distinctly(self, quartic):
        # real-axis quartic escape blows up in finite time; with the escape
        # guard pushed out the step size collapses far from any pole
        with pytest.raises(StepSizeCollapse):
            integrate(quartic, 2.0 + 0j, 0, IntegratorConfig(
                escape_radius=1e16, t_max=10.0))


class TestAccuracy:
    def test_energy_conserved_along_orbit(self, quartic):
        traj = integrate(quartic, 1j, 0)
        assert max(s.energy_error for s in traj.samples) < 1e-8

    def test_against_fixed_step_oracle(self, quartic):
        traj = integrate(quartic, 0.5j, 0, IntegratorConfig(
            t_max=1.0, closure_tol=1e-300, rtol=1e-11, atol=1e-13))
        x_ref, p_ref = rk4(rhs_quartic, 0.5j, traj.samples[0].p, 1.0, 40000)
        x_num, p_num = traj.state_at(1.0)
        assert abs(x_num - x_ref) < 1e-6
        assert abs(p_num - p_ref) < 1e-6

    def test_pt_oracle_agreement(self, two_pole_pt):
        h = Hamiltonian(2, two_pole_pt, 1.0)
        traj = integrate_toward(h, 5 - 0.5j, -1 + 0j, IntegratorConfig(
            t_max=2.0, rtol=1e-11, atol=1e-13))
        x_ref, _ = rk4(rhs_two_pole_pt, 5 - 0.5j, traj.samples[0].p, 2.0, 40000)
        assert abs(traj.position_at(2.0) - x_ref) < 1e-6

    def test_time_reversal_returns_to_start(self, two_pole):
        h = Hamiltonian(2, two_pole, 1 / 3)
        fwd = integrate_toward(h, -1 + 1j, 1 + 0j, IntegratorConfig(
            t_max=2.0, closure_tol=1e-300))
        x1, p1 = fwd.state_at(2.0)
        back = integrate(h, x1, 0, IntegratorConfig(
            t_max=2.0, closure_tol=1e-300), p0=-p1)
        x_back, p_back = back.state_at(2.0)
        assert abs(x_back - (-1 + 1j)) < 1e-6
        assert abs(-p_back - fwd.samples[0].p) < 1e-6

    def test_pt_mirror_symmetry(self, two_pole_pt):
        # for V(x) with PT symmetry, x -> -conj(x), p -> -conj(p) maps
        # trajectories to trajectories
        h = Hamiltonian(2, two_pole_pt, 1.0)
        cfg = IntegratorConfig(t_max=3.0, closure_tol=1e-300)
        fwd = integrate_toward(h, 5 - 0.5j, -1 + 0j, cfg)
        p0 = fwd.samples[0].p
        mirror = integrate(h, -5 - 0.5j, 0, cfg, p0=-p0.conjugate())
        for t in (0.5, 1.5, 2.5):
            assert abs(mirror.position_at(t) - (-fwd.position_at(t).conjugate())) < 1e-6


class TestSheets:
    def test_phase_continuity(self, two_pole):
        h = Hamiltonian(3, two_pole, 1 / 3)
        traj = integrate(h, 1 - 1j, 1, IntegratorConfig(t_max=10.0))
        phases = [s.phase for s in traj.samples]
        jumps = [abs(b - a) for a, b in zip(phases, phases[1:])]
        assert max(jumps) <= math.pi / 2 + 1e-9

    def test_branch_consistency(self, two_pole):
        h = Hamiltonian(3, two_pole, 1 / 3)
        for branch in range(3):
            traj = integrate(h, 2 + 2j, branch, IntegratorConfig(t_max=0.1,
                                                                 closure_tol=1e-300))
            assert traj.samples[0].p == momentum_branches(h, 2 + 2j)[branch]

    def test_double_encirclement_crosses_only_off_sheet(self, two_pole):
        # northwest start encircling both turning points: path crosses itself
        # geometrically but lands on different momentum sheets each pass
        h = Hamiltonian(3, two_pole, 1 / 3)
        traj = integrate_toward(h, 1 - 1j, -1 + 1j, IntegratorConfig(t_max=20.0))
        assert same_sheet_intersections(traj, 0.02, 1.0) == []
        total_turn = traj.samples[-1].phase - traj.samples[0].phase
        assert abs(total_turn) > math.pi  # winds between sheets as it turns


class TestSampling:
    def test_state_interpolation_matches_samples(self, quartic):
        traj = integrate(quartic, 0.5j, 0)
        mid = traj.samples[len(traj.samples) // 2]
        x, p = traj.state_at(mid.t)
        assert abs(x - mid.x) < 1e-12
        assert abs(p - mid.p) < 1e-12

    def test_interpolation_between_samples_conserves_energy(self, quartic):
        traj = integrate(quartic, 0.5j, 0)
        a, b = traj.samples[3], traj.samples[4]
        t = 0.5 * (a.t + b.t)
        x, p = traj.state_at(t)
        # interpolant error sits above the per-step tolerance
        assert energy_error(quartic, x, p) < 1e-6

    def test_clamps_beyond_final_time(self, quartic):
        traj = integrate(quartic, 0.5j, 0)
        end = traj.samples[-1]
        assert traj.position_at(end.t + 100.0) == end.x

    def test_speed_inverse_recorded(self, quartic):
        traj = integrate(quartic, 0.5j, 0)
        s = traj.samples[len(traj.samples) // 3]
        assert s.speed_inverse == pytest.approx(1.0 / abs(2 * s.p), rel=1e-9)
