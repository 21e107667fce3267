import math

import pytest
from scipy.integrate import quad

from cplxdyn import (
    CATALOG,
    Contour,
    DomainError,
    Hamiltonian,
    contour_travel_time,
    preset_value,
    wkb_action,
)
from oracles import GOLDEN, ROUND_TRIP_TIME, TOF_HALFLINE, gauss_legendre


class TestPresets:
    def test_round_trip_value(self):
        value = preset_value("eq14")
        assert abs(value - ROUND_TRIP_TIME) < 1e-6
        assert abs(value.imag) < 1e-9

    def test_round_trip_against_real_integral_oracle(self):
        # independent route: T = Integral_1^phi sqrt((s^2-1)/(1+s-s^2)) ds
        # obtained by parametrizing the contour as x = i s
        def integrand(s):
            return math.sqrt((s * s - 1) / (1 + s - s * s))
        oracle, err = quad(integrand, 1.0, GOLDEN, points=[GOLDEN])
        assert err < 1e-9
        assert abs(preset_value("eq14").real - oracle) < 1e-8

    def test_quartic_half_line_tof(self):
        value = preset_value("tof-quartic")
        assert abs(value - TOF_HALFLINE) < 1e-6

    def test_tof_against_beta_oracle(self):
        # (1/2) Integral_0^inf (1+x^4)^{-1/2} dx via Gauss-Legendre after
        # u = 1/(1+x) compactification
        def integrand(u):
            x = (1 - u) / u
            return 0.5 / math.sqrt(1 + x**4) / (u * u)
        oracle = gauss_legendre(integrand, 1e-9, 1.0, panels=256).real
        assert abs(preset_value("tof-quartic").real - oracle) < 1e-6

    def test_wkb_harmonic_action(self):
        for energy in (1.0, 2.0):
            assert abs(wkb_action(Hamiltonian(2, CATALOG["harmonic"], energy),
                                  Contour.circle(0j, math.sqrt(energy) + 1),
                                  branch=0)
                       - math.pi * energy) < 1e-8

    def test_unknown_preset(self):
        with pytest.raises(DomainError):
            preset_value("nope")


class TestContours:
    def test_travel_time_is_additive(self, quartic):
        whole = contour_travel_time(quartic, Contour.polyline([2j, 1j, 0.5j]))
        first = contour_travel_time(quartic, Contour.polyline([2j, 1j]))
        second = contour_travel_time(quartic, Contour.polyline([1j, 0.5j]))
        assert abs(whole - first - second) < 1e-9

    def test_lower_path_between_quartic_turning_points(self, quartic):
        # path between e^{3i pi/4} and e^{i pi/4} dipping through the lower
        # region; stable under refinement of the polyline
        import cmath
        a, b = cmath.exp(3j * math.pi / 4), cmath.exp(1j * math.pi / 4)
        coarse = contour_travel_time(
            quartic, Contour.polyline([a, -0.6 - 0.6j, 0.6 - 0.6j, b]))
        fine = contour_travel_time(
            quartic, Contour.polyline(
                [a, -0.6 - 0.6j, -0.2 - 0.75j, 0.2 - 0.75j, 0.6 - 0.6j, b]))
        assert coarse == pytest.approx(fine, abs=2e-8)
        assert abs(coarse) > 0.1

    def test_segment_to_turning_point_two_rules_agree(self, quartic):
        import cmath
        # travel time along the chord i/2 -> turning point; second route is
        # Gauss-Legendre with the endpoint zero of p regularized by s = 1-u^2
        tp = cmath.exp(1j * math.pi / 4)

        def integrand(u):
            s = 1 - u * u
            x = 0.5j + s * (tp - 0.5j)
            p = cmath.sqrt(1 + x**4)
            return 2 * u * (tp - 0.5j) / (2 * p)

        gl = gauss_legendre(integrand, 0.0, 1.0, panels=128)
        quadpack = contour_travel_time(quartic, Contour.polyline([0.5j, tp]))
        assert abs(abs(gl) - abs(quadpack)) < 1e-8
