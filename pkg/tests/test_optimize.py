import numpy as np
import pytest

from cavity_retrieval import (PhysicalParams, Pulse, joint_refine,
                              optimize_delta, two_stage)
from cavity_retrieval.model import angular_to_mhz, mhz_to_angular
from cavity_retrieval.optimize import (BoundaryMaximumWarning,
                                       golden_section_max)


class TestGoldenSection:
    def test_quadratic_maximum(self):
        x, fx, evals = golden_section_max(lambda x: -(x - 0.7) ** 2, 0.0, 2.0,
                                          1e-8)
        assert x == pytest.approx(0.7, abs=1e-7)
        assert fx == pytest.approx(0.0, abs=1e-13)
        assert evals < 60

    def test_asymmetric_bracket(self):
        x, _, _ = golden_section_max(lambda x: np.cos(x), -1.0, 2.5, 1e-9)
        assert x == pytest.approx(0.0, abs=5e-8)


class TestOptimizeDelta:
    def test_resonant_point_is_self_mirrored(self):
        # Delta = 0 forces delta_opt = 0 by the sign mapping
        params = PhysicalParams.from_mhz(9, 3, C=100)
        pulse = Pulse.from_mhz(40, 150)
        res = optimize_delta(params, pulse)
        assert abs(angular_to_mhz(res.delta_opt)) < 0.05
        assert not res.boundary
        assert res.evaluations > 100

    def test_detuned_point_needs_compensation(self):
        params = PhysicalParams.from_mhz(9, 3, w_mhz=46.5, Delta_mhz=120)
        pulse = Pulse.from_mhz(13, 150)
        res = optimize_delta(params, pulse)
        assert angular_to_mhz(res.delta_opt) == pytest.approx(15.7, abs=0.3)

    def test_boundary_maximum_flagged(self):
        params = PhysicalParams.from_mhz(9, 3, C=100, Delta_mhz=120)
        pulse = Pulse.from_mhz(13, 150)
        with pytest.warns(BoundaryMaximumWarning):
            res = optimize_delta(params, pulse, span_mhz=(-40.0, 5.0))
        assert res.boundary

    def test_unknown_objective_rejected(self):
        params = PhysicalParams.from_mhz(9, 3, C=100)
        with pytest.raises(ValueError):
            optimize_delta(params, Pulse.from_mhz(40, 150), objective="fidelity")


class TestTwoStage:
    def test_resonant_fixed_point(self):
        params = PhysicalParams.from_mhz(9, 3, C=100)
        res = two_stage(params, Pulse.from_mhz(80, 150))
        assert abs(angular_to_mhz(res.delta_opt)) < 0.05
        assert abs(angular_to_mhz(res.omega_opt)) < 0.05
        assert res.chi == pytest.approx(1.0, abs=1e-4)
        assert res.chi_eta == pytest.approx(res.chi * res.eta, rel=1e-9)

    def test_mirrored_points(self):
        pulse = Pulse.from_mhz(13, 150)
        plus = two_stage(PhysicalParams.from_mhz(9, 3, C=100, Delta_mhz=120),
                         pulse)
        minus = two_stage(PhysicalParams.from_mhz(9, 3, C=100, Delta_mhz=-120),
                          pulse)
        assert minus.delta_opt == pytest.approx(-plus.delta_opt,
                                                abs=mhz_to_angular(0.02))
        assert minus.omega_opt == pytest.approx(-plus.omega_opt,
                                                abs=mhz_to_angular(0.001))
        assert minus.eta == pytest.approx(plus.eta, abs=1e-4)
        assert minus.chi_eta == pytest.approx(plus.chi_eta, abs=1e-4)

    def test_deterministic(self):
        params = PhysicalParams.from_mhz(9, 3, C=100, Delta_mhz=60)
        pulse = Pulse.from_mhz(30, 150)
        a = two_stage(params, pulse)
        b = two_stage(params, pulse)
        assert a.delta_opt == b.delta_opt
        assert a.omega_opt == b.omega_opt
        assert a.eta == b.eta
        assert a.chi_eta == b.chi_eta


class TestJointRefine:
    def test_never_decreases(self):
        params = PhysicalParams.from_mhz(9, 3, w_mhz=46.5, Delta_mhz=120)
        pulse = Pulse.from_mhz(13, 150)
        seed = two_stage(params, pulse)
        refined = joint_refine(seed)
        assert refined.chi_eta >= seed.chi_eta - 1e-6
        assert refined.stage == "joint-refined"

    def test_gain_is_negligible_in_linear_phase_regime(self):
        params = PhysicalParams.from_mhz(9, 3, w_mhz=46.5, Delta_mhz=120)
        pulse = Pulse.from_mhz(13, 150)
        seed = two_stage(params, pulse)
        refined = joint_refine(seed)
        assert refined.chi_eta - seed.chi_eta < 0.005

    def test_resonant_fixed_point(self):
        params = PhysicalParams.from_mhz(9, 3, C=100)
        seed = two_stage(params, Pulse.from_mhz(80, 150))
        refined = joint_refine(seed)
        assert abs(angular_to_mhz(refined.delta_opt)) < 0.1
        assert abs(angular_to_mhz(refined.omega_opt)) < 0.1
        assert refined.chi_eta >= seed.chi_eta - 1e-6
