import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cavity_retrieval.model import (PhysicalParams, Pulse, TimeGrid,
                                    angular_to_mhz, evaluate_pulse,
                                    mhz_to_angular, output_field,
                                    pulse_derivative)

TWO_PI = 2 * math.pi


class TestUnits:
    def test_known_conversion(self):
        # 80 MHz -> 2pi * 0.08 rad/ns
        assert mhz_to_angular(80.0) == pytest.approx(TWO_PI * 0.08, rel=1e-15)

    @given(st.floats(min_value=1e-6, max_value=1e6))
    def test_round_trip_12_digits(self, nu):
        assert angular_to_mhz(mhz_to_angular(nu)) == pytest.approx(nu, rel=1e-12)


class TestPhysicalParams:
    def test_from_cooperativity(self):
        p = PhysicalParams.from_mhz(9, 3, C=100)
        assert p.cooperativity() == pytest.approx(100.0, rel=1e-12)
        assert angular_to_mhz(p.w) == pytest.approx(math.sqrt(2700), rel=1e-12)

    def test_from_w(self):
        p = PhysicalParams.from_mhz(9, 3, w_mhz=46.5)
        assert p.cooperativity() == pytest.approx(46.5 ** 2 / 27, rel=1e-12)

    def test_conflicting_coupling_rejected(self):
        with pytest.raises(ValueError, match="inconsistent"):
            PhysicalParams.from_mhz(9, 3, C=100, w_mhz=46.5)

    def test_consistent_coupling_accepted(self):
        p = PhysicalParams.from_mhz(9, 3, C=100, w_mhz=math.sqrt(2700))
        assert p.cooperativity() == pytest.approx(100.0, rel=1e-6)

    def test_coupling_required(self):
        with pytest.raises(ValueError):
            PhysicalParams.from_mhz(9, 3)

    @pytest.mark.parametrize("bad", [dict(kappa=0.0), dict(gamma=-1.0),
                                     dict(w=-0.1), dict(Delta=float("nan"))])
    def test_invalid_rates(self, bad):
        kwargs = dict(kappa=0.05, gamma=0.02, w=0.3)
        kwargs.update(bad)
        with pytest.raises(ValueError):
            PhysicalParams(**kwargs)


class TestPulse:
    def setup_method(self):
        self.pulse = Pulse(omega0=TWO_PI * 0.08, tau=200.0, t_center=500.0)

    def test_peak_value(self):
        assert evaluate_pulse(self.pulse, 500.0) == TWO_PI * 0.08

    def test_half_maximum_at_fwhm(self):
        assert evaluate_pulse(self.pulse, 600.0) == pytest.approx(
            TWO_PI * 0.04, rel=1e-14)
        assert evaluate_pulse(self.pulse, 400.0) == pytest.approx(
            TWO_PI * 0.04, rel=1e-14)

    def test_one_fwhm_from_center(self):
        # exp(-4 ln 2) = 1/16 exactly
        assert evaluate_pulse(self.pulse, 700.0) == pytest.approx(
            TWO_PI * 0.08 / 16.0, rel=1e-13)

    @given(st.floats(min_value=0.0, max_value=2000.0))
    def test_symmetry_about_center(self, s):
        left = evaluate_pulse(self.pulse, self.pulse.t_center - s)
        right = evaluate_pulse(self.pulse, self.pulse.t_center + s)
        assert left == pytest.approx(right, rel=1e-12, abs=1e-300)

    @given(st.floats(min_value=-3000.0, max_value=3000.0))
    def test_real_nonnegative(self, t):
        assert evaluate_pulse(self.pulse, t) >= 0.0

    def test_derivative_matches_finite_difference(self):
        t = np.linspace(100.0, 900.0, 41)
        h = 1e-5
        fd = (evaluate_pulse(self.pulse, t + h) -
              evaluate_pulse(self.pulse, t - h)) / (2 * h)
        assert np.allclose(pulse_derivative(self.pulse, t), fd,
                           rtol=1e-8, atol=1e-12)

    def test_default_center_keeps_start_negligible(self):
        # at 2.5 tau from the peak the envelope is exactly 2^-25 ~ 3e-8
        pulse = Pulse.from_mhz(80, 150)
        ratio = evaluate_pulse(pulse, 0.0) / pulse.omega0
        assert ratio == pytest.approx(2.0 ** -25, rel=1e-12)
        assert ratio < 1e-6

    @pytest.mark.parametrize("bad", [dict(omega0=-1.0), dict(tau=0.0),
                                     dict(shape="square")])
    def test_invalid_pulse(self, bad):
        kwargs = dict(omega0=0.5, tau=150.0)
        kwargs.update(bad)
        with pytest.raises(ValueError):
            Pulse(**kwargs)


class TestTimeGrid:
    def test_default_window(self):
        params = PhysicalParams.from_mhz(9, 3, C=100)
        pulse = Pulse.from_mhz(80, 150)
        grid = TimeGrid.for_pulse(params, pulse)
        assert grid.t0 == pytest.approx(pulse.t_center - 2.5 * 150)
        assert grid.t_end == pytest.approx(pulse.t_center + 2.5 * 150)
        # sampling recommendation: dt <= 1/(10 max rate)
        assert grid.dt_out <= 1.0 / (10.0 * pulse.omega0)

    def test_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(t0=10.0, t_end=0.0, dt_out=0.1)
        with pytest.raises(ValueError):
            TimeGrid(t0=0.0, t_end=10.0, dt_out=-0.1)
        with pytest.raises(ValueError):
            TimeGrid(t0=0.0, t_end=10.0, dt_out=0.1, rel_tol=0.0)


class TestOutputField:
    def test_zero_field(self, plateau):
        _, _, _, traj, _ = plateau
        from dataclasses import replace
        silent = replace(traj, E=np.zeros_like(traj.E))
        assert np.all(output_field(silent) == 0.0)

    def test_scaling(self, plateau):
        params, _, _, traj, _ = plateau
        # kappa/2pi = 9 MHz, E = 0.1 -> E_out = sqrt(2 kappa) * 0.1
        i = np.argmin(np.abs(np.abs(traj.E) - 0.1))
        expected = math.sqrt(2 * mhz_to_angular(9)) * traj.E[i]
        assert output_field(traj)[i] == pytest.approx(expected, rel=1e-14)

    def test_mismatched_lengths_rejected(self, plateau):
        from dataclasses import replace
        _, _, _, traj, _ = plateau
        with pytest.raises(ValueError):
            replace(traj, E=traj.E[:-1])
