"""Physical parameters, read-pulse shapes, time grids and trajectory containers.

Unit conventions
----------------
All internal angular frequencies are in rad/ns and times in ns.  Configuration
and reported values use the nu-convention (MHz, i.e. omega / 2 pi), so a value
quoted as "80 MHz" enters the equations as ``2 pi * 0.080 rad/ns``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
FOUR_LN2 = 4.0 * math.log(2.0)

GAUSSIAN = "gaussian"
_PULSE_SHAPES = (GAUSSIAN,)


def mhz_to_angular(nu_mhz):
    """Convert a frequency in MHz (nu-convention) to rad/ns."""
    return TWO_PI * 1e-3 * np.asarray(nu_mhz, dtype=float)[()]


def angular_to_mhz(omega):
    """Convert an angular frequency in rad/ns back to MHz."""
    return np.asarray(omega, dtype=float)[()] * 1e3 / TWO_PI


@dataclass(frozen=True)
class PhysicalParams:
    """Rates and detunings of the three-level atom-cavity system (rad/ns).

    kappa : cavity field decay rate
    gamma : polarization decay rate
    w     : collective coupling g*sqrt(N)
    Delta : detuning between the driving laser and the atomic line
    delta : detuning between the Raman light and the cavity
    """

    kappa: float
    gamma: float
    w: float
    Delta: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "gamma", "w", "Delta", "delta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.w < 0.0:
            raise ValueError(f"w must be >= 0, got {self.w}")

    @classmethod
    def from_mhz(cls, kappa_mhz, gamma_mhz, C=None, w_mhz=None,
                 Delta_mhz=0.0, delta_mhz=0.0) -> "PhysicalParams":
        """Build parameters from MHz-convention values.

        Exactly one of ``C`` (cooperativity) and ``w_mhz`` is required; if both
        are given they must agree under C = w^2/(kappa*gamma) to within 1%.
        """
        kappa = mhz_to_angular(kappa_mhz)
        gamma = mhz_to_angular(gamma_mhz)
        if C is None and w_mhz is None:
            raise ValueError("one of C or w_mhz is required")
        if w_mhz is not None:
            w = mhz_to_angular(w_mhz)
            if C is not None:
                implied = w * w / (kappa * gamma)
                if abs(implied - C) > 0.01 * abs(C):
                    raise ValueError(
                        f"inconsistent coupling: C={C} but w implies C={implied:.4g}")
        else:
            if C < 0.0:
                raise ValueError(f"C must be >= 0, got {C}")
            w = math.sqrt(C * kappa * gamma)
        return cls(kappa=kappa, gamma=gamma, w=w,
                   Delta=mhz_to_angular(Delta_mhz), delta=mhz_to_angular(delta_mhz))

    def cooperativity(self) -> float:
        return self.w ** 2 / (self.kappa * self.gamma)


@dataclass(frozen=True)
class Pulse:
    """Classical read field Omega(t): real, non-negative envelope.

    omega0   : peak Rabi frequency (rad/ns)
    tau      : FWHM of Omega(t) itself, not of the intensity (ns)
    t_center : time of the pulse peak (ns)
    """

    omega0: float
    tau: float
    t_center: float = 0.0
    shape: str = GAUSSIAN

    def __post_init__(self):
        if self.shape not in _PULSE_SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if self.omega0 < 0.0:
            raise ValueError(f"omega0 must be >= 0, got {self.omega0}")
        if self.tau <= 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")

    @classmethod
    def from_mhz(cls, omega0_mhz, tau_ns, t_center_ns=None, shape=GAUSSIAN) -> "Pulse":
        """Gaussian read pulse from MHz peak Rabi frequency.

        By default the pulse peaks at 2.5 tau so that the envelope at t=0 is
        below 2e-8 of the peak and the initial condition E=P=0, S=1 holds.
        """
        tc = 2.5 * tau_ns if t_center_ns is None else t_center_ns
        return cls(omega0=mhz_to_angular(omega0_mhz), tau=tau_ns,
                   t_center=tc, shape=shape)


def evaluate_pulse(pulse: Pulse, t):
    """Rabi frequency Omega(t) in rad/ns; total and side-effect free."""
    x = (np.asarray(t, dtype=float) - pulse.t_center) / pulse.tau
    return (pulse.omega0 * np.exp(-FOUR_LN2 * x * x))[()]


def pulse_derivative(pulse: Pulse, t):
    """Closed-form dOmega/dt for the Gaussian envelope."""
    t = np.asarray(t, dtype=float)
    x = t - pulse.t_center
    return (evaluate_pulse(pulse, t) * (-2.0 * FOUR_LN2 * x / pulse.tau ** 2))[()]


def dynamic_rate_scale(params: PhysicalParams, pulse: Pulse) -> float:
    """Largest angular rate in the problem; sets step and sampling scales."""
    return max(params.w, params.kappa, params.gamma,
               abs(params.Delta), abs(params.delta), pulse.omega0)


@dataclass(frozen=True)
class TimeGrid:
    """Integration window, output sampling interval and solver tolerances."""

    t0: float
    t_end: float
    dt_out: float
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10

    def __post_init__(self):
        if not self.t0 < self.t_end:
            raise ValueError(f"need t0 < t_end, got [{self.t0}, {self.t_end}]")
        if self.dt_out <= 0.0:
            raise ValueError(f"dt_out must be > 0, got {self.dt_out}")
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be > 0")

    @classmethod
    def for_pulse(cls, params: PhysicalParams, pulse: Pulse, dt_out=None,
                  rel_tol=1e-10, abs_tol=1e-10) -> "TimeGrid":
        """Default window: [t_center - 2.5 tau, t_center + 2.5 tau].

        The envelope at the start is below 2e-8 of the peak, and the solver
        extends past t_end on its own until emission is complete.  dt_out
        defaults to min(tau/100, 1/(12 * fastest rate)) which satisfies the
        sampling recommendation for finite-difference diagnostics.
        """
        if dt_out is None:
            scale = dynamic_rate_scale(params, pulse)
            dt_out = min(pulse.tau / 100.0, 1.0 / (12.0 * scale))
        return cls(t0=pulse.t_center - 2.5 * pulse.tau,
                   t_end=pulse.t_center + 2.5 * pulse.tau,
                   dt_out=dt_out, rel_tol=rel_tol, abs_tol=abs_tol)


@dataclass(frozen=True)
class Trajectory:
    """Time-sampled complex amplitudes of the cavity field E, polarization P
    and spin wave S, with the parameter and pulse snapshots that produced them.
    """

    times: np.ndarray
    E: np.ndarray
    P: np.ndarray
    S: np.ndarray
    params: PhysicalParams
    pulse: Pulse

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.E) == len(self.P) == len(self.S) == n):
            raise ValueError("E, P, S must have the same length as times")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def norm(self) -> np.ndarray:
        """|E|^2 + |P|^2 + |S|^2 per sample."""
        return (np.abs(self.E) ** 2 + np.abs(self.P) ** 2 + np.abs(self.S) ** 2)

    def omega(self) -> np.ndarray:
        """Read-pulse envelope evaluated on the sample grid."""
        return evaluate_pulse(self.pulse, self.times)


def output_field(traj: Trajectory) -> np.ndarray:
    """Field leaking out of the cavity, E_out(t) = sqrt(2 kappa) E(t)."""
    return np.sqrt(2.0 * traj.params.kappa) * traj.E
