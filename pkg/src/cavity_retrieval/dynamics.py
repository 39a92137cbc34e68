"""Numerical integration of the coupled cavity / polarization / spin-wave
amplitudes and trajectory-level diagnostics.

The equations of motion are

    dE/dt = -(kappa + i delta) E + i w P
    dP/dt = -(gamma + i Delta) P + i w E + i Omega(t) S
    dS/dt =  i Omega(t) P

with E(t0) = P(t0) = 0 and S(t0) = 1, for a real non-negative envelope
Omega(t).  Integration continues past the requested end time until the
emitted flux has rung down (see `_stepper` for the stopping rule).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import _stepper
from .errors import (EmissionIncomplete, InsufficientSampling,
                     PulseNotNegligibleAtStart, ToleranceNotMet)
from .model import (PhysicalParams, Pulse, TimeGrid, Trajectory,
                    dynamic_rate_scale, evaluate_pulse)

def _max_step(params, pulse, grid) -> float:
    """Step cap keeping the cubic Hermite dense output commensurate with the
    solver tolerance: (h * rate)^4 / 384 ~ 100 * tol."""
    tol = min(max(grid.rel_tol, grid.abs_tol) * 100.0, 1e-2)
    return (384.0 * tol) ** 0.25 / dynamic_rate_scale(params, pulse)


@dataclass(frozen=True)
class SolverReport:
    """Bookkeeping from one integration run."""

    steps_accepted: int
    steps_rejected: int
    final_norm: float
    flux_tail: float
    emission_complete: bool


def simulate(params: PhysicalParams, pulse: Pulse, grid: TimeGrid,
             s0: complex = 1.0) -> tuple[Trajectory, SolverReport]:
    """Integrate the equations of motion and sample onto a uniform grid.

    Raises PulseNotNegligibleAtStart if Omega(t0)/Omega0 >= 1e-6, and
    ToleranceNotMet on step-size underflow.  ``s0`` sets the stored spin-wave
    amplitude at t0 (|s0| <= 1); the default matches the single-excitation
    phase convention.
    """
    if pulse.omega0 > 0.0:
        ratio = evaluate_pulse(pulse, grid.t0) / pulse.omega0
        if ratio >= _stepper.OMEGA_START_RATIO:
            raise PulseNotNegligibleAtStart(
                f"Omega(t0)/Omega0 = {ratio:.3e} at t0 = {grid.t0}; "
                "move t0 earlier (>= 2.24 tau before the pulse center)")
    if abs(s0) > 1.0 + 1e-12:
        raise ValueError(f"|s0| must be <= 1, got {abs(s0)}")

    h_max = _max_step(params, pulse, grid)

    (ts, Es, Ps, Ss, fE, fP, fS, n_acc, n_rej, status) = _stepper.integrate(
        params.kappa, params.delta, params.gamma, params.Delta, params.w,
        pulse.omega0, pulse.t_center, pulse.tau,
        grid.t0, grid.t_end, grid.rel_tol, grid.abs_tol, h_max, complex(s0))

    if status == _stepper.STATUS_UNDERFLOW:
        raise ToleranceNotMet(
            f"step size underflow at t = {ts[-1]:.6g} ns "
            f"(rel_tol={grid.rel_tol:g}, abs_tol={grid.abs_tol:g})")

    t_last = ts[-1]
    n_out = int(np.floor((t_last - grid.t0) / grid.dt_out)) + 1
    times = grid.t0 + grid.dt_out * np.arange(n_out)
    E = _stepper.sample_hermite(ts, Es, fE, times)
    P = _stepper.sample_hermite(ts, Ps, fP, times)
    S = _stepper.sample_hermite(ts, Ss, fS, times)

    traj = Trajectory(times=times, E=E, P=P, S=S, params=params, pulse=pulse)

    final_norm = float(abs(Es[-1]) ** 2 + abs(Ps[-1]) ** 2 + abs(Ss[-1]) ** 2)
    ep_end = float(abs(Es[-1]) ** 2 + abs(Ps[-1]) ** 2)
    tail = times >= t_last - pulse.tau
    flux_tail = float(2.0 * params.kappa *
                      simpson(np.abs(E[tail]) ** 2, x=times[tail]))
    report = SolverReport(
        steps_accepted=n_acc, steps_rejected=n_rej, final_norm=final_norm,
        flux_tail=flux_tail,
        emission_complete=(status == _stepper.STATUS_COMPLETE
                           or ep_end < _stepper.EP_STOP_TOL))
    return traj, report


def emission_complete(traj: Trajectory) -> bool:
    """Re-check the stopping rule on a trajectory's final sample."""
    pulse = traj.pulse
    if pulse.omega0 > 0.0:
        if evaluate_pulse(pulse, traj.times[-1]) >= _stepper.OMEGA_STOP_RATIO * pulse.omega0:
            return False
    ep = abs(traj.E[-1]) ** 2 + abs(traj.P[-1]) ** 2
    return bool(ep < _stepper.EP_STOP_TOL)


def require_emission_complete(traj: Trajectory):
    if not emission_complete(traj):
        raise EmissionIncomplete(
            "trajectory tail still carries flux; extend the time window")


def conservation_residual(traj: Trajectory) -> np.ndarray:
    """Residual of d/dt(|E|^2+|P|^2+|S|^2) = -2 gamma |P|^2 - 2 kappa |E|^2.

    The derivative is taken by central differences on the output grid, so the
    returned array has length n-2 and aligns with times[1:-1].  This checks
    the solver with machinery independent of its own derivative evaluations.
    """
    if len(traj.times) < 3:
        raise InsufficientSampling("need at least 3 samples for central differences")
    norm = traj.norm()
    dt = traj.dt
    dnorm = (norm[2:] - norm[:-2]) / (2.0 * dt)
    sink = (2.0 * traj.params.gamma * np.abs(traj.P[1:-1]) ** 2 +
            2.0 * traj.params.kappa * np.abs(traj.E[1:-1]) ** 2)
    return dnorm + sink


def dump_trajectory_csv(traj: Trajectory, path):
    """Write the trajectory with full double precision.

    Header: t_ns,Re_E,Im_E,Re_P,Im_P,Re_S,Im_S,Omega
    """
    om = traj.omega()
    with open(path, "w") as fh:
        fh.write("t_ns,Re_E,Im_E,Re_P,Im_P,Re_S,Im_S,Omega\n")
        for i, t in enumerate(traj.times):
            fh.write(f"{t:.17g},{traj.E[i].real:.17g},{traj.E[i].imag:.17g},"
                     f"{traj.P[i].real:.17g},{traj.P[i].imag:.17g},"
                     f"{traj.S[i].real:.17g},{traj.S[i].imag:.17g},{om[i]:.17g}\n")
