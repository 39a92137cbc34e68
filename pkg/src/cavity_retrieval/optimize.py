"""Two-stage detuning optimization.

For nonzero laser-atom detuning the atoms pull the cavity resonance; a cavity
detuning delta restores the efficiency.  Stage one finds delta maximizing the
retrieval efficiency, stage two matches the LO frequency at that detuning.
The product chi*eta equals max over omega0 of I0(delta, omega0), so the
"chi-eta" objective optimizes that directly.  A joint coordinate-descent
refinement is available but, in the linear-phase regime, gains nothing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import simulate
from .efficiency import retrieval_efficiency
from .homodyne import REFINE_TOL as LO_REFINE_TOL
from .homodyne import homodyne_signal, matched_filter, optimize_lo_frequency
from .model import PhysicalParams, Pulse, TimeGrid, mhz_to_angular

OBJECTIVE_ETA = "eta"
OBJECTIVE_CHI_ETA = "chi-eta"

STAGE_ETA_THEN_CHI = "eta-then-chi"
STAGE_JOINT_REFINED = "joint-refined"

# delta search defaults, rad/ns
SEARCH_MHZ = 40.0
COARSE_STEP_MHZ = 0.5
REFINE_TOL = mhz_to_angular(0.01)

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


class BoundaryMaximumWarning(UserWarning):
    """The best objective value sits on the edge of the search interval."""


def golden_section_max(f, a, b, xtol, fa=None, fb=None):
    """Maximize f on [a, b] by golden-section search.

    Returns (x_best, f_best, n_evals).  The interval should bracket a single
    local maximum; endpoint values may be passed to save two evaluations.
    """
    evals = 0
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    evals += 2
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        evals += 1
    if fc > fd:
        return c, fc, evals
    return d, fd, evals


class _Objective:
    """delta -> figure of merit, counting solver calls."""

    def __init__(self, params: PhysicalParams, pulse: Pulse, objective: str,
                 rel_tol: float):
        if objective not in (OBJECTIVE_ETA, OBJECTIVE_CHI_ETA):
            raise ValueError(f"unknown objective {objective!r}")
        self.params = params
        self.pulse = pulse
        self.objective = objective
        self.rel_tol = rel_tol
        self.evaluations = 0

    def trajectory(self, delta: float):
        params = replace(self.params, delta=delta)
        grid = TimeGrid.for_pulse(params, self.pulse,
                                  rel_tol=self.rel_tol, abs_tol=self.rel_tol)
        traj, _ = simulate(params, self.pulse, grid)
        self.evaluations += 1
        return traj

    def __call__(self, delta: float) -> float:
        traj = self.trajectory(delta)
        if self.objective == OBJECTIVE_ETA:
            return retrieval_efficiency(traj)
        return optimize_lo_frequency(traj).I0_max


@dataclass(frozen=True)
class DeltaOptimum:
    delta_opt: float
    value: float
    evaluations: int
    boundary: bool


def optimize_delta(params: PhysicalParams, pulse: Pulse,
                   objective: str = OBJECTIVE_ETA,
                   span_mhz: tuple = (-SEARCH_MHZ, SEARCH_MHZ),
                   coarse_step_mhz: float = COARSE_STEP_MHZ,
                   refine_tol: float = REFINE_TOL,
                   rel_tol: float = 1e-10) -> DeltaOptimum:
    """Cavity detuning maximizing eta (or chi*eta) for fixed other parameters.

    Coarse grid over span_mhz at coarse_step_mhz spacing, then golden-section
    refinement on the bracketing triple.  params.delta is ignored.  A maximum
    on the search boundary is flagged (warning + boundary=True), not fatal.
    """
    fom = _Objective(params, pulse, objective, rel_tol)
    lo, hi = (mhz_to_angular(span_mhz[0]), mhz_to_angular(span_mhz[1]))
    n = int(round((span_mhz[1] - span_mhz[0]) / coarse_step_mhz)) + 1
    grid = np.linspace(lo, hi, n)
    values = np.array([fom(d) for d in grid])
    i = int(np.argmax(values))
    boundary = i == 0 or i == n - 1
    if boundary:
        edge = span_mhz[0] if i == 0 else span_mhz[1]
        warnings.warn(
            f"objective maximum at search boundary ({edge} MHz); widen "
            "span_mhz", BoundaryMaximumWarning)
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n - 1)]
    x, fx, _ = golden_section_max(fom, a, b, refine_tol)
    if values[i] > fx:
        x, fx = grid[i], values[i]
    return DeltaOptimum(delta_opt=float(x), value=float(fx),
                        evaluations=fom.evaluations, boundary=boundary)


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a detuning/LO optimization, with its parameter context."""

    params: PhysicalParams     # delta field holds delta_opt
    pulse: Pulse
    delta_opt: float
    omega_opt: float
    eta: float
    chi: float
    chi_eta: float
    stage: str
    evaluations: int


def two_stage(params: PhysicalParams, pulse: Pulse,
              rel_tol: float = 1e-10, **delta_kwargs) -> OptimizationResult:
    """Stage 1: delta maximizing eta.  Stage 2: LO frequency at that delta."""
    stage1 = optimize_delta(params, pulse, objective=OBJECTIVE_ETA,
                            rel_tol=rel_tol, **delta_kwargs)
    fom = _Objective(params, pulse, OBJECTIVE_ETA, rel_tol)
    traj = fom.trajectory(stage1.delta_opt)
    hres = optimize_lo_frequency(traj)
    return OptimizationResult(
        params=replace(params, delta=stage1.delta_opt), pulse=pulse,
        delta_opt=stage1.delta_opt, omega_opt=hres.omega_opt,
        eta=hres.eta, chi=hres.chi, chi_eta=hres.I0_max,
        stage=STAGE_ETA_THEN_CHI,
        evaluations=stage1.evaluations + fom.evaluations)


def joint_refine(result: OptimizationResult, rel_tol: float = 1e-10,
                 gain_tol: float = 1e-6, max_rounds: int = 10,
                 local_span_mhz: float = 1.0) -> OptimizationResult:
    """Coordinate descent on chi*eta = I0(delta, omega0) from a two_stage seed.

    Alternates golden-section passes in delta (one solve per trial) and in
    omega0 (no solves) until the gain per round drops below gain_tol or
    max_rounds is hit.  The result never degrades the seed.
    """
    fom = _Objective(result.params, result.pulse, OBJECTIVE_ETA, rel_tol)
    half = mhz_to_angular(local_span_mhz)

    best = (result.delta_opt, result.omega_opt, result.chi_eta, result.eta)

    def i0_at(delta, omega0):
        traj = fom.trajectory(delta)
        f = matched_filter(traj)
        return homodyne_signal(traj, f, omega0), retrieval_efficiency(traj)

    for _ in range(max_rounds):
        delta0, omega0, value0, _ = best

        def delta_objective(d):
            return i0_at(d, omega0)[0]

        x, fx, _ = golden_section_max(delta_objective, delta0 - half,
                                      delta0 + half, REFINE_TOL)
        if fx > best[2]:
            best = (float(x), omega0, float(fx), i0_at(x, omega0)[1])

        traj = fom.trajectory(best[0])
        f = matched_filter(traj)

        def omega_objective(om):
            return homodyne_signal(traj, f, om)

        x, fx, _ = golden_section_max(omega_objective, best[1] - half,
                                      best[1] + half, LO_REFINE_TOL)
        if fx > best[2]:
            best = (best[0], float(x), float(fx), retrieval_efficiency(traj))

        if best[2] - value0 < gain_tol:
            break

    delta_opt, omega_opt, chi_eta, eta = best
    return OptimizationResult(
        params=replace(result.params, delta=delta_opt), pulse=result.pulse,
        delta_opt=delta_opt, omega_opt=omega_opt, eta=eta,
        chi=chi_eta / eta, chi_eta=chi_eta, stage=STAGE_JOINT_REFINED,
        evaluations=result.evaluations + fom.evaluations)
