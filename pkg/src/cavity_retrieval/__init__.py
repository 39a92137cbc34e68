"""Simulation and optimization of single-photon retrieval from a cavity-stored
polariton, with homodyne mode matching of the emitted wave packet."""

from .model import (PhysicalParams, Pulse, TimeGrid, Trajectory,
                    angular_to_mhz, evaluate_pulse, mhz_to_angular, output_field)
from .dynamics import (SolverReport, conservation_residual, dump_trajectory_csv,
                       simulate)
from .efficiency import (EfficiencyReport, efficiency_bound, efficiency_report,
                         retrieval_efficiency, spectral_check)
from .analytic import (BetaConvention, BranchPair, analytic_trajectory,
                       beta_squared, branch_pair, delay_fit)
from .homodyne import (HomodyneResult, PhaseProfile, homodyne_signal,
                       matched_filter, optimize_lo_frequency, phase_profile,
                       variance)
from .optimize import (OptimizationResult, joint_refine, optimize_delta,
                       two_stage)

__version__ = "0.1.0"

__all__ = [
    "PhysicalParams", "Pulse", "TimeGrid", "Trajectory", "SolverReport",
    "simulate", "conservation_residual", "dump_trajectory_csv",
    "evaluate_pulse", "output_field", "mhz_to_angular", "angular_to_mhz",
    "EfficiencyReport", "retrieval_efficiency", "efficiency_bound",
    "efficiency_report", "spectral_check",
    "BranchPair", "BetaConvention", "branch_pair", "beta_squared",
    "analytic_trajectory", "delay_fit",
    "HomodyneResult", "PhaseProfile", "matched_filter", "homodyne_signal",
    "optimize_lo_frequency", "phase_profile", "variance",
    "OptimizationResult", "optimize_delta", "two_stage", "joint_refine",
    "__version__",
]
