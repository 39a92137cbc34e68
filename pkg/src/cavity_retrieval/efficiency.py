"""Retrieval efficiency, the cooperativity bound, and frequency-domain
consistency checks between the cavity field and the atomic polarization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._quadrature import integrate_uniform, simpson_weights
from .dynamics import require_emission_complete
from .errors import NonUniformGrid
from .model import PhysicalParams, Trajectory, output_field


def check_uniform(times: np.ndarray, rel=1e-9) -> float:
    """Return the grid spacing, or raise NonUniformGrid."""
    dt = float(times[1] - times[0])
    steps = np.diff(times)
    if np.max(np.abs(steps - dt)) > rel * dt:
        raise NonUniformGrid("samples are not uniformly spaced")
    return dt


def retrieval_efficiency(traj: Trajectory, check_complete: bool = True) -> float:
    """Number of retrieved photons per stored excitation.

    eta = integral |E_out(t)|^2 dt by composite Simpson on the output grid.
    A Richardson cross-check against the half-resolution grid guards the
    quadrature; raises EmissionIncomplete when the tail was truncated.
    """
    if check_complete:
        require_emission_complete(traj)
    dt = check_uniform(traj.times)
    flux = np.abs(output_field(traj)) ** 2
    eta = float(integrate_uniform(flux, dt))
    coarse = float(integrate_uniform(flux[::2], 2.0 * dt))
    if abs(eta - coarse) > 1e-6 * max(eta, 1e-12):
        raise NonUniformGrid(
            f"quadrature not converged: Simpson refinement moved eta by "
            f"{abs(eta - coarse):.2e}; decrease dt_out")
    return eta


def efficiency_bound(params: PhysicalParams) -> float:
    """Upper limit C/(1+C) on the retrieval efficiency."""
    C = params.cooperativity()
    return C / (1.0 + C)


def balance_residual(traj: Trajectory) -> float:
    """|1 - eta - 2 gamma int|P|^2 - end norm|: the integrated first-integral
    relation with explicit end terms (they vanish only at maximal efficiency).
    """
    dt = check_uniform(traj.times)
    eta = retrieval_efficiency(traj, check_complete=False)
    p_loss = 2.0 * traj.params.gamma * float(
        integrate_uniform(np.abs(traj.P) ** 2, dt))
    end_norm = float(traj.norm()[-1])
    return abs(1.0 - eta - p_loss - end_norm)


def fourier_transform(times: np.ndarray, values: np.ndarray,
                      pad_factor: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Continuous-convention transform F(omega) = int f(t) e^{+i omega t} dt.

    Samples must be uniform; the signal is zero-padded to at least
    ``pad_factor`` times its duration.  Returns (omega, F) with omega in
    rad/ns over both signs (fftfreq ordering).
    """
    dt = check_uniform(times)
    n = len(values)
    n_pad = int(2 ** np.ceil(np.log2(max(pad_factor * n, 16))))
    padded = np.zeros(n_pad, dtype=complex)
    padded[:n] = values
    omega = 2.0 * np.pi * np.fft.fftfreq(n_pad, d=dt)
    tilde = dt * n_pad * np.fft.ifft(padded) * np.exp(1j * omega * times[0])
    return omega, tilde


def spectral_check(traj: Trajectory, pad_factor: int = 4,
                   band_floor: float = 1e-6) -> float:
    """Residual of the frequency-domain relation between P and E.

    With both amplitudes decayed at the window ends, the cavity equation
    implies P(omega) = (delta - omega - i kappa)/w * E(omega).  Returns the
    relative L2 mismatch over the band where |E(omega)| exceeds
    ``band_floor`` times its peak.
    """
    if traj.params.w <= 0.0:
        raise ZeroDivisionError("spectral relation is undefined for w = 0")
    omega, E_w = fourier_transform(traj.times, traj.E, pad_factor)
    _, P_w = fourier_transform(traj.times, traj.P, pad_factor)
    band = np.abs(E_w) > band_floor * np.max(np.abs(E_w))
    p = traj.params
    predicted = (p.delta - omega[band] - 1j * p.kappa) / p.w * E_w[band]
    num = np.linalg.norm(P_w[band] - predicted)
    den = np.linalg.norm(P_w[band])
    return float(num / den)


@dataclass(frozen=True)
class EfficiencyReport:
    eta: float
    bound: float
    balance_residual: float
    spectral_residual: float


def efficiency_report(traj: Trajectory) -> EfficiencyReport:
    """Run the efficiency pipeline and its consistency checks on a trajectory."""
    return EfficiencyReport(
        eta=retrieval_efficiency(traj),
        bound=efficiency_bound(traj.params),
        balance_residual=balance_residual(traj),
        spectral_residual=spectral_check(traj),
    )


def polarization_loss(traj: Trajectory) -> float:
    """2 gamma int |P(t)|^2 dt, the loss channel competing with emission."""
    dt = check_uniform(traj.times)
    return 2.0 * traj.params.gamma * float(
        integrate_uniform(np.abs(traj.P) ** 2, dt))


def simpson_vector(traj: Trajectory) -> np.ndarray:
    """Quadrature weights matching every integral in this module."""
    return simpson_weights(len(traj.times), check_uniform(traj.times))
