"""Temporal mode matching of the emitted photon onto a local oscillator.

The detector applies a real normalized filter f(t) matched to the emitted
amplitude; the only remaining knobs are the LO frequency shift omega0 and a
constant phase phi0, which drops out of the integrated variance.  The signal

    I0(omega0) = | int f(t) E_out(t) e^{-i omega0 t} dt |^2

is bounded by eta (Cauchy-Schwarz), with equality iff the demodulated field
has constant phase wherever f > 0.  The integrated homodyne variance is
V = 1 + 2 I0 in vacuum units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._quadrature import simpson_weights
from .errors import AmplitudeTooSmall, ZeroField
from .model import TWO_PI, Trajectory, output_field, mhz_to_angular

# omega0 search defaults (rad/ns): span +-2pi*50 MHz, coarse grid <= 2pi*0.1 MHz,
# refinement to 2pi*1e-4 MHz
SEARCH_SPAN = mhz_to_angular(50.0)
COARSE_STEP = mhz_to_angular(0.1)
REFINE_TOL = mhz_to_angular(1e-4)

_AMPLITUDE_FLOOR = 1e-6


@dataclass(frozen=True)
class HomodyneResult:
    """Optimal LO shift and the resulting overlap figures."""

    omega_opt: float
    I0_max: float
    chi: float
    V: float
    eta: float
    phi0_note: str = "constant LO phase phi0 drops out of I0 and chi"


def matched_filter(traj: Trajectory) -> np.ndarray:
    """Real filter f(t) = |E_out(t)| / sqrt(eta), normalized so int f^2 = 1.

    Uses the same quadrature weights as the efficiency integral, which makes
    the normalization exact at the discrete level.  Raises ZeroField if no
    light was emitted.
    """
    e_out = np.abs(output_field(traj))
    weights = simpson_weights(len(traj.times), traj.dt)
    eta = float(weights @ e_out ** 2)
    if eta <= 0.0:
        raise ZeroField("eta = 0: matched filter undefined")
    return e_out / np.sqrt(eta)


def homodyne_signal(traj: Trajectory, f: np.ndarray, omega0: float) -> float:
    """I0 = |int f(t) E_out(t) e^{-i omega0 t} dt|^2 for a normalized filter."""
    weights = simpson_weights(len(traj.times), traj.dt)
    integrand = f * output_field(traj) * np.exp(-1j * omega0 * traj.times)
    return float(abs(weights @ integrand) ** 2)


def variance(I0: float) -> float:
    """Integrated homodyne variance V = 1 + 2 I0 (1 = vacuum, 3 = one photon)."""
    if not 0.0 <= I0 <= 1.0:
        raise ValueError(f"I0 must lie in [0, 1], got {I0}")
    return 1.0 + 2.0 * I0


def _coarse_scan(traj: Trajectory, f: np.ndarray, span: float, step: float):
    """|FT(f*E_out)|^2 on an FFT bin grid finer than ``step`` within +-span.

    Only used to bracket the maximum; reported values always come from the
    quadrature in homodyne_signal.
    """
    g = f * output_field(traj)
    dt = traj.dt
    n_pad = int(2 ** np.ceil(np.log2(max(TWO_PI / (step * dt), len(g), 16))))
    spectrum = np.fft.fft(g, n=n_pad)
    omega = TWO_PI * np.fft.fftfreq(n_pad, d=dt)
    inside = np.abs(omega) <= span
    omega, mag = omega[inside], np.abs(spectrum[inside]) ** 2
    order = np.argsort(omega)
    return omega[order], mag[order]


def optimize_lo_frequency(traj: Trajectory, span: float = SEARCH_SPAN,
                          refine_tol: float = REFINE_TOL) -> HomodyneResult:
    """LO shift maximizing I0, with the overlap chi and variance V.

    Coarse FFT-backed scan over [-span, +span] (the squared Fourier magnitude
    can be multimodal, so the grid comes first), then golden-section
    refinement of the quadrature-evaluated I0 on the bracketing triple.
    """
    f = matched_filter(traj)
    weights = simpson_weights(len(traj.times), traj.dt)
    eta = float(weights @ np.abs(output_field(traj)) ** 2)

    omega_grid, mag = _coarse_scan(traj, f, span, COARSE_STEP)
    i = int(np.argmax(mag))
    lo = omega_grid[max(i - 1, 0)]
    hi = omega_grid[min(i + 1, len(omega_grid) - 1)]

    def objective(om):
        return homodyne_signal(traj, f, om)

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > refine_tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = objective(d)
    omega_opt = 0.5 * (a + b)
    I0 = objective(omega_opt)
    chi = I0 / eta
    return HomodyneResult(omega_opt=float(omega_opt), I0_max=I0, chi=float(chi),
                          V=variance(min(I0, 1.0)), eta=eta)


@dataclass(frozen=True)
class PhaseProfile:
    """Unwrapped field phase over the window where |E| is resolvable, with the
    matched linear LO phase theta_LO(t) = phi0 + omega0 t."""

    times: np.ndarray
    theta_E: np.ndarray
    abs_E: np.ndarray
    omega0: float
    phi0: float

    def theta_LO(self) -> np.ndarray:
        return self.phi0 + self.omega0 * self.times

    def weighted_misfit(self) -> float:
        """f^2-weighted RMS of the wrapped deviation theta_E - theta_LO."""
        dev = self.theta_E - self.theta_LO()
        dev = np.mod(dev + np.pi, TWO_PI) - np.pi
        wts = self.abs_E ** 2
        return float(np.sqrt(np.sum(wts * dev ** 2) / np.sum(wts)))


def phase_profile(traj: Trajectory, omega0: float,
                  floor: float = _AMPLITUDE_FLOOR) -> PhaseProfile:
    """Unwrap arg E(t) and fit the constant phase phi0 of the LO line.

    The profile covers the window between the first and last samples with
    |E| >= floor * max|E|; interior samples below the floor are bridged
    linearly (the phase is undefined at zeros).  phi0 minimizes the
    f^2-weighted circular misfit at the given omega0.
    """
    amp = np.abs(traj.E)
    peak = float(amp.max(initial=0.0))
    if peak <= 0.0:
        raise AmplitudeTooSmall("E vanishes everywhere")
    good = amp >= floor * peak
    idx = np.nonzero(good)[0]
    window = slice(idx[0], idx[-1] + 1)
    t = traj.times[window]
    amp_w = amp[window]
    good_w = good[window]

    theta = np.empty(len(t))
    theta[good_w] = np.unwrap(np.angle(traj.E[window][good_w]))
    if not good_w.all():
        theta[~good_w] = np.interp(t[~good_w], t[good_w], theta[good_w])

    wts = amp_w ** 2
    resid = theta - omega0 * t
    phi0 = float(np.angle(np.sum(wts * np.exp(1j * resid))))
    return PhaseProfile(times=t, theta_E=theta, abs_E=amp_w,
                        omega0=float(omega0), phi0=phi0)


def dump_phase_csv(profile: PhaseProfile, path):
    """Write the phase profile: t_ns,theta_E_rad,theta_LO_rad,abs_E."""
    theta_lo = profile.theta_LO()
    with open(path, "w") as fh:
        fh.write("t_ns,theta_E_rad,theta_LO_rad,abs_E\n")
        for i, t in enumerate(profile.times):
            fh.write(f"{t:.17g},{profile.theta_E[i]:.17g},"
                     f"{theta_lo[i]:.17g},{profile.abs_E[i]:.17g}\n")
