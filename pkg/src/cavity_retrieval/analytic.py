"""Closed-form solutions in the strong-coupling regime.

The homogeneous E-P block has two elimination branches (lambda, p); a fast
combination Q = E + p P is adiabatically removed, leaving single-quadrature
expressions for E, S and P driven by the pulse envelope.  Two conventions for
the effective rate beta^2 are supported: the single-branch form -i w lambda/p
and the dual-branch form built from both roots, which behaves better for very
long pulses.  A constant-delay diagnostic relates E(t) to the polarization a
time 1/kappa earlier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from .errors import DegenerateBranches, WindowTooShort
from .model import (PhysicalParams, Pulse, TimeGrid, Trajectory,
                    evaluate_pulse, pulse_derivative)

SINGLE_BRANCH = "single"
DUAL_BRANCH = "dual"

# dual-branch convention is the better approximation for long pulses
_DUAL_BRANCH_MIN_TAU = 500.0


@dataclass(frozen=True)
class BranchPair:
    """Both (lambda, p) elimination branches and k = kappa + i delta."""

    lambda_plus: complex
    lambda_minus: complex
    p_plus: complex
    p_minus: complex
    k: complex


def branch_pair(params: PhysicalParams) -> BranchPair:
    """Eigenvalue/coefficient pairs of the homogeneous E-P system.

    The "+" branch carries the +i sqrt(...) sign; each lambda solves
    lambda^2 + (k + gamma + i Delta) lambda + (k (gamma + i Delta) + w^2) = 0.
    """
    k = params.kappa + 1j * params.delta
    a = params.gamma + 1j * params.Delta
    root = np.sqrt(4.0 * params.w ** 2 - (a - k) ** 2 + 0j)
    if params.w > 0.0:
        p_plus = (1j / (2.0 * params.w)) * (a - k + 1j * root)
        p_minus = (1j / (2.0 * params.w)) * (a - k - 1j * root)
    else:
        # decoupled system: the eigenvalues survive, the mixing ratios do not
        p_plus = p_minus = complex("nan")
    return BranchPair(
        lambda_plus=-0.5 * (a + k + 1j * root),
        lambda_minus=-0.5 * (a + k - 1j * root),
        p_plus=p_plus,
        p_minus=p_minus,
        k=k,
    )


@dataclass(frozen=True)
class BetaConvention:
    variant: str
    beta_sq: complex


def _select_branch(pair: BranchPair, branch: str) -> tuple[complex, complex]:
    if branch == "plus":
        return pair.lambda_plus, pair.p_plus
    if branch == "minus":
        return pair.lambda_minus, pair.p_minus
    if branch == "auto":
        # the eliminated combination must be the fast one
        if abs(pair.lambda_plus) >= abs(pair.lambda_minus):
            return pair.lambda_plus, pair.p_plus
        return pair.lambda_minus, pair.p_minus
    raise ValueError(f"unknown branch {branch!r}")


def beta_squared(params: PhysicalParams, variant: str,
                 branch: str = "auto") -> BetaConvention:
    """Effective squared rate beta^2 under the chosen convention.

    single: beta^2 = -i w lambda / p on the selected branch.
    dual:   beta^2 = -i w (l+ l- / (l+ - l-)) ((p+ - p-) / (p+ p-)).
    """
    if params.w <= 0.0:
        raise ValueError("beta^2 requires w > 0")
    pair = branch_pair(params)
    if variant == SINGLE_BRANCH:
        lam, p = _select_branch(pair, branch)
        beta_sq = -1j * params.w * lam / p
    elif variant == DUAL_BRANCH:
        sep = abs(pair.lambda_plus - pair.lambda_minus)
        if sep < 1e-9 * abs(pair.lambda_plus):
            raise DegenerateBranches(
                f"|l+ - l-|/|l+| = {sep / abs(pair.lambda_plus):.2e}")
        beta_sq = (-1j * params.w
                   * (pair.lambda_plus * pair.lambda_minus
                      / (pair.lambda_plus - pair.lambda_minus))
                   * ((pair.p_plus - pair.p_minus)
                      / (pair.p_plus * pair.p_minus)))
    else:
        raise ValueError(f"unknown beta variant {variant!r}")
    return BetaConvention(variant=variant, beta_sq=complex(beta_sq))


def _gauss_legendre_cumulative(f, times: np.ndarray, order=10, check_order=5,
                               rel_tol=1e-10):
    """Cumulative integral of f from times[0] to every grid point.

    Fixed-order Gauss-Legendre per grid interval, vectorized across intervals,
    with a lower-order companion as error estimate; intervals whose estimate
    exceeds the tolerance are subdivided once.
    """
    a = times[:-1]
    h = np.diff(times)

    def panel(nodes, weights, lo, width):
        x = lo[:, None] + 0.5 * width[:, None] * (nodes[None, :] + 1.0)
        return 0.5 * width * (f(x) @ weights)

    x10, w10 = leggauss(order)
    x5, w5 = leggauss(check_order)
    fine = panel(x10, w10, a, h)
    coarse = panel(x5, w5, a, h)
    scale = max(abs(np.sum(fine)), 1.0)
    bad = np.abs(fine - coarse) > rel_tol * scale / max(len(a), 1)
    if np.any(bad):
        idx = np.nonzero(bad)[0]
        for i in idx:
            sub = np.linspace(times[i], times[i + 1], 5)
            fine[i] = np.sum(panel(x10, w10, sub[:-1], np.diff(sub)))
    out = np.empty(len(times), dtype=fine.dtype)
    out[0] = 0.0
    np.cumsum(fine, out=out[1:])
    return out


def analytic_trajectory(params: PhysicalParams, pulse: Pulse, grid: TimeGrid,
                        variant: str = "auto", branch: str = "auto") -> Trajectory:
    """Closed-form E, S, P for a real envelope.

    variant "auto" picks the dual-branch convention for tau >= 500 ns and the
    single-branch one otherwise.
    """
    if variant == "auto":
        variant = DUAL_BRANCH if pulse.tau >= _DUAL_BRANCH_MIN_TAU else SINGLE_BRANCH
    beta_sq = beta_squared(params, variant, branch).beta_sq
    beta = np.sqrt(beta_sq)
    k = params.kappa + 1j * params.delta

    n = int(np.floor((grid.t_end - grid.t0) / grid.dt_out)) + 1
    times = grid.t0 + grid.dt_out * np.arange(n)
    om = evaluate_pulse(pulse, times)
    dom = pulse_derivative(pulse, times)

    def integrand(t):
        o2 = evaluate_pulse(pulse, t) ** 2
        return o2 / (beta_sq + o2)

    phase = np.exp(-k * _gauss_legendre_cumulative(integrand, times))
    denom = np.sqrt(beta_sq + om ** 2)
    E = -(params.w / beta) * om / denom * phase
    S = beta / denom * phase
    P = 1j * beta * (k * om + dom) / denom ** 3 * phase
    return Trajectory(times=times, E=E, P=P, S=S, params=params, pulse=pulse)


def delayed_field_from_polarization(traj: Trajectory, dt_shift: float) -> np.ndarray:
    """i w P(t - dt_shift) / kappa on the trajectory grid (P = 0 before t0)."""
    spline = CubicSpline(traj.times, traj.P)
    shifted_t = traj.times - dt_shift
    inside = shifted_t >= traj.times[0]
    shifted = np.zeros(len(traj.times), dtype=complex)
    shifted[inside] = spline(shifted_t[inside])
    return 1j * traj.params.w * shifted / traj.params.kappa


def delay_fit(traj: Trajectory, n_coarse: int = 101) -> tuple[float, float]:
    """Best constant delay dt* in E(t) ~ i w P(t - dt*) / kappa.

    Minimizes the relative L2 mismatch over dt in [0, 5/kappa] (coarse scan
    plus golden-section refinement) and returns (dt*, residual).  Raises
    WindowTooShort when the trajectory spans less than 10/kappa.
    """
    kappa = traj.params.kappa
    span = traj.times[-1] - traj.times[0]
    if span < 10.0 / kappa:
        raise WindowTooShort(
            f"span {span:.3g} ns < 10/kappa = {10.0 / kappa:.3g} ns")
    e_norm = np.linalg.norm(traj.E)
    if e_norm == 0.0:
        raise WindowTooShort("E vanishes everywhere; nothing to fit")

    def residual(dt_shift):
        model = delayed_field_from_polarization(traj, dt_shift)
        return np.linalg.norm(traj.E - model) / e_norm

    grid = np.linspace(0.0, 5.0 / kappa, n_coarse)
    values = np.array([residual(d) for d in grid])
    i = int(np.argmin(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, n_coarse - 1)]

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = residual(c), residual(d)
    while b - a > 1e-4 / kappa:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = residual(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = residual(d)
    best = 0.5 * (a + b)
    return float(best), float(residual(best))
