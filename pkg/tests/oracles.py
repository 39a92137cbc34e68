"""Independent reference implementations used to validate the package.

Everything here deliberately avoids the package's numerical machinery:
the integrator is a plain fixed-step RK4 over Python complex scalars, the
overlap oracle is an FFT, and integrals use the trapezoid rule.  Keep it that
way; these are the second route of every dual-route test.
"""

import math

import numpy as np

FOUR_LN2 = 4.0 * math.log(2.0)


def gaussian_omega(t, omega0, tau, t_center):
    x = (t - t_center) / tau
    return omega0 * math.exp(-FOUR_LN2 * x * x)


def rk4_fixed_step(params, pulse, t0, t_end, dt=0.01, sample_every=50, s0=1.0):
    """Classic RK4 at fixed dt; returns (times, E, P, S) sampled every
    ``sample_every`` steps (so the sampling interval is dt * sample_every)."""
    kappa, delta = params.kappa, params.delta
    gamma, Delta = params.gamma, params.Delta
    w = params.w
    om0, tau, tc = pulse.omega0, pulse.tau, pulse.t_center

    def deriv(t, E, P, S):
        om = gaussian_omega(t, om0, tau, tc)
        dE = -(kappa + 1j * delta) * E + 1j * w * P
        dP = -(gamma + 1j * Delta) * P + 1j * w * E + 1j * om * S
        dS = 1j * om * P
        return dE, dP, dS

    n_steps = int(round((t_end - t0) / dt))
    E, P, S = 0.0 + 0.0j, 0.0 + 0.0j, complex(s0)
    times = [t0]
    Es, Ps, Ss = [E], [P], [S]
    t = t0
    for i in range(1, n_steps + 1):
        k1 = deriv(t, E, P, S)
        k2 = deriv(t + dt / 2, E + dt / 2 * k1[0], P + dt / 2 * k1[1], S + dt / 2 * k1[2])
        k3 = deriv(t + dt / 2, E + dt / 2 * k2[0], P + dt / 2 * k2[1], S + dt / 2 * k2[2])
        k4 = deriv(t + dt, E + dt * k3[0], P + dt * k3[1], S + dt * k3[2])
        E += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        P += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        S += dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        t = t0 + i * dt
        if i % sample_every == 0:
            times.append(t)
            Es.append(E)
            Ps.append(P)
            Ss.append(S)
    return (np.array(times), np.array(Es), np.array(Ps), np.array(Ss))


def trapezoid_integral(y, dt):
    """Trapezoid rule; the quadrature counterpart to the package's Simpson."""
    return np.trapezoid(y, dx=dt)


def fft_overlap(times, g, n_pad=2 ** 20):
    """|int g(t) e^{-i omega t} dt|^2 on the FFT bin grid.

    Returns (omega, I0).  Rectangle-rule DFT is spectrally accurate here
    because g decays below 1e-9 at both window ends.
    """
    dt = times[1] - times[0]
    spectrum = np.fft.fft(g, n=n_pad) * dt
    omega = 2.0 * np.pi * np.fft.fftfreq(n_pad, d=dt)
    return omega, np.abs(spectrum) ** 2


def fft_overlap_at(times, g, omega0, n_pad=2 ** 20):
    """FFT-oracle I0 at one frequency via nearest-bin lookup.

    Callers should pick omega0 on (or very near) a bin; the bin spacing is
    2 pi / (n_pad dt).
    """
    omega, i0 = fft_overlap(times, g, n_pad)
    k = int(np.argmin(np.abs(omega - omega0)))
    return omega[k], i0[k]


def mp_branches(kappa, gamma, w, Delta, delta, dps=50):
    """Extended-precision branch pair via mpmath; returns python complexes
    (lambda_plus, lambda_minus, p_plus, p_minus)."""
    import mpmath as mp

    with mp.workdps(dps):
        k = mp.mpf(float(kappa)) + 1j * mp.mpf(float(delta))
        a = mp.mpf(float(gamma)) + 1j * mp.mpf(float(Delta))
        ww = mp.mpf(float(w))
        root = mp.sqrt(4 * ww ** 2 - (a - k) ** 2)
        lam_p = -(a + k + 1j * root) / 2
        lam_m = -(a + k - 1j * root) / 2
        p_p = 1j / (2 * ww) * (a - k + 1j * root)
        p_m = 1j / (2 * ww) * (a - k - 1j * root)
        return (complex(lam_p), complex(lam_m), complex(p_p), complex(p_m))


def mp_beta_single(kappa, gamma, w, Delta, delta, branch="plus", dps=50):
    import mpmath as mp

    with mp.workdps(dps):
        lam_p, lam_m, p_p, p_m = mp_branches(kappa, gamma, w, Delta, delta, dps)
        lam, p = (lam_p, p_p) if branch == "plus" else (lam_m, p_m)
        return complex(-1j * mp.mpf(float(w)) * mp.mpmathify(lam) / mp.mpmathify(p))


def mp_beta_dual(kappa, gamma, w, Delta, delta, dps=50):
    import mpmath as mp

    with mp.workdps(dps):
        lam_p, lam_m, p_p, p_m = [mp.mpmathify(z) for z in
                                  mp_branches(kappa, gamma, w, Delta, delta, dps)]
        val = (-1j * mp.mpf(float(w)) * (lam_p * lam_m / (lam_p - lam_m))
               * ((p_p - p_m) / (p_p * p_m)))
        return complex(val)
