"""Adaptive Dormand-Prince 4(5) stepper for the three-amplitude cavity system.

Jitted scalar-state integrator: the system is three complex amplitudes, so the
state lives in registers rather than arrays.  PI step-size control, FSAL, and
cubic Hermite dense output onto a uniform sampling grid.
"""

import numpy as np
from numba import njit

FOUR_LN2 = 2.772588722239781

# status codes returned by integrate()
STATUS_COMPLETE = 0      # emission-complete rule fired
STATUS_CAP = 1           # hard cap t - t_center > 20 tau reached
STATUS_UNDERFLOW = 3     # step size underflow

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_PI_ALPHA = 0.17         # Hairer's dopri5 PI exponents
_PI_BETA = 0.04

OMEGA_START_RATIO = 1e-6    # pulse must be below this fraction of peak at t0
OMEGA_STOP_RATIO = 1e-6     # ... and at the stopping time
EP_STOP_TOL = 1e-10         # |E|^2 + |P|^2 threshold of the stopping rule
CAP_TAUS = 20.0             # hard stop at t_center + CAP_TAUS * tau


@njit(cache=True)
def _omega(t, om0, tc, tau):
    x = (t - tc) / tau
    return om0 * np.exp(-FOUR_LN2 * x * x)


@njit(cache=True)
def _deriv(t, E, P, S, kappa, delta, gamma, Delta, w, om0, tc, tau):
    om = _omega(t, om0, tc, tau)
    dE = -(kappa + 1j * delta) * E + 1j * w * P
    dP = -(gamma + 1j * Delta) * P + 1j * w * E + 1j * om * S
    dS = 1j * om * P
    return dE, dP, dS


@njit(cache=True)
def integrate(kappa, delta, gamma, Delta, w, om0, tc, tau,
              t0, t_end, rtol, atol, h_max, s0):
    """Integrate from (0, 0, s0) at t0 until the emission-complete rule fires.

    Returns (ts, Es, Ps, Ss, fE, fP, fS, n_accepted, n_rejected, status) where
    the f arrays hold the derivative at each accepted step for Hermite
    interpolation.  Steps never stop before t_end; past t_end the run ends as
    soon as the pulse is negligible and |E|^2+|P|^2 < EP_STOP_TOL, or at the
    hard cap t - tc > CAP_TAUS * tau.
    """
    cap = 256
    ts = np.empty(cap)
    Es = np.empty(cap, dtype=np.complex128)
    Ps = np.empty(cap, dtype=np.complex128)
    Ss = np.empty(cap, dtype=np.complex128)
    fEs = np.empty(cap, dtype=np.complex128)
    fPs = np.empty(cap, dtype=np.complex128)
    fSs = np.empty(cap, dtype=np.complex128)

    t = t0
    E = 0.0 + 0.0j
    P = 0.0 + 0.0j
    S = s0

    kE, kP, kS = _deriv(t, E, P, S, kappa, delta, gamma, Delta, w, om0, tc, tau)

    ts[0] = t
    Es[0] = E
    Ps[0] = P
    Ss[0] = S
    fEs[0] = kE
    fPs[0] = kP
    fSs[0] = kS
    n = 1

    h = min(h_max, 1e-3 * (t_end - t0))
    err_old = 1e-4
    rejected = False
    n_acc = 0
    n_rej = 0
    status = STATUS_CAP
    t_cap = tc + CAP_TAUS * tau
    h_floor = 1e-12 * max(abs(t_end - t0), 1.0)

    while True:
        if h < h_floor or t + h == t:
            status = STATUS_UNDERFLOW
            break

        # Dormand-Prince 5(4) stages (FSAL: k1 comes from the previous step)
        k1E, k1P, k1S = kE, kP, kS
        a = h * 0.2
        k2E, k2P, k2S = _deriv(t + 0.2 * h, E + a * k1E, P + a * k1P, S + a * k1S,
                               kappa, delta, gamma, Delta, w, om0, tc, tau)
        b1 = h * (3.0 / 40.0)
        b2 = h * (9.0 / 40.0)
        k3E, k3P, k3S = _deriv(t + 0.3 * h,
                               E + b1 * k1E + b2 * k2E,
                               P + b1 * k1P + b2 * k2P,
                               S + b1 * k1S + b2 * k2S,
                               kappa, delta, gamma, Delta, w, om0, tc, tau)
        c1 = h * (44.0 / 45.0)
        c2 = h * (-56.0 / 15.0)
        c3 = h * (32.0 / 9.0)
        k4E, k4P, k4S = _deriv(t + 0.8 * h,
                               E + c1 * k1E + c2 * k2E + c3 * k3E,
                               P + c1 * k1P + c2 * k2P + c3 * k3P,
                               S + c1 * k1S + c2 * k2S + c3 * k3S,
                               kappa, delta, gamma, Delta, w, om0, tc, tau)
        d1 = h * (19372.0 / 6561.0)
        d2 = h * (-25360.0 / 2187.0)
        d3 = h * (64448.0 / 6561.0)
        d4 = h * (-212.0 / 729.0)
        k5E, k5P, k5S = _deriv(t + (8.0 / 9.0) * h,
                               E + d1 * k1E + d2 * k2E + d3 * k3E + d4 * k4E,
                               P + d1 * k1P + d2 * k2P + d3 * k3P + d4 * k4P,
                               S + d1 * k1S + d2 * k2S + d3 * k3S + d4 * k4S,
                               kappa, delta, gamma, Delta, w, om0, tc, tau)
        e1 = h * (9017.0 / 3168.0)
        e2 = h * (-355.0 / 33.0)
        e3 = h * (46732.0 / 5247.0)
        e4 = h * (49.0 / 176.0)
        e5 = h * (-5103.0 / 18656.0)
        k6E, k6P, k6S = _deriv(t + h,
                               E + e1 * k1E + e2 * k2E + e3 * k3E + e4 * k4E + e5 * k5E,
                               P + e1 * k1P + e2 * k2P + e3 * k3P + e4 * k4P + e5 * k5P,
                               S + e1 * k1S + e2 * k2S + e3 * k3S + e4 * k4S + e5 * k5S,
                               kappa, delta, gamma, Delta, w, om0, tc, tau)
        # 5th order solution
        w1 = h * (35.0 / 384.0)
        w3 = h * (500.0 / 1113.0)
        w4 = h * (125.0 / 192.0)
        w5 = h * (-2187.0 / 6784.0)
        w6 = h * (11.0 / 84.0)
        En = E + w1 * k1E + w3 * k3E + w4 * k4E + w5 * k5E + w6 * k6E
        Pn = P + w1 * k1P + w3 * k3P + w4 * k4P + w5 * k5P + w6 * k6P
        Sn = S + w1 * k1S + w3 * k3S + w4 * k4S + w5 * k5S + w6 * k6S
        k7E, k7P, k7S = _deriv(t + h, En, Pn, Sn,
                               kappa, delta, gamma, Delta, w, om0, tc, tau)
        # embedded 4th order error estimate, e = b5 - b4
        g1 = h * (71.0 / 57600.0)
        g3 = h * (-71.0 / 16695.0)
        g4 = h * (71.0 / 1920.0)
        g5 = h * (-17253.0 / 339200.0)
        g6 = h * (22.0 / 525.0)
        g7 = h * (-1.0 / 40.0)
        errE = g1 * k1E + g3 * k3E + g4 * k4E + g5 * k5E + g6 * k6E + g7 * k7E
        errP = g1 * k1P + g3 * k3P + g4 * k4P + g5 * k5P + g6 * k6P + g7 * k7P
        errS = g1 * k1S + g3 * k3S + g4 * k4S + g5 * k5S + g6 * k6S + g7 * k7S

        scE = atol + rtol * max(abs(E), abs(En))
        scP = atol + rtol * max(abs(P), abs(Pn))
        scS = atol + rtol * max(abs(S), abs(Sn))
        err = np.sqrt(((abs(errE) / scE) ** 2 + (abs(errP) / scP) ** 2 +
                       (abs(errS) / scS) ** 2) / 3.0)

        if err <= 1.0:
            t = t + h
            E, P, S = En, Pn, Sn
            kE, kP, kS = k7E, k7P, k7S
            n_acc += 1

            if n >= cap:
                new_cap = cap * 2
                ts2 = np.empty(new_cap)
                Es2 = np.empty(new_cap, dtype=np.complex128)
                Ps2 = np.empty(new_cap, dtype=np.complex128)
                Ss2 = np.empty(new_cap, dtype=np.complex128)
                fE2 = np.empty(new_cap, dtype=np.complex128)
                fP2 = np.empty(new_cap, dtype=np.complex128)
                fS2 = np.empty(new_cap, dtype=np.complex128)
                ts2[:cap] = ts
                Es2[:cap] = Es
                Ps2[:cap] = Ps
                Ss2[:cap] = Ss
                fE2[:cap] = fEs
                fP2[:cap] = fPs
                fS2[:cap] = fSs
                ts, Es, Ps, Ss, fEs, fPs, fSs = ts2, Es2, Ps2, Ss2, fE2, fP2, fS2
                cap = new_cap
            ts[n] = t
            Es[n] = E
            Ps[n] = P
            Ss[n] = S
            fEs[n] = kE
            fPs[n] = kP
            fSs[n] = kS
            n += 1

            if t >= t_end:
                pulse_off = (om0 <= 0.0) or (_omega(t, om0, tc, tau) < OMEGA_STOP_RATIO * om0)
                ring_down = (abs(E) ** 2 + abs(P) ** 2) < EP_STOP_TOL
                if pulse_off and ring_down:
                    status = STATUS_COMPLETE
                    break
                if t - tc > CAP_TAUS * tau:
                    status = STATUS_CAP
                    break

            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err ** (-_PI_ALPHA) * err_old ** _PI_BETA
                if factor > _MAX_FACTOR:
                    factor = _MAX_FACTOR
                elif factor < _MIN_FACTOR:
                    factor = _MIN_FACTOR
            if rejected and factor > 1.0:
                factor = 1.0
            rejected = False
            err_old = max(err, 1e-10)
            h = min(h * factor, h_max)
            # no need to overshoot far past the last possible stopping time
            remaining = t_cap + h_max - t
            if t_end - t > remaining:
                remaining = t_end - t
            if h > remaining:
                h = remaining
        else:
            n_rej += 1
            rejected = True
            factor = _SAFETY * err ** (-0.2)
            if factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h = h * factor

    return (ts[:n], Es[:n], Ps[:n], Ss[:n], fEs[:n], fPs[:n], fSs[:n],
            n_acc, n_rej, status)


@njit(cache=True)
def sample_hermite(ts, ys, fs, t_out):
    """Cubic Hermite interpolation of accepted-step values onto t_out.

    ts must be strictly increasing and t_out sorted within [ts[0], ts[-1]].
    """
    n_out = t_out.shape[0]
    out = np.empty(n_out, dtype=np.complex128)
    j = 0
    last = ts.shape[0] - 2
    for i in range(n_out):
        t = t_out[i]
        while j < last and ts[j + 1] < t:
            j += 1
        h = ts[j + 1] - ts[j]
        th = (t - ts[j]) / h
        u = 1.0 - th
        h00 = u * u * (1.0 + 2.0 * th)
        h10 = th * u * u
        h01 = th * th * (3.0 - 2.0 * th)
        h11 = th * th * (th - 1.0)
        out[i] = (h00 * ys[j] + h * h10 * fs[j] +
                  h01 * ys[j + 1] + h * h11 * fs[j + 1])
    return out
