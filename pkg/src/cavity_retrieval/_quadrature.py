"""Composite-Simpson quadrature with explicit positive weights.

Keeping one weight vector shared by the efficiency integral, the filter
normalization and the overlap integral makes the discrete Cauchy-Schwarz
inequality I0 <= eta exact, not just approximate.  For an even sample count
the last interval falls back to the trapezoid rule so every weight stays
positive (a parabola correction would introduce a negative weight).
"""

import numpy as np


def simpson_weights(n: int, dt: float) -> np.ndarray:
    if n < 2:
        raise ValueError("need at least 2 samples")
    w = np.zeros(n)
    if n == 2:
        w[:] = 0.5 * dt
        return w
    m = n if n % 2 == 1 else n - 1
    w[0:m:2] += dt / 3.0
    w[2:m:2] += dt / 3.0
    w[1:m:2] += 4.0 * dt / 3.0
    if n % 2 == 0:
        w[-2] += 0.5 * dt
        w[-1] += 0.5 * dt
    return w


def integrate_uniform(y: np.ndarray, dt: float):
    """Simpson integral of samples on a uniform grid (real or complex)."""
    return simpson_weights(len(y), dt) @ y
