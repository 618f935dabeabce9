"""Pure-Python fallback for the compiled RK4 kernel."""

import numpy as np


def rk4_linear(gen, y0, dt, blowup=float("inf")):
    gen = np.asarray(gen, dtype=complex)
    m, n = gen.shape[0], gen.shape[1]
    if m < 3 or m % 2 == 0:
        raise ValueError("generator table must have 2N+1 >= 3 entries")
    if n > 8 or gen.shape[2] != n:
        raise ValueError("generator must be square with dimension <= 8")
    y = np.array(y0, dtype=complex)
    if y.shape != (n,):
        raise ValueError("initial state dimension does not match generator")
    nsteps = (m - 1) // 2
    ys = np.full((nsteps + 1, n), np.nan + 0j)
    ys[0] = y
    half = 0.5 * dt
    for s in range(nsteps):
        g0, g1, g2 = gen[2 * s], gen[2 * s + 1], gen[2 * s + 2]
        k1 = g0 @ y
        k2 = g1 @ (y + half * k1)
        k3 = g1 @ (y + half * k2)
        k4 = g2 @ (y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.linalg.norm(y) <= blowup:
            return ys, s
        ys[s + 1] = y
    return ys, nsteps
