# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""RK4 propagation of a linear system y' = G(t) y with tabulated G."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

ctypedef double complex cplx

cdef enum:
    MAXN = 8


cdef inline void _matvec(const cplx[:, :] g, const cplx* y, cplx* out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef cplx acc
    for i in range(n):
        acc = 0
        for j in range(n):
            acc = acc + g[i, j] * y[j]
        out[i] = acc


def rk4_linear(const cplx[:, :, :] gen, y0, double dt, double blowup=float("inf")):
    """Classical RK4 with ``gen[2k]``, ``gen[2k+1]``, ``gen[2k+2]`` the
    generator at the start, midpoint and end of step ``k``.

    Returns ``(ys, steps)``; ``steps < len(ys) - 1`` when the state norm
    exceeded ``blowup`` and propagation stopped (remaining rows are NaN).
    """
    cdef Py_ssize_t m = gen.shape[0]
    cdef Py_ssize_t n = gen.shape[1]
    if m < 3 or m % 2 == 0:
        raise ValueError("generator table must have 2N+1 >= 3 entries")
    if n > MAXN or gen.shape[2] != n:
        raise ValueError("generator must be square with dimension <= 8")
    cdef Py_ssize_t nsteps = (m - 1) // 2
    out = np.full((nsteps + 1, n), np.nan + 0j, dtype=np.complex128)
    cdef cplx[:, :] ys = out
    cdef cplx[:] y0v = np.ascontiguousarray(y0, dtype=np.complex128)
    if y0v.shape[0] != n:
        raise ValueError("initial state dimension does not match generator")

    cdef cplx y[MAXN]
    cdef cplx tmp[MAXN]
    cdef cplx k1[MAXN]
    cdef cplx k2[MAXN]
    cdef cplx k3[MAXN]
    cdef cplx k4[MAXN]
    cdef Py_ssize_t i, s
    cdef double half = 0.5 * dt, sixth = dt / 6.0, nrm
    cdef Py_ssize_t done = nsteps

    for i in range(n):
        y[i] = y0v[i]
        ys[0, i] = y[i]
    with nogil:
        for s in range(nsteps):
            _matvec(gen[2 * s], y, k1, n)
            for i in range(n):
                tmp[i] = y[i] + half * k1[i]
            _matvec(gen[2 * s + 1], tmp, k2, n)
            for i in range(n):
                tmp[i] = y[i] + half * k2[i]
            _matvec(gen[2 * s + 1], tmp, k3, n)
            for i in range(n):
                tmp[i] = y[i] + dt * k3[i]
            _matvec(gen[2 * s + 2], tmp, k4, n)
            nrm = 0.0
            for i in range(n):
                y[i] = y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                nrm += y[i].real * y[i].real + y[i].imag * y[i].imag
            if not sqrt(nrm) <= blowup:
                done = s
                break
            for i in range(n):
                ys[s + 1, i] = y[i]
    return out, done
