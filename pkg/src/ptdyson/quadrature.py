"""Adaptive Simpson quadrature, vectorised over many subintervals at once."""

from __future__ import annotations

from typing import Callable

import numpy as np

MAX_DEPTH = 40


class QuadratureError(RuntimeError):
    pass


def _simpson(fa, fm, fb, h):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def interval_integrals(
    f: Callable[[np.ndarray], np.ndarray],
    a,
    b,
    tol: float = 1e-10,
) -> np.ndarray:
    """Integrate ``f`` over each ``[a[i], b[i]]``.

    ``f`` must accept an array of abscissae. ``tol`` is the absolute error
    budget for the *sum* of all intervals; it is shared out in proportion to
    interval length.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    a, b = np.broadcast_arrays(a, b)
    total = np.abs(b - a).sum()
    out = np.zeros(a.shape, dtype=complex)
    if total == 0:
        return out

    owner = np.arange(a.size)
    lo, hi = a.ravel().copy(), b.ravel().copy()
    eps = tol * np.abs(hi - lo) / total
    mid = 0.5 * (lo + hi)
    flo, fmid, fhi = (np.asarray(f(x), dtype=complex) for x in (lo, mid, hi))
    whole = _simpson(flo, fmid, fhi, hi - lo)
    acc = out.ravel()

    for _ in range(MAX_DEPTH):
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm = np.asarray(f(lm), dtype=complex)
        frm = np.asarray(f(rm), dtype=complex)
        left = _simpson(flo, flm, fmid, mid - lo)
        right = _simpson(fmid, frm, fhi, hi - mid)
        diff = left + right - whole
        done = np.abs(diff) <= 15.0 * eps
        np.add.at(acc, owner[done], (left + right + diff / 15.0)[done])
        todo = ~done
        if not todo.any():
            return acc.reshape(a.shape)
        # split surviving intervals into halves
        owner = np.concatenate([owner[todo], owner[todo]])
        eps = np.concatenate([eps[todo], eps[todo]]) / 2.0
        lo, mid, hi = (
            np.concatenate([lo[todo], mid[todo]]),
            np.concatenate([lm[todo], rm[todo]]),
            np.concatenate([mid[todo], hi[todo]]),
        )
        flo, fmid, fhi = (
            np.concatenate([flo[todo], fmid[todo]]),
            np.concatenate([flm[todo], frm[todo]]),
            np.concatenate([fmid[todo], fhi[todo]]),
        )
        whole = np.concatenate([left[todo], right[todo]])
    raise QuadratureError("adaptive Simpson did not converge (integrand singular?)")


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10) -> complex:
    return complex(interval_integrals(f, [a], [b], tol)[0])


def integral_from(f, origin: float, t, tol: float = 1e-10) -> np.ndarray:
    """``int_origin^t f`` for every entry of ``t`` (any order, any shape).

    Evaluation points are sorted and integrated piecewise between neighbours,
    so the cost is one pass over the grid rather than one integral per point.
    """
    t = np.asarray(t, dtype=float)
    nodes, inverse = np.unique(np.append(t.ravel(), origin), return_inverse=True)
    pieces = interval_integrals(f, nodes[:-1], nodes[1:], tol) if nodes.size > 1 else np.zeros(0)
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    cum -= cum[inverse[-1]]
    return cum[inverse[:-1]].reshape(t.shape)
