"""Solutions of the two time-dependent Schroedinger equations.

The Hermitian system h(t) is diagonal, so its solutions are pure phases
carrying theta(t) = 1/2 int_0^t chi. The non-Hermitian solutions follow from
psi = eta^-1 phi. An RK4 integrator is provided as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .algebra2 import inv2, matvec
from .dyson import DysonFrame, EnergyOperatorSample, dyson_map, energy_operator
from .ermakov import chi_closed_form
from .model import ModelParams, Regime, hamiltonian_H, hamiltonian_h
from .quadrature import integral_from

QUAD_TOL = 1e-10
MAX_STEP = 1e-2
BLOWUP_NORM = 1e12


def _real_if_close(z, tol=1e-12):
    z = np.asarray(z)
    if np.iscomplexobj(z) and np.all(np.abs(z.imag) <= tol * np.maximum(1.0, np.abs(z.real))):
        return z.real
    return z


def theta(params: ModelParams, t, tol: float = QUAD_TOL) -> np.ndarray:
    """theta(t) = 1/2 int_0^t chi(s) ds by adaptive Simpson.

    Real in valid regimes; complex values are kept when chi is complex.
    """
    def chi(s):
        return chi_closed_form(params, s).chi

    return _real_if_close(0.5 * integral_from(chi, 0.0, t, tol))


def theta_closed_forms(params: ModelParams, t) -> dict[str, np.ndarray]:
    """The two printed arctan expressions for theta (alpha != 1 only).

    ``"scaled"`` puts sqrt(1-alpha^2) in front of the whole bracket and tanh
    on (c1 -+ D); ``"unscaled"`` has no prefactor and tanh on D alone.
    """
    if params.regime is Regime.EXCEPTIONAL:
        return {}
    m = chi_closed_form(params, t).mu
    c1, c2, D, s = params.c1, params.c2, params.root, params.s
    sign = -params.branch
    th = np.tanh(m / 2)
    return {
        "scaled": np.arctan(s * (c2 + (c1 + sign * D) * th)),
        "unscaled": np.arctan(c2 + (c1 + sign * D * th)),
    }


def theta_discrepancy(params: ModelParams, t) -> dict[str, float]:
    """Max deviation of each closed-form candidate from quadrature, after
    removing the value at t = 0 and reducing modulo pi."""
    t = np.asarray(t, dtype=float)
    quad = theta(params, t)
    out = {}
    for name, cand in theta_closed_forms(params, t).items():
        cand0 = theta_closed_forms(params, 0.0)[name]
        d = quad - (cand - cand0)
        d = np.real(d) - np.pi * np.round(np.real(d) / np.pi) + 1j * np.imag(d)
        out[name] = float(np.max(np.abs(d)))
    return out


def phi_solutions(params: ModelParams, t, th=None) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(t, dtype=float)
    th = theta(params, t) if th is None else th
    base = 0.5j * params.omega * t
    zero = np.zeros(t.shape, dtype=complex)
    plus = np.stack([np.exp(base + 1j * th), zero], axis=-1)
    minus = np.stack([zero, np.exp(base - 1j * th)], axis=-1)
    return plus, minus


def psi_explicit(params: ModelParams, t, frame: DysonFrame | None = None, th=None):
    """Component form of eta^-1 phi with prefactor 1/det(eta) = 1/(2 delta)."""
    t = np.asarray(t, dtype=float)
    frame = dyson_map(params, t) if frame is None else frame
    th = theta(params, t) if th is None else th
    e1, e2, e3 = frame.eta1, frame.eta2, frame.eta3
    det = 2 * frame.half_det
    base = 0.5j * params.omega * t
    plus = -np.exp(base + 1j * th)[..., None] / det * np.stack([-e1, e2 + 1j * e3], axis=-1)
    minus = -np.exp(base - 1j * th)[..., None] / det * np.stack([e2 - 1j * e3, -e1], axis=-1)
    return plus, minus


def psi_solutions(params: ModelParams, t, th=None) -> tuple[np.ndarray, np.ndarray]:
    return psi_explicit(params, t, th=th)


def psi_via_inverse(params: ModelParams, t, th=None) -> tuple[np.ndarray, np.ndarray]:
    eta_inv = inv2(dyson_map(params, t).matrix)
    plus, minus = phi_solutions(params, t, th)
    return matvec(eta_inv, plus), matvec(eta_inv, minus)


def metric_overlap(v, w, eta) -> np.ndarray:
    """<v | eta^dagger eta w>, conjugate-linear in ``v``.

    Evaluated as <eta v | eta w>; forming rho explicitly loses several
    digits once |eta| is large.
    """
    return np.einsum("...i,...i->...", np.conj(matvec(eta, v)), matvec(eta, w))


def metric_gram(params: ModelParams, t, th=None) -> np.ndarray:
    """2x2 Gram matrix of (psi+, psi-) in the eta metric, per sample."""
    eta = dyson_map(params, t).matrix
    states = psi_solutions(params, t, th)
    g = np.empty(np.shape(t) + (2, 2), dtype=complex)
    for i, a in enumerate(states):
        for j, b in enumerate(states):
            g[..., i, j] = metric_overlap(a, b, eta)
    return g


def energy_expectation(params: ModelParams, t, which: int = 1, th=None) -> np.ndarray:
    """<psi | rho H~ psi> / <psi | rho psi> for psi = psi_+ (which=+1) or psi_-.

    The denominator is one whenever theta is real; it only matters in the
    broken regime where the states are not normalised.
    """
    t = np.asarray(t, dtype=float)
    eta = dyson_map(params, t).matrix
    psi = psi_solutions(params, t, th)[0 if which > 0 else 1]
    ht = energy_operator(params, t).h_tilde
    return metric_overlap(psi, matvec(ht, psi), eta) / metric_overlap(psi, psi, eta)


def schrodinger_residuals(params: ModelParams, t, dt: float = 1e-4):
    """Pointwise residuals of i d/dt phi - h phi and i d/dt psi - H psi.

    Returns ``(phi_residual, psi_residual)``, each the max over both states
    of the largest component modulus.
    """
    t = np.asarray(t, dtype=float)
    offsets = np.array([-2, -1, 0, 1, 2]) * dt
    pts = t[..., None] + offsets
    th = theta(params, pts)
    chi = chi_closed_form(params, t).chi
    h = hamiltonian_h(params.omega, chi)
    H = hamiltonian_H(params, t)

    phi = phi_solutions(params, pts, th)
    psi = psi_solutions(params, pts, th)
    out = []
    for gen, states in ((h, phi), (H, psi)):
        worst = np.zeros(t.shape)
        for s in states:
            deriv = (s[..., 0, :] - 8 * s[..., 1, :] + 8 * s[..., 3, :] - s[..., 4, :]) / (12 * dt)
            res = np.abs(1j * deriv - matvec(gen, s[..., 2, :])).max(axis=-1)
            worst = np.maximum(worst, res)
        out.append(worst)
    return out[0], out[1]


@dataclass(frozen=True)
class TDSEResult:
    t: np.ndarray
    states: np.ndarray
    blowup_time: float | None


def integrate_tdse(hamiltonian_fn, psi0, t0: float, t1: float, dt: float = 1e-3,
                   blowup: float = BLOWUP_NORM, backend=None) -> TDSEResult:
    """Classical fixed-step RK4 for i psi' = H(t) psi.

    ``hamiltonian_fn`` maps an array of times to an array of 2x2 matrices.
    Propagation stops once the norm exceeds ``blowup``; the remaining rows are
    NaN and the time is recorded.
    """
    if dt <= 0 or dt > MAX_STEP:
        raise ValueError(f"step must be in (0, {MAX_STEP}]")
    n = int(round((t1 - t0) / dt))
    if n < 1 or abs(n * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError("interval must be a whole number of steps")
    half = t0 + 0.5 * dt * np.arange(2 * n + 1)
    gen = np.ascontiguousarray(-1j * np.asarray(hamiltonian_fn(half), dtype=complex))
    rk4 = backend or kernels.rk4_linear
    ys, done = rk4(gen, np.asarray(psi0, dtype=complex), dt, blowup)
    return TDSEResult(half[::2], ys, None if done == n else float(half[2 * (done + 1)]))


@dataclass
class Trajectory:
    """Analytic solution sampled on a uniform grid plus per-sample diagnostics."""

    params: ModelParams
    t: np.ndarray
    frame: DysonFrame
    energy: EnergyOperatorSample
    theta: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    e_plus: np.ndarray
    e_minus: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def singular(self) -> np.ndarray:
        return self.frame.singular


def solve_trajectory(params: ModelParams, t) -> Trajectory:
    t = np.asarray(t, dtype=float)
    steps = np.diff(t)
    if t.ndim != 1 or t.size < 2 or np.any(steps <= 0):
        raise ValueError("time grid must be strictly increasing with at least 2 samples")
    if np.ptp(steps) > 1e-12 * max(1.0, np.abs(t).max()):
        raise ValueError("time grid must be uniform")
    frame = dyson_map(params, t)
    th = theta(params, t)
    phi_p, phi_m = phi_solutions(params, t, th)
    psi_p, psi_m = psi_solutions(params, t, th)
    energy = energy_operator(params, t)
    e_p = energy_expectation(params, t, +1, th)
    e_m = energy_expectation(params, t, -1, th)
    return Trajectory(params, t, frame, energy, np.asarray(th), phi_p, phi_m, psi_p, psi_m, e_p, e_m)
