"""Time-dependent Dyson map, metric and observable energy operator.

With the Hermitian ansatz eta = eta1 I + eta2 sx + eta3 sy (eta1 = eta4) and
integration constant fixed to one, the map solving

    h = eta H eta^-1 + i eta' eta^-1

is eta1 = sqrt(xi), eta2 = s xi_hat / sqrt(xi), eta3 = (1 - alpha xi) / sqrt(xi),
where s = sqrt(1 - alpha^2) (s = 1 at alpha = 1).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra2 import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    dagger,
    det2,
    eig2,
    inv2,
    max_entry_norm,
)
from .ermakov import chi_closed_form
from .model import ModelParams, Regime, hamiltonian_H, hamiltonian_h, kappa_eval

log = logging.getLogger(__name__)

SINGULAR_DET = 1e-12
CONSISTENCY_TOL = 1e-6


@dataclass(frozen=True)
class DysonFrame:
    """Dyson map components and intermediates on a set of times.

    ``delta`` follows the determinant bookkeeping |det eta| = 2|delta|;
    ``half_det`` is the signed closed form det(eta)/2, which is what enters
    the energy operator and symmetry operator.
    """

    t: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    eta3: np.ndarray
    eta4: np.ndarray
    chi: np.ndarray
    xi: np.ndarray
    xi_hat: np.ndarray
    zeta: np.ndarray
    mu: np.ndarray
    delta: complex
    half_det: complex
    det_eta: np.ndarray
    singular: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        a0 = (self.eta1 + self.eta4) / 2
        az = (self.eta1 - self.eta4) / 2
        e = lambda c: np.asarray(c)[..., None, None]  # noqa: E731
        return e(a0) * IDENTITY + e(self.eta2) * SIGMA_X + e(self.eta3) * SIGMA_Y + e(az) * SIGMA_Z

    @property
    def max_imag(self) -> np.ndarray:
        return np.max(np.abs([np.imag(self.eta1), np.imag(self.eta2), np.imag(self.eta3)]), axis=0)


def _delta(params: ModelParams) -> tuple[complex, complex]:
    if params.regime is Regime.EXCEPTIONAL:
        delta = complex(params.A - 1.0)
        return delta, -delta
    a = params.alpha
    delta = a + params.branch * (1 - a * a) * params.root
    return complex(delta), complex(delta)


def dyson_map(params: ModelParams, t, eta2_offset: float = 0.0) -> DysonFrame:
    """Closed-form Dyson map. ``eta2_offset`` corrupts eta2 (negative controls)."""
    f = chi_closed_form(params, t)
    xi, xi_hat = f.xi, f.xi_hat
    zeta = params.s * xi_hat if params.regime is not Regime.EXCEPTIONAL else xi_hat
    a = params.alpha
    rx = np.sqrt(xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        eta1 = rx
        eta2 = zeta / rx + eta2_offset
        eta3 = (1 - a * xi) / rx
    det = eta1**2 - eta2**2 - eta3**2
    delta, half_det = _delta(params)
    real_xi = np.abs(np.imag(xi)) <= 1e-12 * np.maximum(1.0, np.abs(xi))
    singular = (
        f.singular
        | (real_xi & (np.real(xi) <= 0))
        | (np.abs(det) < SINGULAR_DET)
        | (abs(delta) < SINGULAR_DET)
    )
    return DysonFrame(
        t=f.t, eta1=eta1, eta2=eta2, eta3=eta3, eta4=eta1, chi=f.chi, xi=xi,
        xi_hat=xi_hat, zeta=zeta, mu=f.mu, delta=delta, half_det=half_det,
        det_eta=det, singular=singular,
    )


def eta_matrix(params: ModelParams, t, eta2_offset: float = 0.0) -> np.ndarray:
    return dyson_map(params, t, eta2_offset).matrix


def central_derivative(fn, t, dt: float) -> np.ndarray:
    """Fourth-order central difference of a matrix-valued ``fn`` at step ``dt``."""
    t = np.asarray(t, dtype=float)
    return (fn(t - 2 * dt) - 8 * fn(t - dt) + 8 * fn(t + dt) - fn(t + 2 * dt)) / (12 * dt)


def eta_derivative(params: ModelParams, t, dt: float, eta2_offset: float = 0.0) -> np.ndarray:
    return central_derivative(lambda s: eta_matrix(params, s, eta2_offset), t, dt)


def dyson_residual(params: ModelParams, t, dt: float = 1e-4, eta2_offset: float = 0.0):
    """Pointwise max-entry norm of h - eta H eta^-1 - i eta' eta^-1.

    Returns ``(residual, singular)``; residual is zeroed on singular samples.
    """
    t = np.asarray(t, dtype=float)
    frame = dyson_map(params, t, eta2_offset)
    eta = frame.matrix
    eta_inv = inv2(eta)
    eta_dot = eta_derivative(params, t, dt, eta2_offset)
    h = hamiltonian_h(params.omega, frame.chi)
    res = max_entry_norm(h - eta @ hamiltonian_H(params, t) @ eta_inv - 1j * eta_dot @ eta_inv)
    singular = stencil_singular(params, t, dt) | frame.singular
    return np.where(singular, 0.0, res), singular


def stencil_singular(params, t, dt):
    """Samples whose difference stencil touches a singular point or straddles
    the branch cut of sqrt(xi) (possible only for complex xi)."""
    frames = [dyson_map(params, t + k * dt) for k in (-2, -1, 0, 1, 2)]
    out = np.zeros(np.shape(t), dtype=bool)
    for f in frames:
        out |= f.singular
    for a, b in zip(frames, frames[1:]):
        out |= (np.real(a.xi) < 0) & (np.real(b.xi) < 0) & (np.signbit(np.imag(a.xi)) != np.signbit(np.imag(b.xi)))
    return out


def metric(params: ModelParams, t) -> np.ndarray:
    eta = eta_matrix(params, t)
    return dagger(eta) @ eta


def metric_and_quasi_hermiticity(params: ModelParams, t, dt: float = 1e-4):
    """Metric rho = eta^dagger eta and the residual of H^dagger rho - rho H = i rho'.

    Returns ``(rho, residual, singular)``.
    """
    t = np.asarray(t, dtype=float)
    frame = dyson_map(params, t)
    rho = metric(params, t)
    rho_dot = central_derivative(lambda s: metric(params, s), t, dt)
    H = hamiltonian_H(params, t)
    res = max_entry_norm(dagger(H) @ rho - rho @ H - 1j * rho_dot)
    singular = frame.singular | stencil_singular(params, t, dt)
    return rho, np.where(singular, 0.0, res), singular


@dataclass(frozen=True)
class EnergyOperatorSample:
    t: np.ndarray
    h_tilde: np.ndarray
    closed_form: np.ndarray
    eigenvalues: np.ndarray
    mismatch: np.ndarray
    singular: np.ndarray


def energy_operator_closed_form(params: ModelParams, frame: DysonFrame) -> np.ndarray:
    """Regime-specific explicit form of eta^-1 h eta."""
    om = params.omega
    e = lambda c: np.asarray(c)[..., None, None]  # noqa: E731
    xi, chi = frame.xi, frame.chi
    if params.regime is Regime.ALPHA_ZERO:
        x = params.c1 * np.cosh(frame.mu) + params.c2 * np.sinh(frame.mu)
        pref = chi / (2 * params.root)
        inner = 1j * SIGMA_X - e(frame.xi_hat) * 1j * SIGMA_Y - e(x) * SIGMA_Z
        return -0.5 * om * IDENTITY + e(pref) * inner
    d = frame.half_det
    a = params.alpha
    inner = (
        e(1j * (a * xi - 1)) * SIGMA_X
        + e(1j * frame.zeta) * SIGMA_Y
        + e(xi - d) * SIGMA_Z
    )
    return -0.5 * (om * IDENTITY + e(chi / d) * inner)


def energy_operator(params: ModelParams, t) -> EnergyOperatorSample:
    """eta^-1 h eta, cross-checked against the explicit closed form."""
    t = np.asarray(t, dtype=float)
    frame = dyson_map(params, t)
    eta = frame.matrix
    # eta^-1 h eta with the scalar part of h kept outside the similarity
    chi = np.asarray(frame.chi)[..., None, None]
    h_tilde = -0.5 * params.omega * IDENTITY - 0.5 * chi * (inv2(eta) @ SIGMA_Z @ eta)
    closed = energy_operator_closed_form(params, frame)
    mismatch = np.where(frame.singular, 0.0, max_entry_norm(h_tilde - closed))
    worst = float(np.max(mismatch, initial=0.0))
    if worst > CONSISTENCY_TOL:
        log.warning("energy operator closed form deviates from eta^-1 h eta by %.3g", worst)
    return EnergyOperatorSample(t, h_tilde, closed, eig2(h_tilde).values, mismatch, frame.singular)


def energy_operator_from_generator(params: ModelParams, t, dt: float = 1e-4) -> np.ndarray:
    """Second route: H + i eta^-1 eta'."""
    eta = eta_matrix(params, t)
    return hamiltonian_H(params, t) + 1j * inv2(eta) @ eta_derivative(params, t, dt)


def determinant_identity(frame: DysonFrame) -> np.ndarray:
    """| |det eta| - 2|delta| | per sample."""
    return np.abs(np.abs(frame.det_eta) - 2 * abs(frame.delta))


def coupled_generator(params: ModelParams, t) -> np.ndarray:
    """Matrix G(t) with d/dt (eta1, eta2, eta3) = G (eta1, eta2, eta3)."""
    k = np.asarray(kappa_eval(params.profile, t).value, dtype=complex)
    c = chi_closed_form(params, t).chi + params.alpha * k
    g = np.zeros(k.shape + (3, 3), dtype=complex)
    g[..., 0, 1] = k / 2
    g[..., 1, 0] = k / 2
    g[..., 1, 2] = c / 2
    g[..., 2, 1] = -c / 2
    return g


def integrate_coupled(params: ModelParams, t0: float, t1: float, dt: float = 1e-3, backend=None):
    """RK4 solution of the coupled first-order system for eta1..eta3 started
    from the closed-form frame at ``t0``. Returns ``(t, eta[N+1, 3])``."""
    n = int(round((t1 - t0) / dt))
    if n < 1 or abs(n * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError("interval must be a whole number of steps")
    half = t0 + 0.5 * dt * np.arange(2 * n + 1)
    f0 = dyson_map(params, t0)
    y0 = np.array([f0.eta1, f0.eta2, f0.eta3], dtype=complex)
    rk4 = backend or kernels.rk4_linear
    ys, _ = rk4(np.ascontiguousarray(coupled_generator(params, half)), y0, dt)
    return half[::2], ys


def frame_det(frame: DysonFrame) -> np.ndarray:
    return det2(frame.matrix)
