"""Ermakov-Pinney machinery.

The Hermitian partner field chi(t) is tied to the coupling kappa(t) through
``chi = 2 / sigma**2`` where sigma solves

    sigma'' + lam(t) sigma = sigma**-3.

sigma is assembled from two fundamental solutions u, v of the linear
equation (Pinney's superposition) and the closed form for chi follows.
Derivatives for residual checks use 5-point central stencils.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, Regime, kappa_eval, lambda_coefficient, mu

STENCIL = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
D1_WEIGHTS = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
D2_WEIGHTS = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0

# Samples closer to a zero of kappa than this many stencil steps are not
# resolved by a 5-point rule (sigma ~ |kappa|^-1/2 there).
POLE_GUARD_STEPS = 400.0
SINGULAR_XI = 1e-300


@dataclass(frozen=True)
class FundamentalPair:
    u: np.ndarray
    v: np.ndarray
    u_dot: np.ndarray
    v_dot: np.ndarray
    singular: np.ndarray

    @property
    def wronskian(self) -> np.ndarray:
        return self.u * self.v_dot - self.v * self.u_dot


@dataclass(frozen=True)
class PinneyConstants:
    """Coefficients of u^2, v^2 and 2uv in sigma^2."""

    A: complex
    B: complex
    C: complex

    @classmethod
    def from_wronskian(cls, A, B, wronskian, branch: int = 1) -> "PinneyConstants":
        C = branch * np.sqrt(complex(A * B - complex(wronskian) ** -2))
        return cls(complex(A), complex(B), C)

    def constraint_residual(self, wronskian) -> float:
        return abs(self.C**2 - (self.A * self.B - complex(wronskian) ** -2))


@dataclass(frozen=True)
class XiFrame:
    t: np.ndarray
    kappa: np.ndarray
    mu: np.ndarray
    xi: np.ndarray
    xi_hat: np.ndarray
    root: complex
    chi: np.ndarray
    singular: np.ndarray


def fundamental_solutions(params: ModelParams, t) -> FundamentalPair:
    """Closed-form solutions of u'' + lam u = 0 (lam built from kappa)."""
    k, kd, _, _ = kappa_eval(params.profile, t)
    m = mu(params, t)
    singular = np.asarray(k) == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        rk = np.sqrt(k + 0j)
        log_d = -0.5 * kd / k
        if params.regime is Regime.EXCEPTIONAL:
            u = 1.0 / rk
            v = m / rk
            u_dot = u * log_d
            v_dot = v * log_d + k / rk
        else:
            mu_dot = params.s * k
            u = np.exp(m / 2) / rk
            v = np.exp(-m / 2) / rk
            u_dot = u * (log_d + mu_dot / 2)
            v_dot = v * (log_d - mu_dot / 2)
    nan = np.nan + 0j
    return FundamentalPair(
        *(np.where(singular, nan, x) for x in (u, v, u_dot, v_dot)), singular=singular
    )


def pinney_constants(params: ModelParams) -> PinneyConstants:
    """Constants reproducing the model's closed form for chi.

    Away from alpha = 1 the pair (c1 + c2, c1 - c2) multiplies (u^2, v^2)
    and the Wronskian is -sqrt(1 - alpha^2). At alpha = 1, B multiplies u^2
    and A multiplies v^2 with unit Wronskian.
    """
    if params.regime is Regime.EXCEPTIONAL:
        return PinneyConstants.from_wronskian(params.B, params.A, 1.0, params.branch)
    return PinneyConstants.from_wronskian(
        params.c1 + params.c2, params.c1 - params.c2, -params.s, params.branch
    )


def pinney_sigma(consts: PinneyConstants, pair: FundamentalPair, cut_tol: float = 1e-12):
    """sigma = (A u^2 + B v^2 + 2 C u v)^(1/2), principal branch.

    Returns ``(sigma, on_cut)`` where ``on_cut`` flags samples whose radicand
    sits on the negative real axis, where the principal root is ambiguous.
    """
    q = consts.A * pair.u**2 + consts.B * pair.v**2 + 2 * consts.C * pair.u * pair.v
    on_cut = (q.real < 0) & (np.abs(q.imag) <= cut_tol * np.abs(q))
    return np.sqrt(q), on_cut


def chi_closed_form(params: ModelParams, t) -> XiFrame:
    t = np.asarray(t, dtype=float)
    k = kappa_eval(params.profile, t).value
    m = mu(params, t)
    D = params.root
    b = params.branch
    if params.regime is Regime.EXCEPTIONAL:
        xi = 0.5 * (params.B + params.A * m**2 + 2 * b * m * D)
        xi_hat = params.A * m + b * D
    else:
        ch, sh = np.cosh(m), np.sinh(m)
        xi = params.c1 * ch + params.c2 * sh + b * D
        xi_hat = params.c1 * sh + params.c2 * ch
    singular = np.abs(xi) < SINGULAR_XI
    with np.errstate(divide="ignore", invalid="ignore"):
        chi = np.where(singular, np.nan + 0j, k / xi)
    return XiFrame(t, k, m, xi, xi_hat, D, chi, singular)


def matched_generic_constants(A: float, B: float, alpha: float) -> tuple[complex, complex, int]:
    """Constants (c1, c2, branch) for alpha near 1 whose chi approaches the
    alpha = 1 closed form with the same (A, B) as alpha -> 1."""
    s2 = 1.0 - alpha**2
    s = np.sqrt(complex(s2))
    c1 = A / s2
    c2 = np.sqrt(complex(A * B - 1.0)) / s
    return complex(c1), complex(c2), (-1 if c1 > 0 else 1)


def stencil_points(t, h: float) -> np.ndarray:
    return np.asarray(t, dtype=float)[..., None] + h * STENCIL


def d1(samples, h: float) -> np.ndarray:
    return samples @ D1_WEIGHTS / h


def d2(samples, h: float) -> np.ndarray:
    return samples @ D2_WEIGHTS / h**2


def near_pole(params: ModelParams, t, h: float) -> np.ndarray:
    """True where a zero of kappa lies within the resolution of a stencil of
    step ``h`` (distance estimated as |kappa / kappa'|)."""
    k, kd, _, _ = kappa_eval(params.profile, t)
    return (k == 0) | (np.abs(k) < POLE_GUARD_STEPS * h * np.abs(kd))


def ep_residual(sigma, lam, dt: float, mask=None) -> float:
    """Max over interior samples of |sigma'' + lam sigma - sigma^-3| on a
    uniform grid. ``mask`` marks samples to exclude."""
    sigma = np.asarray(sigma)
    lam = np.asarray(lam)
    if sigma.shape[-1] < 5:
        raise ValueError("ep_residual needs at least 5 grid points")
    windows = np.lib.stride_tricks.sliding_window_view(sigma, 5, axis=-1)
    res = np.abs(d2(windows, dt) + lam[..., 2:-2] * sigma[..., 2:-2] - sigma[..., 2:-2] ** -3)
    keep = np.isfinite(res)
    if mask is not None:
        keep &= ~np.asarray(mask)[..., 2:-2]
    return float(res[keep].max()) if keep.any() else 0.0


def sigma_closed_form(params: ModelParams, t) -> np.ndarray:
    """sigma = sqrt(2 / chi) = sqrt(2 xi / kappa)."""
    f = chi_closed_form(params, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.sqrt(2 * f.xi / (f.kappa + 0j))


def local_ep_residuals(params: ModelParams, t, h: float = 1e-3):
    """Pointwise EP residual of the closed-form sigma at each ``t``, using a
    5-point stencil of step ``h``. Returns ``(residual, excluded)``."""
    pts = stencil_points(t, h)
    sig = sigma_closed_form(params, pts)
    lam, lam_sing = lambda_coefficient(params, t)
    centre = sig[..., 2]
    with np.errstate(all="ignore"):
        res = np.abs(d2(sig, h) + lam * centre - centre**-3)
    excluded = lam_sing | near_pole(params, pts, h).any(axis=-1) | ~np.isfinite(res)
    return np.where(excluded, 0.0, res), excluded


def local_chi_equation_residuals(params: ModelParams, t, h: float = 1e-3):
    """Pointwise residual of the second-order equation for chi,

        chi'' - 3/2 chi'^2/chi + [3/2 (k'/k)^2 - k''/k + 1/2 k^2 (1 - a^2)] chi + chi^3/2,

    with chi derivatives from 5-point stencils and kappa derivatives exact.
    """
    pts = stencil_points(t, h)
    chi = chi_closed_form(params, pts).chi
    k, kd, kdd, _ = kappa_eval(params.profile, t)
    c = chi[..., 2]
    a = params.alpha
    with np.errstate(all="ignore"):
        bracket = 1.5 * (kd / k) ** 2 - kdd / k + 0.5 * k**2 * (1 - a * a)
        res = np.abs(d2(chi, h) - 1.5 * d1(chi, h) ** 2 / c + bracket * c + c**3 / 2)
    excluded = near_pole(params, pts, h).any(axis=-1) | ~np.isfinite(res)
    return np.where(excluded, 0.0, res), excluded
