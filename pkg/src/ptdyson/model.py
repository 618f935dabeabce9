"""Model parameters, coupling profiles and the two Hamiltonians.

The non-Hermitian generator of time evolution is

    H(t) = -1/2 [omega I + alpha kappa(t) sz + i kappa(t) sx]

and its Hermitian partner is h(t) = -1/2 [omega I + chi(t) sz]. Units have
hbar = 1 and every indefinite integral starts at t = 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from .algebra2 import IDENTITY, SIGMA_X, SIGMA_Z
from .quadrature import integral_from

REGIME_TOL = 1e-12
QUAD_TOL = 1e-10


class KappaSample(NamedTuple):
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    integral: np.ndarray


@dataclass(frozen=True)
class Sinusoidal:
    """kappa(t) = amplitude * sin(t / period_scale)."""

    amplitude: float = 1.0
    period_scale: float = 5.0

    def __post_init__(self):
        if self.period_scale == 0:
            raise ValueError("period_scale must be nonzero")

    def evaluate(self, t) -> KappaSample:
        t = np.asarray(t, dtype=float)
        a, T = self.amplitude, self.period_scale
        s, c = np.sin(t / T), np.cos(t / T)
        return KappaSample(a * s, a * c / T, -a * s / T**2, a * T * (1.0 - c))


@dataclass(frozen=True)
class Constant:
    value: float

    def evaluate(self, t) -> KappaSample:
        t = np.asarray(t, dtype=float)
        z = np.zeros_like(t)
        return KappaSample(z + self.value, z, z.copy(), self.value * t)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Cubic-spline interpolant through sampled kappa values.

    The table must cover t = 0, the lower limit of every integral.
    """

    times: tuple
    values: tuple
    _spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 4:
            raise ValueError("tabulated profile needs matching 1-d times/values, at least 4 samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("tabulated time grid must be strictly increasing")
        if not t[0] <= 0.0 <= t[-1]:
            raise ValueError("tabulated time grid must contain t = 0")
        object.__setattr__(self, "times", tuple(t.tolist()))
        object.__setattr__(self, "values", tuple(v.tolist()))
        object.__setattr__(self, "_spline", CubicSpline(t, v))

    def __eq__(self, other):
        return isinstance(other, Tabulated) and (self.times, self.values) == (other.times, other.values)

    def __hash__(self):
        return hash((self.times, self.values))

    def evaluate(self, t) -> KappaSample:
        t = np.asarray(t, dtype=float)
        lo, hi = self.times[0], self.times[-1]
        if np.any((t < lo) | (t > hi)):
            raise ValueError(f"t outside tabulated range [{lo}, {hi}]")
        sp = self._spline
        integral = integral_from(sp, 0.0, t, tol=QUAD_TOL).real
        return KappaSample(sp(t), sp(t, 1), sp(t, 2), integral)


KappaProfile = Sinusoidal | Constant | Tabulated


def kappa_eval(profile: KappaProfile, t) -> KappaSample:
    return profile.evaluate(t)


class Regime(enum.Enum):
    GENERIC = "generic"
    ALPHA_ZERO = "alpha_zero"
    EXCEPTIONAL = "exceptional"


def classify_regime(alpha: float, tol: float = REGIME_TOL) -> Regime:
    if abs(alpha - 1.0) <= tol:
        return Regime.EXCEPTIONAL
    if abs(alpha) <= tol:
        return Regime.ALPHA_ZERO
    return Regime.GENERIC


@dataclass(frozen=True)
class ModelParams:
    """Model and integration constants.

    ``c1``/``c2`` are used away from the exceptional point and ``A``/``B``
    at alpha = 1; supplying the wrong pair is an error. ``branch`` is the
    sign in front of the square root in xi.
    """

    omega: float
    alpha: float
    profile: KappaProfile = field(default_factory=lambda: Sinusoidal(1.0, 5.0))
    c1: complex | None = None
    c2: complex | None = None
    A: float | None = None
    B: float | None = None
    branch: int = 1

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if self.regime is Regime.EXCEPTIONAL:
            if self.A is None or self.B is None:
                raise ValueError("alpha = 1 requires constants A and B")
            if self.c1 is not None or self.c2 is not None:
                raise ValueError("alpha = 1 takes A and B, not c1/c2")
        else:
            if self.c1 is None or self.c2 is None:
                raise ValueError("alpha != 1 requires constants c1 and c2")
            if self.A is not None or self.B is not None:
                raise ValueError("A and B are only used at alpha = 1")
            object.__setattr__(self, "c1", complex(self.c1))
            object.__setattr__(self, "c2", complex(self.c2))

    @property
    def regime(self) -> Regime:
        return classify_regime(self.alpha)

    @property
    def root(self) -> complex:
        """sqrt(c1^2 - c2^2 - 1/(1 - alpha^2)), or sqrt(AB - 1) at alpha = 1."""
        if self.regime is Regime.EXCEPTIONAL:
            return np.sqrt(complex(self.A * self.B - 1.0))
        return np.sqrt(self.c1**2 - self.c2**2 - 1.0 / (1.0 - self.alpha**2))

    @property
    def s(self) -> complex:
        """sqrt(1 - alpha^2), imaginary for alpha > 1; 1 at the exceptional point."""
        if self.regime is Regime.EXCEPTIONAL:
            return 1.0 + 0j
        return np.sqrt(complex(1.0 - self.alpha**2))

    def is_valid(self, tol: float = 1e-12) -> bool:
        """Reality conditions under which chi(t) and the energies stay real."""
        if self.regime is Regime.EXCEPTIONAL:
            return self.A * self.B > 1.0
        c1, c2, a = self.c1, self.c2, self.alpha
        if abs(c1.imag) > tol:
            return False
        if a < 1.0:
            return abs(c2.imag) <= tol and c1.real**2 > c2.real**2 + 1.0 / (1.0 - a * a)
        return abs(c2.real) <= tol


def mu(params: ModelParams, t) -> np.ndarray:
    """Rescaled coupling integral: s * int_0^t kappa (plain integral at alpha = 1)."""
    ik = kappa_eval(params.profile, t).integral
    return params.s * ik if params.regime is not Regime.EXCEPTIONAL else ik + 0j


def hamiltonian_H(params: ModelParams, t) -> np.ndarray:
    k = np.asarray(kappa_eval(params.profile, t).value)[..., None, None]
    return -0.5 * (params.omega * IDENTITY + params.alpha * k * SIGMA_Z + 1j * k * SIGMA_X)


def hamiltonian_h(omega: float, chi) -> np.ndarray:
    chi = np.asarray(chi)[..., None, None]
    return -0.5 * (omega * IDENTITY + chi * SIGMA_Z)


def lambda_coefficient(
    params: ModelParams,
    t,
    source: str = "kappa",
    chi_derivs: tuple | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient of the Ermakov-Pinney equation.

    Returns ``(lam, singular)``; ``lam`` is NaN exactly where ``singular``
    marks a vanishing field.
    """
    a = params.alpha
    if source == "kappa":
        k, kd, kdd, _ = kappa_eval(params.profile, t)
        f, fd, fdd, sign = k, kd, kdd, -(1.0 - a * a)
    elif source == "chi":
        if chi_derivs is None:
            raise ValueError("source='chi' needs chi_derivs=(chi, chi_dot, chi_ddot)")
        f, fd, fdd = (np.asarray(x) for x in chi_derivs)
        sign = 1.0
    else:
        raise ValueError(f"unknown source {source!r}")
    singular = np.asarray(f) == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = 0.5 * fdd / f - 0.75 * (fd / f) ** 2 + 0.25 * sign * f**2
    return np.where(singular, np.nan, lam), singular
