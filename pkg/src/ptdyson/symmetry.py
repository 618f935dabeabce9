"""Antilinear symmetries of H(t) and of the energy operator H~(t).

An antilinear operator is stored as its matrix part M acting after complex
conjugation. It commutes with a matrix A iff M conj(A) = A M, and a vector v
is one of its eigenstates iff M conj(v) = exp(i w) v for a real phase w.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import asdict, dataclass

import numpy as np

from .algebra2 import SIGMA_Y, SIGMA_Z, AntilinearOp, antilinear_apply, eig2, phase_fix
from .dyson import DysonFrame, dyson_map, energy_operator
from .model import ModelParams, Regime, hamiltonian_H, mu

log = logging.getLogger(__name__)

COMMUTE_TOL = 1e-9
EIGENSTATE_TOL = 1e-8
DEGENERATE_TOL = 1e-12


class Label(str, enum.Enum):
    SYMMETRIC = "symmetric"
    BROKEN = "spontaneously-broken"
    NOT_A_SYMMETRY = "not-a-symmetry"


def pt_static() -> AntilinearOp:
    """sigma_z followed by complex conjugation."""
    return AntilinearOp(SIGMA_Z)


def _e(c):
    return np.asarray(c)[..., None, None]


_EXT = np.clongdouble


@dataclass(frozen=True)
class _Parts:
    """Closed-form scalars entering PT~ and the eigenvectors of H~, in
    extended precision. At alpha = 0 and large mu the operator entries reach
    ~|xi| while its square stays 1, so double precision loses ~|xi|^2 eps."""

    xi: np.ndarray
    zeta: np.ndarray
    y: np.ndarray
    z: np.ndarray
    half_det: np.ndarray
    one_minus_axi: np.ndarray


def _parts(params: ModelParams, t) -> _Parts:
    m = np.asarray(mu(params, t)).astype(_EXT)
    a = np.longdouble(params.alpha)
    b = params.branch
    if params.regime is Regime.EXCEPTIONAL:
        A, B = _EXT(params.A), _EXT(params.B)
        D = np.sqrt(A * B - 1)
        xi = (B + A * m**2 + 2 * b * m * D) / 2
        zeta = A * m + b * D
        d = 1 - A
        return _Parts(xi, zeta, zeta, xi - d, d, 1 - xi)
    c1, c2 = _EXT(params.c1), _EXT(params.c2)
    s = np.sqrt(_EXT(1 - a * a))
    D = np.sqrt(c1 * c1 - c2 * c2 - 1 / (1 - a * a))
    x = c1 * np.cosh(m) + c2 * np.sinh(m)
    xi_hat = c1 * np.sinh(m) + c2 * np.cosh(m)
    xi = x + b * D
    d = a + b * (1 - a * a) * D
    if params.regime is Regime.ALPHA_ZERO:
        # reduced form: xi - delta = c1 cosh + c2 sinh, zeta = xi_hat
        return _Parts(xi, xi_hat, xi_hat, x, d, 1 - a * xi)
    zeta = s * xi_hat
    return _Parts(xi, zeta, zeta, xi - d, d, 1 - a * xi)


def pt_tilde(params: ModelParams, t):
    """Time-dependent antilinear symmetry of H~(t), in extended precision.

    Returns ``(op, degenerate)``; ``op.m`` is batched over ``t`` and
    ``degenerate`` marks samples where the normaliser vanishes. At alpha = 0
    the normaliser equals sqrt(c1^2 - c2^2) identically; it is evaluated from
    the same components so the square stays at machine precision.
    """
    p = _parts(params, t)
    norm = np.sqrt(p.z**2 - p.y**2)
    degenerate = np.abs(norm) < DEGENERATE_TOL
    safe = np.where(degenerate, 1, norm)
    m = (1j * _e(p.y) * SIGMA_Y + _e(p.z) * SIGMA_Z) / _e(safe)
    return AntilinearOp(m), degenerate


def eigenphase(op: AntilinearOp, v, tol: float = EIGENSTATE_TOL):
    """Phase of ``v`` under ``op`` (in [0, 2 pi)) and the eigen-residual
    ||op v - exp(i phase) v|| / ||v||. ``v`` is an eigenstate iff the
    residual is below ``tol``; the third return value is that flag."""
    v = np.asarray(v)
    v = v if np.iscomplexobj(v) else v.astype(complex)
    w = antilinear_apply(op, v)
    nv = np.einsum("...i,...i->...", np.conj(v), v).real
    proj = np.einsum("...i,...i->...", np.conj(v), w) / nv
    phase = np.mod(np.angle(proj), 2 * np.pi)
    res = np.linalg.norm(w - np.exp(1j * phase)[..., None] * v, axis=-1) / np.sqrt(nv)
    return phase.astype(float), res.astype(float), res < tol


def h_tilde_eigenvectors(params: ModelParams, t, precise: bool = False):
    """Closed-form eigenvectors of H~ for the eigenvalues -(omega +- chi)/2.

    Returns ``(plus, minus, degenerate)`` with unit-norm, phase-fixed
    vectors; ``precise=True`` keeps them in extended precision.
    """
    p = _parts(params, t)
    second = p.zeta + 1j * p.one_minus_axi
    plus = np.stack([-p.xi, second], axis=-1)
    minus = np.stack([2 * p.half_det - p.xi, second], axis=-1)
    scale = np.maximum(1.0, np.abs(p.xi))
    degenerate = (np.linalg.norm(plus, axis=-1) < DEGENERATE_TOL * scale) | (
        np.linalg.norm(minus, axis=-1) < DEGENERATE_TOL * scale
    )
    plus, minus = phase_fix(plus), phase_fix(minus)
    if not precise:
        plus, minus = plus.astype(complex), minus.astype(complex)
    return plus, minus, degenerate


def omega_tilde_printed(params: ModelParams, t, frame: DysonFrame | None = None):
    """Printed arctan expressions for the eigenphases of the closed-form
    eigenvectors, as ``(plus, minus)``. These are cross-checks only."""
    frame = dyson_map(params, t) if frame is None else frame
    xi, xh, a = frame.xi, frame.xi_hat, params.alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        if params.regime is Regime.ALPHA_ZERO:
            x = params.c1 * np.cosh(frame.mu) + params.c2 * np.sinh(frame.mu)
            q = (params.c2**2 - params.c1**2 - x * params.root) / xh
            return np.arctan(q), np.arctan(-q)
        if params.regime is Regime.EXCEPTIONAL:
            A = params.A
            plus = np.arctan((1 - xi) * xh / (1 - (1 + A) * xi + xi**2)) + np.pi
            # the printed minus phase carries a factor sqrt(1 - alpha^2) = 0
            minus = np.arctan(0.0 * (1 - xi) * xh / (3 + 2 * A * (A - 2) - (3 - A) * xi + xi**2))
            return plus, minus
        s, dl = params.s, frame.delta
        plus = np.arctan(2 * s * (1 - a * xi) * xh / (1 + xi * (xi - 2 * a + xi * a * a) + (a * a - 1) * xh**2))
        minus = np.arctan(s * (1 - a * xi) * xh / (2 * dl**2 - 3 * dl * xi + xi**2 + (a * a - 1) * xh**2)) + np.pi
        return plus, minus


def _mod_pi_distance(a, b):
    d = np.real(a) - np.real(b)
    return np.abs(d - np.pi * np.round(d / np.pi))


def omega_tilde_discrepancy(params: ModelParams, t) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample distance, modulo pi, between the extracted eigenphases of
    the closed-form eigenvectors and the printed expressions."""
    frame = dyson_map(params, t)
    op, _ = pt_tilde(params, t)
    plus, minus, _ = h_tilde_eigenvectors(params, t, precise=True)
    printed = omega_tilde_printed(params, t, frame)
    out = []
    for v, p in zip((plus, minus), printed):
        phase, _, _ = eigenphase(op, v)
        dist = _mod_pi_distance(phase, p)
        out.append(np.where(frame.singular, 0.0, dist))
    for name, d in zip(("plus", "minus"), out):
        worst = float(np.nanmax(d, initial=0.0))
        if worst > 1e-6:
            log.info("printed eigenphase (%s) deviates by up to %.3g modulo pi", name, worst)
    return out[0], out[1]


@dataclass(frozen=True)
class SymmetryCheck:
    """One Hamiltonian against one antilinear operator."""

    commutes: bool
    commute_residual: float
    eigenstates_shared: bool
    eigenstate_residual: float
    eigenphases: tuple[float, float] | None
    label: str


def _label(commutes: bool, shared: bool) -> Label:
    if not commutes:
        return Label.NOT_A_SYMMETRY
    return Label.SYMMETRIC if shared else Label.BROKEN


def _check(op: AntilinearOp, ham, vectors, commute_tol, eig_tol) -> list[SymmetryCheck]:
    comm = op.commutator_residual(ham).astype(float)
    results = [eigenphase(op, vectors[..., :, k]) for k in range(2)]
    phases = np.stack([r[0] for r in results], axis=-1)
    res = np.maximum(results[0][1], results[1][1])
    out = []
    for c, r, ph in zip(np.atleast_1d(comm), np.atleast_1d(res), np.atleast_2d(phases)):
        commutes = bool(c < commute_tol)
        shared = commutes and bool(r < eig_tol)
        out.append(SymmetryCheck(
            commutes=commutes,
            commute_residual=float(c),
            eigenstates_shared=shared,
            eigenstate_residual=float(r),
            eigenphases=(float(ph[0]), float(ph[1])) if shared else None,
            label=_label(commutes, shared).value,
        ))
    return out


@dataclass(frozen=True)
class PhaseReport:
    t: float
    regime: str
    H_PT: SymmetryCheck
    H_PTtilde: SymmetryCheck
    Htilde_PT: SymmetryCheck
    Htilde_PTtilde: SymmetryCheck
    H_defective: bool
    algebraic_H_label: str
    algebraic_agrees: bool
    degenerate: bool

    def to_dict(self) -> dict:
        return asdict(self)


def algebraic_label(alpha: float) -> str:
    """Phase of H under PT from |lambda| versus |kappa|, i.e. alpha versus 1."""
    if abs(alpha - 1.0) <= 1e-12:
        return "exceptional-point"
    return Label.SYMMETRIC.value if alpha > 1.0 else Label.BROKEN.value


def classify_phase(params: ModelParams, t, commute_tol: float = COMMUTE_TOL,
                   eig_tol: float = EIGENSTATE_TOL) -> list[PhaseReport]:
    """Phase reports for each time in ``t`` (always a list)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    frame = dyson_map(params, t)
    H = hamiltonian_H(params, t)
    Ht = energy_operator(params, t).h_tilde
    h_eig = eig2(H)
    # eig2 is ill-conditioned where chi ~ 0 and H~ is nearly scalar
    plus, minus, _ = h_tilde_eigenvectors(params, t, precise=True)
    ht_vectors = np.stack([plus, minus], axis=-1)
    op_t, degenerate = pt_tilde(params, t)
    op_s = AntilinearOp(np.broadcast_to(SIGMA_Z, H.shape))
    checks = {
        "H_PT": _check(op_s, H, h_eig.vectors, commute_tol, eig_tol),
        "H_PTtilde": _check(op_t, H, h_eig.vectors, commute_tol, eig_tol),
        "Htilde_PT": _check(op_s, Ht, ht_vectors, commute_tol, eig_tol),
        "Htilde_PTtilde": _check(op_t, Ht, ht_vectors, commute_tol, eig_tol),
    }
    alg = algebraic_label(params.alpha)
    scalar = np.abs(H[:, 0, 1]) + np.abs(H[:, 1, 0]) + np.abs(H[:, 0, 0] - H[:, 1, 1]) == 0
    reports = []
    for i, ti in enumerate(t):
        h_pt = checks["H_PT"][i]
        defective = bool(h_eig.defective[i])
        if scalar[i]:
            # kappa = 0 makes H a multiple of the identity; nothing to compare
            agrees = True
        elif alg == "exceptional-point":
            agrees = defective
        else:
            agrees = h_pt.label == alg
        reports.append(PhaseReport(
            t=float(ti),
            regime=params.regime.value,
            H_PT=h_pt,
            H_PTtilde=checks["H_PTtilde"][i],
            Htilde_PT=checks["Htilde_PT"][i],
            Htilde_PTtilde=checks["Htilde_PTtilde"][i],
            H_defective=defective,
            algebraic_H_label=alg,
            algebraic_agrees=bool(agrees),
            degenerate=bool(degenerate[i] | frame.singular[i]),
        ))
    return reports


@dataclass(frozen=True)
class PhaseSummary:
    """Aggregate of per-sample reports over a grid, non-degenerate samples only."""

    samples: int
    excluded: int
    labels: dict
    max_eigenstate_residual: dict
    min_eigenstate_residual: dict
    H_defective_samples: int

    @property
    def htilde_label(self) -> str:
        counts = self.labels["Htilde_PTtilde"]
        if not counts:
            return "undetermined"
        if counts.get(Label.SYMMETRIC.value, 0) == sum(counts.values()):
            return Label.SYMMETRIC.value
        if counts.get(Label.NOT_A_SYMMETRY.value, 0):
            return Label.NOT_A_SYMMETRY.value
        return Label.BROKEN.value

    def to_dict(self) -> dict:
        return {**asdict(self), "htilde_label": self.htilde_label}


def summarize_phases(reports: list[PhaseReport]) -> PhaseSummary:
    keys = ("H_PT", "H_PTtilde", "Htilde_PT", "Htilde_PTtilde")
    kept = [r for r in reports if not r.degenerate]
    labels = {k: {} for k in keys}
    worst = {k: 0.0 for k in keys}
    best = {k: float("inf") for k in keys}
    for r in kept:
        for k in keys:
            c = getattr(r, k)
            labels[k][c.label] = labels[k].get(c.label, 0) + 1
            worst[k] = max(worst[k], c.eigenstate_residual)
            best[k] = min(best[k], c.eigenstate_residual)
    return PhaseSummary(
        samples=len(reports),
        excluded=len(reports) - len(kept),
        labels={k: dict(sorted(v.items())) for k, v in labels.items()},
        max_eigenstate_residual=worst,
        min_eigenstate_residual={k: (v if np.isfinite(v) else 0.0) for k, v in best.items()},
        H_defective_samples=sum(r.H_defective for r in kept),
    )
