"""The verification battery run by ``ptdyson verify``.

Every check reduces a pointwise residual to its maximum over non-excluded
samples and compares it with a tolerance from the run configuration.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .algebra2 import IDENTITY, eig2, max_entry_norm
from .config import RunConfig, Tolerances, config_hash
from .dyson import (
    dyson_map,
    dyson_residual,
    energy_operator,
    energy_operator_from_generator,
    integrate_coupled,
    metric_and_quasi_hermiticity,
    stencil_singular,
)
from .ermakov import chi_closed_form, local_chi_equation_residuals, local_ep_residuals
from .evolution import (
    energy_expectation,
    integrate_tdse,
    metric_gram,
    phi_solutions,
    psi_explicit,
    psi_via_inverse,
    schrodinger_residuals,
    theta,
    theta_discrepancy,
)
from .model import ModelParams, hamiltonian_H, hamiltonian_h
from .symmetry import eigenphase, h_tilde_eigenvectors, omega_tilde_discrepancy, pt_tilde


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    excluded: int


@dataclass
class VerifyReport:
    config_hash: str
    regime: str
    valid_parameters: bool
    checks: list[CheckResult]
    info: dict = field(default_factory=dict)

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "regime": self.regime,
            "valid_parameters": self.valid_parameters,
            "overall_pass": self.overall_pass,
            "checks": [asdict(c) for c in self.checks],
            "info": self.info,
        }


def _result(name: str, residual, tol: float, excluded=None) -> CheckResult:
    residual = np.asarray(residual, dtype=float)
    mask = np.zeros(residual.shape, bool) if excluded is None else np.asarray(excluded, bool)
    kept = residual[~mask]
    worst = float(np.max(kept)) if kept.size else 0.0
    # NaN never passes
    return CheckResult(name, worst, tol, bool(worst < tol), int(mask.sum()))


def _grid(cfg: RunConfig) -> np.ndarray:
    g = cfg.grid
    return np.linspace(g.t0, g.t1, g.samples)


def _rk4_span(cfg: RunConfig) -> tuple[float, float]:
    t0 = cfg.grid.t0
    dt = cfg.verify.rk4_step
    span = min(cfg.verify.rk4_span, cfg.grid.t1 - t0)
    n = max(1, int(np.floor(span / dt + 1e-9)))
    return t0, t0 + n * dt


def rk4_state_errors(params: ModelParams, t0: float, t1: float, dt: float, backend=None) -> dict:
    """Sup-norm deviation of RK4 propagation from the analytic solutions of
    both Schroedinger equations, per state."""
    out = {}
    half = np.linspace(t0, t1, 2 * int(round((t1 - t0) / dt)) + 1)
    chi_half = chi_closed_form(params, half).chi
    h_table = hamiltonian_h(params.omega, chi_half)
    grid = half[::2]
    th = theta(params, grid)
    psi = psi_explicit(params, grid, th=th)
    phi = phi_solutions(params, grid, th)
    blowups = {}
    for label, ham, states in (
        ("psi", lambda s: hamiltonian_H(params, s), psi),
        ("phi", lambda s, _t=half, _h=h_table: _h[np.searchsorted(_t, s)], phi),
    ):
        for sign, exact in zip("+-", states):
            res = integrate_tdse(ham, exact[0], t0, t1, dt, backend=backend)
            err = np.abs(res.states - exact).max(axis=-1)
            out[label + sign] = float(np.max(err)) if np.all(np.isfinite(err)) else float("inf")
            blowups[label + sign] = res.blowup_time
    out["blowup"] = blowups
    return out


def run_checks(cfg: RunConfig, tol: Tolerances | None = None, backend=None) -> VerifyReport:
    params = cfg.model.to_params()
    tol = tol or cfg.tolerances
    vs = cfg.verify
    t = _grid(cfg)
    checks: list[CheckResult] = []
    info: dict = {}

    frame = dyson_map(params, t)
    sing = frame.singular
    stencil_sing = stencil_singular(params, t, vs.derivative_step) | sing

    res, exc = local_ep_residuals(params, t, vs.ep_step)
    checks.append(_result("ep_residual", res, tol.ep, exc))
    res, exc = local_chi_equation_residuals(params, t, vs.ep_step)
    checks.append(_result("chi_equation_residual", res, tol.chi_equation, exc))

    t0, t1 = _rk4_span(cfg)
    tc, ys = integrate_coupled(params, t0, t1, vs.rk4_step, backend=backend)
    fc = dyson_map(params, tc)
    closed = np.stack([fc.eta1, fc.eta2, fc.eta3], axis=-1)
    err = np.abs(ys - closed).max(axis=-1)
    checks.append(_result("coupled_ode_oracle", np.nan_to_num(err, nan=np.inf), tol.coupled_ode, fc.singular))

    res, exc = dyson_residual(params, t, vs.derivative_step, eta2_offset=vs.corrupt_eta2)
    checks.append(_result("dyson_residual", res, tol.dyson, exc))
    _, res, exc = metric_and_quasi_hermiticity(params, t, vs.metric_step)
    checks.append(_result("quasi_hermiticity_residual", res, tol.quasi_hermiticity, exc))

    phi_res, psi_res = schrodinger_residuals(params, t, vs.derivative_step)
    checks.append(_result("schrodinger_residual_h", phi_res, tol.schrodinger, stencil_sing))
    checks.append(_result("schrodinger_residual_H", psi_res, tol.schrodinger, stencil_sing))

    th = theta(params, t)
    explicit = psi_explicit(params, t, frame, th)
    inverse = psi_via_inverse(params, t, th)
    route = np.max([np.abs(a - b).max(axis=-1) for a, b in zip(explicit, inverse)], axis=0)
    checks.append(_result("psi_routes", route, tol.psi_routes, sing))

    gram = metric_gram(params, t, th)
    checks.append(_result("metric_gram", max_entry_norm(gram - IDENTITY), tol.gram, sing))

    e_plus = energy_expectation(params, t, +1, th)
    e_minus = energy_expectation(params, t, -1, th)
    formula = (-0.5 * (params.omega + frame.chi), -0.5 * (params.omega - frame.chi))
    phi = phi_solutions(params, t, th)
    h = hamiltonian_h(params.omega, frame.chi)
    herm = [
        np.einsum("...i,...ij,...j->...", np.conj(p), h, p) for p in phi
    ]
    imag = np.maximum(np.abs(e_plus.imag), np.abs(e_minus.imag))
    agree_formula = np.maximum(np.abs(e_plus - formula[0]), np.abs(e_minus - formula[1]))
    agree_herm = np.maximum(np.abs(e_plus - herm[0]), np.abs(e_minus - herm[1]))
    checks.append(_result("energy_imaginary_part", imag, tol.energy_imag, sing))
    checks.append(_result("energy_vs_formula", agree_formula, tol.energy_agreement, sing))
    checks.append(_result("energy_vs_hermitian", agree_herm, tol.energy_agreement, sing))
    checks.append(_result("energy_sum", np.abs(e_plus + e_minus + params.omega), tol.energy_sum, sing))

    det_res = np.abs(frame.det_eta - 2 * frame.half_det)
    checks.append(_result("det_identity", det_res, tol.det_identity, sing))

    eo = energy_operator(params, t)
    checks.append(_result("energy_operator_closed_form", eo.mismatch, tol.energy_operator, sing))
    gen = energy_operator_from_generator(params, t, vs.derivative_step)
    checks.append(_result("energy_operator_generator", max_entry_norm(gen - eo.h_tilde), tol.energy_generator, stencil_sing))

    op, degenerate = pt_tilde(params, t)
    pt_mask = sing | degenerate
    checks.append(_result("pt_involution", max_entry_norm(op.square() - IDENTITY), tol.pt_involution, pt_mask))
    checks.append(_result("pt_commutation", op.commutator_residual(eo.h_tilde), tol.pt_commutation, pt_mask))
    plus, minus, _ = h_tilde_eigenvectors(params, t, precise=True)
    eig_res = np.maximum(eigenphase(op, plus)[1], eigenphase(op, minus)[1])
    checks.append(_result("pt_eigenstates", eig_res, tol.eigenstate, pt_mask))

    errors = rk4_state_errors(params, t0, t1, vs.rk4_step, backend=backend)
    blowup = errors.pop("blowup")
    for name, err in errors.items():
        checks.append(_result(f"rk4_oracle_{name[:-1]}{'plus' if name[-1] == '+' else 'minus'}", err, tol.rk4_oracle))

    info["singular_samples"] = int(sing.sum())
    info["H_defective_samples"] = int(eig2(hamiltonian_H(params, t)).defective.sum())
    info["rk4_blowup_time"] = blowup
    info["rk4_backend"] = kernels.BACKEND if backend is None else getattr(backend, "__module__", "custom")
    info["theta_closed_form_discrepancy"] = theta_discrepancy(params, t)
    dp, dm = omega_tilde_discrepancy(params, t)
    info["printed_eigenphase_discrepancy_mod_pi"] = {"plus": float(dp.max()), "minus": float(dm.max())}
    return VerifyReport(config_hash(cfg), params.regime.value, params.is_valid(), checks, info)
