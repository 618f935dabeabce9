import numpy as np
import pytest

from ptdyson.algebra2 import IDENTITY, dagger, inv2, max_entry_norm
from ptdyson.dyson import (
    determinant_identity,
    dyson_map,
    dyson_residual,
    energy_operator,
    energy_operator_from_generator,
    integrate_coupled,
    metric,
    metric_and_quasi_hermiticity,
)
from ptdyson.model import Constant, ModelParams

# frozen: DOP853 (rtol 1e-13) on the coupled equations from the t=0 frame
ETA_AT_10 = [33.98087854683676, 29.333921419275313, -16.96101095835524]


def test_closed_form_matches_ode_oracle(fig1a):
    f = dyson_map(fig1a, 10.0)
    assert np.allclose([f.eta1, f.eta2, f.eta3], ETA_AT_10, rtol=1e-10, atol=0)


def test_eta_is_hermitian_in_valid_regimes(valid_params):
    t = np.linspace(0, 60, 601)
    f = dyson_map(valid_params, t)
    assert f.max_imag.max() < 1e-12
    assert max_entry_norm(f.matrix - dagger(f.matrix)).max() < 1e-12


def test_stationary_frame():
    p = ModelParams(1.0, np.sqrt(2.0), profile=Constant(1.0), c1=0.0, c2=0.0)
    f = dyson_map(p, np.array([0.0, 3.0]))
    assert np.allclose(f.eta1, 1.0)
    assert np.allclose(f.eta2, 0.0)
    assert np.allclose(f.eta3, 1 - np.sqrt(2.0))
    assert np.allclose(f.det_eta, 2 * np.sqrt(2.0) - 2)


@pytest.mark.parametrize("name", ["fig1a", "fig1b", "alpha0", "exceptional", "broken"])
def test_det_identity(name, request, grid):
    p = request.getfixturevalue(name)
    f = dyson_map(p, grid)
    res = determinant_identity(f)
    assert res[~f.singular].max() < 1e-9
    assert abs(abs(f.half_det) - abs(f.delta)) < 1e-12


def test_exceptional_half_det_sign(exceptional):
    f = dyson_map(exceptional, 1.0)
    assert f.half_det == pytest.approx(1.0 - exceptional.A)
    assert f.delta == pytest.approx(exceptional.A - 1.0)


def test_dyson_residual(valid_params, grid):
    res, excluded = dyson_residual(valid_params, grid, 1e-4)
    assert res[~excluded].max() < 1e-6


def test_dyson_residual_negative_control(fig1a, grid):
    res, excluded = dyson_residual(fig1a, grid, 1e-4, eta2_offset=0.1)
    assert res[~excluded].max() > 1e-2


def test_metric_quasi_hermiticity(valid_params, grid):
    rho, res, excluded = metric_and_quasi_hermiticity(valid_params, grid, 1e-3)
    assert res[~excluded].max() < 1e-6
    assert max_entry_norm(rho - dagger(rho)).max() < 1e-9 * np.abs(rho).max()


def test_metric_positive(fig1a):
    rho = metric(fig1a, np.linspace(0, 60, 61))
    assert np.all(np.linalg.eigvalsh(rho) > 0)


def test_energy_operator(valid_params, grid):
    eo = energy_operator(valid_params, grid)
    f = dyson_map(valid_params, grid)
    keep = ~f.singular
    assert eo.mismatch[keep].max() < 1e-8
    # eta H~ eta^-1 = h
    eta = f.matrix
    h_back = eta @ eo.h_tilde @ inv2(eta)
    h = -0.5 * (valid_params.omega * IDENTITY + f.chi[:, None, None] * np.diag([1, -1]))
    assert max_entry_norm(h_back - h)[keep].max() < 1e-8


def test_energy_operator_generator(fig1a, grid):
    gen = energy_operator_from_generator(fig1a, grid, 1e-4)
    eo = energy_operator(fig1a, grid)
    assert max_entry_norm(gen - eo.h_tilde)[20:-20].max() < 1e-6


def test_coupled_ode_oracle(valid_params, backend):
    t, ys = integrate_coupled(valid_params, 0.0, 10.0, 1e-3, backend=backend)
    f = dyson_map(valid_params, t)
    closed = np.stack([f.eta1, f.eta2, f.eta3], axis=-1)
    assert np.abs(ys - closed).max() < 1e-6
