import numpy as np
import pytest
from scipy.integrate import quad

from ptdyson.model import (
    Constant,
    ModelParams,
    Regime,
    Sinusoidal,
    Tabulated,
    classify_regime,
    hamiltonian_H,
    hamiltonian_h,
    kappa_eval,
    lambda_coefficient,
    mu,
)
from ptdyson.quadrature import adaptive_simpson, integral_from


def test_classify_regime():
    assert classify_regime(0.0) is Regime.ALPHA_ZERO
    assert classify_regime(0.5) is Regime.GENERIC
    assert classify_regime(1.0) is Regime.EXCEPTIONAL
    assert classify_regime(2.0) is Regime.GENERIC


def test_params_reject_wrong_constants():
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, c1=4.0, c2=1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 0.5, A=2.0, B=1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, -0.1, c1=4.0, c2=1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 0.5, c1=4.0, c2=1.0, branch=0)


@pytest.mark.parametrize(
    "kwargs, valid",
    [
        (dict(alpha=0.5, c1=4.0, c2=1.0), True),
        (dict(alpha=0.99, c1=4.0, c2=1.0), False),
        (dict(alpha=2.0, c1=4.0, c2=1j), True),
        (dict(alpha=2.0, c1=4.0, c2=1.0), False),
        (dict(alpha=0.0, c1=1.2, c2=1.0), False),
        (dict(alpha=0.0, c1=1.5, c2=1.0), True),
        (dict(alpha=1.0, A=2.0, B=1.0), True),
        (dict(alpha=1.0, A=2.0, B=0.4), False),
    ],
)
def test_validity_predicate(kwargs, valid):
    assert ModelParams(omega=1.0, **kwargs).is_valid() is valid


def test_sinusoidal_integral_oracle():
    # quad of sin(s/5) over [0, 5 pi] is 10
    k = kappa_eval(Sinusoidal(1.0, 5.0), 5 * np.pi)
    assert k.integral == pytest.approx(10.0, abs=1e-12)


def test_sinusoidal_derivatives():
    k = kappa_eval(Sinusoidal(2.0, 5.0), 1.3)
    assert k.value == pytest.approx(2 * np.sin(0.26))
    assert k.d1 == pytest.approx(0.4 * np.cos(0.26))
    assert k.d2 == pytest.approx(-0.08 * np.sin(0.26))


def test_tabulated_matches_spline_antiderivative():
    ts = np.linspace(-1.0, 12.0, 60)
    prof = Tabulated(tuple(ts), tuple(np.sin(ts / 5)))
    k = kappa_eval(prof, np.array([3.0, 10.0]))
    ref = [quad(lambda s: kappa_eval(prof, s).value, 0.0, b, epsabs=1e-13)[0] for b in (3.0, 10.0)]
    assert np.allclose(k.integral, ref, atol=1e-11)
    assert np.allclose(k.value, np.sin(np.array([3.0, 10.0]) / 5), atol=1e-5)


def test_tabulated_requires_increasing_times():
    with pytest.raises(ValueError):
        Tabulated((0.0, 2.0, 1.0, 3.0), (0.0, 1.0, 2.0, 3.0))


def test_mu_scaling():
    p = ModelParams(1.0, 0.6, profile=Constant(2.0), c1=4.0, c2=1.0)
    assert mu(p, 3.0) == pytest.approx(0.8 * 6.0)
    q = ModelParams(1.0, 1.0, profile=Constant(2.0), A=2.0, B=1.0)
    assert mu(q, 3.0) == pytest.approx(6.0)
    r = ModelParams(1.0, 2.0, profile=Constant(1.0), c1=4.0, c2=1j)
    assert mu(r, 1.0) == pytest.approx(1j * np.sqrt(3))


def test_hamiltonians():
    p = ModelParams(1.0, 0.5, profile=Constant(2.0), c1=4.0, c2=1.0)
    H = hamiltonian_H(p, 0.0)
    assert np.allclose(H, -0.5 * np.array([[2.0, 2j], [2j, 0.0]]))
    h = hamiltonian_h(1.0, np.array([0.3, 0.4]))
    assert h.shape == (2, 2, 2)
    assert np.allclose(h[1], np.diag([-0.7, -0.3]))


@pytest.mark.parametrize("alpha, expected", [(0.0, -1.0), (1.0, 0.0)])
def test_lambda_constant_kappa(alpha, expected):
    kw = dict(A=2.0, B=1.0) if alpha == 1.0 else dict(c1=4.0, c2=1.0)
    p = ModelParams(1.0, alpha, profile=Constant(2.0), **kw)
    lam, singular = lambda_coefficient(p, np.array([0.5, 3.0]))
    assert np.allclose(lam, expected)
    assert not singular.any()


def test_lambda_matches_finite_differences():
    # frozen from second-order differences of sin(t/5) at t=2, h=1e-4
    p = ModelParams(1.0, 0.5, c1=4.0, c2=1.0)
    lam, _ = lambda_coefficient(p, 2.0)
    assert lam == pytest.approx(-0.21626205970479928, abs=1e-7)


def test_lambda_flags_zero_kappa():
    p = ModelParams(1.0, 0.5, c1=4.0, c2=1.0)
    lam, singular = lambda_coefficient(p, np.array([0.0, 1.0]))
    assert singular.tolist() == [True, False]
    assert np.isnan(lam[0])


def test_adaptive_simpson():
    assert adaptive_simpson(np.exp, 0.0, 1.0) == pytest.approx(np.e - 1, abs=1e-10)


def test_integral_from_additivity():
    f = lambda s: np.cos(s) * np.exp(-0.1 * s)  # noqa: E731
    a, b, c = integral_from(f, 0.0, np.array([2.0, 5.0, 5.0]))
    assert c == pytest.approx(b)
    ab = quad(f, 2.0, 5.0, epsabs=1e-13)[0]
    assert (b - a) == pytest.approx(ab, abs=1e-9)
