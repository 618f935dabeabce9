import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ptdyson.algebra2 import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    AntilinearOp,
    PauliCoeffs,
    antilinear_commutes,
    commutator,
    dagger,
    det2,
    eig2,
    inv2,
    is_hermitian,
    max_entry_norm,
    pauli_compose,
    pauli_decompose,
    phase_fix,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
matrices = arrays(complex, (2, 2), elements=cplx)
vectors = arrays(complex, (2,), elements=cplx)


def test_pauli_algebra():
    assert np.allclose(SIGMA_X @ SIGMA_Y, 1j * SIGMA_Z)
    for s in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        assert np.allclose(s @ s, IDENTITY)


@given(cplx, cplx, cplx, cplx)
def test_pauli_round_trip(a0, ax, ay, az):
    m = pauli_compose(PauliCoeffs(a0, ax, ay, az))
    c = pauli_decompose(m)
    assert np.allclose([c.a0, c.ax, c.ay, c.az], [a0, ax, ay, az], rtol=0, atol=1e-14)
    assert max_entry_norm(pauli_compose(c) - m) < 1e-14


def test_pauli_batch_shapes():
    m = pauli_compose(PauliCoeffs(np.arange(3), 1.0, 0.0, 0.0))
    assert m.shape == (3, 2, 2)


def test_eig2_sigma_z():
    e = eig2(SIGMA_Z)
    assert np.allclose(sorted(e.values.real), [-1, 1])
    assert not e.defective


@given(matrices)
@settings(max_examples=200)
def test_eig2_reconstruction(a):
    e = eig2(a)
    if e.defective:
        return
    v = e.vectors
    if abs(det2(v)) < 1e-6:
        return
    rebuilt = v @ np.diag(e.values) @ inv2(v)
    assert max_entry_norm(rebuilt - a) < 1e-9 * max(1.0, max_entry_norm(a))


@given(matrices)
def test_eig2_eigen_equation(a):
    e = eig2(a)
    if e.defective:
        return
    for k in range(2):
        r = a @ e.vectors[:, k] - e.values[k] * e.vectors[:, k]
        assert np.linalg.norm(r) < 1e-10 * max(1.0, max_entry_norm(a))
        assert np.linalg.norm(e.vectors[:, k]) == pytest.approx(1.0)


@given(matrices)
def test_real_eigenvalues_for_hermitian(a):
    h = (a + dagger(a)) / 2
    assert is_hermitian(h)
    e = eig2(h)
    assert np.all(np.abs(e.values.imag) < 1e-12 * max(1.0, max_entry_norm(h)))


def test_eig2_defective_jordan_block():
    e = eig2(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert e.defective
    assert np.allclose(e.vectors[:, 0], e.vectors[:, 1])


def test_eig2_scalar_not_defective():
    e = eig2(3.0 * IDENTITY)
    assert not e.defective
    assert abs(det2(e.vectors)) == pytest.approx(1.0)


def test_eig2_exceptional_point_of_model():
    kappa = 0.7
    H = -0.5 * (1.0 * IDENTITY + kappa * SIGMA_Z + 1j * kappa * SIGMA_X)
    e = eig2(H)
    assert e.defective
    v = e.vectors[:, 0]
    expected = np.array([-1j * kappa, kappa])
    assert abs(np.vdot(expected, v)) / np.linalg.norm(expected) == pytest.approx(1.0, abs=1e-12)


def test_eig2_batch():
    a = np.stack([SIGMA_Z, SIGMA_X, np.array([[0, 1], [0, 0]], dtype=complex)])
    e = eig2(a)
    assert e.values.shape == (3, 2)
    assert e.defective.tolist() == [False, False, True]


def test_phase_fix_makes_lead_real_positive():
    v = phase_fix(np.array([1j, 2.0]))
    assert v[0].real > 0 and abs(v[0].imag) < 1e-15
    assert np.allclose(v, np.array([1, -2j]) / np.sqrt(5))


def test_inv_and_det():
    a = np.array([[2, 1j], [0.5, 3]], dtype=complex)
    assert np.allclose(inv2(a) @ a, IDENTITY)
    assert det2(a) == pytest.approx(np.linalg.det(a))


def test_commutator():
    assert np.allclose(commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)


def test_antilinear_conjugation_only():
    tau = AntilinearOp(IDENTITY)
    assert np.allclose(tau.apply([1j, 2]), [-1j, 2])
    assert np.allclose(tau.square(), IDENTITY)


def test_antilinear_sigma_z_tau_commutes_with_model_H():
    pt = AntilinearOp(SIGMA_Z)
    for alpha in (0.3, 2.0):
        H = -0.5 * (IDENTITY + alpha * 0.8 * SIGMA_Z + 1j * 0.8 * SIGMA_X)
        assert antilinear_commutes(pt, H, 1e-12)
    assert not antilinear_commutes(pt, 1j * SIGMA_Z, 1e-3)


@given(matrices, vectors, vectors, cplx)
def test_antilinearity(m, v, w, c):
    op = AntilinearOp(m)
    lhs = op.apply(c * v + w)
    rhs = np.conj(c) * op.apply(v) + op.apply(w)
    scale = max(1.0, max_entry_norm(m)) * max(1.0, abs(c)) * max(1.0, np.abs(v).max(), np.abs(w).max())
    assert np.linalg.norm(lhs - rhs) < 1e-12 * scale


def test_clongdouble_preserved():
    op = AntilinearOp(IDENTITY.astype(np.clongdouble))
    assert op.apply(np.array([1j, 1], dtype=np.clongdouble)).dtype == np.clongdouble


def test_eig2_tiny_split_is_diagonalizable():
    a = np.diag([0.0, 1.1920929e-07j])
    e = eig2(a)
    assert not e.defective
    assert np.allclose(sorted(e.values, key=abs), [0.0, 1.1920929e-07j], atol=1e-20)
