"""Complex 2x2 matrix algebra for two-level operators.

Matrices are plain ``numpy`` arrays of shape ``(..., 2, 2)`` with complex
dtype; every routine broadcasts over leading batch axes so a whole time grid
of operators can be handled in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
DEFECT_TOL = 1e-10
PHASE_FIX_TOL = 1e-12

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class PauliCoeffs:
    """Coefficients of ``a0*I + ax*sx + ay*sy + az*sz`` (scalars or arrays)."""

    a0: complex | np.ndarray = 0.0
    ax: complex | np.ndarray = 0.0
    ay: complex | np.ndarray = 0.0
    az: complex | np.ndarray = 0.0


def as_mat(a) -> np.ndarray:
    """View ``a`` as a (batch of) complex 2x2 matrices; complex inputs keep
    their precision (extended precision is used by the symmetry checks)."""
    a = np.asarray(a)
    if not np.iscomplexobj(a):
        a = a.astype(complex)
    if a.shape[-2:] != (2, 2):
        raise ValueError(f"expected trailing shape (2, 2), got {a.shape}")
    return a


def pauli_compose(c: PauliCoeffs) -> np.ndarray:
    a0, ax, ay, az = np.broadcast_arrays(
        *(np.asarray(x, dtype=complex) for x in (c.a0, c.ax, c.ay, c.az))
    )
    out = np.empty(a0.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a0 + az
    out[..., 0, 1] = ax - 1j * ay
    out[..., 1, 0] = ax + 1j * ay
    out[..., 1, 1] = a0 - az
    return out


def pauli_decompose(a) -> PauliCoeffs:
    a = as_mat(a)
    return PauliCoeffs(
        a0=(a[..., 0, 0] + a[..., 1, 1]) / 2,
        ax=(a[..., 0, 1] + a[..., 1, 0]) / 2,
        ay=1j * (a[..., 0, 1] - a[..., 1, 0]) / 2,
        az=(a[..., 0, 0] - a[..., 1, 1]) / 2,
    )


def dagger(a) -> np.ndarray:
    return np.conj(np.swapaxes(as_mat(a), -1, -2))


def max_entry_norm(a) -> np.ndarray:
    """Largest entry modulus over the last two axes."""
    return np.abs(np.asarray(a)).max(axis=(-2, -1))


def is_hermitian(a, tol: float = HERMITIAN_TOL):
    return max_entry_norm(as_mat(a) - dagger(a)) < tol


def commutator(a, b) -> np.ndarray:
    a, b = as_mat(a), as_mat(b)
    return a @ b - b @ a


def det2(a) -> np.ndarray:
    a = as_mat(a)
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def inv2(a) -> np.ndarray:
    """Closed-form inverse; no singularity check (callers flag det ~ 0)."""
    a = as_mat(a)
    d = det2(a)
    out = np.empty_like(a)
    out[..., 0, 0] = a[..., 1, 1]
    out[..., 0, 1] = -a[..., 0, 1]
    out[..., 1, 0] = -a[..., 1, 0]
    out[..., 1, 1] = a[..., 0, 0]
    return out / d[..., None, None]


def matvec(a, v) -> np.ndarray:
    v = np.asarray(v)
    return np.einsum("...ij,...j->...i", as_mat(a), v if np.iscomplexobj(v) else v.astype(complex))


def phase_fix(v, tol: float = PHASE_FIX_TOL) -> np.ndarray:
    """Normalise ``v`` and rotate its first non-negligible component onto the
    positive real axis. Zero vectors are returned unchanged."""
    v = np.asarray(v)
    v = v if np.iscomplexobj(v) else v.astype(complex)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(norm > 0, norm, 1.0)
    u = v / safe
    lead = np.where(np.abs(u[..., 0]) > tol, u[..., 0], u[..., 1])
    rot = np.where(np.abs(lead) > 0, np.conj(lead) / np.where(lead != 0, np.abs(lead), 1.0), 1.0)
    return u * rot[..., None]


@dataclass(frozen=True)
class EigPair:
    """Eigen-decomposition of a 2x2 matrix.

    ``vectors[..., :, k]`` belongs to ``values[..., k]``. For a defective
    matrix both columns hold the single eigenvector.
    """

    values: np.ndarray
    vectors: np.ndarray
    defective: np.ndarray


def _eigvec(a, lam):
    # null vector of a - lam*I from whichever row is better conditioned
    va = np.stack([a[..., 0, 1], lam - a[..., 0, 0]], axis=-1)
    vb = np.stack([lam - a[..., 1, 1], a[..., 1, 0]], axis=-1)
    na = np.linalg.norm(va, axis=-1)
    nb = np.linalg.norm(vb, axis=-1)
    return np.where((na >= nb)[..., None], va, vb), np.maximum(na, nb)


def eig2(a, tol: float = DEFECT_TOL) -> EigPair:
    """Closed-form eigen-decomposition of (a batch of) 2x2 matrices.

    Rounding splits the eigenvalues of an exceptional point by about the
    square root of machine precision, so both defect criteria (eigenvalue
    gap and eigenvector collinearity) are applied to squared quantities
    against ``tol``.
    """
    a = as_mat(a)
    scale = np.maximum(1.0, max_entry_norm(a))
    half_tr = (a[..., 0, 0] + a[..., 1, 1]) / 2
    disc = (a[..., 0, 0] - a[..., 1, 1]) ** 2 + 4 * a[..., 0, 1] * a[..., 1, 0]
    nil = a - half_tr[..., None, None] * IDENTITY
    # a == lam*I: every vector is an eigenvector
    scalar = max_entry_norm(nil) <= tol * scale
    root = np.where(scalar, 0.0, np.sqrt(disc))
    values = np.stack([half_tr + root / 2, half_tr - root / 2], axis=-1)

    v1, n1 = _eigvec(a, values[..., 0])
    v2, n2 = _eigvec(a, values[..., 1])
    e1 = np.broadcast_to(np.array([1, 0], dtype=complex), v1.shape)
    e2 = np.broadcast_to(np.array([0, 1], dtype=complex), v2.shape)
    v1 = phase_fix(np.where((scalar | (n1 <= tol * scale))[..., None], e1, v1))
    v2 = phase_fix(np.where((scalar | (n2 <= tol * scale))[..., None], e2, v2))
    collinear = np.abs(v1[..., 0] * v2[..., 1] - v1[..., 1] * v2[..., 0]) ** 2 <= tol
    defective = ~scalar & (np.abs(disc) <= tol * scale**2) & collinear
    values = np.where(defective[..., None], half_tr[..., None], values)
    v2 = np.where(defective[..., None], v1, v2)
    return EigPair(values=values, vectors=np.stack([v1, v2], axis=-1), defective=defective)


@dataclass(frozen=True)
class AntilinearOp:
    """Operator ``m @ conj(.)``, i.e. a matrix followed by complex conjugation."""

    m: np.ndarray
    conjugates: bool = True

    def __post_init__(self):
        object.__setattr__(self, "m", as_mat(self.m))

    def apply(self, v) -> np.ndarray:
        return antilinear_apply(self, v)

    def square(self) -> np.ndarray:
        """The linear operator ``op @ op = m @ conj(m)``."""
        return self.m @ np.conj(self.m)

    def commutator_residual(self, a) -> np.ndarray:
        return max_entry_norm(self.m @ np.conj(as_mat(a)) - as_mat(a) @ self.m)


def antilinear_apply(op: AntilinearOp, v) -> np.ndarray:
    v = np.asarray(v)
    return matvec(op.m, np.conj(v) if op.conjugates else v)


def antilinear_commutes(op: AntilinearOp, a, tol: float):
    """``op`` commutes with ``a`` iff ``m conj(a) = a m``."""
    return op.commutator_residual(a) < tol
