"""Dense complex linear algebra for small quantum systems.

Everything here works on plain numpy arrays. Matrices are dense
complex128; the largest dimension used anywhere in the package is a few
dozen, so no sparse or structured storage is provided.
"""

import numpy as np

HERMITIAN_ATOL = 1e-10

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a dense complex matrix, rejecting non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def _square_pair(a, b):
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape[0] != ma.shape[1] or mb.shape[0] != mb.shape[1]:
        raise ValueError("operands must be square")
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return ma, mb


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def commutator(a, b) -> np.ndarray:
    """[a, b] = ab - ba for square matrices of equal dimension."""
    ma, mb = _square_pair(a, b)
    return ma @ mb - mb @ ma


def anticommutator(a, b) -> np.ndarray:
    """{a, b} = ab + ba for square matrices of equal dimension."""
    ma, mb = _square_pair(a, b)
    return ma @ mb + mb @ ma


def rotation_x(angle: float) -> np.ndarray:
    """Single-qubit rotation exp(-i*angle*X/2) in the half-angle convention."""
    if not np.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return np.array([[c, -1.0j * s], [-1.0j * s, c]], dtype=complex)


def rotation_y(angle: float) -> np.ndarray:
    """Single-qubit rotation exp(-i*angle*Y/2) in the half-angle convention."""
    if not np.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def is_hermitian(a, atol: float = HERMITIAN_ATOL) -> bool:
    m = as_matrix(a)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= atol


def min_eigenvalue(a) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    Uses a full symmetric eigensolve, which is exact to close to machine
    precision at the dimensions this package deals with (<= 64).
    """
    m = as_matrix(a)
    if not is_hermitian(m):
        raise ValueError("min_eigenvalue requires a Hermitian matrix")
    return float(np.linalg.eigvalsh(m)[0])
