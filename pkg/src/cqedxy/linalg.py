"""Dense Hermitian linear algebra used throughout the package.

Matrices are plain numpy arrays. Energies are angular frequencies with
hbar = 1. All routines are deterministic wrappers around LAPACK (``eigh``).
"""

from typing import NamedTuple

import numpy as np

HERMITIAN_RTOL = 1e-12


class NotHermitianError(ValueError):
    """Raised when a matrix violates (anti-)Hermiticity beyond tolerance."""

    def __init__(self, message, violation):
        super().__init__(f"{message} (violation {violation:.3e})")
        self.violation = violation


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    return a


def hermiticity_violation(h):
    """Largest |H_ij - conj(H_ji)|."""
    h = _square(h)
    return float(np.max(np.abs(h - h.conj().T)))


def check_hermitian(h, rtol=HERMITIAN_RTOL):
    h = _square(h)
    scale = float(np.max(np.abs(h)))
    violation = hermiticity_violation(h)
    if violation > rtol * max(scale, 1e-300) and violation > 0.0:
        raise NotHermitianError("matrix is not Hermitian", violation)
    return h


def eig_hermitian(h):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    h = check_hermitian(h)
    # symmetrize so that round-off in the input never leaks into eigh
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return Spectrum(w, v)


def expm_antihermitian(m):
    """exp(M) for anti-Hermitian M, via the spectrum of the Hermitian iM.

    With iM = V diag(w) V^dagger we have exp(M) = V diag(exp(-i w)) V^dagger.
    """
    m = _square(np.asarray(m, dtype=complex), "generator")
    norm = np.linalg.norm(m)
    defect = np.linalg.norm(m + m.conj().T)
    if defect > HERMITIAN_RTOL * norm and defect > 0.0:
        raise NotHermitianError("generator is not anti-Hermitian", float(defect))
    if norm == 0.0:
        return np.eye(m.shape[0], dtype=complex)
    w, v = np.linalg.eigh(0.5j * (m - m.conj().T))
    return (v * np.exp(-1j * w)) @ v.conj().T


def similarity_transform(h, u):
    """U^dagger H U."""
    h = _square(h)
    u = _square(u, "unitary")
    if h.shape != u.shape:
        raise ValueError(f"dimension mismatch: H {h.shape} vs U {u.shape}")
    return u.conj().T @ h @ u


def unitarity_defect(u):
    u = _square(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def reconstruct(spectrum):
    v = spectrum.eigenvectors
    return (v * spectrum.eigenvalues) @ v.conj().T


def commutator(a, b):
    return a @ b - b @ a
