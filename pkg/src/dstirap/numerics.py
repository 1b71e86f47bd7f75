"""Dense complex linear algebra helpers shared by the simulator.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; every Hilbert
space in this package is at most 162-dimensional so dense storage is used
throughout.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_matrix",
    "kron",
    "dagger",
    "trace",
    "frobenius_inner",
    "matmul",
    "kernel_basis",
    "commutator",
]


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(*mats) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not mats:
        raise ValueError("kron needs at least one matrix")
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = np.kron(out, as_matrix(m))
    return out


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=complex)).T


def trace(a) -> complex:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"trace of non-square matrix {m.shape}")
    return complex(np.trace(m))


def frobenius_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def matmul(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def kernel_basis(h, tol: float = 1e-9) -> list[np.ndarray]:
    """Orthonormal basis of the (near-)null space of a Hermitian matrix.

    Eigenvectors whose eigenvalue magnitude is below ``tol * ||h||_2`` are
    returned. An all-zero matrix has the whole space as kernel.
    """
    m = as_matrix(h)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"kernel_basis needs a square matrix, got {m.shape}")
    scale = np.linalg.norm(m, 2)
    if np.linalg.norm(m - m.conj().T, 2) > tol * max(scale, 1.0):
        raise ValueError("kernel_basis needs a Hermitian matrix")
    herm = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(herm)
    if scale == 0.0:
        return [v[:, k] for k in range(len(w))]
    keep = np.abs(w) < tol * scale
    return [v[:, k] for k in np.flatnonzero(keep)]
