"""Dense complex linear algebra for 2-, 4- and 8-dimensional qubit spaces.

Basis convention: the flat index of a three-qubit basis state |n m l> is
4n + 2m + l, with the ancilla A the most-significant qubit and |1> the
sigma_z = +1 eigenstate.  All matrices are plain complex numpy arrays.
"""

from __future__ import annotations

import numpy as np

MAX_DIM = 8

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-10

# Pauli matrices in the (|0>, |1>) ordering with Z|1> = +|1>.
ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)


class InvalidStateError(ValueError):
    """A matrix violates a density-matrix or Hermiticity invariant."""


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor as most-significant subsystem."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[-1] * b.shape[-1] > MAX_DIM:
        raise InvalidStateError(
            f"kron result dimension {a.shape[-1] * b.shape[-1]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return bool(np.max(np.abs(m - dag(m))) < tol)


def partial_trace_ancilla(rho: np.ndarray) -> np.ndarray:
    """Trace out the most-significant qubit (the ancilla) of an 8x8 state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (8, 8):
        raise InvalidStateError(f"expected an 8x8 state, got {rho.shape}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidStateError(f"input trace {tr} deviates from 1 beyond {TRACE_TOL}")
    r = rho.reshape(2, 4, 2, 4)
    return np.einsum("iaib->ab", r)


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    Returns (eigenvalues, eigenvectors) with eigenvectors as columns aligned
    with the eigenvalue order.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise InvalidStateError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def validate_density(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Check and repair a density matrix.

    Symmetrizes via (rho + rho^dag)/2 and renormalizes the trace; rejects if
    the pre-repair Hermiticity/trace deviations or any negative eigenvalue
    exceed the tolerances.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"not a square matrix: {rho.shape}")
    if rho.shape[0] not in (4, 8):
        raise InvalidStateError(f"unsupported density-matrix dimension {rho.shape[0]}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("non-finite entries")
    herm_dev = np.max(np.abs(rho - dag(rho)))
    if herm_dev > max(tol, HERMITICITY_TOL):
        raise InvalidStateError(f"Hermiticity deviation {herm_dev:.3e} exceeds tolerance")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > max(tol, TRACE_TOL):
        raise InvalidStateError(f"trace deviation {abs(tr - 1.0):.3e} exceeds tolerance")
    repaired = (rho + dag(rho)) / (2.0 * tr)
    min_eig = float(np.min(np.linalg.eigvalsh(repaired)))
    if min_eig < -max(tol, PSD_TOL):
        raise InvalidStateError(f"negative eigenvalue {min_eig:.3e} violates positivity")
    return repaired


def purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)
