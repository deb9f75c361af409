"""Trace distance, Wootters concurrence and Uhlmann fidelity."""

from __future__ import annotations

import numpy as np

from . import qcore
from .qcore import SIGMA_Y, InvalidStateError

CLAMP_EXCURSION_TOL = 1e-9

_YY = np.kron(SIGMA_Y, SIGMA_Y)


def _clamp01(x: float) -> float:
    """Clamp to [0, 1], but only if the excursion is numerical noise."""
    if x < -CLAMP_EXCURSION_TOL or x > 1.0 + CLAMP_EXCURSION_TOL:
        raise InvalidStateError(f"metric value {x} outside [0, 1] beyond tolerance")
    return min(1.0, max(0.0, x))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """D = (1/2) sum |lambda_i| of the Hermitian difference rho - sigma."""
    if rho.shape != sigma.shape:
        raise InvalidStateError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    vals, _ = qcore.hermitian_eig(rho - sigma)
    return _clamp01(0.5 * float(np.sum(np.abs(vals))))


def concurrence(rho_bc: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state.

    C = max(0, l1 - l2 - l3 - l4) with l_i the descending square roots of the
    eigenvalues of rho (Y tensor Y) rho^* (Y tensor Y); this is the standard
    Wootters form (with the square roots).
    """
    if rho_bc.shape != (4, 4):
        raise InvalidStateError("concurrence requires a 4x4 density matrix")
    rho_tilde = _YY @ rho_bc.conj() @ _YY
    vals = np.linalg.eigvals(rho_bc @ rho_tilde)
    lam = np.sqrt(np.clip(vals.real, 0.0, None))
    lam = np.sort(lam)[::-1]
    return _clamp01(max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3])))


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho)
    if np.min(vals) < -qcore.PSD_TOL:
        raise InvalidStateError(f"eigenvalue {np.min(vals):.3e} too negative for sqrt")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Uhlmann fidelity F = Tr sqrt(sqrt(rho) target sqrt(rho))."""
    if rho.shape != target.shape:
        raise InvalidStateError(f"dimension mismatch: {rho.shape} vs {target.shape}")
    s = _psd_sqrt(rho)
    inner = s @ target @ s
    vals = np.linalg.eigvalsh((inner + inner.conj().T) / 2.0)
    return _clamp01(float(np.sum(np.sqrt(np.clip(vals, 0.0, None)))))


def fidelity_to_pure(rho: np.ndarray, psi: np.ndarray) -> float:
    """F against a pure target reduces to sqrt(<psi|rho|psi>)."""
    overlap = float((psi.conj() @ rho @ psi).real)
    return _clamp01(np.sqrt(max(overlap, 0.0)))
