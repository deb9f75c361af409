"""Unitary propagation of the full density matrix between measurements.

Propagators are exact exponentials obtained from Hermitian eigendecomposition.
While the feedback ramp is active the interval is split into substeps with the
Hamiltonian frozen at each substep midpoint (commutator error O(substep^3) per
substep).  Propagators are memoized: within a protocol run the same control
segments recur for every trajectory, so each distinct unitary is built once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import qcore
from .model import ControlState, FeedbackMode, ModelParams, hamiltonian_at, u_h_value

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class PropagatorConfig:
    substep: float = 1e-3
    piecewise_exact: bool = True

    def __post_init__(self):
        if self.substep <= 0:
            raise ValueError("substep must be positive")


def expm_hermitian(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i h dt) for Hermitian h via eigendecomposition."""
    if not np.all(np.isfinite(h)):
        raise qcore.InvalidStateError("non-finite Hamiltonian entries")
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * vals * dt)) @ vecs.conj().T


@lru_cache(maxsize=4096)
def _const_unitary(u_j: float, u_h: float, dt: float, j_x: float, h_z: float) -> np.ndarray:
    u = expm_hermitian(hamiltonian_at(u_j, u_h, ModelParams(j_x, h_z)), dt)
    u.setflags(write=False)
    return u


@lru_cache(maxsize=4096)
def _ramp_unitary(
    t0: float,
    t1: float,
    t_star: float,
    t_f: float,
    continuous: bool,
    u_j: float,
    j_x: float,
    h_z: float,
    substep: float,
) -> np.ndarray:
    """Composed midpoint-frozen substep propagator over a ramp-active interval."""
    control = ControlState(
        u_j=u_j, feedback_mode=FeedbackMode.RAMP, t_star=t_star, t_f=t_f,
        continuous_ramp=continuous,
    )
    nsub = max(1, math.ceil((t1 - t0) / substep - 1e-12))
    dt = (t1 - t0) / nsub
    # Fourth-order commutator-free scheme on the two Gauss nodes of each
    # substep: U_k = exp(-i dt (c- H1 + c+ H2)) exp(-i dt (c+ H1 + c- H2)).
    root3 = math.sqrt(3.0)
    nodes_lo = t0 + (np.arange(nsub) + 0.5 - root3 / 6.0) * dt
    nodes_hi = t0 + (np.arange(nsub) + 0.5 + root3 / 6.0) * dt
    u_lo = np.array([u_h_value(t, control) for t in nodes_lo])
    u_hi = np.array([u_h_value(t, control) for t in nodes_hi])
    c_minus = (3.0 - 2.0 * root3) / 12.0
    c_plus = (3.0 + 2.0 * root3) / 12.0

    from .model import _SX_A, _SZ_A  # fixed operator pieces

    def _stack_exp(weights: np.ndarray) -> np.ndarray:
        h = (j_x * u_j / 2.0) * _SX_A[None, :, :] - (h_z * weights)[:, None, None] * _SZ_A[None, :, :]
        vals, vecs = np.linalg.eigh(h)
        return np.einsum("nij,nj,nkj->nik", vecs, np.exp(-1j * vals * dt), vecs.conj())

    first = _stack_exp(c_plus * u_lo + c_minus * u_hi)
    second = _stack_exp(c_minus * u_lo + c_plus * u_hi)
    u = np.eye(8, dtype=complex)
    for k in range(nsub):
        u = second[k] @ first[k] @ u
    u.setflags(write=False)
    return u


def _ramp_is_constant(t0: float, t1: float, control: ControlState) -> float | None:
    """Return the constant u_h value on [t0, t1] if there is one, else None."""
    if control.feedback_mode is not FeedbackMode.RAMP or control.t_star is None:
        return 0.0
    if t1 <= control.t_star:
        return 0.0
    end = control.t_f if control.continuous_ramp else (control.t_star + control.t_f) / 2.0
    if t0 >= end:
        return 1.0
    return None


def step_unitary(
    t0: float,
    t1: float,
    params: ModelParams,
    control: ControlState,
    cfg: PropagatorConfig = PropagatorConfig(),
) -> np.ndarray:
    """Time-evolution operator U(t1, t0) for the given control snapshot."""
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    if t1 == t0:
        return np.eye(8, dtype=complex)
    dt = t1 - t0
    u_h = _ramp_is_constant(t0, t1, control)
    if u_h is not None:
        u = _const_unitary(control.u_j, round(u_h, 14), round(dt, 14), params.j_x, params.h_z)
    else:
        u = _ramp_unitary(
            round(t0, 12), round(t1, 12), round(control.t_star, 12), control.t_f,
            control.continuous_ramp, control.u_j, params.j_x, params.h_z, cfg.substep,
        )
    dev = np.max(np.abs(u.conj().T @ u - np.eye(8)))
    if dev > UNITARITY_TOL:
        raise qcore.InvalidStateError(f"propagator unitarity deviation {dev:.3e}")
    return u


def evolve_density(
    rho: np.ndarray,
    t0: float,
    t1: float,
    params: ModelParams,
    control: ControlState,
    cfg: PropagatorConfig = PropagatorConfig(),
) -> np.ndarray:
    """rho(t1) = U rho(t0) U^dag, re-validated."""
    u = step_unitary(t0, t1, params, control, cfg)
    return qcore.validate_density(u @ rho @ u.conj().T)
