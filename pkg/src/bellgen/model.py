"""Hamiltonian, control functions, basis states and ancilla projectors.

Internal units: hbar = 1 and J_x = 1, so times are in hbar/J_x and energies
in J_x.  The Hamiltonian is

    H(t) = J_x u_J(t) sigma_x^A (sigma_x^B + sigma_x^C) - h_z u_h(t) sigma_z^A

with u_J, u_h in [0, 1].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qcore import ID2, SIGMA_X, SIGMA_Z, kron


class FeedbackMode(str, enum.Enum):
    NONE = "none"
    RAMP = "ramp"
    ZENO = "zeno"


class BellLabel(str, enum.Enum):
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"


@dataclass(frozen=True)
class ModelParams:
    j_x: float = 1.0
    h_z: float = 50.0

    def __post_init__(self):
        if self.j_x <= 0:
            raise ValueError("j_x must be positive")
        if self.h_z < 0:
            raise ValueError("h_z must be non-negative")


@dataclass(frozen=True)
class ControlState:
    """Immutable snapshot of the control functions at a point in the protocol.

    t_star is the instant of the first 0 readout (None until it happens);
    it always coincides with a measurement time.
    """

    u_j: float = 1.0
    feedback_mode: FeedbackMode = FeedbackMode.NONE
    t_star: float | None = None
    t_f: float = 10.0
    continuous_ramp: bool = False


def basis_state(n: int, m: int, l: int) -> np.ndarray:
    """Computational basis vector |n m l> at flat index 4n + 2m + l."""
    psi = np.zeros(8, dtype=complex)
    psi[4 * n + 2 * m + l] = 1.0
    return psi


def bell_state(label: BellLabel) -> np.ndarray:
    """Two-qubit Bell state over flat indices (00, 01, 10, 11)."""
    s = 1.0 / math.sqrt(2.0)
    if label is BellLabel.PHI_PLUS:
        return np.array([s, 0, 0, s], dtype=complex)
    if label is BellLabel.PHI_MINUS:
        return np.array([-s, 0, 0, s], dtype=complex)
    if label is BellLabel.PSI_PLUS:
        return np.array([0, s, s, 0], dtype=complex)
    return np.array([0, -s, s, 0], dtype=complex)


def ancilla_bell_state(n: int, label: BellLabel) -> np.ndarray:
    """|n_A> tensor |bell_BC> as an 8-component vector."""
    anc = np.zeros(2, dtype=complex)
    anc[n] = 1.0
    return np.kron(anc, bell_state(label))


def ramp_u_h(t: float, t_star: float, t_f: float, continuous: bool = False) -> float:
    """Smooth ramp of the ancilla field, triggered at t_star.

    The default form is 0 for t < t_star, {1 - cos[2 pi (t - t_star)/t_f]}/2
    up to (t_star + t_f)/2 and 1 afterwards.  For t_star > 0 this jumps at
    the branch point; the continuous variant stretches the rise over
    [t_star, t_f] (half of a period 2(t_f - t_star)) so it reaches 1 exactly
    at t_f.
    """
    if t_f <= 0:
        raise ValueError("t_f must be positive")
    if t_star < 0:
        raise ValueError("t_star must be non-negative")
    if t < t_star:
        return 0.0
    if continuous:
        if t >= t_f:
            return 1.0
        return (1.0 - math.cos(math.pi * (t - t_star) / (t_f - t_star))) / 2.0
    if t > (t_star + t_f) / 2.0:
        return 1.0
    return (1.0 - math.cos(2.0 * math.pi * (t - t_star) / t_f)) / 2.0


def u_h_value(t: float, control: ControlState) -> float:
    """Control field amplitude at time t for the given control snapshot."""
    if control.feedback_mode is not FeedbackMode.RAMP or control.t_star is None:
        return 0.0
    return ramp_u_h(t, control.t_star, control.t_f, control.continuous_ramp)


# Fixed operator pieces, built once.
_SX_A = kron(SIGMA_X, kron(SIGMA_X, ID2) + kron(ID2, SIGMA_X))
_SZ_A = kron(SIGMA_Z, np.eye(4, dtype=complex))


def hamiltonian(t: float, params: ModelParams, control: ControlState) -> np.ndarray:
    """Full 8x8 Hamiltonian at time t."""
    return (
        params.j_x * control.u_j * _SX_A
        - params.h_z * u_h_value(t, control) * _SZ_A
    )


def hamiltonian_at(u_j: float, u_h: float, params: ModelParams) -> np.ndarray:
    """Hamiltonian for explicitly given control values."""
    return params.j_x * u_j * _SX_A - params.h_z * u_h * _SZ_A


def projector(outcome: int) -> np.ndarray:
    """Ancilla projector Pi_i = |i_A><i_A| tensor 1_BC."""
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    p = np.zeros((2, 2), dtype=complex)
    p[outcome, outcome] = 1.0
    return kron(p, np.eye(4, dtype=complex))
