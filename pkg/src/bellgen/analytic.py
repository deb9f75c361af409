"""Closed-form results used as independent oracles.

Between measurements (no control field) the dynamics started from |111> is
confined to span{|1_A Phi->, |1_A Phi+>, |0_A Psi+>}: |1_A Phi-> is a
zero-energy eigenstate and the only coupled pair is |1_A Phi+> <-> |0_A Psi+>
with matrix element 2 J_x.  Everything in this module is built from the
resulting 2x2 Rabi algebra with a = cos(2 tau) and b = -i sin(2 tau); it never
calls the generic propagator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import metrics
from .measurement import measure_nonselective
from .model import BellLabel, ancilla_bell_state
from .qcore import SIGMA_X, kron, validate_density


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class RabiCoefficients:
    a: complex
    b: complex
    tau: float

    def __post_init__(self):
        if abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0) > 1e-12:
            raise ValueError("|a|^2 + |b|^2 must equal 1")


def ab_coefficients(tau: float) -> RabiCoefficients:
    """Single-interval amplitudes of the coupled two-state oscillation."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return RabiCoefficients(a=complex(math.cos(2.0 * tau)), b=-1j * math.sin(2.0 * tau), tau=tau)


def asymptotic_weights(initial: tuple[int, int, int]) -> list[tuple[int, BellLabel, float]]:
    """Weight table of the asymptotic state: (ancilla bit, Bell label, weight).

    Initial states with aligned target qubits (m == l) relax to the
    Phi-sector form; anti-aligned ones to the Psi-swapped form; the ancilla
    bit of the initial state fixes which ancilla sector carries the weight.
    """
    n, m, l = initial
    if any(bit not in (0, 1) for bit in (n, m, l)):
        raise ValueError("initial state must be a triple of bits")
    if m == l:
        return [
            (n, BellLabel.PHI_MINUS, 0.5),
            (n, BellLabel.PHI_PLUS, 0.25),
            (1 - n, BellLabel.PSI_PLUS, 0.25),
        ]
    return [
        (n, BellLabel.PSI_MINUS, 0.5),
        (n, BellLabel.PSI_PLUS, 0.25),
        (1 - n, BellLabel.PHI_PLUS, 0.25),
    ]


def asymptotic_state(initial: tuple[int, int, int]) -> np.ndarray:
    """Tabulated fixed point of the evolve-then-measure map, as an 8x8 state."""
    rho = np.zeros((8, 8), dtype=complex)
    for anc, label, weight in asymptotic_weights(initial):
        psi = ancilla_bell_state(anc, label)
        rho += weight * np.outer(psi, psi.conj())
    return rho


def asymptotic_state_numeric(
    rho0: np.ndarray,
    tau: float,
    tol: float = 1e-12,
    max_iter: int = 10_000,
) -> np.ndarray:
    """Fixed point of M = measure_nonselective o evolve(tau) by power iteration."""
    from .dynamics import step_unitary
    from .model import ControlState, ModelParams

    u = step_unitary(0.0, tau, ModelParams(), ControlState(u_j=1.0))
    rho = validate_density(np.asarray(rho0, dtype=complex))
    for _ in range(max_iter):
        nxt = measure_nonselective(u @ rho @ u.conj().T)
        residual = metrics.trace_distance(nxt, rho)
        rho = nxt
        if residual < tol:
            return validate_density(rho)
    raise ConvergenceError(
        f"fixed-point iteration did not reach {tol} in {max_iter} steps "
        f"(residual {residual:.3e})",
        residual,
    )


_FLIP_POSITIONS = {"A": 0, "B": 1, "C": 2}


def flip(obj: np.ndarray, qubit: str):
    """Conjugate a state or density matrix by sigma_x on the named qubit."""
    obj = np.asarray(obj, dtype=complex)
    dim = obj.shape[0]
    if dim == 8:
        pos = _FLIP_POSITIONS[qubit]
        ops = [np.eye(2, dtype=complex)] * 3
        ops[pos] = SIGMA_X
        f = kron(ops[0], kron(ops[1], ops[2]))
    elif dim == 4:
        if qubit == "A":
            raise ValueError("a 4-dimensional state has no ancilla qubit")
        pos = _FLIP_POSITIONS[qubit] - 1
        ops = [np.eye(2, dtype=complex)] * 2
        ops[pos] = SIGMA_X
        f = kron(ops[0], ops[1])
    else:
        raise ValueError(f"unsupported dimension {dim}")
    if obj.ndim == 1:
        return f @ obj
    return f @ obj @ f


def post_sequence_state(readouts: list[int], tau: float) -> tuple[np.ndarray, float]:
    """Closed-form post-measurement state and probability for a readout
    sequence starting from |111>, in the no-feedback regime.

    Tracks the three amplitudes (Phi- at ancilla 1, Phi+ at ancilla 1,
    Psi+ at ancilla 0) through the Rabi rotation and the projections:
    an all-1 prefix of length k leaves (|Phi-> + a^k |Phi+>)/N_k, a 0
    resets to |0_A Psi+>, after which the outcome repeats with conditional
    probability |a|^2 and flips with |b|^2.
    """
    if len(readouts) > 32:
        raise ValueError("sequence length capped at 32")
    coef = ab_coefficients(tau)
    a, b = coef.a, coef.b
    # amplitudes over (|1_A Phi->, |1_A Phi+>, |0_A Psi+>)
    c = np.array([1.0, 1.0, 0.0], dtype=complex) / math.sqrt(2.0)
    prob = 1.0
    for i in readouts:
        c = np.array([c[0], a * c[1] + b * c[2], a * c[2] + b * c[1]])
        if i == 1:
            c[2] = 0.0
        else:
            c[0] = 0.0
            c[1] = 0.0
        p = float(np.sum(np.abs(c) ** 2))
        if p <= 0.0:
            raise ValueError(f"sequence {readouts} has zero probability at tau={tau}")
        prob *= p
        c = c / math.sqrt(p)
    psi = (
        c[0] * ancilla_bell_state(1, BellLabel.PHI_MINUS)
        + c[1] * ancilla_bell_state(1, BellLabel.PHI_PLUS)
        + c[2] * ancilla_bell_state(0, BellLabel.PSI_PLUS)
    )
    return psi, prob


def allone_sequence_probability(n: int, tau: float) -> float:
    """Probability of n consecutive 1 readouts from |111>: (1 + a^{2n})/2."""
    if n < 1:
        raise ValueError("n must be positive")
    a = math.cos(2.0 * tau)
    return (1.0 + a ** (2 * n)) / 2.0
