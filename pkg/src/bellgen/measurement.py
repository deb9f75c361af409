"""Projective ancilla measurements: nonselective map, Born-rule update,
and readout-sequence probabilities.

Random draws are always supplied by the caller, so every function here is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .dynamics import PropagatorConfig, step_unitary
from .model import ControlState, ModelParams, projector

IMPOSSIBLE_BRANCH_TOL = 1e-12

_PI0 = projector(0)
_PI1 = projector(1)


@dataclass(frozen=True)
class MeasurementRecord:
    index: int
    time: float
    outcome: int
    probability: float


def outcome_probabilities(rho: np.ndarray) -> tuple[float, float]:
    """Born probabilities (p0, p1) of the two ancilla readouts."""
    # Pi_i is diagonal: p_i is the ancilla-sector population.
    diag = np.diag(rho).real
    p0 = float(np.sum(diag[:4]))
    p1 = float(np.sum(diag[4:]))
    return p0, p1


def measure_nonselective(rho: np.ndarray) -> np.ndarray:
    """Pi_0 rho Pi_0 + Pi_1 rho Pi_1: zeroes the ancilla-sector coherences."""
    out = rho.copy()
    out[:4, 4:] = 0.0
    out[4:, :4] = 0.0
    return out


def project_outcome(rho: np.ndarray, outcome: int) -> tuple[np.ndarray, float]:
    """Post-measurement state and probability for a forced outcome."""
    p0, p1 = outcome_probabilities(rho)
    p = p0 if outcome == 0 else p1
    if p < IMPOSSIBLE_BRANCH_TOL:
        raise qcore.InvalidStateError(
            f"outcome {outcome} has probability {p:.3e}: impossible branch selected"
        )
    pi = _PI0 if outcome == 0 else _PI1
    return (pi @ rho @ pi) / p, p


def measure_selective(rho: np.ndarray, draw: float) -> tuple[int, np.ndarray, float]:
    """Sample a readout with the supplied uniform draw and collapse the state."""
    if not 0.0 <= draw < 1.0:
        raise ValueError("draw must lie in [0, 1)")
    p0, _ = outcome_probabilities(rho)
    outcome = 0 if draw < p0 else 1
    post, p = project_outcome(rho, outcome)
    return outcome, qcore.validate_density(post), p


def sequence_probability(
    readouts: list[int],
    tau: float,
    rho0: np.ndarray,
    params: ModelParams = ModelParams(),
) -> float:
    """Probability of a specific readout sequence (no-feedback regime).

    Evaluated as the single trace
    Tr[Pi_{i_N} U_N ... Pi_{i_1} U_1 rho_0 U_1^dag Pi_{i_1} ... U_N^dag Pi_{i_N}].
    """
    control = ControlState(u_j=1.0)
    u = step_unitary(0.0, tau, params, control)
    m = np.asarray(rho0, dtype=complex)
    for i in readouts:
        pi = _PI0 if i == 0 else _PI1
        m = pi @ u @ m @ u.conj().T @ pi
    return float(np.trace(m).real)


def sequence_probability_chained(
    readouts: list[int],
    tau: float,
    rho0: np.ndarray,
    params: ModelParams = ModelParams(),
) -> float:
    """Same probability as the product of step-wise Born conditionals.

    Numerically stabler for long sequences of near-1 conditionals; cross-checked
    against the single-trace form in the tests.
    """
    control = ControlState(u_j=1.0)
    u = step_unitary(0.0, tau, params, control)
    rho = np.asarray(rho0, dtype=complex)
    prob = 1.0
    for i in readouts:
        rho = u @ rho @ u.conj().T
        rho, p = project_outcome(rho, i)
        prob *= p
    return prob
