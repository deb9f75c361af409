"""Deterministic simulator of Bell-state generation in two non-interacting
qubits via repeated projective measurements on a shared ancilla."""

from .model import BellLabel, FeedbackMode, ModelParams
from .protocol import RunConfig, run_ensemble, run_nonselective, run_trajectory, sweep_tau

__all__ = [
    "BellLabel",
    "FeedbackMode",
    "ModelParams",
    "RunConfig",
    "run_ensemble",
    "run_nonselective",
    "run_trajectory",
    "sweep_tau",
]
