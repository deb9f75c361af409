"""Protocol orchestration: measurement schedules, feedback triggering,
trajectory ensembles, and the inter-measurement-time sweep.

All randomness enters through per-trajectory seeds derived from a master seed
with a splitmix64-style avalanche mix, so every result is reproducible
bit-for-bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics
from .analytic import asymptotic_state
from .dynamics import PropagatorConfig, step_unitary
from .measurement import MeasurementRecord, measure_nonselective, measure_selective
from .model import (
    BellLabel,
    ControlState,
    FeedbackMode,
    ModelParams,
    basis_state,
    bell_state,
)
from .qcore import partial_trace_ancilla, validate_density

_TIME_EPS = 1e-9

_LABEL_ORDER = (
    BellLabel.PHI_PLUS,
    BellLabel.PHI_MINUS,
    BellLabel.PSI_PLUS,
    BellLabel.PSI_MINUS,
)
_BELL_VECTORS = {label: bell_state(label) for label in _LABEL_ORDER}

_MASK64 = (1 << 64) - 1


def mix_seed(master_seed: int, k: int) -> int:
    """splitmix64 avalanche mix of (master seed, trajectory index)."""
    z = (master_seed + (k + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


@dataclass(frozen=True)
class RunConfig:
    tau: float = 0.5
    t_f: float = 10.0
    h_z: float = 50.0
    initial: tuple[int, int, int] = (1, 1, 1)
    feedback_mode: FeedbackMode = FeedbackMode.RAMP
    master_seed: int = 20260824
    n_traj: int = 2000
    substep: float = 1e-3
    post_t_f_extension: float = 2.0
    zeno_tau: float = 0.02
    threshold_d: float = 0.05
    continuous_ramp: bool = False

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.t_f <= 0:
            raise ValueError("t_f must be positive")
        n = self.t_f / self.tau
        if abs(n - round(n)) > 1e-9:
            raise ValueError("t_f must be an integer multiple of tau")
        if self.substep <= 0 or self.substep > self.tau:
            raise ValueError("substep must lie in (0, tau]")
        if self.n_traj < 1:
            raise ValueError("n_traj must be at least 1")
        if any(bit not in (0, 1) for bit in self.initial):
            raise ValueError("initial state must be a triple of bits")
        if self.h_z < 0:
            raise ValueError("h_z must be non-negative")
        if not 0 < self.threshold_d < 1:
            raise ValueError("threshold_d must lie in (0, 1)")
        if self.zeno_tau <= 0:
            raise ValueError("zeno_tau must be positive")

    @property
    def n_measurements(self) -> int:
        return round(self.t_f / self.tau)

    def params(self) -> ModelParams:
        return ModelParams(j_x=1.0, h_z=self.h_z)

    def propagator(self) -> PropagatorConfig:
        return PropagatorConfig(substep=self.substep)


@dataclass
class NonselectiveSeries:
    tau: float
    times: np.ndarray
    states: list[np.ndarray]
    distances: np.ndarray

    def first_passage(self, threshold: float) -> float | None:
        for t, d in zip(self.times, self.distances):
            if d < threshold:
                return float(t)
        return None


@dataclass
class SweepResult:
    taus: np.ndarray
    threshold: float
    times: list[np.ndarray]
    distances: list[np.ndarray]
    first_passage: list[float | None]
    tau_star: float | None


@dataclass
class Classification:
    label: BellLabel
    overlap: float
    degenerate: bool


@dataclass
class Trajectory:
    config: RunConfig
    seed: int
    records: list[MeasurementRecord]
    t_star: float | None
    final_state_bc: np.ndarray
    state_bc_at_tf: np.ndarray
    final_label: BellLabel
    final_overlap: float
    final_fidelity: float
    final_concurrence: float
    stabilized: bool
    drift_rate: float
    sample_times: np.ndarray | None = None
    bc_states: list[np.ndarray] | None = None
    u_h_series: np.ndarray | None = None
    u_j_series: np.ndarray | None = None
    readout_rows: dict[int, int] = field(default_factory=dict)
    concurrence_series: np.ndarray | None = None
    fidelity_series: np.ndarray | None = None

    @property
    def readouts(self) -> list[int]:
        return [r.outcome for r in self.records]

    @property
    def first_zero_index(self) -> int:
        for r in self.records:
            if r.outcome == 0:
                return r.index
        return -1


@dataclass
class TrajectorySummary:
    index: int
    seed: int
    final_label: BellLabel
    n_measurements: int
    first_zero_index: int
    final_fidelity: float
    final_concurrence: float
    stabilized: bool
    drift_rate: float
    t_star: float | None


@dataclass
class EnsembleStats:
    config: RunConfig
    master_seed: int
    n_traj: int
    rows: list[TrajectorySummary]

    @property
    def counts(self) -> dict[BellLabel, int]:
        out = {label: 0 for label in _LABEL_ORDER}
        for row in self.rows:
            out[row.final_label] += 1
        return out

    def frequency(self, label: BellLabel) -> float:
        return self.counts[label] / self.n_traj


def classify_final(rho_bc: np.ndarray, tie_tol: float = 1e-9) -> Classification:
    """Label a two-qubit state by its maximal Bell-projector overlap."""
    overlaps = {
        label: float((v.conj() @ rho_bc @ v).real) for label, v in _BELL_VECTORS.items()
    }
    best = max(_LABEL_ORDER, key=lambda lab: overlaps[lab])
    degenerate = (
        sum(1 for lab in _LABEL_ORDER if overlaps[best] - overlaps[lab] < tie_tol) > 1
    )
    return Classification(best, overlaps[best], degenerate)


def run_nonselective(
    tau: float,
    horizon: float,
    initial: tuple[int, int, int] = (1, 1, 1),
    params: ModelParams | None = None,
) -> NonselectiveSeries:
    """Evolve-and-measure cycle with discarded outcomes, tracking the trace
    distance to the analytic asymptotic state at every measurement."""
    params = params or ModelParams()
    control = ControlState(u_j=1.0)
    rho_inf = asymptotic_state(initial)
    psi = basis_state(*initial)
    rho = np.outer(psi, psi.conj())
    n_meas = int(horizon / tau + _TIME_EPS)
    u = step_unitary(0.0, tau, params, control)
    times = [0.0]
    states = [rho]
    dists = [metrics.trace_distance(rho, rho_inf)]
    for n in range(1, n_meas + 1):
        rho = measure_nonselective(u @ rho @ u.conj().T)
        times.append(n * tau)
        states.append(rho)
        dists.append(metrics.trace_distance(rho, rho_inf))
    return NonselectiveSeries(tau, np.array(times), states, np.array(dists))


def sweep_tau(
    tau_grid: np.ndarray,
    horizon: float = 10.0,
    threshold: float = 0.05,
    initial: tuple[int, int, int] = (1, 1, 1),
) -> SweepResult:
    """Map the relaxation speed over a grid of inter-measurement times.

    tau_star is the grid point with the earliest first passage of the trace
    distance below the threshold; ties break toward smaller tau.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    taus = np.asarray(tau_grid, dtype=float)
    times, distances, passages = [], [], []
    for tau in taus:
        series = run_nonselective(float(tau), horizon, initial)
        times.append(series.times)
        distances.append(series.distances)
        passages.append(series.first_passage(threshold))
    tau_star = None
    best = math.inf
    for tau, fp in zip(taus, passages):
        if fp is not None and fp < best:
            best = fp
            tau_star = float(tau)
    return SweepResult(taus, threshold, times, distances, passages, tau_star)


def _trigger_control(cfg: RunConfig, t_star: float) -> ControlState:
    if cfg.feedback_mode is FeedbackMode.RAMP:
        return ControlState(
            u_j=1.0,
            feedback_mode=FeedbackMode.RAMP,
            t_star=t_star,
            t_f=cfg.t_f,
            continuous_ramp=cfg.continuous_ramp,
        )
    # In zeno mode (and with feedback off) the field stays off.
    return ControlState(u_j=1.0, t_f=cfg.t_f)


def _u_h_at(cfg: RunConfig, t_star: float | None, t: float) -> float:
    from .model import u_h_value

    if t_star is None or cfg.feedback_mode is not FeedbackMode.RAMP:
        return 0.0
    return u_h_value(
        t,
        ControlState(
            u_j=1.0, feedback_mode=FeedbackMode.RAMP, t_star=t_star, t_f=cfg.t_f,
            continuous_ramp=cfg.continuous_ramp,
        ),
    )


def run_trajectory(
    cfg: RunConfig,
    seed: int,
    samples_per_interval: int = 10,
) -> Trajectory:
    """One selective realization of the protocol.

    Ordering per measurement instant: evolve over the interval, collapse on
    the drawn outcome, then update the controls (the first 0 sets t_star).
    After t_f the coupling is switched off instantaneously and the evolution
    continues for post_t_f_extension to verify stationarity.
    """
    params = cfg.params()
    pcfg = cfg.propagator()
    rng = np.random.Generator(np.random.PCG64(seed))
    psi = basis_state(*cfg.initial)
    rho = np.outer(psi, psi.conj())
    control = ControlState(u_j=1.0, t_f=cfg.t_f)

    records: list[MeasurementRecord] = []
    t_star: float | None = None
    t = 0.0
    current_tau = cfg.tau
    index = 0

    sampling = samples_per_interval > 0
    sample_times: list[float] = []
    bc_states: list[np.ndarray] = []
    u_h_series: list[float] = []
    u_j_series: list[float] = []
    readout_rows: dict[int, int] = {}

    def record_sample(time: float, state: np.ndarray, u_j: float):
        sample_times.append(time)
        bc_states.append(partial_trace_ancilla(state))
        u_h_series.append(_u_h_at(cfg, t_star, time))
        u_j_series.append(u_j)

    if sampling:
        record_sample(0.0, rho, 1.0)

    def evolve_to(state: np.ndarray, t0: float, t1: float, ctl: ControlState):
        nonlocal_state = state
        if sampling:
            n_seg = samples_per_interval
            dt = (t1 - t0) / n_seg
            for j in range(1, n_seg):
                nonlocal_state = _apply(
                    step_unitary(t0 + (j - 1) * dt, t0 + j * dt, params, ctl, pcfg),
                    nonlocal_state,
                )
                record_sample(t0 + j * dt, nonlocal_state, ctl.u_j)
            nonlocal_state = _apply(
                step_unitary(t0 + (n_seg - 1) * dt, t1, params, ctl, pcfg), nonlocal_state
            )
        else:
            nonlocal_state = _apply(step_unitary(t0, t1, params, ctl, pcfg), nonlocal_state)
        return nonlocal_state

    while t + current_tau <= cfg.t_f + _TIME_EPS:
        t_next = t + current_tau
        rho = evolve_to(rho, t, t_next, control)
        outcome, rho, prob = measure_selective(rho, float(rng.random()))
        index += 1
        records.append(MeasurementRecord(index, t_next, outcome, prob))
        if sampling:
            record_sample(t_next, rho, control.u_j)
            readout_rows[len(sample_times) - 1] = outcome
        if outcome == 0 and t_star is None:
            t_star = t_next
            control = _trigger_control(cfg, t_star)
            if cfg.feedback_mode is FeedbackMode.ZENO:
                current_tau = cfg.zeno_tau
        t = t_next

    state_bc_at_tf = partial_trace_ancilla(rho)

    # Switch-off: the coupling drops to zero instantaneously at t_f.
    control = replace(control, u_j=0.0)
    t_end = cfg.t_f + cfg.post_t_f_extension
    if cfg.post_t_f_extension > 0:
        rho = evolve_to(rho, cfg.t_f, t_end, control)
        if sampling:
            record_sample(t_end, rho, 0.0)

    rho = validate_density(rho)
    final_bc = partial_trace_ancilla(rho)
    cls = classify_final(final_bc)
    final_fidelity = metrics.fidelity_to_pure(final_bc, _BELL_VECTORS[cls.label])
    final_concurrence = metrics.concurrence(final_bc)
    outcomes = [r.outcome for r in records]
    stabilized = len(outcomes) >= 5 and len(set(outcomes[-5:])) == 1
    drift_rate = (
        metrics.trace_distance(final_bc, state_bc_at_tf) / cfg.post_t_f_extension
        if cfg.post_t_f_extension > 0
        else 0.0
    )

    traj = Trajectory(
        config=cfg,
        seed=seed,
        records=records,
        t_star=t_star,
        final_state_bc=final_bc,
        state_bc_at_tf=state_bc_at_tf,
        final_label=cls.label,
        final_overlap=cls.overlap,
        final_fidelity=final_fidelity,
        final_concurrence=final_concurrence,
        stabilized=stabilized,
        drift_rate=drift_rate,
    )
    if sampling:
        target = _BELL_VECTORS[cls.label]
        traj.sample_times = np.array(sample_times)
        traj.bc_states = bc_states
        traj.u_h_series = np.array(u_h_series)
        traj.u_j_series = np.array(u_j_series)
        traj.readout_rows = readout_rows
        traj.concurrence_series = np.array([metrics.concurrence(b) for b in bc_states])
        traj.fidelity_series = np.array(
            [metrics.fidelity_to_pure(b, target) for b in bc_states]
        )
    return traj


def _apply(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return u @ rho @ u.conj().T


def _summary(cfg: RunConfig, master_seed: int, k: int) -> TrajectorySummary:
    seed = mix_seed(master_seed, k)
    traj = run_trajectory(cfg, seed, samples_per_interval=0)
    return TrajectorySummary(
        index=k,
        seed=seed,
        final_label=traj.final_label,
        n_measurements=len(traj.records),
        first_zero_index=traj.first_zero_index,
        final_fidelity=traj.final_fidelity,
        final_concurrence=traj.final_concurrence,
        stabilized=traj.stabilized,
        drift_rate=traj.drift_rate,
        t_star=traj.t_star,
    )


def run_ensemble(
    cfg: RunConfig,
    n_traj: int | None = None,
    master_seed: int | None = None,
    workers: int | None = None,
) -> EnsembleStats:
    """Seeded trajectory ensemble; aggregation is ordered by trajectory index
    so serial and concurrent execution produce identical results."""
    n = n_traj if n_traj is not None else cfg.n_traj
    ms = master_seed if master_seed is not None else cfg.master_seed
    if n < 1:
        raise ValueError("n_traj must be at least 1")
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda k: _summary(cfg, ms, k), range(n)))
    else:
        rows = [_summary(cfg, ms, k) for k in range(n)]
    return EnsembleStats(config=cfg, master_seed=ms, n_traj=n, rows=rows)
