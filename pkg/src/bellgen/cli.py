"""Command-line front end: config parsing, experiment dispatch, CSV/JSON output.

Config files are flat key-value text (``key = value`` per line, ``#`` comments).
Flags override config keys; the fully resolved config is echoed into every
output file's header for provenance.  All numeric output uses 12 significant
digits and LF line endings, so identical inputs produce byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic, measurement, metrics
from .analytic import ConvergenceError
from .model import BellLabel, FeedbackMode
from .protocol import RunConfig, mix_seed, run_ensemble, run_nonselective, run_trajectory, sweep_tau

EXIT_CONFIG_ERROR = 2
EXIT_NO_CONVERGENCE = 3

CONFIG_KEYS = {
    "tau": float,
    "t_f": float,
    "h_z": float,
    "initial": str,
    "feedback": str,
    "zeno_tau": float,
    "substep": float,
    "master_seed": int,
    "n_traj": int,
    "threshold_d": float,
    "tau_grid.min": float,
    "tau_grid.max": float,
    "tau_grid.step": float,
    "output_dir": str,
}

DEFAULTS = {
    "tau": 0.5,
    "t_f": 10.0,
    "h_z": 50.0,
    "initial": "111",
    "feedback": "ramp",
    "zeno_tau": 0.02,
    "substep": 1e-3,
    "master_seed": 20260824,
    "n_traj": 2000,
    "threshold_d": 0.05,
    "tau_grid.min": 0.05,
    "tau_grid.max": 1.5,
    "tau_grid.step": 0.01,
    "output_dir": ".",
}

SWEEP_COLUMNS = ["tau", "t", "trace_distance"]
TRAJECTORY_COLUMNS = [
    "t",
    "p_phi_minus",
    "p_phi_plus",
    "p_psi_plus",
    "p_psi_minus",
    "coh_phi_re",
    "coh_phi_im",
    "concurrence",
    "fidelity_to_final",
    "u_h",
    "u_j",
    "readout",
]
ENSEMBLE_COLUMNS = [
    "seed",
    "final_label",
    "n_measurements",
    "first_zero_index",
    "final_fidelity",
    "final_concurrence",
]


class ConfigError(ValueError):
    pass


def load_config(path: str | None) -> dict:
    """Parse a flat key-value config file, rejecting unknown keys."""
    values = dict(DEFAULTS)
    if path is None:
        return values
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return values


def _parse_initial(text: str) -> tuple[int, int, int]:
    if len(text) != 3 or any(c not in "01" for c in text):
        raise ConfigError(f"initial must be a 3-character bit string, got {text!r}")
    return (int(text[0]), int(text[1]), int(text[2]))


def build_run_config(values: dict) -> RunConfig:
    try:
        feedback = FeedbackMode(values["feedback"])
    except ValueError as exc:
        raise ConfigError(f"feedback must be one of none/ramp/zeno: {exc}") from exc
    try:
        return RunConfig(
            tau=values["tau"],
            t_f=values["t_f"],
            h_z=values["h_z"],
            initial=_parse_initial(values["initial"]),
            feedback_mode=feedback,
            master_seed=values["master_seed"],
            n_traj=values["n_traj"],
            substep=values["substep"],
            zeno_tau=values["zeno_tau"],
            threshold_d=values["threshold_d"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _config_header(values: dict) -> list[str]:
    # output_dir is a filesystem location, not a physics input; leaving it out
    # keeps files byte-identical across output directories
    lines = ["# resolved config"]
    for key in sorted(values):
        if key == "output_dir":
            continue
        lines.append(f"# {key} = {values[key]}")
    return lines


def _write_csv(path: Path, values: dict, columns: list[str], rows: list[list[str]]):
    lines = _config_header(values)
    lines.append(",".join(columns))
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="\n")


def cmd_sweep(values: dict) -> int:
    grid = np.arange(
        values["tau_grid.min"],
        values["tau_grid.max"] + values["tau_grid.step"] / 2,
        values["tau_grid.step"],
    )
    if len(grid) == 0 or values["tau_grid.step"] <= 0:
        raise ConfigError("empty or invalid tau grid")
    initial = _parse_initial(values["initial"])
    result = sweep_tau(grid, horizon=values["t_f"], threshold=values["threshold_d"], initial=initial)
    out = Path(values["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for tau, times, dists in zip(result.taus, result.times, result.distances):
        for t, d in zip(times, dists):
            rows.append([_fmt(tau), _fmt(t), _fmt(d)])
    _write_csv(out / "sweep.csv", values, SWEEP_COLUMNS, rows)
    _write_json(
        out / "summary.json",
        {
            "tau_star": result.tau_star,
            "threshold": result.threshold,
            "first_passage": [
                {"tau": _fmt(tau), "t": None if fp is None else _fmt(fp)}
                for tau, fp in zip(result.taus, result.first_passage)
            ],
            "config": {k: values[k] for k in sorted(values) if k != "output_dir"},
        },
    )
    return 0


def cmd_trajectory(values: dict, seed: int | None) -> int:
    cfg = build_run_config(values)
    traj_seed = seed if seed is not None else mix_seed(cfg.master_seed, 0)
    traj = run_trajectory(cfg, traj_seed, samples_per_interval=10)
    out = Path(values["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    from .model import bell_state

    vecs = {
        "p_phi_minus": bell_state(BellLabel.PHI_MINUS),
        "p_phi_plus": bell_state(BellLabel.PHI_PLUS),
        "p_psi_plus": bell_state(BellLabel.PSI_PLUS),
        "p_psi_minus": bell_state(BellLabel.PSI_MINUS),
    }
    rows = []
    for i, t in enumerate(traj.sample_times):
        bc = traj.bc_states[i]
        pops = {k: float((v.conj() @ bc @ v).real) for k, v in vecs.items()}
        coh = complex(
            vecs["p_phi_minus"].conj() @ bc @ vecs["p_phi_plus"]
        )
        readout = traj.readout_rows.get(i)
        rows.append(
            [
                _fmt(float(t)),
                _fmt(pops["p_phi_minus"]),
                _fmt(pops["p_phi_plus"]),
                _fmt(pops["p_psi_plus"]),
                _fmt(pops["p_psi_minus"]),
                _fmt(coh.real),
                _fmt(coh.imag),
                _fmt(float(traj.concurrence_series[i])),
                _fmt(float(traj.fidelity_series[i])),
                _fmt(float(traj.u_h_series[i])),
                _fmt(float(traj.u_j_series[i])),
                "" if readout is None else str(readout),
            ]
        )
    _write_csv(out / "trajectory.csv", values, TRAJECTORY_COLUMNS, rows)
    _write_json(
        out / "readouts.json",
        {
            "seed": traj_seed,
            "readouts": traj.readouts,
            "t_star": traj.t_star,
            "final_label": traj.final_label.value,
            "final_fidelity": traj.final_fidelity,
            "final_concurrence": traj.final_concurrence,
            "config": {k: values[k] for k in sorted(values) if k != "output_dir"},
        },
    )
    return 0


def cmd_ensemble(values: dict) -> int:
    cfg = build_run_config(values)
    stats = run_ensemble(cfg)
    out = Path(values["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        [
            str(row.seed),
            row.final_label.value,
            str(row.n_measurements),
            str(row.first_zero_index),
            _fmt(row.final_fidelity),
            _fmt(row.final_concurrence),
        ]
        for row in stats.rows
    ]
    _write_csv(out / "ensemble.csv", values, ENSEMBLE_COLUMNS, rows)
    return 0


def cmd_asymptotic(values: dict) -> int:
    tau = values["tau"]
    entries = []
    failures = 0
    for idx in range(8):
        bits = (idx >> 2 & 1, idx >> 1 & 1, idx & 1)
        label = f"{bits[0]}{bits[1]}{bits[2]}"
        from .model import basis_state

        psi = basis_state(*bits)
        rho0 = np.outer(psi, psi.conj())
        target = analytic.asymptotic_state(bits)
        entry = {
            "initial": label,
            "weights": [
                {"ancilla": anc, "bell": lab.value, "weight": w}
                for anc, lab, w in analytic.asymptotic_weights(bits)
            ],
        }
        try:
            numeric = analytic.asymptotic_state_numeric(rho0, tau)
            entry["converged"] = True
            entry["trace_distance_analytic_vs_numeric"] = _fmt(
                metrics.trace_distance(numeric, target)
            )
        except ConvergenceError as exc:
            failures += 1
            entry["converged"] = False
            entry["residual"] = _fmt(exc.residual)
        entries.append(entry)
    out = Path(values["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    _write_json(
        out / "asymptotic.json",
        {
            "tau": tau,
            "states": entries,
            "config": {k: values[k] for k in sorted(values) if k != "output_dir"},
        },
    )
    return EXIT_NO_CONVERGENCE if failures else 0


def cmd_analytic_check(values: dict) -> int:
    """Cross-check the closed-form sequence algebra against the numeric chain."""
    from .model import basis_state

    tau = values["tau"]
    psi0 = basis_state(1, 1, 1)
    rho0 = np.outer(psi0, psi0.conj())
    checks = []
    ok = True
    for n in range(1, 5):
        for code in range(2**n):
            seq = [(code >> (n - 1 - j)) & 1 for j in range(n)]
            psi_cf, p_cf = analytic.post_sequence_state(seq, tau)
            p_num = measurement.sequence_probability(seq, tau, rho0)
            rho = rho0
            from .dynamics import step_unitary
            from .model import ControlState, ModelParams

            u = step_unitary(0.0, tau, ModelParams(), ControlState(u_j=1.0))
            for i in seq:
                rho, _ = measurement.project_outcome(u @ rho @ u.conj().T, i)
            overlap = float((psi_cf.conj() @ rho @ psi_cf).real)
            passed = abs(p_cf - p_num) < 1e-10 and overlap > 1 - 1e-10
            ok = ok and passed
            checks.append((seq, p_cf, p_num, overlap, passed))
    width = max(len(str(c[0])) for c in checks)
    print(f"{'sequence':<{width}}  {'p_closed':>14}  {'p_numeric':>14}  {'overlap':>12}  status")
    for seq, p_cf, p_num, overlap, passed in checks:
        print(
            f"{str(seq):<{width}}  {p_cf:14.10f}  {p_num:14.10f}  {overlap:12.10f}  "
            f"{'pass' if passed else 'FAIL'}"
        )
    total = sum(
        analytic.post_sequence_state([(c >> (3 - j)) & 1 for j in range(4)], tau)[1]
        for c in range(16)
    )
    sum_ok = abs(total - 1.0) < 1e-10
    ok = ok and sum_ok
    print(f"sum over all 16 length-4 branches = {total:.12f} ({'pass' if sum_ok else 'FAIL'})")
    return 0 if ok else EXIT_NO_CONVERGENCE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellgen",
        description="Simulate Bell-state generation via repeated ancilla measurements.",
    )
    parser.add_argument("--config", help="flat key-value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_overrides(p):
        p.add_argument("--tau", type=float)
        p.add_argument("--t-f", dest="t_f", type=float)
        p.add_argument("--h-z", dest="h_z", type=float)
        p.add_argument("--initial")
        p.add_argument("--feedback", choices=[m.value for m in FeedbackMode])
        p.add_argument("--zeno-tau", dest="zeno_tau", type=float)
        p.add_argument("--substep", type=float)
        p.add_argument("--master-seed", dest="master_seed", type=int)
        p.add_argument("--n-traj", dest="n_traj", type=int)
        p.add_argument("--threshold-d", dest="threshold_d", type=float)
        p.add_argument("--output-dir", dest="output_dir")

    p_sweep = sub.add_parser("sweep", help="trace-distance sweep over tau")
    add_overrides(p_sweep)
    p_sweep.add_argument("--tau-grid-min", dest="tau_grid.min", type=float)
    p_sweep.add_argument("--tau-grid-max", dest="tau_grid.max", type=float)
    p_sweep.add_argument("--tau-grid-step", dest="tau_grid.step", type=float)

    p_traj = sub.add_parser("trajectory", help="one selective realization")
    add_overrides(p_traj)
    p_traj.add_argument("--seed", type=int, help="trajectory seed (default: mix(master_seed, 0))")

    p_ens = sub.add_parser("ensemble", help="seeded trajectory ensemble")
    add_overrides(p_ens)

    p_asym = sub.add_parser("asymptotic", help="analytic vs numeric fixed points")
    add_overrides(p_asym)

    p_check = sub.add_parser("analytic-check", help="closed-form oracle suite")
    add_overrides(p_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        values = load_config(args.config)
        # Flags override config keys; argparse stores dotted dests verbatim.
        for key, val in vars(args).items():
            if key in CONFIG_KEYS and val is not None:
                values[key] = val
        if args.command == "sweep":
            return cmd_sweep(values)
        if args.command == "trajectory":
            return cmd_trajectory(values, args.seed)
        if args.command == "ensemble":
            return cmd_ensemble(values)
        if args.command == "asymptotic":
            return cmd_asymptotic(values)
        return cmd_analytic_check(values)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
