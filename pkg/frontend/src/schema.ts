/**
 * Column contracts for the simulator's CSV outputs.
 *
 * The contract is by column name, not order; both sides of the pipeline keep
 * these lists as checked constants, so a drift in either is a hard error at
 * parse time instead of a silently wrong figure.
 */

export const SWEEP_COLUMNS = ["tau", "t", "trace_distance"] as const;

export const TRAJECTORY_COLUMNS = [
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
] as const;

export const ENSEMBLE_COLUMNS = [
  "seed",
  "final_label",
  "n_measurements",
  "first_zero_index",
  "final_fidelity",
  "final_concurrence",
] as const;

export type PlotKind = "heatmap" | "distance_curves" | "trajectory" | "metrics";

export const KIND_COLUMNS: Record<PlotKind, readonly string[]> = {
  heatmap: SWEEP_COLUMNS,
  distance_curves: SWEEP_COLUMNS,
  trajectory: TRAJECTORY_COLUMNS,
  metrics: TRAJECTORY_COLUMNS,
};
