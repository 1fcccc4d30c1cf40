//! Shared inputs for the benchmarks.

use twofluid::fvm::{Grid1D, SolverConfig};
use twofluid::state::{to_conserved, Branch, ConservedState, ModelParams, PrimitiveState};

pub fn params() -> ModelParams {
    ModelParams::new(1.0, 0.6).expect("valid constants")
}

pub fn left_state() -> PrimitiveState {
    PrimitiveState::new(0.6, 3.0, 0.1, 0.0)
}

pub fn right_state() -> PrimitiveState {
    PrimitiveState::new(0.64, 2.9057, -0.0207, -0.0474)
}

/// A smooth profile on `n` cells, with the branch of each cell.
pub fn smooth_cells(n: usize) -> (Grid1D, Vec<ConservedState>, Vec<Branch>) {
    let grid = Grid1D::new(-1.0, 1.0, n).expect("valid grid");
    let p = params();
    let prims: Vec<PrimitiveState> = grid
        .centers()
        .iter()
        .map(|&x| PrimitiveState::new(0.6 + 0.05 * (3.0 * x).sin(), 3.0 + 0.1 * x, 0.1 * x.cos(), -0.05 * x))
        .collect();
    let cells = prims.iter().map(|u| to_conserved(u, &p)).collect();
    let branches = prims.iter().map(|u| u.branch()).collect();
    (grid, cells, branches)
}

pub fn short_run(t_final: f64) -> SolverConfig {
    SolverConfig { t_final, output_every: usize::MAX, ..SolverConfig::default() }
}
