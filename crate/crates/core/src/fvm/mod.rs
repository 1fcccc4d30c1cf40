//! First-order Lax-Friedrichs finite volumes on a uniform 1-D grid.

mod plateau;

pub use plateau::{count_plateaus, count_plateaus_in, default_min_width, find_plateaus, Plateau, DEFAULT_SLOPE_TOL};

use thiserror::Error;

use crate::entropy::{convexity_conditions, entropy_e};
use crate::hyperbolicity::{check_conditions, spectral_radius};
use crate::state::{flux, to_conserved, to_primitive, Branch, ConservedState, ModelParams, PrimitiveState, StateError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FvmError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("the Riemann discontinuity x = 0 is not inside the grid")]
    OriginOutsideGrid,
    #[error("initial state in cell {cell} satisfies none of the hyperbolicity conditions")]
    NotHyperbolic { cell: usize },
    #[error("CFL number {courant} exceeds 1 at t = {time}")]
    CflViolation { courant: f64, time: f64 },
    #[error("primitive recovery failed in cell {cell} at t = {time}: {source}")]
    ConversionFailure { cell: usize, time: f64, source: StateError },
    #[error("time step {dt} is not positive and finite at t = {time}")]
    DegenerateTimeStep { dt: f64, time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self, FvmError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(FvmError::InvalidGrid("need finite x_min < x_max"));
        }
        if n_cells == 0 {
            return Err(FvmError::InvalidGrid("n_cells must be positive"));
        }
        Ok(Self { x_min, x_max, n_cells })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        self.x_min + (j as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.center(j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPolicy {
    /// Each cell keeps its branch; a cell whose two neighbours both carry the
    /// other branch adopts it.
    Persist,
    Fixed(Branch),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    /// When set, `dt = fixed_ratio * dx` and the CFL number is only checked.
    pub fixed_ratio: Option<f64>,
    pub t_final: f64,
    pub output_every: usize,
    pub branch_policy: BranchPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.9,
            fixed_ratio: None,
            t_final: 1.0,
            output_every: 100,
            branch_policy: BranchPolicy::Persist,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), FvmError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(FvmError::InvalidConfig("cfl must lie in (0, 1]"));
        }
        if let Some(r) = self.fixed_ratio {
            if !(r > 0.0 && r.is_finite()) {
                return Err(FvmError::InvalidConfig("fixed_ratio must be positive"));
            }
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(FvmError::InvalidConfig("t_final must be positive"));
        }
        if self.output_every == 0 {
            return Err(FvmError::InvalidConfig("output_every must be positive"));
        }
        Ok(())
    }
}

/// Solution snapshot with its monitors.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationFrame {
    pub t: f64,
    pub step: usize,
    pub conserved: Vec<ConservedState>,
    pub primitive: Vec<PrimitiveState>,
    pub total_mass_n: f64,
    pub total_mass_s: f64,
    pub total_momentum: f64,
    pub total_energy: f64,
    /// Time integral of `H(U_right ghost) - H(U_left ghost)`; totals plus
    /// this vector are invariant under the scheme.
    pub boundary_outflow: ConservedState,
    pub hyperbolic_everywhere: bool,
    pub cond3_everywhere: bool,
    /// Both convexity conditions of the energy hold in every cell.
    pub convex_everywhere: bool,
    pub min_density: f64,
    pub branch_flips: usize,
}

impl SimulationFrame {
    /// Totals corrected by what left through the boundaries.
    pub fn corrected_totals(&self) -> ConservedState {
        ConservedState::new(self.total_mass_n, self.total_mass_s, self.total_momentum, self.total_energy)
            + self.boundary_outflow
    }
}

pub fn riemann_initial_data(
    left: &PrimitiveState,
    right: &PrimitiveState,
    grid: &Grid1D,
    p: &ModelParams,
) -> Result<Vec<ConservedState>, FvmError> {
    if !(grid.x_min() < 0.0 && 0.0 < grid.x_max()) {
        return Err(FvmError::OriginOutsideGrid);
    }
    let (wl, wr) = (to_conserved(left, p), to_conserved(right, p));
    Ok((0..grid.n_cells())
        .map(|j| if grid.center(j) < 0.0 { wl } else { wr })
        .collect())
}

/// Primitive recovery used by the scheme. A component with exactly zero
/// density is treated as absent, which reduces the system to a single fluid.
pub fn recover_primitive(w: &ConservedState, b: Branch, p: &ModelParams) -> Result<PrimitiveState, StateError> {
    match (w.rho_n, w.rho_s) {
        (rn, rs) if rs == 0.0 && rn > 0.0 => Ok(PrimitiveState::new(rn, 0.0, w.m / rn, 0.0)),
        (rn, rs) if rn == 0.0 && rs > 0.0 => Ok(PrimitiveState::new(0.0, rs, 0.0, w.m / rs)),
        _ => to_primitive(w, b, p),
    }
}

pub fn primitives(
    cells: &[ConservedState],
    branches: &[Branch],
    p: &ModelParams,
    time: f64,
) -> Result<Vec<PrimitiveState>, FvmError> {
    cells
        .iter()
        .zip(branches)
        .enumerate()
        .map(|(cell, (w, &b))| {
            recover_primitive(w, b, p).map_err(|source| FvmError::ConversionFailure { cell, time, source })
        })
        .collect()
}

fn max_speed(prims: &[PrimitiveState], p: &ModelParams) -> f64 {
    prims.iter().map(|u| spectral_radius(u, p)).fold(0.0, f64::max)
}

fn lf_update(cells: &[ConservedState], fluxes: &[ConservedState], dt: f64, dx: f64) -> Vec<ConservedState> {
    let n = cells.len();
    let k = 0.5 * dt / dx;
    (0..n)
        .map(|j| {
            let (l, r) = (j.saturating_sub(1), (j + 1).min(n - 1));
            0.5 * (cells[l] + cells[r]) - k * (fluxes[r] - fluxes[l])
        })
        .collect()
}

/// One Lax-Friedrichs step with outflow (copy) ghost cells.
pub fn lax_friedrichs_step(
    cells: &[ConservedState],
    branches: &[Branch],
    dt: f64,
    grid: &Grid1D,
    cfg: &SolverConfig,
    p: &ModelParams,
    time: f64,
) -> Result<Vec<ConservedState>, FvmError> {
    let prims = primitives(cells, branches, p, time)?;
    check_courant(dt * max_speed(&prims, p) / grid.dx(), cfg, time)?;
    let fluxes: Vec<ConservedState> = prims.iter().map(|u| flux(u, p)).collect();
    Ok(lf_update(cells, &fluxes, dt, grid.dx()))
}

fn check_courant(courant: f64, cfg: &SolverConfig, time: f64) -> Result<(), FvmError> {
    if courant > 1.0 + 1e-12 {
        if cfg.fixed_ratio.is_none() {
            return Err(FvmError::CflViolation { courant, time });
        }
        log::warn!("CFL number {courant} exceeds 1 at t = {time}");
    }
    Ok(())
}

fn sum_totals(cells: &[ConservedState], dx: f64) -> ConservedState {
    let mut acc = [0.0; 4];
    for w in cells {
        for (a, v) in acc.iter_mut().zip(w.to_array()) {
            *a += v;
        }
    }
    dx * ConservedState::from_array(acc)
}

/// Time-marching state of a run.
#[derive(Debug, Clone)]
pub struct Simulation {
    grid: Grid1D,
    cfg: SolverConfig,
    params: ModelParams,
    cells: Vec<ConservedState>,
    prims: Vec<PrimitiveState>,
    branches: Vec<Branch>,
    t: f64,
    step: usize,
    outflow: ConservedState,
    branch_flips: usize,
}

impl Simulation {
    pub fn new(
        cfg: SolverConfig,
        grid: Grid1D,
        prims: Vec<PrimitiveState>,
        params: ModelParams,
    ) -> Result<Self, FvmError> {
        cfg.validate()?;
        if prims.len() != grid.n_cells() {
            return Err(FvmError::InvalidGrid("cell count does not match the grid"));
        }
        if let Some(cell) = prims.iter().position(|u| !check_conditions(u, &params).any()) {
            return Err(FvmError::NotHyperbolic { cell });
        }
        let branches = prims
            .iter()
            .map(|u| match cfg.branch_policy {
                BranchPolicy::Persist => u.branch(),
                BranchPolicy::Fixed(b) => b,
            })
            .collect();
        let cells = prims.iter().map(|u| to_conserved(u, &params)).collect();
        Ok(Self {
            grid,
            cfg,
            params,
            cells,
            prims,
            branches,
            t: 0.0,
            step: 0,
            outflow: ConservedState::default(),
            branch_flips: 0,
        })
    }

    pub fn riemann(
        cfg: SolverConfig,
        grid: Grid1D,
        left: &PrimitiveState,
        right: &PrimitiveState,
        params: ModelParams,
    ) -> Result<Self, FvmError> {
        if !(grid.x_min() < 0.0 && 0.0 < grid.x_max()) {
            return Err(FvmError::OriginOutsideGrid);
        }
        let prims = grid
            .centers()
            .into_iter()
            .map(|x| if x < 0.0 { *left } else { *right })
            .collect();
        Self::new(cfg, grid, prims, params)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.step
    }

    pub fn finished(&self) -> bool {
        self.t >= self.cfg.t_final
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn cells(&self) -> &[ConservedState] {
        &self.cells
    }

    /// Time step the configured policy would take now, before clipping to
    /// `t_final`.
    pub fn stable_dt(&self) -> f64 {
        let dx = self.grid.dx();
        match self.cfg.fixed_ratio {
            Some(r) => r * dx,
            None => self.cfg.cfl * dx / max_speed(&self.prims, &self.params),
        }
    }

    /// Advance by one step, clipped so as not to pass `t_final`.
    pub fn advance(&mut self) -> Result<f64, FvmError> {
        let dx = self.grid.dx();
        let speed = max_speed(&self.prims, &self.params);
        let mut dt = match self.cfg.fixed_ratio {
            Some(r) => r * dx,
            None => self.cfg.cfl * dx / speed,
        };
        if self.t + dt > self.cfg.t_final {
            dt = self.cfg.t_final - self.t;
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FvmError::DegenerateTimeStep { dt, time: self.t });
        }
        check_courant(dt * speed / dx, &self.cfg, self.t)?;

        let fluxes: Vec<ConservedState> = self.prims.iter().map(|u| flux(u, &self.params)).collect();
        let n = fluxes.len();
        self.outflow = self.outflow + dt * (fluxes[n - 1] - fluxes[0]);
        let cells = lf_update(&self.cells, &fluxes, dt, dx);
        if self.cfg.branch_policy == BranchPolicy::Persist {
            self.update_branches();
        }
        let t_new = if dt == self.cfg.t_final - self.t { self.cfg.t_final } else { self.t + dt };
        self.prims = primitives(&cells, &self.branches, &self.params, t_new)?;
        self.cells = cells;
        self.t = t_new;
        self.step += 1;
        Ok(dt)
    }

    fn update_branches(&mut self) {
        let n = self.branches.len();
        let old = self.branches.clone();
        for j in 1..n.saturating_sub(1) {
            if old[j - 1] == old[j + 1] && old[j - 1] != old[j] {
                self.branches[j] = old[j - 1];
                self.branch_flips += 1;
            }
        }
    }

    pub fn frame(&self) -> SimulationFrame {
        let totals = sum_totals(&self.cells, self.grid.dx());
        let mut hyperbolic = true;
        let mut cond3 = true;
        let mut convex = true;
        let mut min_density = f64::INFINITY;
        for u in &self.prims {
            let c = check_conditions(u, &self.params);
            hyperbolic &= c.any();
            cond3 &= c.cond3;
            convex &= convexity_conditions(u, &self.params).both();
            min_density = min_density.min(u.rho_n).min(u.rho_s);
        }
        SimulationFrame {
            t: self.t,
            step: self.step,
            conserved: self.cells.clone(),
            primitive: self.prims.clone(),
            total_mass_n: totals.rho_n,
            total_mass_s: totals.rho_s,
            total_momentum: totals.m,
            total_energy: totals.e,
            boundary_outflow: self.outflow,
            hyperbolic_everywhere: hyperbolic,
            cond3_everywhere: cond3,
            convex_everywhere: convex,
            min_density,
            branch_flips: self.branch_flips,
        }
    }

    /// Run to `t_final`, handing every output frame (the initial one, every
    /// `output_every` steps, and the final one) to `sink`.
    pub fn run_with<F: FnMut(SimulationFrame)>(&mut self, mut sink: F) -> Result<(), FvmError> {
        if self.step == 0 {
            sink(self.frame());
        }
        while !self.finished() {
            self.advance()?;
            if self.finished() || self.step % self.cfg.output_every == 0 {
                sink(self.frame());
            }
        }
        Ok(())
    }
}

/// Solve the Riemann problem and collect all output frames.
pub fn run(
    cfg: SolverConfig,
    grid: Grid1D,
    left: &PrimitiveState,
    right: &PrimitiveState,
    p: &ModelParams,
) -> Result<Vec<SimulationFrame>, FvmError> {
    let mut sim = Simulation::riemann(cfg, grid, left, right, *p)?;
    let mut frames = Vec::new();
    sim.run_with(|f| frames.push(f))?;
    Ok(frames)
}

/// Cell energies `E(U_j)`, the quantity written to frame files.
pub fn cell_energies(frame: &SimulationFrame, p: &ModelParams) -> Vec<f64> {
    frame.primitive.iter().map(|u| entropy_e(u, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = Grid1D::new(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.centers(), vec![-0.75, -0.25, 0.25, 0.75]);
        assert!(Grid1D::new(1.0, 1.0, 4).is_err());
        assert!(Grid1D::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn initial_data_split_at_origin() {
        let p = params();
        let g = Grid1D::new(-1.0, 1.0, 4).unwrap();
        let l = PrimitiveState::new(1.0, 1.0, 0.5, 0.0);
        let r = PrimitiveState::new(0.5, 1.5, 0.2, 0.0);
        let cells = riemann_initial_data(&l, &r, &g, &p).unwrap();
        assert_eq!(cells[0], to_conserved(&l, &p));
        assert_eq!(cells[1], to_conserved(&l, &p));
        assert_eq!(cells[2], to_conserved(&r, &p));
        let totals = sum_totals(&cells, g.dx());
        let expected = to_conserved(&l, &p) + to_conserved(&r, &p);
        assert!((totals.e - expected.e).abs() < 1e-14);
        let off = Grid1D::new(0.5, 1.0, 4).unwrap();
        assert_eq!(riemann_initial_data(&l, &r, &off, &p), Err(FvmError::OriginOutsideGrid));
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        let p = params();
        let g = Grid1D::new(-1.0, 1.0, 16).unwrap();
        let u = PrimitiveState::new(0.8, 1.2, 0.4, -0.3);
        let cells = riemann_initial_data(&u, &u, &g, &p).unwrap();
        let branches = vec![u.branch(); 16];
        let next = lax_friedrichs_step(&cells, &branches, 1e-3, &g, &SolverConfig::default(), &p, 0.0).unwrap();
        for (a, b) in cells.iter().zip(&next) {
            for (x, y) in a.to_array().iter().zip(b.to_array()) {
                assert!((x - y).abs() <= 1e-15 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn cfl_violation_is_an_error_unless_fixed_ratio() {
        let p = params();
        let g = Grid1D::new(-1.0, 1.0, 8).unwrap();
        let u = PrimitiveState::new(1.0, 1.0, 0.5, 0.0);
        let cells = riemann_initial_data(&u, &u, &g, &p).unwrap();
        let branches = vec![u.branch(); 8];
        let cfg = SolverConfig::default();
        assert!(matches!(
            lax_friedrichs_step(&cells, &branches, 1.0, &g, &cfg, &p, 0.0),
            Err(FvmError::CflViolation { .. })
        ));
        let fixed = SolverConfig { fixed_ratio: Some(5.0), ..cfg };
        assert!(lax_friedrichs_step(&cells, &branches, 1.0, &g, &fixed, &p, 0.0).is_ok());
    }

    #[test]
    fn short_run_yields_two_frames() {
        let p = params();
        let g = Grid1D::new(-1.0, 1.0, 20).unwrap();
        let u = PrimitiveState::new(1.0, 1.0, 0.5, 0.0);
        let cfg = SolverConfig { t_final: 1e-6, ..SolverConfig::default() };
        let frames = run(cfg, g, &u, &u, &p).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[0].t, 0.0);
        assert_eq!(frames[1].t, 1e-6);
    }

    #[test]
    fn frames_follow_output_cadence_and_end_at_t_final() {
        let p = params();
        let g = Grid1D::new(-1.0, 1.0, 40).unwrap();
        let l = PrimitiveState::new(1.0, 1.0, 0.5, 0.0);
        let r = PrimitiveState::new(0.8, 1.1, 0.4, 0.0);
        let cfg = SolverConfig { t_final: 0.1, output_every: 3, ..SolverConfig::default() };
        let frames = run(cfg, g, &l, &r, &p).unwrap();
        let last = frames.last().unwrap();
        assert_eq!(last.t, 0.1);
        for f in &frames[1..frames.len() - 1] {
            assert_eq!(f.step % 3, 0);
        }
    }

    #[test]
    fn rejects_nonhyperbolic_initial_data() {
        let p = ModelParams::from_c(1.0, 1.0).unwrap();
        let g = Grid1D::new(-1.0, 1.0, 4).unwrap();
        let good = PrimitiveState::new(1.0, 1.0, 0.5, 0.0);
        // (1, 1, 1, 0) with c = 1 meets none of the three conditions.
        let bad = PrimitiveState::new(1.0, 1.0, 1.0, 0.0);
        assert!(!check_conditions(&bad, &p).any());
        let err = Simulation::riemann(SolverConfig::default(), g, &good, &bad, p).unwrap_err();
        assert_eq!(err, FvmError::NotHyperbolic { cell: 2 });
    }

    #[test]
    fn single_fluid_recovery() {
        let p = params();
        let w = ConservedState::new(2.0, 0.0, 1.0, 10.0);
        let u = recover_primitive(&w, Branch::NormalFaster, &p).unwrap();
        assert_eq!(u, PrimitiveState::new(2.0, 0.0, 0.5, 0.0));
        assert!(to_primitive(&w, Branch::NormalFaster, &p).is_err());
    }

    #[test]
    fn invalid_configs() {
        let base = SolverConfig::default();
        assert!(SolverConfig { cfl: 0.0, ..base }.validate().is_err());
        assert!(SolverConfig { cfl: 1.5, ..base }.validate().is_err());
        assert!(SolverConfig { fixed_ratio: Some(-1.0), ..base }.validate().is_err());
        assert!(SolverConfig { t_final: 0.0, ..base }.validate().is_err());
        assert!(SolverConfig { output_every: 0, ..base }.validate().is_err());
        assert!(base.validate().is_ok());
    }
}
