//! Two-fluid superfluid hydrodynamics: Bose-gas equation of state,
//! hyperbolicity of the one-dimensional system, its energy entropy pair,
//! shock curves and a Lax-Friedrichs solver.

pub mod config;
pub mod entropy;
pub mod eos;
pub mod fvm;
pub mod hyperbolicity;
pub mod quadrature;
pub mod rankine_hugoniot;
pub mod state;

pub use config::{ConfigError, ConfigMap, Experiment};
pub use entropy::{entropy_e, entropy_g, in_admissible_set, shock_entropy_dissipation};
pub use eos::{EosError, EosRow, EosTable, FugacityBeta};
pub use fvm::{count_plateaus, run, FvmError, Grid1D, SimulationFrame, Simulation, SolverConfig};
pub use hyperbolicity::{check_conditions, eigenvalues, CharPoly, Conditions, HyperbolicityError, Spectrum};
pub use rankine_hugoniot::{
    classify_shock, trace_shock_curve, Direction, RhError, ShockClassification, ShockCurve, ShockPoint, TraceOptions,
};
pub use state::{to_conserved, to_primitive, Branch, ConservedState, ModelParams, PrimitiveState, StateError};
