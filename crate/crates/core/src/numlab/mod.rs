//! Double-precision cross-checks: RK4 trajectories, invariant drift and line
//! integrals over advected loops.
//!
//! Fields and forms must have every parameter substituted before compiling.

mod eval;
mod integrate;
mod loops;
mod report;

use thiserror::Error;

pub use eval::{compile_function, CompiledField, CompiledFunction, CompiledOneForm};
pub use integrate::{invariant_drift, rk4_integrate, step_count, Trajectory};
pub use loops::{advect_loop, advect_loop_integral, LoopSample, MIN_LOOP_POINTS};
pub use report::write_report;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("pole at {point:?}")]
    Pole { point: Vec<f64> },
    #[error("non-finite value at {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("{nvars} variables for a {dim}-dimensional state: bind all parameters first")]
    UnboundParameters { dim: usize, nvars: usize },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected a 1-form, got degree {0}")]
    NotOneForm(usize),
    #[error("a loop needs at least 16 points, got {0}")]
    LoopTooSmall(usize),
    #[error("level-set projection hit a singular Jacobian")]
    SingularLevelSet,
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("write failed: {0}")]
    Io(String),
}
