use thiserror::Error;

/// Errors raised by lattice construction, walk evolution and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid lattice: n_half must be >= 2, got {0}")]
    InvalidLattice(usize),

    #[error("coordinate {coordinate} is not a site of a lattice with n_half = {n_half}")]
    NoSuchSite { coordinate: i64, n_half: usize },

    #[error("coin field covers {field} sites but the lattice has {lattice}")]
    FieldMismatch { field: usize, lattice: usize },

    #[error("BoundaryBreach: amplitude {magnitude:e} at x = {coordinate} would leave the lattice at step {time}")]
    BoundaryBreach {
        coordinate: i64,
        magnitude: f64,
        time: usize,
    },

    #[error("StepLimitExceeded: time {time} has reached max_steps = {max_steps}")]
    StepLimitExceeded { time: usize, max_steps: usize },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("steady-state window is empty: {0}")]
    EmptyWindow(String),

    #[error("step {step} is outside the schedule range 0..{max_steps}")]
    ScheduleRange { step: usize, max_steps: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("walk at theta[{theta_index}] = {theta}, realization {realization}: {source}")]
    InSweep {
        theta_index: usize,
        theta: f64,
        realization: usize,
        #[source]
        source: Box<WalkError>,
    },
}

impl WalkError {
    /// True for errors produced by the dynamics rather than by bad input.
    pub fn is_simulation_error(&self) -> bool {
        match self {
            WalkError::BoundaryBreach { .. } | WalkError::StepLimitExceeded { .. } => true,
            WalkError::InSweep { source, .. } => source.is_simulation_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, WalkError>;
