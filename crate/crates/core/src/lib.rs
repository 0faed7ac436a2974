//! Discrete-time quantum walks on an even 1D lattice with coin-position
//! entanglement diagnostics.
//!
//! Three walk variants are supported (conventional, symmetric, split-step),
//! each optionally driven by classical randomness in the coin angle, either
//! per time step or per site. For every step the crate measures the von
//! Neumann entropy of the coin-space reduced density matrix and the overlap
//! `Σ_x P₊(x) P₋(x)` of the two internal-state distributions.
//!
//! ```
//! use qwalk::{run_walk, steady_state, WalkConfig, WalkVariant};
//!
//! let config = WalkConfig::new(WalkVariant::Conventional, 100, std::f64::consts::FRAC_PI_6);
//! let series = run_walk(&config).unwrap();
//! let summary = steady_state(&series, 0.25).unwrap();
//! assert!(summary.es_mean > 0.0 && summary.es_mean < std::f64::consts::LN_2);
//! ```

pub mod cli;
pub mod coin;
pub mod error;
pub mod io;
pub mod lattice;
pub mod localization;
pub mod observables;
pub mod randomness;
pub mod stats;
pub mod sweep;
pub mod translation;

pub use coin::{apply_coin, build_coin, CoinField, CoinMatrix, CoinParams};
pub use error::{Result, WalkError};
pub use lattice::{initial_state, make_lattice, norm, InternalState, Lattice, WalkerState};
pub use localization::{ensemble_diagnostics, localization_report, LocalizationReport};
pub use observables::{
    distributions, entanglement_entropy, overlap, position_variance, reduced_density, steady_state, ObservableSeries,
    ProbabilityDistributions, ReducedDensity, SteadyStateSummary,
};
pub use randomness::{field_at_step, make_schedule, CoinSchedule, RandomnessMode, Seed};
pub use sweep::{run_walk, sweep_theta, sweep_theta_with_threads, SweepResult, WalkConfig};
pub use translation::{step, translate_conventional, translate_one_component, translate_symmetric, WalkVariant};

#[cfg(test)]
extern crate self as qwalk;

#[cfg(test)]
mod tests;
