//! Full walks, θ-grid sweeps and realization ensembles.
//!
//! Every walk of a sweep is an independent task keyed by `(θ-index,
//! realization)`. Results are gathered in that order, so the output does not
//! depend on how many workers ran or in which order they finished.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::{initial_state, Lattice};
use crate::localization::fit_variance_exponent;
use crate::observables::{distributions, steady_state, ObservableSeries, SteadyStateSummary, StepRecord};
use crate::randomness::{make_schedule, RandomnessMode, Seed};
use crate::translation::{step, WalkVariant};

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.25;
pub const DEFAULT_GRID_POINTS: usize = 41;
pub const DEFAULT_REALIZATIONS: usize = 100;

/// Split-step points of a random sweep whose co-moving spread still grows
/// faster than this power of `t` are flagged as not localized.
pub const FLAG_EXPONENT_THRESHOLD: f64 = 1.75;

const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub variant: WalkVariant,
    pub n_half: usize,
    pub steps: usize,
    pub phi1: f64,
    pub phi2: f64,
    pub mode: RandomnessMode,
    pub seed: Seed,
    pub window_fraction: f64,
    /// Steps at which full distributions are kept.
    #[serde(default)]
    pub record_distributions: Vec<usize>,
}

impl WalkConfig {
    /// Full-length walk with `φ₁ = φ₂ = π/2`, no randomness, default window.
    pub fn new(variant: WalkVariant, n_half: usize, theta: f64) -> Self {
        Self {
            variant,
            n_half,
            steps: variant.max_steps(n_half),
            phi1: FRAC_PI_2,
            phi2: FRAC_PI_2,
            mode: RandomnessMode::None { theta0: theta },
            seed: Seed::new(0, 0),
            window_fraction: DEFAULT_WINDOW_FRACTION,
            record_distributions: Vec::new(),
        }
    }

    pub fn with_phases(mut self, phi1: f64, phi2: f64) -> Self {
        self.phi1 = phi1;
        self.phi2 = phi2;
        self
    }

    pub fn with_mode(mut self, mode: RandomnessMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_seed(mut self, seed: Seed) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.mode = self.mode.with_theta0(theta);
        self
    }

    pub fn max_steps(&self) -> usize {
        self.variant.max_steps(self.n_half)
    }

    pub fn validate(&self) -> Result<Lattice> {
        let lattice = Lattice::new(self.n_half)?;
        let limit = self.max_steps();
        if self.steps > limit {
            return Err(WalkError::StepLimitExceeded {
                time: self.steps,
                max_steps: limit,
            });
        }
        for angle in [self.phi1, self.phi2, self.mode.theta0(), self.mode.dtheta()] {
            if !angle.is_finite() {
                return Err(WalkError::InvalidConfig(format!("non-finite angle {angle}")));
            }
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 1.0) {
            return Err(WalkError::InvalidConfig(format!(
                "window fraction {} is outside (0, 1]",
                self.window_fraction
            )));
        }
        if let Some(&bad) = self.record_distributions.iter().find(|&&t| t > self.steps) {
            return Err(WalkError::InvalidConfig(format!(
                "snapshot step {bad} is beyond the last step {}",
                self.steps
            )));
        }
        Ok(lattice)
    }
}

/// Runs one walk from the initial state, measuring every step including `t = 0`.
pub fn run_walk(config: &WalkConfig) -> Result<ObservableSeries> {
    let lattice = config.validate()?;
    let schedule = make_schedule(
        config.mode,
        config.phi1,
        config.phi2,
        lattice,
        config.steps.max(1),
        config.seed,
    )?;
    let mut snapshots: Vec<usize> = config.record_distributions.clone();
    snapshots.sort_unstable();
    snapshots.dedup();

    let mut state = initial_state(lattice);
    let mut series = ObservableSeries {
        records: Vec::with_capacity(config.steps + 1),
        ..Default::default()
    };
    loop {
        series.records.push(StepRecord::measure(&state)?);
        if snapshots.binary_search(&state.time()).is_ok() {
            series.snapshots.push((state.time(), distributions(&state)));
        }
        if state.time() == config.steps {
            break;
        }
        let field = schedule.field_at_step(state.time())?;
        step(&mut state, config.variant, field)?;
    }
    series.final_distribution = Some(distributions(&state));
    Ok(series)
}

/// `points` evenly spaced values covering `[lo, hi]` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Default θ grid: `[0, π]`, or `[Δθ, π − Δθ]` when the coin is random.
pub fn default_grid(mode: &RandomnessMode, points: usize) -> Vec<f64> {
    let dt = mode.dtheta();
    if mode.is_random() {
        uniform_grid(dt, PI - dt, points)
    } else {
        uniform_grid(0.0, PI, points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub summaries: Vec<SteadyStateSummary>,
    pub es_mean: f64,
    /// Sample standard deviation over realizations (0 for one realization).
    pub es_std: f64,
    pub ov_mean: f64,
    pub ov_std: f64,
    /// Late-window growth exponent of the ensemble-mean position variance.
    pub variance_exponent: f64,
    /// Same, for the variance of `|x|`. Split-step and symmetric walks only
    /// move outward, so their packets localize, if at all, in this frame.
    pub folded_exponent: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub realizations: usize,
}

impl SweepResult {
    pub fn thetas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.theta).collect()
    }

    pub fn es_means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.es_mean).collect()
    }

    pub fn ov_means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ov_mean).collect()
    }
}

fn sample_mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn check_grid(base: &WalkConfig, grid: &[f64], realizations: usize) -> Result<()> {
    if grid.is_empty() {
        return Err(WalkError::InvalidConfig("θ grid is empty".into()));
    }
    if realizations < 1 {
        return Err(WalkError::InvalidConfig("realizations must be >= 1".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WalkError::InvalidConfig("θ grid must be strictly increasing".into()));
    }
    if base.mode.is_random() {
        let dt = base.mode.dtheta();
        let (lo, hi) = (dt - RANGE_SLACK, PI - dt + RANGE_SLACK);
        if let Some(bad) = grid.iter().find(|&&t| t < lo || t > hi) {
            return Err(WalkError::InvalidConfig(format!(
                "θ = {bad} is outside the admissible range [Δθ, π − Δθ] = [{dt}, {}]",
                PI - dt
            )));
        }
    }
    Ok(())
}

struct WalkOutcome {
    summary: SteadyStateSummary,
    variance: Vec<f64>,
    folded: Vec<f64>,
}

fn run_sweep_job(base: &WalkConfig, theta_index: usize, theta: f64, realization: usize) -> Result<WalkOutcome> {
    let mut config = base.clone().with_theta(theta);
    config.seed = Seed::for_sweep_point(base.seed.master, theta_index, realization);
    config.record_distributions.clear();
    let annotate = |e: WalkError| WalkError::InSweep {
        theta_index,
        theta,
        realization,
        source: Box::new(e),
    };
    let series = run_walk(&config).map_err(annotate)?;
    let summary = steady_state(&series, config.window_fraction).map_err(annotate)?;
    Ok(WalkOutcome {
        summary,
        variance: series.records.iter().map(|r| r.variance).collect(),
        folded: series.records.iter().map(|r| r.folded_variance).collect(),
    })
}

/// Runs `realizations` walks at every θ of `grid`, using the global rayon pool.
pub fn sweep_theta(base: &WalkConfig, grid: &[f64], realizations: usize) -> Result<SweepResult> {
    check_grid(base, grid, realizations)?;
    base.validate()?;

    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|i| (0..realizations).map(move |r| (i, r)))
        .collect();
    let outcomes: Vec<WalkOutcome> = jobs
        .par_iter()
        .map(|&(i, r)| run_sweep_job(base, i, grid[i], r))
        .collect::<Result<_>>()?;

    let flag_candidate = base.variant == WalkVariant::SplitStep && base.mode.is_random();
    let points = grid
        .iter()
        .zip(outcomes.chunks(realizations))
        .map(|(&theta, chunk)| {
            let es: Vec<f64> = chunk.iter().map(|o| o.summary.es_mean).collect();
            let ov: Vec<f64> = chunk.iter().map(|o| o.summary.overlap_mean).collect();
            let (es_mean, es_std) = sample_mean_std(&es);
            let (ov_mean, ov_std) = sample_mean_std(&ov);
            let exponent_of = |pick: fn(&WalkOutcome) -> &[f64]| {
                let len = pick(&chunk[0]).len();
                let mean: Vec<f64> = (0..len)
                    .map(|t| chunk.iter().map(|o| pick(o)[t]).sum::<f64>() / chunk.len() as f64)
                    .collect();
                fit_variance_exponent(&mean, base.window_fraction)
                    .map(|f| f.slope)
                    .unwrap_or(f64::NAN)
            };
            let variance_exponent = exponent_of(|o| &o.variance);
            let folded_exponent = exponent_of(|o| &o.folded);
            SweepPoint {
                theta,
                summaries: chunk.iter().map(|o| o.summary).collect(),
                es_mean,
                es_std,
                ov_mean,
                ov_std,
                variance_exponent,
                folded_exponent,
                flagged: flag_candidate && folded_exponent > FLAG_EXPONENT_THRESHOLD,
            }
        })
        .collect();
    Ok(SweepResult { points, realizations })
}

/// As [`sweep_theta`], on a dedicated pool of `threads` workers.
pub fn sweep_theta_with_threads(
    base: &WalkConfig,
    grid: &[f64],
    realizations: usize,
    threads: usize,
) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| WalkError::InvalidConfig(format!("cannot build worker pool: {e}")))?;
    pool.install(|| sweep_theta(base, grid, realizations))
}
