//! Localization diagnostics over an ensemble of random-coin walks.
//!
//! Two quantities classify the late-time packet:
//! - the growth exponent `α` of `σ²(t) ∝ t^α`, fitted on `ln σ²` vs `ln t`
//!   over the steady-state window (≈2 ballistic, ≈1 diffusive, →0 localized),
//!   both for `x` and for `|x|` (the frame of the outward-only walks);
//! - straight-line fits of `ln P(x)` against `|x|` (exponential tails) and
//!   against `x²` (Gaussian tails) on the ensemble-averaged final distribution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::Lattice;
use crate::observables::{window_length, ProbabilityDistributions};
use crate::randomness::Seed;
use crate::sweep::{run_walk, WalkConfig};

/// Tail fits use sites whose probability is at least this fraction of the peak.
pub const TAIL_FLOOR: f64 = 1e-6;

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}

/// Log-log fit of `variance[t]` over the final `window_fraction` of the
/// series, skipping `t = 0` and non-positive entries.
pub fn fit_variance_exponent(variance: &[f64], window_fraction: f64) -> Option<LinearFit> {
    let start = variance.len() - window_length(variance.len(), window_fraction);
    let (xs, ys): (Vec<f64>, Vec<f64>) = variance
        .iter()
        .enumerate()
        .skip(start.max(1))
        .filter(|(_, &v)| v > 0.0)
        .map(|(t, &v)| ((t as f64).ln(), v.ln()))
        .unzip();
    linear_fit(&xs, &ys)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// `ln P` vs `|x|`; `-1/slope` is the localization length.
    pub exponential: LinearFit,
    /// `ln P` vs `x²`.
    pub gaussian: LinearFit,
}

impl TailFit {
    pub fn localization_length(&self) -> f64 {
        -1.0 / self.exponential.slope
    }
}

/// Fits the tails of `total` (storage order) on sites with `P ≥ TAIL_FLOOR·max`.
pub fn fit_tails(lattice: &Lattice, total: &[f64]) -> Option<TailFit> {
    let peak = total.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return None;
    }
    let mut abs_x = Vec::new();
    let mut sq_x = Vec::new();
    let mut log_p = Vec::new();
    for (i, &p) in total.iter().enumerate() {
        if p >= TAIL_FLOOR * peak {
            let x = lattice.coordinate(i) as f64;
            abs_x.push(x.abs());
            sq_x.push(x * x);
            log_p.push(p.ln());
        }
    }
    Some(TailFit {
        exponential: linear_fit(&abs_x, &log_p)?,
        gaussian: linear_fit(&sq_x, &log_p)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationDiagnostics {
    pub realization: usize,
    pub exponent: Option<LinearFit>,
    pub folded_exponent: Option<LinearFit>,
    pub final_variance: f64,
    pub tails: Option<TailFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    pub per_realization: Vec<RealizationDiagnostics>,
    /// Ensemble-mean `σ²(t)`, `t = 0..=steps`.
    pub mean_variance: Vec<f64>,
    /// Ensemble-mean variance of `|x|`.
    pub mean_folded_variance: Vec<f64>,
    pub exponent: LinearFit,
    pub folded_exponent: LinearFit,
    pub ensemble_distribution: ProbabilityDistributions,
    pub tails: TailFit,
}

/// Runs `realizations` walks of `config` (realization `r` uses
/// `Seed::new(config.seed.master, r)`) and fits the ensemble.
pub fn ensemble_diagnostics(config: &WalkConfig, realizations: usize) -> Result<LocalizationReport> {
    let lattice = config.validate()?;
    if realizations < 1 {
        return Err(WalkError::InvalidConfig("realizations must be >= 1".into()));
    }
    let too_short = || WalkError::InvalidConfig(format!("{} steps are too few to fit a growth exponent", config.steps));

    let runs = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let mut cfg = config.clone();
            cfg.seed = Seed::new(config.seed.master, r as u64);
            cfg.record_distributions.clear();
            run_walk(&cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let n = realizations as f64;
    let len = config.steps + 1;
    let mut mean_variance = vec![0.0; len];
    let mut mean_folded_variance = vec![0.0; len];
    let sites = lattice.site_count();
    let mut plus = vec![0.0; sites];
    let mut minus = vec![0.0; sites];
    let mut per_realization = Vec::with_capacity(realizations);
    for (r, series) in runs.iter().enumerate() {
        let variance: Vec<f64> = series.records.iter().map(|rec| rec.variance).collect();
        let folded: Vec<f64> = series.records.iter().map(|rec| rec.folded_variance).collect();
        for t in 0..len {
            mean_variance[t] += variance[t] / n;
            mean_folded_variance[t] += folded[t] / n;
        }
        let fin = series
            .final_distribution
            .as_ref()
            .expect("run_walk records the final distribution");
        for i in 0..sites {
            plus[i] += fin.plus[i] / n;
            minus[i] += fin.minus[i] / n;
        }
        per_realization.push(RealizationDiagnostics {
            realization: r,
            exponent: fit_variance_exponent(&variance, config.window_fraction),
            folded_exponent: fit_variance_exponent(&folded, config.window_fraction),
            final_variance: *variance.last().unwrap(),
            tails: fit_tails(&lattice, &fin.total()),
        });
    }
    let ensemble_distribution = ProbabilityDistributions { lattice, plus, minus };
    let exponent = fit_variance_exponent(&mean_variance, config.window_fraction).ok_or_else(too_short)?;
    let folded_exponent = fit_variance_exponent(&mean_folded_variance, config.window_fraction).ok_or_else(too_short)?;
    let tails = fit_tails(&lattice, &ensemble_distribution.total()).ok_or_else(too_short)?;
    Ok(LocalizationReport {
        per_realization,
        mean_variance,
        mean_folded_variance,
        exponent,
        folded_exponent,
        ensemble_distribution,
        tails,
    })
}

/// [`ensemble_diagnostics`] restricted to random coins with `Δθ > 0`.
pub fn localization_report(config: &WalkConfig, realizations: usize) -> Result<LocalizationReport> {
    if !config.mode.is_random() || config.mode.dtheta() <= 0.0 {
        return Err(WalkError::InvalidConfig(
            "localization diagnostics need a random coin (time or space mode) with dtheta > 0".into(),
        ));
    }
    ensemble_diagnostics(config, realizations)
}
