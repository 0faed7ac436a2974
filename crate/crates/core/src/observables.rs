//! Per-step physical quantities of a walker state.
//!
//! The coin-space reduced density matrix is accumulated in one pass over the
//! amplitudes, `ρ_s[σ,σ'] = Σ_x c_{x,σ} c*_{x,σ'}`; the full position-coin
//! density matrix is never formed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::{Lattice, WalkerState};

/// Eigenvalues within this distance outside `[0, 1]` are rounding noise.
pub const EIGEN_CLAMP_TOLERANCE: f64 = 1e-12;

const NORM_TOLERANCE: f64 = 1e-10;

/// `P₊(x)` and `P₋(x)` in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistributions {
    pub lattice: Lattice,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl ProbabilityDistributions {
    pub fn total(&self) -> Vec<f64> {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p + m).collect()
    }

    pub fn population_plus(&self) -> f64 {
        self.plus.iter().sum()
    }

    pub fn population_minus(&self) -> f64 {
        self.minus.iter().sum()
    }
}

pub fn distributions(state: &WalkerState) -> ProbabilityDistributions {
    let sq = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).collect();
    ProbabilityDistributions {
        lattice: *state.lattice(),
        plus: sq(&state.plus),
        minus: sq(&state.minus),
    }
}

/// `Σ_x P₊(x) P₋(x)`.
pub fn overlap(state: &WalkerState) -> f64 {
    state
        .plus
        .iter()
        .zip(&state.minus)
        .map(|(p, m)| p.norm_sqr() * m.norm_sqr())
        .sum()
}

/// 2×2 reduced density matrix of the internal space and its eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensity {
    pub rho: [[Complex64; 2]; 2],
    /// Larger eigenvalue first.
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl ReducedDensity {
    /// Builds from a Hermitian matrix via `λ± = tr/2 ± sqrt((ρ₁₁ − ρ₂₂)²/4 + |ρ₁₂|²)`.
    pub fn from_matrix(rho: [[Complex64; 2]; 2]) -> Self {
        let a = rho[0][0].re;
        let d = rho[1][1].re;
        let half_gap = ((a - d) * (a - d) / 4.0 + rho[0][1].norm_sqr()).sqrt();
        let mid = (a + d) / 2.0;
        Self {
            rho,
            lambda_plus: mid + half_gap,
            lambda_minus: mid - half_gap,
        }
    }

    pub fn from_eigenvalues(lambda_plus: f64, lambda_minus: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::from_matrix([
            [Complex64::new(lambda_plus, 0.0), zero],
            [zero, Complex64::new(lambda_minus, 0.0)],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.rho[0][0].re + self.rho[1][1].re
    }
}

pub fn reduced_density(state: &WalkerState) -> Result<ReducedDensity> {
    let mut pp = 0.0;
    let mut mm = 0.0;
    let mut pm = Complex64::new(0.0, 0.0);
    for (p, m) in state.plus.iter().zip(&state.minus) {
        pp += p.norm_sqr();
        mm += m.norm_sqr();
        pm += p * m.conj();
    }
    let trace = pp + mm;
    if (trace - 1.0).abs() > NORM_TOLERANCE {
        return Err(WalkError::NotNormalized(trace));
    }
    Ok(ReducedDensity::from_matrix([
        [Complex64::new(pp, 0.0), pm],
        [pm.conj(), Complex64::new(mm, 0.0)],
    ]))
}

/// Von Neumann entropy in nats with `0 ln 0 = 0`.
pub fn entanglement_entropy(rho: &ReducedDensity) -> f64 {
    let term = |lambda: f64| {
        debug_assert!(
            (-EIGEN_CLAMP_TOLERANCE..=1.0 + EIGEN_CLAMP_TOLERANCE).contains(&lambda),
            "eigenvalue {lambda} outside [0, 1]"
        );
        let l = lambda.clamp(0.0, 1.0);
        if l > 0.0 {
            -l * l.ln()
        } else {
            0.0
        }
    };
    (term(rho.lambda_plus) + term(rho.lambda_minus)).clamp(0.0, std::f64::consts::LN_2)
}

fn variance_of(dist: &ProbabilityDistributions, position: impl Fn(i64) -> f64) -> f64 {
    let mut mass = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for (i, (p, m)) in dist.plus.iter().zip(&dist.minus).enumerate() {
        let w = p + m;
        let x = position(dist.lattice.coordinate(i));
        mass += w;
        first += w * x;
        second += w * x * x;
    }
    if mass <= 0.0 {
        return 0.0;
    }
    let mean = first / mass;
    (second / mass - mean * mean).max(0.0)
}

/// Variance of the coordinate `x` under `P₊ + P₋`.
pub fn position_variance(dist: &ProbabilityDistributions) -> f64 {
    variance_of(dist, |x| x as f64)
}

/// Variance of `|x|` under `P₊ + P₋`: the spread of the packet in the frame
/// co-moving with outward translations, where left and right halves fold
/// onto each other.
pub fn folded_variance(dist: &ProbabilityDistributions) -> f64 {
    variance_of(dist, |x| x.abs() as f64)
}

/// Scalar observables of one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub entropy: f64,
    pub overlap: f64,
    pub pop_plus: f64,
    pub pop_minus: f64,
    pub variance: f64,
    /// [`folded_variance`]; not part of the CSV schema.
    pub folded_variance: f64,
}

impl StepRecord {
    pub fn measure(state: &WalkerState) -> Result<Self> {
        let dist = distributions(state);
        let rho = reduced_density(state)?;
        Ok(Self {
            t: state.time(),
            entropy: entanglement_entropy(&rho),
            overlap: overlap(state),
            pop_plus: dist.population_plus(),
            pop_minus: dist.population_minus(),
            variance: position_variance(&dist),
            folded_variance: folded_variance(&dist),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableSeries {
    pub records: Vec<StepRecord>,
    /// Full distributions at requested steps, in step order.
    pub snapshots: Vec<(usize, ProbabilityDistributions)>,
    /// Distribution after the last step.
    pub final_distribution: Option<ProbabilityDistributions>,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.entropy).collect()
    }

    pub fn overlaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.overlap).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSummary {
    pub es_mean: f64,
    pub es_std: f64,
    pub overlap_mean: f64,
    pub overlap_std: f64,
    /// First step of the averaging window (inclusive).
    pub window_start: usize,
    pub window_len: usize,
}

/// Number of trailing records covered by `fraction` of a series of `len`.
pub fn window_length(len: usize, fraction: f64) -> usize {
    ((fraction * len as f64 - 1e-9).ceil().max(1.0) as usize).min(len)
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Means and (population) standard deviations of ES and overlap over the
/// final `⌈fraction · len⌉` records.
pub fn steady_state(series: &ObservableSeries, window_fraction: f64) -> Result<SteadyStateSummary> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(WalkError::EmptyWindow(format!(
            "window fraction {window_fraction} is outside (0, 1]"
        )));
    }
    if series.len() < 4 {
        return Err(WalkError::EmptyWindow(format!(
            "series has {} records, need at least 4",
            series.len()
        )));
    }
    let len = window_length(series.len(), window_fraction);
    let window = &series.records[series.len() - len..];
    let es: Vec<f64> = window.iter().map(|r| r.entropy).collect();
    let ov: Vec<f64> = window.iter().map(|r| r.overlap).collect();
    let (es_mean, es_std) = mean_and_std(&es);
    let (overlap_mean, overlap_std) = mean_and_std(&ov);
    Ok(SteadyStateSummary {
        es_mean,
        es_std,
        overlap_mean,
        overlap_std,
        window_start: window[0].t,
        window_len: len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{initial_state, make_lattice, InternalState};
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn series_from(es: &[f64], ov: &[f64]) -> ObservableSeries {
        ObservableSeries {
            records: es
                .iter()
                .zip(ov)
                .enumerate()
                .map(|(t, (&e, &o))| StepRecord {
                    t,
                    entropy: e,
                    overlap: o,
                    pop_plus: 0.5,
                    pop_minus: 0.5,
                    variance: 0.0,
                    folded_variance: 0.0,
                })
                .collect(),
            ..Default::default()
        }
    }

    #[test]
    fn initial_state_observables() {
        let s = initial_state(make_lattice(3).unwrap());
        let d = distributions(&s);
        for x in [-1, 1] {
            let i = d.lattice.index(x).unwrap();
            assert_eq!(d.plus[i], 0.25);
            assert_eq!(d.minus[i], 0.25);
        }
        assert_eq!(d.total().iter().sum::<f64>(), 1.0);
        assert_eq!(overlap(&s), 0.125);

        let rho = reduced_density(&s).unwrap();
        for r in 0..2 {
            for col in 0..2 {
                assert!((rho.rho[r][col] - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
        assert!((rho.lambda_plus - 1.0).abs() < 1e-15);
        assert!(rho.lambda_minus.abs() < 1e-15);
        assert_eq!(entanglement_entropy(&rho), 0.0);
        assert!((position_variance(&d) - 1.0).abs() < 1e-15);
        assert_eq!(folded_variance(&d), 0.0);
    }

    #[test]
    fn folded_variance_of_mirror_peaks_is_zero() {
        let lat = make_lattice(6).unwrap();
        let mut s = WalkerState::zeros(lat);
        s.set_amplitude(-5, InternalState::Plus, c(FRAC_1_SQRT_2, 0.0)).unwrap();
        s.set_amplitude(5, InternalState::Minus, c(FRAC_1_SQRT_2, 0.0)).unwrap();
        let d = distributions(&s);
        assert!((position_variance(&d) - 25.0).abs() < 1e-12);
        assert!(folded_variance(&d).abs() < 1e-12);
    }

    #[test]
    fn single_site_overlap_is_product_of_populations() {
        let mut s = WalkerState::zeros(make_lattice(4).unwrap());
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        s.set_amplitude(-3, InternalState::Plus, a).unwrap();
        s.set_amplitude(-3, InternalState::Minus, b).unwrap();
        assert!((overlap(&s) - 0.36 * 0.64).abs() < 1e-15);
        assert_eq!(position_variance(&distributions(&s)), 0.0);
    }

    #[test]
    fn disjoint_supports_give_bell_limit() {
        let mut s = WalkerState::zeros(make_lattice(4).unwrap());
        s.set_amplitude(3, InternalState::Plus, c(FRAC_1_SQRT_2, 0.0)).unwrap();
        s.set_amplitude(-2, InternalState::Minus, c(0.0, FRAC_1_SQRT_2))
            .unwrap();
        let rho = reduced_density(&s).unwrap();
        assert!(rho.rho[0][1].norm() < 1e-15);
        assert!((rho.lambda_plus - 0.5).abs() < 1e-15);
        assert!((rho.lambda_minus - 0.5).abs() < 1e-15);
        assert!((entanglement_entropy(&rho) - LN_2).abs() < 1e-15);
        assert_eq!(overlap(&s), 0.0);
    }

    #[test]
    fn pure_plus_state() {
        let mut s = WalkerState::zeros(make_lattice(4).unwrap());
        s.set_amplitude(2, InternalState::Plus, c(0.6, 0.0)).unwrap();
        s.set_amplitude(-4, InternalState::Plus, c(0.0, -0.8)).unwrap();
        let rho = reduced_density(&s).unwrap();
        assert!((rho.rho[0][0].re - 1.0).abs() < 1e-15);
        assert_eq!(rho.rho[1][1].re, 0.0);
        assert_eq!(rho.rho[0][1], c(0.0, 0.0));
        assert_eq!(entanglement_entropy(&rho), 0.0);
    }

    #[test]
    fn rejects_unnormalized_state() {
        let s = WalkerState::zeros(make_lattice(4).unwrap());
        assert_eq!(reduced_density(&s), Err(WalkError::NotNormalized(0.0)));
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entanglement_entropy(&ReducedDensity::from_eigenvalues(1.0, 0.0)), 0.0);
        assert!((entanglement_entropy(&ReducedDensity::from_eigenvalues(0.5, 0.5)) - LN_2).abs() < 1e-15);
        let expected = -0.9 * 0.9f64.ln() - 0.1 * 0.1f64.ln();
        let got = entanglement_entropy(&ReducedDensity::from_eigenvalues(0.9, 0.1));
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.325_082_973_391_448_2).abs() < 1e-12);
        // Rounding noise below zero is clamped away.
        assert_eq!(
            entanglement_entropy(&ReducedDensity::from_eigenvalues(1.0 + 1e-13, -1e-13)),
            0.0
        );
    }

    #[test]
    fn closed_form_eigenvalues_match_characteristic_polynomial() {
        let rho = [[c(0.7, 0.0), c(0.1, -0.2)], [c(0.1, 0.2), c(0.3, 0.0)]];
        let r = ReducedDensity::from_matrix(rho);
        let det = 0.7 * 0.3 - (0.01 + 0.04);
        for l in [r.lambda_plus, r.lambda_minus] {
            assert!((l * l - l + det).abs() < 1e-15);
        }
        assert!((r.lambda_plus + r.lambda_minus - 1.0).abs() < 1e-15);
        assert!(r.lambda_plus >= r.lambda_minus);
    }

    #[test]
    fn steady_state_window() {
        let s = series_from(&[0.3; 8], &[0.1; 8]);
        let sum = steady_state(&s, 0.5).unwrap();
        assert_eq!(sum.es_mean, 0.3);
        assert_eq!(sum.es_std, 0.0);
        assert_eq!(sum.overlap_mean, 0.1);
        assert_eq!(sum.window_len, 4);
        assert_eq!(sum.window_start, 4);

        let alternating: Vec<f64> = (0..10).map(|t| if t % 2 == 0 { 0.0 } else { LN_2 }).collect();
        let s = series_from(&alternating, &[0.0; 10]);
        let sum = steady_state(&s, 0.4).unwrap();
        assert_eq!(sum.window_len, 4);
        assert!((sum.es_mean - LN_2 / 2.0).abs() < 1e-15);
        assert!((sum.es_std - LN_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn steady_state_errors() {
        let s = series_from(&[0.1; 3], &[0.1; 3]);
        assert!(matches!(steady_state(&s, 0.5), Err(WalkError::EmptyWindow(_))));
        let s = series_from(&[0.1; 8], &[0.1; 8]);
        assert!(matches!(steady_state(&s, 0.0), Err(WalkError::EmptyWindow(_))));
        assert!(matches!(steady_state(&s, 1.5), Err(WalkError::EmptyWindow(_))));
        assert!(steady_state(&s, 1.0).is_ok());
    }

    #[test]
    fn window_length_rounds_up() {
        assert_eq!(window_length(500, 0.25), 125);
        assert_eq!(window_length(501, 0.25), 126);
        assert_eq!(window_length(30, 0.1), 3);
        assert_eq!(window_length(10, 1e-6), 1);
        assert_eq!(window_length(10, 1.0), 10);
    }
}
