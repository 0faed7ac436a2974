//! Coin schedules: uniform, time-random and space-random rotation angles.
//!
//! Every random draw is a fair coin choosing `θ₀ + Δθ` or `θ₀ − Δθ`. Draws
//! come from a ChaCha8 stream keyed by the `(master, realization)` pair, with
//! separate streams for temporal and spatial draws; the `k`-th draw of a
//! stream belongs to step `k` (time mode) or storage index `k` (space mode).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coin::{build_coin, CoinField, CoinParams};
use crate::error::{Result, WalkError};
use crate::lattice::Lattice;

const TIME_STREAM: u64 = 0;
const SPACE_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RandomnessMode {
    None { theta0: f64 },
    TimeRandom { theta0: f64, dtheta: f64 },
    SpaceRandom { theta0: f64, dtheta: f64 },
}

impl RandomnessMode {
    pub fn theta0(&self) -> f64 {
        match *self {
            RandomnessMode::None { theta0 }
            | RandomnessMode::TimeRandom { theta0, .. }
            | RandomnessMode::SpaceRandom { theta0, .. } => theta0,
        }
    }

    pub fn dtheta(&self) -> f64 {
        match *self {
            RandomnessMode::None { .. } => 0.0,
            RandomnessMode::TimeRandom { dtheta, .. } | RandomnessMode::SpaceRandom { dtheta, .. } => dtheta,
        }
    }

    pub fn is_random(&self) -> bool {
        !matches!(self, RandomnessMode::None { .. })
    }

    pub fn with_theta0(self, theta0: f64) -> Self {
        match self {
            RandomnessMode::None { .. } => RandomnessMode::None { theta0 },
            RandomnessMode::TimeRandom { dtheta, .. } => RandomnessMode::TimeRandom { theta0, dtheta },
            RandomnessMode::SpaceRandom { dtheta, .. } => RandomnessMode::SpaceRandom { theta0, dtheta },
        }
    }

    /// `(θ₁, θ₂) = (θ₀ + Δθ, θ₀ − Δθ)`.
    pub fn candidate_angles(&self) -> (f64, f64) {
        let (t0, dt) = (self.theta0(), self.dtheta());
        (t0 + dt, t0 - dt)
    }

    pub fn label(&self) -> &'static str {
        match self {
            RandomnessMode::None { .. } => "none",
            RandomnessMode::TimeRandom { .. } => "time",
            RandomnessMode::SpaceRandom { .. } => "space",
        }
    }
}

/// Master seed plus realization index; together they fix every coin flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub realization: u64,
}

impl Seed {
    pub fn new(master: u64, realization: u64) -> Self {
        Self { master, realization }
    }

    /// Seed for realization `r` at grid point `theta_index` of a sweep.
    ///
    /// Depends only on `(master, theta_index, r)`, so growing the grid or the
    /// ensemble never shifts an existing run's stream.
    pub fn for_sweep_point(master: u64, theta_index: usize, realization: usize) -> Self {
        Self {
            master: mix64(master ^ mix64(theta_index as u64 ^ 0x5157_414c_4b00_0000)),
            realization: realization as u64,
        }
    }

    fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(self.master) ^ mix64(self.realization.wrapping_add(0x9e37_79b9)));
        rng.set_stream(stream);
        rng
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fair_flips(rng: &mut ChaCha8Rng, count: usize) -> Vec<bool> {
    (0..count).map(|_| rng.random_bool(0.5)).collect()
}

#[derive(Debug, Clone)]
enum ScheduleKind {
    Uniform(CoinField),
    /// `picks[t]` true selects `fields[0]` (θ₁), false selects `fields[1]` (θ₂).
    Time {
        fields: [CoinField; 2],
        picks: Vec<bool>,
    },
    Space {
        field: CoinField,
        picks: Vec<bool>,
    },
}

/// Immutable map from `(t, x)` to coin parameters, with the per-step fields
/// prebuilt so walks borrow them without allocating.
#[derive(Debug, Clone)]
pub struct CoinSchedule {
    mode: RandomnessMode,
    phi1: f64,
    phi2: f64,
    lattice: Lattice,
    max_steps: usize,
    kind: ScheduleKind,
}

impl CoinSchedule {
    pub fn new(
        mode: RandomnessMode,
        phi1: f64,
        phi2: f64,
        lattice: Lattice,
        max_steps: usize,
        seed: Seed,
    ) -> Result<Self> {
        let dtheta = mode.dtheta();
        if !dtheta.is_finite() || dtheta < 0.0 {
            return Err(WalkError::InvalidConfig(format!(
                "dtheta must be a finite value >= 0, got {dtheta}"
            )));
        }
        if max_steps < 1 {
            return Err(WalkError::InvalidConfig("a schedule needs max_steps >= 1".into()));
        }
        let params = |theta: f64| CoinParams::new(theta, phi1, phi2);
        let (theta1, theta2) = mode.candidate_angles();
        let kind = match mode {
            RandomnessMode::None { theta0 } => {
                ScheduleKind::Uniform(CoinField::uniform(&lattice, build_coin(params(theta0))))
            }
            RandomnessMode::TimeRandom { .. } => {
                let picks = fair_flips(&mut seed.stream(TIME_STREAM), max_steps);
                ScheduleKind::Time {
                    fields: [
                        CoinField::uniform(&lattice, build_coin(params(theta1))),
                        CoinField::uniform(&lattice, build_coin(params(theta2))),
                    ],
                    picks,
                }
            }
            RandomnessMode::SpaceRandom { .. } => {
                let picks = fair_flips(&mut seed.stream(SPACE_STREAM), lattice.site_count());
                let (c1, c2) = (build_coin(params(theta1)), build_coin(params(theta2)));
                let sites = picks.iter().map(|&p| if p { c1 } else { c2 }).collect();
                ScheduleKind::Space {
                    field: CoinField::from_sites(sites),
                    picks,
                }
            }
        };
        Ok(Self {
            mode,
            phi1,
            phi2,
            lattice,
            max_steps,
            kind,
        })
    }

    pub fn mode(&self) -> RandomnessMode {
        self.mode
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    fn check_step(&self, t: usize) -> Result<()> {
        if t >= self.max_steps {
            return Err(WalkError::ScheduleRange {
                step: t,
                max_steps: self.max_steps,
            });
        }
        Ok(())
    }

    /// Coin parameters used at step `t` on coordinate `x`.
    pub fn params_at(&self, t: usize, x: i64) -> Result<CoinParams> {
        self.check_step(t)?;
        let site = self.lattice.index(x)?;
        let (theta1, theta2) = self.mode.candidate_angles();
        let theta = match &self.kind {
            ScheduleKind::Uniform(_) => self.mode.theta0(),
            ScheduleKind::Time { picks, .. } => {
                if picks[t] {
                    theta1
                } else {
                    theta2
                }
            }
            ScheduleKind::Space { picks, .. } => {
                if picks[site] {
                    theta1
                } else {
                    theta2
                }
            }
        };
        Ok(CoinParams::new(theta, self.phi1, self.phi2))
    }

    pub fn field_at_step(&self, t: usize) -> Result<&CoinField> {
        self.check_step(t)?;
        Ok(match &self.kind {
            ScheduleKind::Uniform(field) => field,
            ScheduleKind::Time { fields, picks } => &fields[if picks[t] { 0 } else { 1 }],
            ScheduleKind::Space { field, .. } => field,
        })
    }

    /// Raw fair-coin outcomes (true = `θ₀ + Δθ`), per step or per site.
    pub fn draws(&self) -> &[bool] {
        match &self.kind {
            ScheduleKind::Uniform(_) => &[],
            ScheduleKind::Time { picks, .. } | ScheduleKind::Space { picks, .. } => picks,
        }
    }
}

pub fn make_schedule(
    mode: RandomnessMode,
    phi1: f64,
    phi2: f64,
    lattice: Lattice,
    max_steps: usize,
    seed: Seed,
) -> Result<CoinSchedule> {
    CoinSchedule::new(mode, phi1, phi2, lattice, max_steps, seed)
}

pub fn field_at_step(schedule: &CoinSchedule, t: usize) -> Result<&CoinField> {
    schedule.field_at_step(t)
}
