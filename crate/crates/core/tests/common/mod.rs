//! Dense reference implementation: the full one-step operator as a
//! `4N × 4N` complex matrix on the basis `|x, σ⟩ ↦ 2·index(x) + σ`.
//!
//! Shifts are written as permutations over coordinates, wrapping at the
//! edges so every factor is unitary. Walks compared against the sparse
//! code stay inside the lattice, where the wrap never fires.

#![allow(dead_code)]

use num_complex::Complex64;
use qwalk::{CoinSchedule, InternalState, Lattice, RandomnessMode, Seed, WalkVariant, WalkerState};

pub type C = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub dim: usize,
    pub a: Vec<C>,
}

impl Dense {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            a: vec![C::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.a[i * dim + i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.a[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C) {
        self.a[r * self.dim + c] = v;
    }

    pub fn mul(&self, rhs: &Dense) -> Dense {
        let n = self.dim;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let v = self.get(i, k);
                if v == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += v * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Dense {
        let n = self.dim;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `max |(U†U − I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = Dense::identity(self.dim);
        p.a.iter().zip(&id.a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

fn slot(lat: &Lattice, x: i64, sigma: usize) -> usize {
    2 * lat.index(x).unwrap() + sigma
}

/// `C(θ, φ₁, φ₂)` written out from its matrix elements.
pub fn coin_entries(theta: f64, phi1: f64, phi2: f64) -> [[C; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [
        [C::new(c, 0.0), C::from_polar(s, phi1)],
        [C::from_polar(s, phi2), -C::from_polar(c, phi1 + phi2)],
    ]
}

pub fn dense_coin(lat: &Lattice, params: impl Fn(i64) -> (f64, f64, f64)) -> Dense {
    let mut m = Dense::zeros(2 * lat.site_count());
    for x in lat.coordinates() {
        let (theta, p1, p2) = params(x);
        let c = coin_entries(theta, p1, p2);
        for (r, row) in c.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                m.set(slot(lat, x, r), slot(lat, x, k), v);
            }
        }
    }
    m
}

/// Permutation moving component `sigma` by `to(x)`; the other is untouched.
fn dense_shift(lat: &Lattice, sigma: usize, to: impl Fn(i64) -> i64) -> Dense {
    let mut m = Dense::zeros(2 * lat.site_count());
    for x in lat.coordinates() {
        m.set(slot(lat, to(x), sigma), slot(lat, x, sigma), C::new(1.0, 0.0));
        m.set(slot(lat, x, 1 - sigma), slot(lat, x, 1 - sigma), C::new(1.0, 0.0));
    }
    m
}

fn right(n: i64) -> impl Fn(i64) -> i64 {
    move |x| match x {
        -1 => 1,
        x if x == n => -n,
        x => x + 1,
    }
}

fn left(n: i64) -> impl Fn(i64) -> i64 {
    move |x| match x {
        1 => -1,
        x if x == -n => n,
        x => x - 1,
    }
}

fn outward(n: i64) -> impl Fn(i64) -> i64 {
    move |x| match x {
        x if x == n => 1,
        x if x == -n => -1,
        x if x > 0 => x + 1,
        x => x - 1,
    }
}

/// One full step of `variant` with coin matrix `coin`.
pub fn dense_step(variant: WalkVariant, lat: &Lattice, coin: &Dense) -> Dense {
    let n = lat.n_half() as i64;
    match variant {
        WalkVariant::Conventional => {
            let s = dense_shift(lat, 0, right(n)).mul(&dense_shift(lat, 1, left(n)));
            s.mul(coin)
        }
        WalkVariant::Symmetric => {
            let s = dense_shift(lat, 0, outward(n)).mul(&dense_shift(lat, 1, outward(n)));
            s.mul(coin)
        }
        WalkVariant::SplitStep => {
            let t_plus = dense_shift(lat, 0, outward(n));
            let t_minus = dense_shift(lat, 1, outward(n));
            coin.mul(&t_minus).mul(coin).mul(&t_plus)
        }
    }
}

pub fn flatten(state: &WalkerState) -> Vec<C> {
    let lat = state.lattice();
    let mut v = vec![C::new(0.0, 0.0); 2 * lat.site_count()];
    for x in lat.coordinates() {
        v[slot(lat, x, 0)] = state.amplitude(x, InternalState::Plus).unwrap();
        v[slot(lat, x, 1)] = state.amplitude(x, InternalState::Minus).unwrap();
    }
    v
}

/// Outcome of evolving one configuration both ways for its full length.
#[derive(Debug, Clone, Copy)]
pub struct OracleComparison {
    pub steps: usize,
    pub max_deviation: f64,
    pub max_unitarity_defect: f64,
}

pub fn compare_with_oracle(
    variant: WalkVariant,
    n_half: usize,
    mode: RandomnessMode,
    phi1: f64,
    phi2: f64,
    seed: Seed,
) -> OracleComparison {
    let lat = Lattice::new(n_half).unwrap();
    let steps = variant.max_steps(n_half);
    let schedule = CoinSchedule::new(mode, phi1, phi2, lat, steps, seed).unwrap();
    let mut sparse = WalkerState::initial(lat);
    let mut dense = flatten(&sparse);
    let mut max_deviation: f64 = 0.0;
    let mut max_unitarity_defect: f64 = 0.0;
    for t in 0..steps {
        let coin = dense_coin(&lat, |x| {
            let p = schedule.params_at(t, x).unwrap();
            (p.theta, p.phi1, p.phi2)
        });
        let u = dense_step(variant, &lat, &coin);
        max_unitarity_defect = max_unitarity_defect.max(u.unitarity_defect());
        dense = u.apply(&dense);
        qwalk::step(&mut sparse, variant, schedule.field_at_step(t).unwrap()).unwrap();
        let dev = flatten(&sparse)
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        max_deviation = max_deviation.max(dev);
    }
    OracleComparison {
        steps,
        max_deviation,
        max_unitarity_defect,
    }
}
