//! The even lattice `x ∈ {−N, …, −1, 1, …, N}` and the walker's wavefunction.
//!
//! There is no site at `x = 0`: the coordinates −1 and +1 occupy adjacent
//! storage slots `N − 1` and `N`. Amplitudes are stored as two contiguous
//! arrays, one per internal state, so translations are block shifts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// Internal (coin) state of the walker: `|+⟩ = (1, 0)ᵀ`, `|−⟩ = (0, 1)ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InternalState {
    Plus,
    Minus,
}

impl InternalState {
    /// Row/column of this state in 2×2 coin-space matrices.
    pub fn index(self) -> usize {
        match self {
            InternalState::Plus => 0,
            InternalState::Minus => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            InternalState::Plus => InternalState::Minus,
            InternalState::Minus => InternalState::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    n_half: usize,
}

impl Lattice {
    pub fn new(n_half: usize) -> Result<Self> {
        if n_half < 2 {
            return Err(WalkError::InvalidLattice(n_half));
        }
        Ok(Self { n_half })
    }

    pub fn n_half(&self) -> usize {
        self.n_half
    }

    pub fn site_count(&self) -> usize {
        2 * self.n_half
    }

    /// Storage index of coordinate `x`; monotone, skipping `x = 0`.
    pub fn index(&self, x: i64) -> Result<usize> {
        let n = self.n_half as i64;
        match x {
            0 => Err(self.no_such_site(x)),
            x if x < -n || x > n => Err(self.no_such_site(x)),
            x if x < 0 => Ok((x + n) as usize),
            x => Ok((x + n - 1) as usize),
        }
    }

    /// Coordinate of storage index `i`. Panics if `i` is out of range.
    pub fn coordinate(&self, i: usize) -> i64 {
        assert!(i < self.site_count(), "site index {i} out of range");
        let n = self.n_half as i64;
        let i = i as i64;
        if i < n {
            i - n
        } else {
            i - n + 1
        }
    }

    pub fn coordinates(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.site_count()).map(move |i| self.coordinate(i))
    }

    fn no_such_site(&self, coordinate: i64) -> WalkError {
        WalkError::NoSuchSite {
            coordinate,
            n_half: self.n_half,
        }
    }
}

/// Convenience constructor mirroring [`Lattice::new`].
pub fn make_lattice(n_half: usize) -> Result<Lattice> {
    Lattice::new(n_half)
}

/// Wavefunction `Σ c_{x,σ} |x,σ⟩` plus the number of steps taken so far.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    lattice: Lattice,
    pub(crate) plus: Vec<Complex64>,
    pub(crate) minus: Vec<Complex64>,
    pub(crate) time: usize,
}

impl WalkerState {
    /// The all-zero state at `t = 0`.
    pub fn zeros(lattice: Lattice) -> Self {
        let n = lattice.site_count();
        Self {
            lattice,
            plus: vec![Complex64::new(0.0, 0.0); n],
            minus: vec![Complex64::new(0.0, 0.0); n],
            time: 0,
        }
    }

    /// Equal superposition of both internal states on the two central sites.
    pub fn initial(lattice: Lattice) -> Self {
        let mut state = Self::zeros(lattice);
        let half = Complex64::new(0.5, 0.0);
        for x in [-1, 1] {
            let i = lattice.index(x).expect("±1 exist on every lattice");
            state.plus[i] = half;
            state.minus[i] = half;
        }
        state
    }

    /// Builds a state from raw component arrays (storage order).
    pub fn from_components(lattice: Lattice, plus: Vec<Complex64>, minus: Vec<Complex64>) -> Result<Self> {
        let n = lattice.site_count();
        if plus.len() != n || minus.len() != n {
            return Err(WalkError::FieldMismatch {
                field: plus.len().max(minus.len()),
                lattice: n,
            });
        }
        Ok(Self {
            lattice,
            plus,
            minus,
            time: 0,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn component(&self, sigma: InternalState) -> &[Complex64] {
        match sigma {
            InternalState::Plus => &self.plus,
            InternalState::Minus => &self.minus,
        }
    }

    pub fn component_mut(&mut self, sigma: InternalState) -> &mut [Complex64] {
        match sigma {
            InternalState::Plus => &mut self.plus,
            InternalState::Minus => &mut self.minus,
        }
    }

    pub fn amplitude(&self, x: i64, sigma: InternalState) -> Result<Complex64> {
        let i = self.lattice.index(x)?;
        Ok(self.component(sigma)[i])
    }

    pub fn set_amplitude(&mut self, x: i64, sigma: InternalState, value: Complex64) -> Result<()> {
        let i = self.lattice.index(x)?;
        self.component_mut(sigma)[i] = value;
        Ok(())
    }

    /// `Σ_{x,σ} |c_{x,σ}|²`.
    pub fn norm(&self) -> f64 {
        self.plus.iter().chain(self.minus.iter()).map(|c| c.norm_sqr()).sum()
    }
}

pub fn initial_state(lattice: Lattice) -> WalkerState {
    WalkerState::initial(lattice)
}

pub fn norm(state: &WalkerState) -> f64 {
    state.norm()
}
