//! The 2×2 coin unitary and its per-site application.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::{Lattice, WalkerState};

/// Angles of the coin `C(θ, φ₁, φ₂)`, in radians. Not range-reduced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinParams {
    pub theta: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl CoinParams {
    pub fn new(theta: f64, phi1: f64, phi2: f64) -> Self {
        Self { theta, phi1, phi2 }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }
}

/// A 2×2 complex matrix acting on `(c₊, c₋)`; row/column 0 is `|+⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl CoinMatrix {
    /// `[[cos θ, e^{iφ₁} sin θ], [e^{iφ₂} sin θ, −e^{i(φ₁+φ₂)} cos θ]]`.
    pub fn new(params: CoinParams) -> Self {
        let (s, c) = params.theta.sin_cos();
        let e1 = Complex64::from_polar(1.0, params.phi1);
        let e2 = Complex64::from_polar(1.0, params.phi2);
        let e12 = Complex64::from_polar(1.0, params.phi1 + params.phi2);
        Self {
            m: [[Complex64::new(c, 0.0), e1 * s], [e2 * s, -e12 * c]],
        }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [[one, zero], [zero, one]],
        }
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn mul(&self, rhs: &CoinMatrix) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self { m: out }
    }

    #[inline]
    pub fn apply(&self, plus: Complex64, minus: Complex64) -> (Complex64, Complex64) {
        let m = &self.m;
        (m[0][0] * plus + m[0][1] * minus, m[1][0] * plus + m[1][1] * minus)
    }

    /// Largest entry of `|M†M − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = CoinMatrix::identity();
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((p.m[r][c] - id.m[r][c]).norm());
            }
        }
        worst
    }
}

pub fn build_coin(params: CoinParams) -> CoinMatrix {
    CoinMatrix::new(params)
}

/// One coin matrix per lattice site, in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinField {
    sites: Vec<CoinMatrix>,
}

impl CoinField {
    pub fn uniform(lattice: &Lattice, coin: CoinMatrix) -> Self {
        Self {
            sites: vec![coin; lattice.site_count()],
        }
    }

    pub fn from_sites(sites: Vec<CoinMatrix>) -> Self {
        Self { sites }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[CoinMatrix] {
        &self.sites
    }

    pub fn adjoint(&self) -> Self {
        Self {
            sites: self.sites.iter().map(CoinMatrix::adjoint).collect(),
        }
    }
}

/// Rotates `(c_{x,+}, c_{x,−})` by `M(x)` at every site, in place.
pub fn apply_coin(state: &mut WalkerState, field: &CoinField) -> Result<()> {
    let n = state.lattice().site_count();
    if field.len() != n {
        return Err(WalkError::FieldMismatch {
            field: field.len(),
            lattice: n,
        });
    }
    let WalkerState { plus, minus, .. } = state;
    for ((p, m), coin) in plus.iter_mut().zip(minus.iter_mut()).zip(field.sites.iter()) {
        let (np, nm) = coin.apply(*p, *m);
        *p = np;
        *m = nm;
    }
    Ok(())
}
