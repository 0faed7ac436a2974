//! Translation operators and the full time step of each walk variant.
//!
//! All shifts are in-place block moves over the component arrays. Storage
//! index `N − 1` is `x = −1` and `N` is `x = +1`, so the conventional shift
//! crosses the excised origin for free: `succ(−1) = +1`, `pred(+1) = −1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{apply_coin, CoinField};
use crate::error::{Result, WalkError};
use crate::lattice::{InternalState, WalkerState};

/// Amplitudes at or below this magnitude may be dropped at the lattice edge.
pub const BOUNDARY_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkVariant {
    Conventional,
    Symmetric,
    SplitStep,
}

impl WalkVariant {
    pub const ALL: [WalkVariant; 3] = [
        WalkVariant::Conventional,
        WalkVariant::Symmetric,
        WalkVariant::SplitStep,
    ];

    /// Longest walk that keeps the support strictly inside the lattice.
    pub fn max_steps(self, n_half: usize) -> usize {
        match self {
            WalkVariant::Conventional | WalkVariant::Symmetric => n_half - 1,
            WalkVariant::SplitStep => (n_half / 2).saturating_sub(1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WalkVariant::Conventional => "conventional",
            WalkVariant::Symmetric => "symmetric",
            WalkVariant::SplitStep => "split-step",
        }
    }
}

impl fmt::Display for WalkVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WalkVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "conventional" | "cw" => Ok(WalkVariant::Conventional),
            "symmetric" | "sw" => Ok(WalkVariant::Symmetric),
            "split-step" | "splitstep" | "split_step" | "ssw" => Ok(WalkVariant::SplitStep),
            other => Err(format!("unknown walk variant '{other}'")),
        }
    }
}

fn check_edge(state: &WalkerState, sigma: InternalState, index: usize) -> Result<()> {
    let magnitude = state.component(sigma)[index].norm();
    if magnitude > BOUNDARY_TOLERANCE {
        return Err(WalkError::BoundaryBreach {
            coordinate: state.lattice().coordinate(index),
            magnitude,
            time: state.time(),
        });
    }
    Ok(())
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `|+⟩` moves one site right, `|−⟩` one site left.
pub fn translate_conventional(state: &mut WalkerState) -> Result<()> {
    let last = state.lattice().site_count() - 1;
    check_edge(state, InternalState::Plus, last)?;
    check_edge(state, InternalState::Minus, 0)?;

    let plus = state.component_mut(InternalState::Plus);
    plus.rotate_right(1);
    plus[0] = ZERO;
    let minus = state.component_mut(InternalState::Minus);
    minus.rotate_left(1);
    minus[last] = ZERO;
    Ok(())
}

/// Moves component `sigma` outward: `x > 0 → x + 1`, `x < 0 → x − 1`.
pub fn translate_one_component(state: &mut WalkerState, sigma: InternalState) -> Result<()> {
    let n = state.lattice().n_half();
    let last = 2 * n - 1;
    check_edge(state, sigma, 0)?;
    check_edge(state, sigma, last)?;

    let (left, right) = state.component_mut(sigma).split_at_mut(n);
    left.rotate_left(1);
    left[n - 1] = ZERO;
    right.rotate_right(1);
    right[0] = ZERO;
    Ok(())
}

/// Both components move outward; the sites ±1 are vacated.
pub fn translate_symmetric(state: &mut WalkerState) -> Result<()> {
    let last = state.lattice().site_count() - 1;
    for sigma in [InternalState::Plus, InternalState::Minus] {
        check_edge(state, sigma, 0)?;
        check_edge(state, sigma, last)?;
    }
    translate_one_component(state, InternalState::Plus)?;
    translate_one_component(state, InternalState::Minus)
}

/// Advances `state` by one time step of `variant` under `field`.
///
/// Conventional and symmetric: `T·C`. Split-step: `C·T₋·C·T₊`, with the same
/// field for both coin applications.
pub fn step(state: &mut WalkerState, variant: WalkVariant, field: &CoinField) -> Result<()> {
    let max_steps = variant.max_steps(state.lattice().n_half());
    if state.time() >= max_steps {
        return Err(WalkError::StepLimitExceeded {
            time: state.time(),
            max_steps,
        });
    }
    match variant {
        WalkVariant::Conventional => {
            apply_coin(state, field)?;
            translate_conventional(state)?;
        }
        WalkVariant::Symmetric => {
            apply_coin(state, field)?;
            translate_symmetric(state)?;
        }
        WalkVariant::SplitStep => {
            translate_one_component(state, InternalState::Plus)?;
            apply_coin(state, field)?;
            translate_one_component(state, InternalState::Minus)?;
            apply_coin(state, field)?;
        }
    }
    state.time += 1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::{build_coin, CoinMatrix, CoinParams};
    use crate::lattice::{initial_state, make_lattice, Lattice};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    use InternalState::{Minus, Plus};

    fn one(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single(lat: Lattice, x: i64, sigma: InternalState) -> WalkerState {
        let mut s = WalkerState::zeros(lat);
        s.set_amplitude(x, sigma, one(1.0)).unwrap();
        s
    }

    fn support(s: &WalkerState, sigma: InternalState) -> Vec<i64> {
        s.lattice()
            .coordinates()
            .filter(|&x| s.amplitude(x, sigma).unwrap().norm() > 1e-12)
            .collect()
    }

    #[test]
    fn max_steps_per_variant() {
        assert_eq!(WalkVariant::Conventional.max_steps(100), 99);
        assert_eq!(WalkVariant::Symmetric.max_steps(100), 99);
        assert_eq!(WalkVariant::SplitStep.max_steps(100), 49);
        assert_eq!(WalkVariant::SplitStep.max_steps(2), 0);
    }

    #[test]
    fn conventional_moves_plus_right() {
        let lat = make_lattice(4).unwrap();
        let mut s = single(lat, 1, Plus);
        translate_conventional(&mut s).unwrap();
        assert_eq!(s.amplitude(2, Plus).unwrap(), one(1.0));
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn conventional_skips_the_origin() {
        let lat = make_lattice(4).unwrap();
        let mut s = single(lat, -1, Plus);
        translate_conventional(&mut s).unwrap();
        assert_eq!(s.amplitude(1, Plus).unwrap(), one(1.0));

        let mut s = single(lat, 1, Minus);
        translate_conventional(&mut s).unwrap();
        assert_eq!(s.amplitude(-1, Minus).unwrap(), one(1.0));
    }

    #[test]
    fn conventional_boundary_breach() {
        let lat = make_lattice(3).unwrap();
        let mut s = single(lat, 3, Plus);
        assert!(matches!(
            translate_conventional(&mut s),
            Err(WalkError::BoundaryBreach { coordinate: 3, .. })
        ));
        let mut s = single(lat, -3, Minus);
        assert!(matches!(
            translate_conventional(&mut s),
            Err(WalkError::BoundaryBreach { coordinate: -3, .. })
        ));
        // Leftward-moving + at the left edge is fine.
        let mut s = single(lat, -3, Plus);
        translate_conventional(&mut s).unwrap();
        assert_eq!(s.amplitude(-2, Plus).unwrap(), one(1.0));
    }

    #[test]
    fn identity_coin_conventional_hand_evolution() {
        let lat = make_lattice(12).unwrap();
        let field = CoinField::uniform(&lat, build_coin(CoinParams::new(0.0, FRAC_PI_2, FRAC_PI_2)));
        let mut s = initial_state(lat);
        for t in 1..=10i64 {
            step(&mut s, WalkVariant::Conventional, &field).unwrap();
            assert_eq!(support(&s, Plus), vec![t, t + 1]);
            assert_eq!(support(&s, Minus), vec![-t - 1, -t]);
            for x in [t, t + 1] {
                assert!((s.amplitude(x, Plus).unwrap() - one(0.5)).norm() < 1e-15);
                assert!((s.amplitude(-x, Minus).unwrap() - one(0.5)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn symmetric_moves_outward() {
        let lat = make_lattice(4).unwrap();
        let mut s = WalkerState::zeros(lat);
        s.set_amplitude(1, Plus, one(FRAC_1_SQRT_2)).unwrap();
        s.set_amplitude(-1, Plus, one(FRAC_1_SQRT_2)).unwrap();
        translate_symmetric(&mut s).unwrap();
        assert_eq!(support(&s, Plus), vec![-2, 2]);
        assert_eq!(s.amplitude(2, Plus).unwrap(), one(FRAC_1_SQRT_2));
        assert_eq!(s.amplitude(-2, Plus).unwrap(), one(FRAC_1_SQRT_2));

        let mut s = initial_state(lat);
        translate_symmetric(&mut s).unwrap();
        for sigma in [Plus, Minus] {
            assert_eq!(support(&s, sigma), vec![-2, 2]);
            assert_eq!(s.amplitude(2, sigma).unwrap(), one(0.5));
        }
    }

    #[test]
    fn symmetric_boundary_breach() {
        let lat = make_lattice(3).unwrap();
        for (x, sigma) in [(3, Plus), (-3, Plus), (3, Minus), (-3, Minus)] {
            let mut s = single(lat, x, sigma);
            assert!(matches!(
                translate_symmetric(&mut s),
                Err(WalkError::BoundaryBreach { .. })
            ));
        }
    }

    #[test]
    fn one_component_translation() {
        let lat = make_lattice(5).unwrap();
        let mut s = initial_state(lat);
        translate_one_component(&mut s, Plus).unwrap();
        assert_eq!(support(&s, Plus), vec![-2, 2]);
        assert_eq!(support(&s, Minus), vec![-1, 1]);

        let mut a = initial_state(lat);
        a.set_amplitude(3, Minus, one(0.3)).unwrap();
        let mut b = a.clone();
        translate_one_component(&mut a, Minus).unwrap();
        translate_one_component(&mut a, Plus).unwrap();
        translate_symmetric(&mut b).unwrap();
        assert_eq!(a, b);

        let mut s = single(lat, 1, Plus);
        translate_one_component(&mut s, Plus).unwrap();
        translate_one_component(&mut s, Plus).unwrap();
        assert_eq!(s.amplitude(3, Plus).unwrap(), one(1.0));
    }

    #[test]
    fn step_limit() {
        let lat = make_lattice(4).unwrap();
        let field = CoinField::uniform(&lat, CoinMatrix::identity());
        let mut s = initial_state(lat);
        for _ in 0..3 {
            step(&mut s, WalkVariant::Conventional, &field).unwrap();
        }
        assert_eq!(s.time(), 3);
        assert_eq!(
            step(&mut s, WalkVariant::Conventional, &field),
            Err(WalkError::StepLimitExceeded { time: 3, max_steps: 3 })
        );

        let lat = make_lattice(8).unwrap();
        let field = CoinField::uniform(&lat, CoinMatrix::identity());
        let mut s = initial_state(lat);
        for _ in 0..3 {
            step(&mut s, WalkVariant::SplitStep, &field).unwrap();
        }
        assert!(matches!(
            step(&mut s, WalkVariant::SplitStep, &field),
            Err(WalkError::StepLimitExceeded { .. })
        ));
    }

    #[test]
    fn split_step_moves_two_sites_per_step() {
        // Swap coin: the + wavefront advances two sites every step.
        let lat = make_lattice(40).unwrap();
        let field = CoinField::uniform(&lat, build_coin(CoinParams::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2)));
        let mut s = initial_state(lat);
        for t in 1..=10i64 {
            step(&mut s, WalkVariant::SplitStep, &field).unwrap();
            let reach = lat
                .coordinates()
                .filter(|&x| {
                    s.amplitude(x, Plus).unwrap().norm() > 1e-12 || s.amplitude(x, Minus).unwrap().norm() > 1e-12
                })
                .map(i64::abs)
                .max()
                .unwrap();
            assert_eq!(reach, 1 + 2 * t);
        }
    }

    #[test]
    fn swap_coin_conventional_stays_central() {
        let lat = make_lattice(6).unwrap();
        let field = CoinField::uniform(&lat, build_coin(CoinParams::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2)));
        let mut s = initial_state(lat);
        step(&mut s, WalkVariant::Conventional, &field).unwrap();
        step(&mut s, WalkVariant::Conventional, &field).unwrap();
        assert_eq!(support(&s, Plus), vec![-1, 1]);
        assert_eq!(support(&s, Minus), vec![-1, 1]);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in WalkVariant::ALL {
            assert_eq!(v.name().parse::<WalkVariant>().unwrap(), v);
        }
        assert!("diagonal".parse::<WalkVariant>().is_err());
    }
}
