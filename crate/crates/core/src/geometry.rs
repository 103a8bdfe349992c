//! Point-mass configurations in the plane.

use nalgebra::Vector2;

use crate::error::{CcError, Result};

pub type Vec2 = Vector2<f64>;

/// Bodies closer than this are treated as colliding by every operation that
/// evaluates the potential or the CC residuals.
pub const COLLISION_TOLERANCE: f64 = 1e-9;

/// Relative tolerance of the "centered" precondition:
/// `|cm| < CENTERING_TOLERANCE * (1 + max |q_k|)`.
pub const CENTERING_TOLERANCE: f64 = 1e-12;

/// Positions and masses of `N >= 2` coplanar bodies.
///
/// Construction checks that both lists have the same length, every mass is
/// strictly positive, every coordinate is finite and no two bodies coincide.
/// The center of mass is not required to be at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarConfiguration {
    positions: Vec<Vec2>,
    masses: Vec<f64>,
}

impl PlanarConfiguration {
    pub fn new(positions: Vec<Vec2>, masses: Vec<f64>) -> Result<Self> {
        if positions.len() != masses.len() {
            return Err(CcError::InvalidConfiguration(format!(
                "{} positions but {} masses",
                positions.len(),
                masses.len()
            )));
        }
        if positions.len() < 2 {
            return Err(CcError::InvalidConfiguration(format!(
                "need at least 2 bodies, got {}",
                positions.len()
            )));
        }
        if let Some((k, m)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(CcError::InvalidConfiguration(format!(
                "mass {k} is {m}, expected a finite positive value"
            )));
        }
        if let Some(k) = positions
            .iter()
            .position(|q| !(q.x.is_finite() && q.y.is_finite()))
        {
            return Err(CcError::InvalidConfiguration(format!(
                "position {k} is not finite"
            )));
        }
        let config = Self { positions, masses };
        let (i, j, d) = config.closest_pair();
        if d <= 0.0 {
            return Err(CcError::Collision {
                i,
                j,
                distance: d,
                tolerance: 0.0,
            });
        }
        Ok(config)
    }

    /// Builds from plain `[x, y]` pairs.
    pub fn from_pairs(positions: &[[f64; 2]], masses: &[f64]) -> Result<Self> {
        Self::new(
            positions.iter().map(|p| Vec2::new(p[0], p[1])).collect(),
            masses.to_vec(),
        )
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `(Σ m_j q_j) / M`.
    pub fn center_of_mass(&self) -> Vec2 {
        let weighted = self
            .positions
            .iter()
            .zip(&self.masses)
            .fold(Vec2::zeros(), |acc, (q, m)| acc + q * *m);
        weighted / self.total_mass()
    }

    /// Copy with every position shifted by `shift`.
    pub fn translated(&self, shift: Vec2) -> Self {
        Self {
            positions: self.positions.iter().map(|q| q + shift).collect(),
            masses: self.masses.clone(),
        }
    }

    /// Copy with the center of mass moved to the origin.
    pub fn translate_to_cm(&self) -> Self {
        let cm = self.center_of_mass();
        if cm == Vec2::zeros() {
            return self.clone();
        }
        self.translated(-cm)
    }

    /// Copy with every position multiplied by `factor` (must be nonzero).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor != 0.0) {
            return Err(CcError::Domain(format!("scale factor {factor}")));
        }
        Ok(Self {
            positions: self.positions.iter().map(|q| q * factor).collect(),
            masses: self.masses.clone(),
        })
    }

    /// Copy with new masses on the same positions.
    pub fn with_masses(&self, masses: Vec<f64>) -> Result<Self> {
        Self::new(self.positions.clone(), masses)
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        self.closest_pair().2
    }

    fn closest_pair(&self) -> (usize, usize, f64) {
        let mut best = (0, 1, f64::INFINITY);
        for (i, qi) in self.positions.iter().enumerate() {
            for (j, qj) in self.positions.iter().enumerate().skip(i + 1) {
                let d = (qi - qj).norm();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        best
    }

    /// Fails with [`CcError::Collision`] if two bodies are closer than
    /// `tolerance`.
    pub fn ensure_separated(&self, tolerance: f64) -> Result<()> {
        let (i, j, distance) = self.closest_pair();
        if distance < tolerance {
            return Err(CcError::Collision {
                i,
                j,
                distance,
                tolerance,
            });
        }
        Ok(())
    }

    pub fn max_radius(&self) -> f64 {
        self.positions.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn is_centered(&self) -> bool {
        self.center_of_mass().norm() < CENTERING_TOLERANCE * (1.0 + self.max_radius())
    }

    pub fn ensure_centered(&self) -> Result<()> {
        if self.is_centered() {
            Ok(())
        } else {
            Err(CcError::NotCentered {
                offset: self.center_of_mass().norm(),
            })
        }
    }
}

pub fn center_of_mass(config: &PlanarConfiguration) -> Vec2 {
    config.center_of_mass()
}

pub fn translate_to_cm(config: &PlanarConfiguration) -> PlanarConfiguration {
    config.translate_to_cm()
}

pub fn min_pairwise_distance(config: &PlanarConfiguration) -> f64 {
    config.min_pairwise_distance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(positions: &[[f64; 2]], masses: &[f64]) -> PlanarConfiguration {
        PlanarConfiguration::from_pairs(positions, masses).unwrap()
    }

    fn hexagon() -> PlanarConfiguration {
        let s = 3f64.sqrt();
        config(
            &[[-1.0, s], [-1.0, -s], [1.0, -s], [1.0, s], [-2.0, 0.0], [2.0, 0.0]],
            &[1.0; 6],
        )
    }

    #[test]
    fn center_of_mass_examples() {
        assert_eq!(
            config(&[[-1.0, 0.0], [1.0, 0.0]], &[1.0, 1.0]).center_of_mass(),
            Vec2::zeros()
        );
        assert_eq!(hexagon().center_of_mass(), Vec2::zeros());
        assert_eq!(
            config(&[[0.0, 0.0], [3.0, 0.0]], &[1.0, 2.0]).center_of_mass(),
            Vec2::new(2.0, 0.0)
        );
    }

    #[test]
    fn translate_to_cm_examples() {
        let c = config(&[[0.0, 0.0], [3.0, 0.0]], &[1.0, 2.0]).translate_to_cm();
        assert_eq!(c.positions(), &[Vec2::new(-2.0, 0.0), Vec2::new(1.0, 0.0)]);
        let h = hexagon();
        assert_eq!(h.translate_to_cm(), h);
    }

    #[test]
    fn min_pairwise_distance_examples() {
        assert!((hexagon().min_pairwise_distance() - 2.0).abs() < 1e-15);
        assert_eq!(
            config(&[[0.0, 0.0], [0.0, 5.0]], &[1.0, 1.0]).min_pairwise_distance(),
            5.0
        );
        assert_eq!(
            config(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], &[1.0; 3]).min_pairwise_distance(),
            1.0
        );
    }

    #[test]
    fn hexagon_min_distance_by_enumeration() {
        // all 15 pairs: 6 sides of length 2, 6 short diagonals 2√3, 3 long diagonals 4
        let h = hexagon();
        let mut d: Vec<f64> = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                d.push((h.positions()[i] - h.positions()[j]).norm());
            }
        }
        d.sort_by(f64::total_cmp);
        assert_eq!(d.len(), 15);
        for v in &d[..6] {
            assert!((v - 2.0).abs() < 1e-15);
        }
        for v in &d[6..12] {
            assert!((v - 2.0 * 3f64.sqrt()).abs() < 1e-14);
        }
        for v in &d[12..] {
            assert!((v - 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_invalid_input() {
        assert!(matches!(
            PlanarConfiguration::from_pairs(&[[0.0, 0.0]], &[1.0]),
            Err(CcError::InvalidConfiguration(_))
        ));
        assert!(matches!(
            PlanarConfiguration::from_pairs(&[[0.0, 0.0], [1.0, 0.0]], &[1.0]),
            Err(CcError::InvalidConfiguration(_))
        ));
        assert!(matches!(
            PlanarConfiguration::from_pairs(&[[0.0, 0.0], [1.0, 0.0]], &[1.0, 0.0]),
            Err(CcError::InvalidConfiguration(_))
        ));
        assert!(matches!(
            PlanarConfiguration::from_pairs(&[[0.0, 0.0], [1.0, 0.0]], &[1.0, -2.0]),
            Err(CcError::InvalidConfiguration(_))
        ));
        assert!(matches!(
            PlanarConfiguration::from_pairs(&[[0.0, 0.0], [0.0, 0.0]], &[1.0, 1.0]),
            Err(CcError::Collision { .. })
        ));
        assert!(matches!(
            PlanarConfiguration::from_pairs(&[[f64::NAN, 0.0], [0.0, 0.0]], &[1.0, 1.0]),
            Err(CcError::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn near_collision_is_flagged_by_separation_check() {
        let c = config(&[[0.0, 0.0], [1e-10, 0.0]], &[1.0, 1.0]);
        assert!(matches!(
            c.ensure_separated(COLLISION_TOLERANCE),
            Err(CcError::Collision { i: 0, j: 1, .. })
        ));
    }

    fn arb_config() -> impl Strategy<Value = PlanarConfiguration> {
        (2usize..8)
            .prop_flat_map(|n| {
                (
                    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n),
                    prop::collection::vec(0.1..10.0f64, n),
                )
            })
            .prop_filter_map("collision", |(q, m)| {
                let pairs: Vec<[f64; 2]> = q.iter().map(|&(a, b)| [a, b]).collect();
                PlanarConfiguration::from_pairs(&pairs, &m)
                    .ok()
                    .filter(|c| c.min_pairwise_distance() > 1e-3)
            })
    }

    proptest! {
        #[test]
        fn translate_to_cm_is_idempotent(c in arb_config()) {
            let once = c.translate_to_cm();
            let twice = once.translate_to_cm();
            prop_assert!(once.center_of_mass().norm() < 1e-14 * (1.0 + c.max_radius()));
            for (a, b) in once.positions().iter().zip(twice.positions()) {
                prop_assert!((a - b).amax() < 1e-14 * (1.0 + c.max_radius()));
            }
        }

        #[test]
        fn min_distance_survives_centering(c in arb_config()) {
            let d0 = c.min_pairwise_distance();
            let d1 = c.translate_to_cm().min_pairwise_distance();
            prop_assert!((d0 - d1).abs() <= 1e-13 * (1.0 + c.max_radius()));
        }

        #[test]
        fn center_of_mass_is_translation_equivariant(
            c in arb_config(), vx in -100i32..100, vy in -100i32..100,
        ) {
            let v = Vec2::new(vx as f64, vy as f64);
            let shifted = c.translated(v).center_of_mass();
            let expected = c.center_of_mass() + v;
            prop_assert!((shifted - expected).amax() < 1e-12 * (1.0 + v.norm() + c.max_radius()));
        }
    }
}
