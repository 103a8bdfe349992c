//! Newtonian potential, moment of inertia and the central-configuration
//! residuals, with `G = 1`.
//!
//! A configuration `q` with center of mass at the origin is central when
//!
//! ```text
//! Σ_{j≠k} m_j m_k (q_j − q_k) / |q_j − q_k|³ = −λ m_k q_k      (direct form)
//! ```
//!
//! for every body `k`, and then `λ = U / I`. Subtracting the center of mass
//! from `q_k` gives the translation-invariant equivalent
//!
//! ```text
//! Σ_{j≠k} m_j (1/|q_j − q_k|³ − λ/M) (q_j − q_k) = 0           (weighted form)
//! ```
//!
//! which holds without centering. Both residuals are reported per body.

use serde::Serialize;

use crate::error::{CcError, Result};
use crate::geometry::{PlanarConfiguration, Vec2, COLLISION_TOLERANCE};

/// `s^{3/2}` for a squared distance `s`.
#[inline]
pub(crate) fn pow_three_halves(s: f64) -> f64 {
    s * s.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcScalars {
    /// Potential `U = Σ_{j<k} m_j m_k / |q_j − q_k|`.
    pub potential: f64,
    /// Moment of inertia about the origin.
    pub inertia: f64,
    /// `U / I`.
    pub lambda: f64,
    pub total_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Direct,
    Weighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub per_body: Vec<Vec2>,
    /// Largest Euclidean norm over `per_body`.
    pub max_norm: f64,
    pub formulation: Formulation,
}

impl ResidualReport {
    fn new(per_body: Vec<Vec2>, formulation: Formulation) -> Self {
        let max_norm = per_body.iter().map(|r| r.norm()).fold(0.0, f64::max);
        Self {
            per_body,
            max_norm,
            formulation,
        }
    }
}

pub fn potential_energy(config: &PlanarConfiguration) -> Result<f64> {
    config.ensure_separated(COLLISION_TOLERANCE)?;
    let q = config.positions();
    let m = config.masses();
    let mut u = 0.0;
    for j in 0..q.len() {
        for k in j + 1..q.len() {
            u += m[j] * m[k] / (q[j] - q[k]).norm_squared().sqrt();
        }
    }
    Ok(u)
}

/// `Σ m_k |q_k|²`, about the origin rather than the center of mass.
pub fn moment_of_inertia(config: &PlanarConfiguration) -> f64 {
    config
        .positions()
        .iter()
        .zip(config.masses())
        .map(|(q, m)| m * q.norm_squared())
        .sum()
}

pub fn lambda_of(config: &PlanarConfiguration) -> Result<CcScalars> {
    config.ensure_centered()?;
    let potential = potential_energy(config)?;
    let inertia = moment_of_inertia(config);
    Ok(CcScalars {
        potential,
        inertia,
        lambda: potential / inertia,
        total_mass: config.total_mass(),
    })
}

/// Gravitational acceleration on each body: `Σ_{j≠k} m_j (q_j − q_k)/|q_j − q_k|³`.
pub fn accelerations(config: &PlanarConfiguration) -> Result<Vec<Vec2>> {
    config.ensure_separated(COLLISION_TOLERANCE)?;
    let q = config.positions();
    let m = config.masses();
    Ok((0..q.len())
        .map(|k| {
            (0..q.len())
                .filter(|&j| j != k)
                .fold(Vec2::zeros(), |acc, j| {
                    let d = q[j] - q[k];
                    acc + d * (m[j] / pow_three_halves(d.norm_squared()))
                })
        })
        .collect())
}

/// `per_body[k] = Σ_{j≠k} m_j m_k (q_j − q_k)/|q_j − q_k|³ + λ m_k q_k`.
pub fn cc_residual_direct(config: &PlanarConfiguration, lambda: f64) -> Result<ResidualReport> {
    config.ensure_centered()?;
    let acc = accelerations(config)?;
    let per_body = acc
        .iter()
        .zip(config.positions())
        .zip(config.masses())
        .map(|((a, q), m)| a * *m + q * (lambda * m))
        .collect();
    Ok(ResidualReport::new(per_body, Formulation::Direct))
}

/// `per_body[k] = Σ_{j≠k} m_j (1/|q_j − q_k|³ − s)(q_j − q_k)` with `s = λ/M`.
/// Translation invariant, so no centering is required.
pub fn cc_residual_weighted(config: &PlanarConfiguration, s: f64) -> Result<ResidualReport> {
    config.ensure_separated(COLLISION_TOLERANCE)?;
    let q = config.positions();
    let m = config.masses();
    let per_body = (0..q.len())
        .map(|k| {
            (0..q.len())
                .filter(|&j| j != k)
                .fold(Vec2::zeros(), |acc, j| {
                    let d = q[j] - q[k];
                    acc + d * (m[j] * (1.0 / pow_three_halves(d.norm_squared()) - s))
                })
        })
        .collect();
    Ok(ResidualReport::new(per_body, Formulation::Weighted))
}

/// The `λ` minimizing the summed squared direct residual,
/// `−Σ m_k q_k·F_k / Σ m_k² |q_k|²` where `F_k` is the force on body `k`.
/// Coincides with `U / I` at a central configuration.
pub fn least_squares_lambda(config: &PlanarConfiguration) -> Result<f64> {
    config.ensure_centered()?;
    let acc = accelerations(config)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((a, q), m) in acc.iter().zip(config.positions()).zip(config.masses()) {
        num -= m * m * q.dot(a);
        den += m * m * q.norm_squared();
    }
    if den == 0.0 {
        return Err(CcError::Domain("all bodies at the origin".into()));
    }
    Ok(num / den)
}
