//! Masses from geometry: for fixed `(x, y)` the CC equations divided by
//! `m_k` are linear in `u = (m1, …, m6, λ)`,
//!
//! ```text
//! Σ_{j≠k} m_j (q_j − q_k)/|q_j − q_k|³ + λ q_k = 0,   k = 1..6,
//! Σ_j m_j q_j = 0,
//! ```
//!
//! giving a 14 × 7 homogeneous system `A u = 0`. Its numerical nullspace,
//! read off the SVD, holds every admissible mass vector. The symmetric family
//! `m1 = m2 = m3 = m4`, `m5 = m6` should be the only one that appears.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{CcError, Result};
use crate::family::{build_configuration, FamilyParams};
use crate::geometry::{PlanarConfiguration, Vec2};
use crate::potential::{cc_residual_direct, pow_three_halves};

/// Singular values below `RANK_TOLERANCE · σ_max` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Residual acceptance, relative to `σ_max`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

fn family_positions(x: f64, y: f64) -> Result<Vec<Vec2>> {
    // masses are irrelevant to the geometry
    let p = FamilyParams::new(x, y, 1.0)?;
    Ok(build_configuration(&p).positions().to_vec())
}

/// Coefficient matrix of the CC system for the family geometry `(x, y)`.
///
/// Rows `2k` and `2k + 1` are the x and y components for body `k`; rows 12
/// and 13 are the center-of-mass constraint. Columns 0..6 multiply the masses,
/// column 6 multiplies `λ`.
pub fn assemble_cc_system(x: f64, y: f64) -> Result<DMatrix<f64>> {
    let q = family_positions(x, y)?;
    Ok(assemble_for_positions(&q))
}

pub(crate) fn assemble_for_positions(q: &[Vec2]) -> DMatrix<f64> {
    let n = q.len();
    let mut a = DMatrix::zeros(2 * n + 2, n + 1);
    for k in 0..n {
        for j in (0..n).filter(|&j| j != k) {
            let d = q[j] - q[k];
            let w = 1.0 / pow_three_halves(d.norm_squared());
            a[(2 * k, j)] = d.x * w;
            a[(2 * k + 1, j)] = d.y * w;
        }
        a[(2 * k, n)] = q[k].x;
        a[(2 * k + 1, n)] = q[k].y;
        a[(2 * n, k)] = q[k].x;
        a[(2 * n + 1, k)] = q[k].y;
    }
    a
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassSolution {
    pub x: f64,
    pub y: f64,
    /// Number of singular values below the rank threshold.
    pub nullspace_dim: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub smallest_singular_value: f64,
    /// Nullspace representative scaled to `masses[0] = 1`. `None` when the
    /// nullspace is trivial.
    pub masses: Option<[f64; 6]>,
    pub lambda: Option<f64>,
    /// Largest per-body norm of the direct CC residual at `(masses, λ)`.
    pub residual_norm: Option<f64>,
    /// Positive masses, positive `λ`, small residual and a 1-dimensional
    /// nullspace.
    pub valid: bool,
    /// The nullspace has dimension two or more; `masses` is then only the
    /// singular vector of the smallest singular value.
    pub degenerate_rank: bool,
}

impl MassSolution {
    pub fn largest_singular_value(&self) -> f64 {
        self.singular_values[0]
    }

    /// Apex mass `m5` when the solution is valid.
    pub fn apex_mass(&self) -> Option<f64> {
        self.masses.filter(|_| self.valid).map(|m| m[4])
    }
}

pub fn solve_masses(x: f64, y: f64, tol: f64) -> Result<MassSolution> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CcError::Domain(format!("rank tolerance {tol} must be positive")));
    }
    let q = family_positions(x, y)?;
    let a = assemble_for_positions(&q);
    let svd = a.clone().svd(false, true);
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| CcError::Domain("SVD did not produce right singular vectors".into()))?;

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = singular_values[0];
    let smallest = *singular_values.last().expect("7 singular values");
    let nullspace_dim = singular_values
        .iter()
        .filter(|&&s| s < tol * sigma_max)
        .count();

    let mut solution = MassSolution {
        x,
        y,
        nullspace_dim,
        singular_values,
        smallest_singular_value: smallest,
        masses: None,
        lambda: None,
        residual_norm: None,
        valid: false,
        degenerate_rank: nullspace_dim >= 2,
    };
    if nullspace_dim == 0 {
        return Ok(solution);
    }

    let row = v_t.row(*order.last().expect("nonempty"));
    let scale = if row[0].abs() > f64::EPSILON * row.amax() {
        row[0]
    } else {
        // no usable normalization by m1; fall back to the largest entry
        row.iter().copied().fold(0.0, |acc: f64, v| if v.abs() > acc.abs() { v } else { acc })
    };
    let u: Vec<f64> = row.iter().map(|v| v / scale).collect();
    let masses: [f64; 6] = u[..6].try_into().expect("six masses");
    let lambda = u[6];

    let residual = if masses.iter().all(|&m| m > 0.0) {
        let config = PlanarConfiguration::new(q.clone(), masses.to_vec())?;
        cc_residual_direct(&config, lambda)?.max_norm
    } else {
        residual_from_matrix(&a, &masses, lambda)
    };

    solution.valid = nullspace_dim == 1
        && masses.iter().all(|&m| m > 0.0)
        && lambda > 0.0
        && residual < RESIDUAL_TOLERANCE * sigma_max;
    solution.masses = Some(masses);
    solution.lambda = Some(lambda);
    solution.residual_norm = Some(residual);
    Ok(solution)
}

// Same quantity as the direct residual, without requiring positive masses.
fn residual_from_matrix(a: &DMatrix<f64>, masses: &[f64; 6], lambda: f64) -> f64 {
    let u = DVector::from_column_slice(masses).push(lambda);
    let r = a * u;
    (0..6)
        .map(|k| masses[k].abs() * Vec2::new(r[2 * k], r[2 * k + 1]).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// Left-hand sides of the four elimination relations, in order
    /// `(m3 − m4) c_d`, `(m1 − m2) c_d`, `c_d (m1 − m3) + c_s (m4 − m2)`,
    /// `c_s (m1 − m3) + c_d (m4 − m2)` with `c_d = 1/(4 + 4y²)^{3/2} − 1/8`
    /// and `c_s = 1/(2y)³ − 1/8`.
    pub defects: [f64; 4],
    /// `|m1 − m2|, |m1 − m3|, |m1 − m4|, |m5 − m6|`.
    pub gaps: [f64; 4],
    /// A coefficient `c_d` or `c_s` is within 1e-12 of zero, so the relations
    /// no longer force the mass differences to vanish.
    pub degenerate_coefficients: bool,
}

impl SymmetryReport {
    pub fn max_defect(&self) -> f64 {
        self.defects.iter().map(|d| d.abs()).fold(0.0, f64::max)
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }
}

pub fn check_symmetry_relations(masses: &[f64; 6], y: f64) -> Result<SymmetryReport> {
    if !(y.is_finite() && y > 0.0) {
        return Err(CcError::Domain(format!("y = {y} must be positive")));
    }
    let [m1, m2, m3, m4, m5, m6] = *masses;
    let diag = 1.0 / pow_three_halves(4.0 + 4.0 * y * y) - 0.125;
    let side = 1.0 / (2.0 * y).powi(3) - 0.125;
    Ok(SymmetryReport {
        defects: [
            (m3 - m4) * diag,
            (m1 - m2) * diag,
            diag * (m1 - m3) + side * (m4 - m2),
            side * (m1 - m3) + diag * (m4 - m2),
        ],
        gaps: [
            (m1 - m2).abs(),
            (m1 - m3).abs(),
            (m1 - m4).abs(),
            (m5 - m6).abs(),
        ],
        degenerate_coefficients: diag.abs() < 1e-12 || side.abs() < 1e-12,
    })
}
