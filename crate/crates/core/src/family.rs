//! The six-body family of two congruent isosceles triangles.
//!
//! ```text
//! q1 = (−1,  y)   q4 = (1,  y)
//! q5 = (−1−x, 0)  q6 = (1+x, 0)
//! q2 = (−1, −y)   q3 = (1, −y)
//! ```
//!
//! Bodies 1..4 carry unit mass and the apexes 5, 6 carry `m`. By symmetry the
//! twelve CC component equations collapse to three: the x and y components
//! for a rectangle body and the x component for an apex body. Each gives an
//! expression for `λ` (see [`lambda_reduced`]). Eliminating `λ` between the
//! first two yields `m = m1(x, y)`, between the last two `m = m2(x, y)`, and
//! the geometry is central iff `m1 = m2 > 0`.
//!
//! All `|·|^{3/2}` powers are taken from the exact squared-distance
//! polynomials:
//!
//! * `x² + y²`: apex to the near rectangle corners,
//! * `x² + y² + 4x + 4`: apex to the far corners,
//! * `1 + y²`: a quarter of the rectangle diagonal squared.

use serde::Serialize;

use crate::error::{CcError, Result};
use crate::geometry::{PlanarConfiguration, Vec2};
use crate::potential::pow_three_halves;

/// `|divisor of m2| <` this is reported as a pole.
pub const DIVISOR_SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyParams {
    x: f64,
    y: f64,
    m: f64,
}

impl FamilyParams {
    pub fn new(x: f64, y: f64, m: f64) -> Result<Self> {
        check_xy(x, y)?;
        if !(m.is_finite() && m > 0.0) {
            return Err(CcError::Domain(format!("apex mass m = {m} must be positive")));
        }
        Ok(Self { x, y, m })
    }

    /// The regular hexagon `(1, √3, 1)`.
    pub fn anchor() -> Self {
        Self {
            x: 1.0,
            y: 3f64.sqrt(),
            m: 1.0,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

fn check_xy(x: f64, y: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(CcError::Domain(format!("x = {x} must be positive")));
    }
    if !(y.is_finite() && y > 0.0) {
        return Err(CcError::Domain(format!("y = {y} must be positive")));
    }
    Ok(())
}

/// The `|·|^{3/2}` powers shared by every closed form.
#[derive(Debug, Clone, Copy)]
struct Cubes {
    /// `(x² + y²)^{3/2}`
    near: f64,
    /// `(x² + y² + 4x + 4)^{3/2}`
    far: f64,
    /// `(1 + y²)^{3/2}`
    diagonal: f64,
}

impl Cubes {
    fn new(x: f64, y: f64) -> Self {
        Self {
            near: pow_three_halves(x * x + y * y),
            far: pow_three_halves(x * x + y * y + 4.0 * x + 4.0),
            diagonal: pow_three_halves(1.0 + y * y),
        }
    }
}

pub fn build_configuration(p: &FamilyParams) -> PlanarConfiguration {
    let (x, y, m) = (p.x, p.y, p.m);
    let positions = vec![
        Vec2::new(-1.0, y),
        Vec2::new(-1.0, -y),
        Vec2::new(1.0, -y),
        Vec2::new(1.0, y),
        Vec2::new(-1.0 - x, 0.0),
        Vec2::new(1.0 + x, 0.0),
    ];
    PlanarConfiguration::new(positions, vec![1.0, 1.0, 1.0, 1.0, m, m])
        .expect("family geometry is collision-free for x, y > 0")
}

/// Apex mass balancing the rectangle body's two force components:
///
/// ```text
/// m1 = ¼ (1 − 1/y³) · near·far / ((1 + x)(far − near))
/// ```
///
/// `far > near` for every `x > 0`, so the sign of `m1` is the sign of `y − 1`.
pub fn mass_m1(x: f64, y: f64) -> Result<f64> {
    check_xy(x, y)?;
    let c = Cubes::new(x, y);
    Ok(0.25 * (1.0 - 1.0 / (y * y * y)) * c.near * c.far / ((1.0 + x) * (c.far - c.near)))
}

/// Numerator and divisor of [`mass_m2`], unchecked.
pub fn mass_m2_parts(x: f64, y: f64) -> Result<(f64, f64)> {
    check_xy(x, y)?;
    let c = Cubes::new(x, y);
    let numerator = 2.0 * x / (c.near * (1.0 + x)) + 2.0 * (2.0 + x) / (c.far * (1.0 + x))
        - 1.0 / (4.0 * y * y * y)
        - 1.0 / (4.0 * c.diagonal);
    let divisor = 1.0 / c.near + 1.0 / c.far - 1.0 / (4.0 * (1.0 + x).powi(3));
    Ok((numerator, divisor))
}

/// Apex mass balancing the rectangle body's y component against the apex
/// body's x component:
///
/// ```text
/// m2 = [2x/(near(1+x)) + 2(2+x)/(far(1+x)) − 1/(4y³) − 1/(4 diagonal)]
///    / [1/near + 1/far − 1/(4(1+x)³)]
/// ```
pub fn mass_m2(x: f64, y: f64) -> Result<f64> {
    let (numerator, divisor) = mass_m2_parts(x, y)?;
    if divisor.abs() < DIVISOR_SINGULAR_THRESHOLD {
        return Err(CcError::Singular {
            factor: "m2 divisor 1/(x²+y²)^{3/2} + 1/(x²+y²+4x+4)^{3/2} − 1/(4(1+x)³)",
            value: divisor,
            x,
            y,
        });
    }
    Ok(numerator / divisor)
}

/// `F = m1 − m2`; the family is central where `F = 0` and `m1 > 0`.
pub fn family_f(x: f64, y: f64) -> Result<f64> {
    Ok(mass_m1(x, y)? - mass_m2(x, y)?)
}

/// The three symmetry-reduced expressions for `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedLambdas {
    /// From the x component at a rectangle body:
    /// `¼ + 1/(4 diagonal) − x m/near + (2+x) m/far`.
    pub rect_x: f64,
    /// From the y component at a rectangle body:
    /// `1/(4y³) + 1/(4 diagonal) + m/near + m/far`.
    pub rect_y: f64,
    /// From the x component at an apex body:
    /// `2x/(near(1+x)) + 2(2+x)/(far(1+x)) + m/(4(1+x)³)`.
    pub apex_x: f64,
}

impl ReducedLambdas {
    pub fn as_array(&self) -> [f64; 3] {
        [self.rect_x, self.rect_y, self.apex_x]
    }

    /// Largest pairwise difference.
    pub fn spread(&self) -> f64 {
        let v = self.as_array();
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

// The apex term m/(4(1+x)³) is m·2(1+x)/(2(1+x))³ divided by the apex
// abscissa 1+x; the coefficient ¼ checks out against the full system.
pub fn lambda_reduced(p: &FamilyParams) -> ReducedLambdas {
    let (x, y, m) = (p.x, p.y, p.m);
    let c = Cubes::new(x, y);
    ReducedLambdas {
        rect_x: 0.25 + 1.0 / (4.0 * c.diagonal) - x * m / c.near + (2.0 + x) * m / c.far,
        rect_y: 1.0 / (4.0 * y * y * y) + 1.0 / (4.0 * c.diagonal) + m / c.near + m / c.far,
        apex_x: 2.0 * x / (c.near * (1.0 + x))
            + 2.0 * (2.0 + x) / (c.far * (1.0 + x))
            + m / (4.0 * (1.0 + x).powi(3)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyEvaluation {
    pub x: f64,
    pub y: f64,
    pub m: Option<f64>,
    pub m1: f64,
    pub m2: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub lambdas: Option<ReducedLambdas>,
}

pub fn evaluate(x: f64, y: f64, m: Option<f64>) -> Result<FamilyEvaluation> {
    let m1 = mass_m1(x, y)?;
    let m2 = mass_m2(x, y)?;
    let lambdas = match m {
        Some(m) => Some(lambda_reduced(&FamilyParams::new(x, y, m)?)),
        None => None,
    };
    Ok(FamilyEvaluation {
        x,
        y,
        m,
        m1,
        m2,
        f: m1 - m2,
        lambdas,
    })
}
