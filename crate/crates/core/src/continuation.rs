//! Tracing the branch `x = φ(y)` of `F(x, y) = m1(x, y) − m2(x, y) = 0`
//! through the hexagon `(x, y) = (1, √3)`.
//!
//! Every point is found by a bracketed, safeguarded Newton iteration in `x`
//! at fixed `y`, then realized as a configuration and checked against the
//! full CC residual. A trace walks outward from the anchor in both
//! directions until it leaves the requested range or the branch stops being
//! a valid, well-conditioned solution.

use serde::Serialize;

use crate::error::{CcError, Result};
use crate::family::{build_configuration, family_f, lambda_reduced, mass_m1, mass_m2, mass_m2_parts, FamilyParams};
use crate::numdiff::{central_difference, richardson_central};
use crate::potential::{cc_residual_direct, lambda_of};

pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_STEP: f64 = 0.01;
pub const MAX_STEP: f64 = 0.05;
/// `|∂F/∂x|` below this halts continuation.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;
/// Largest accepted direct CC residual on the curve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const NEWTON_FD_STEP: f64 = 1e-6;
const CERTIFICATE_FD_STEP: f64 = 1e-5;
const BRACKET_FACTOR: f64 = 8.0;
const BRACKET_SAMPLES: usize = 400;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionPoint {
    pub y: f64,
    pub x: f64,
    /// `m1 = m2` at the root.
    pub m: f64,
    /// `U / I` of the realized configuration.
    pub lambda: f64,
    #[serde(rename = "dFdx")]
    pub dfdx: f64,
    /// Direct CC residual of the realized configuration at `λ = U/I`.
    #[serde(rename = "residual")]
    pub residual_norm: f64,
    /// The search interval held more than one sign change of `F`.
    pub multi_root: bool,
}

impl SolutionPoint {
    pub fn params(&self) -> Result<FamilyParams> {
        FamilyParams::new(self.x, self.y, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    RangeExhausted,
    MNonpositive,
    #[serde(rename = "dFdx-degenerate")]
    DfdxDegenerate,
    DivisorSingular,
    RootLost,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::RangeExhausted => "range-exhausted",
            Termination::MNonpositive => "m-nonpositive",
            Termination::DfdxDegenerate => "dFdx-degenerate",
            Termination::DivisorSingular => "divisor-singular",
            Termination::RootLost => "root-lost",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTrace {
    /// Ascending in `y`.
    pub points: Vec<SolutionPoint>,
    /// Why the walk toward `y_min` stopped.
    pub lower_termination: Termination,
    /// Why the walk toward `y_max` stopped.
    pub upper_termination: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub step: f64,
    pub root_tolerance: f64,
    pub degeneracy_threshold: f64,
    pub residual_tolerance: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            root_tolerance: DEFAULT_ROOT_TOLERANCE,
            degeneracy_threshold: DEGENERACY_THRESHOLD,
            residual_tolerance: RESIDUAL_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IftCertificate {
    pub x: f64,
    pub y: f64,
    pub dm1_dx: f64,
    pub dm1_dx_error: f64,
    pub dm2_dx: f64,
    pub dm2_dx_error: f64,
    #[serde(rename = "dF_dx")]
    pub df_dx: f64,
    #[serde(rename = "dF_dx_error")]
    pub df_dx_error: f64,
}

impl IftCertificate {
    /// `∂F/∂x` is far enough from zero for the branch to be a graph over `y`.
    pub fn certifies(&self, threshold: f64) -> bool {
        self.df_dx.abs() >= threshold
    }
}

/// `(∂m1/∂x, ∂m2/∂x, ∂F/∂x)` by central differences at steps `h` and `h/2`,
/// `h = 1e-5 · max(1, |x|)`, extrapolated.
pub fn ift_certificate(x: f64, y: f64) -> Result<IftCertificate> {
    // evaluates both and surfaces domain or pole errors at the point itself
    family_f(x, y)?;
    let h = CERTIFICATE_FD_STEP * x.abs().max(1.0);
    let d1 = richardson_central(|t| mass_m1(t, y), x, h)?;
    let d2 = richardson_central(|t| mass_m2(t, y), x, h)?;
    Ok(IftCertificate {
        x,
        y,
        dm1_dx: d1.value,
        dm1_dx_error: d1.error,
        dm2_dx: d2.value,
        dm2_dx_error: d2.error,
        df_dx: d1.value - d2.value,
        df_dx_error: d1.error + d2.error,
    })
}

/// A sign change of `F` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
struct Bracket {
    lo: f64,
    f_lo: f64,
    hi: f64,
}

impl Bracket {
    fn distance_to(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

/// Sign changes of `F(·, y)` on a log grid over `[x_guess/8, 8 x_guess]`.
/// Intervals across which the `m2` divisor flips sign hold a pole, not a
/// root, and are skipped, as are intervals touching a singular sample.
fn find_brackets(y: f64, x_guess: f64) -> Result<Vec<Bracket>> {
    let lo = x_guess / BRACKET_FACTOR;
    let hi = x_guess * BRACKET_FACTOR;
    let ratio = (hi / lo).ln();
    let mut grid: Vec<f64> = (0..=BRACKET_SAMPLES)
        .map(|i| lo * (ratio * i as f64 / BRACKET_SAMPLES as f64).exp())
        .collect();
    grid.push(x_guess);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let samples: Vec<Option<(f64, f64)>> = grid
        .iter()
        .map(|&x| {
            let f = family_f(x, y).ok()?;
            let (_, divisor) = mass_m2_parts(x, y).ok()?;
            f.is_finite().then_some((f, divisor))
        })
        .collect();

    let mut brackets = Vec::new();
    for i in 0..grid.len() - 1 {
        let (Some((fa, da)), Some((fb, db))) = (samples[i], samples[i + 1]) else {
            continue;
        };
        if da.signum() != db.signum() {
            continue;
        }
        if fa == 0.0 {
            brackets.push(Bracket { lo: grid[i], f_lo: fa, hi: grid[i] });
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            brackets.push(Bracket { lo: grid[i], f_lo: fa, hi: grid[i + 1] });
        }
    }
    if let Some(Some((f, _))) = samples.last() {
        if *f == 0.0 {
            let x = *grid.last().expect("nonempty");
            brackets.push(Bracket { lo: x, f_lo: 0.0, hi: x });
        }
    }
    Ok(brackets)
}

/// Newton on `F(·, y)` with a central-difference slope, falling back to
/// bisection whenever the step leaves the bracket or is not at least half
/// as short as the step before it.
fn safeguarded_newton(y: f64, start: f64, bracket: Bracket, tol: f64) -> Result<f64> {
    let Bracket { mut lo, mut f_lo, mut hi, .. } = bracket;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let mut x = if start > lo && start < hi { start } else { 0.5 * (lo + hi) };
    let mut previous_step = hi - lo;
    for _ in 0..MAX_ITERATIONS {
        let f = family_f(x, y)?;
        if f.abs() < tol {
            return Ok(x);
        }
        if f.signum() == f_lo.signum() {
            lo = x;
            f_lo = f;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * x.abs() {
            return Err(CcError::RootLost {
                y,
                reason: format!("bracket collapsed at x = {x} with |F| = {:e} above {tol:e}", f.abs()),
            });
        }
        let h = NEWTON_FD_STEP * x.abs().max(1.0);
        let slope = central_difference(|t| family_f(t, y), x, h.min(0.5 * x)).ok();
        let newton = slope
            .filter(|d| d.is_finite() && *d != 0.0)
            .map(|d| x - f / d)
            .filter(|&xn| xn > lo && xn < hi && (xn - x).abs() < 0.5 * previous_step);
        let next = newton.unwrap_or(0.5 * (lo + hi));
        previous_step = (next - x).abs();
        x = next;
    }
    Err(CcError::RootLost {
        y,
        reason: format!("no convergence in {MAX_ITERATIONS} iterations"),
    })
}

/// Finds the root of `F(·, y)` nearest `x_guess` to `|F| < tol` and realizes
/// it as a configuration.
pub fn solve_phi(y: f64, x_guess: f64, tol: f64) -> Result<SolutionPoint> {
    if !(y.is_finite() && y > 1.0) {
        return Err(CcError::Domain(format!(
            "y = {y} must exceed 1 for a positive apex mass"
        )));
    }
    if !(x_guess.is_finite() && x_guess > 0.0) {
        return Err(CcError::Domain(format!("x_guess = {x_guess} must be positive")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CcError::Domain(format!("tolerance {tol} must be positive")));
    }

    let brackets = find_brackets(y, x_guess)?;
    let nearest = brackets
        .iter()
        .min_by(|a, b| a.distance_to(x_guess).total_cmp(&b.distance_to(x_guess)))
        .copied();
    let Some(bracket) = nearest else {
        // a pole at the guess itself is reported as such
        family_f(x_guess, y)?;
        return Err(CcError::NoBracket {
            y,
            lo: x_guess / BRACKET_FACTOR,
            hi: x_guess * BRACKET_FACTOR,
        });
    };
    let x = safeguarded_newton(y, x_guess, bracket, tol)?;
    let mut point = realize(x, y)?;
    point.multi_root = brackets.len() > 1;
    Ok(point)
}

fn realize(x: f64, y: f64) -> Result<SolutionPoint> {
    let m = mass_m1(x, y)?;
    if !(m > 0.0) {
        return Err(CcError::NonPositiveMass { x, y, m });
    }
    let dfdx = ift_certificate(x, y)?.df_dx;
    let config = build_configuration(&FamilyParams::new(x, y, m)?);
    let lambda = lambda_of(&config)?.lambda;
    let residual_norm = cc_residual_direct(&config, lambda)?.max_norm;
    Ok(SolutionPoint {
        y,
        x,
        m,
        lambda,
        dfdx,
        residual_norm,
        multi_root: false,
    })
}

pub fn trace_curve(y_min: f64, y_max: f64, step: f64) -> Result<CurveTrace> {
    trace_curve_with(
        y_min,
        y_max,
        TraceOptions {
            step,
            ..TraceOptions::default()
        },
    )
}

pub fn trace_curve_with(y_min: f64, y_max: f64, options: TraceOptions) -> Result<CurveTrace> {
    let anchor_y = 3f64.sqrt();
    if !(y_min > 1.0 && y_min <= anchor_y && anchor_y <= y_max && y_max.is_finite()) {
        return Err(CcError::Domain(format!(
            "need 1 < y_min <= √3 <= y_max, got [{y_min}, {y_max}]"
        )));
    }
    if !(options.step > 0.0 && options.step <= MAX_STEP) {
        return Err(CcError::Domain(format!(
            "step {} must lie in (0, {MAX_STEP}]",
            options.step
        )));
    }
    let anchor = solve_phi(anchor_y, 1.0, options.root_tolerance)
        .map_err(|e| CcError::AnchorFailure(e.to_string()))?;
    if let Some(reason) = reject(&anchor, &options) {
        return Err(CcError::AnchorFailure(format!(
            "anchor point rejected: {}",
            reason.as_str()
        )));
    }

    let (mut below, lower_termination) = march(&anchor, y_min, &options);
    let (above, upper_termination) = march(&anchor, y_max, &options);
    below.reverse();
    below.push(anchor);
    below.extend(above);
    Ok(CurveTrace {
        points: below,
        lower_termination,
        upper_termination,
    })
}

fn reject(point: &SolutionPoint, options: &TraceOptions) -> Option<Termination> {
    if !(point.m > 0.0) {
        Some(Termination::MNonpositive)
    } else if !(point.dfdx.abs() >= options.degeneracy_threshold) {
        Some(Termination::DfdxDegenerate)
    } else if !(point.residual_norm < options.residual_tolerance) {
        Some(Termination::RootLost)
    } else {
        None
    }
}

/// Walks from `start` toward `target` in steps of at most `options.step`,
/// landing exactly on `target`. Points are returned in walking order.
fn march(start: &SolutionPoint, target: f64, options: &TraceOptions) -> (Vec<SolutionPoint>, Termination) {
    let direction = if target >= start.y { 1.0 } else { -1.0 };
    let mut points: Vec<SolutionPoint> = Vec::new();
    let mut last = *start;
    let mut before_last: Option<SolutionPoint> = None;
    loop {
        let remaining = (target - last.y) * direction;
        if remaining <= options.step * 1e-9 {
            return (points, Termination::RangeExhausted);
        }
        let y = if remaining <= options.step { target } else { last.y + direction * options.step };
        let guess = match before_last {
            Some(prev) => last.x + (last.x - prev.x) / (last.y - prev.y) * (y - last.y),
            None => last.x,
        };
        let guess = if guess > 0.0 { guess } else { last.x };
        let point = match solve_phi(y, guess, options.root_tolerance) {
            Ok(p) => p,
            Err(CcError::Singular { .. }) => return (points, Termination::DivisorSingular),
            Err(CcError::NonPositiveMass { .. }) => return (points, Termination::MNonpositive),
            Err(_) => return (points, Termination::RootLost),
        };
        if let Some(reason) = reject(&point, options) {
            return (points, reason);
        }
        before_last = Some(last);
        last = point;
        points.push(point);
    }
}

/// Checks a traced point's three reduced `λ` values against each other and
/// against `U / I`; returns the largest deviation.
pub fn lambda_agreement(point: &SolutionPoint) -> Result<f64> {
    let reduced = lambda_reduced(&point.params()?).as_array();
    let mut worst: f64 = 0.0;
    for (i, a) in reduced.iter().enumerate() {
        worst = worst.max((a - point.lambda).abs());
        for b in &reduced[i + 1..] {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}
