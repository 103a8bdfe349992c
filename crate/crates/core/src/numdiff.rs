//! Central differences with Richardson extrapolation.

use crate::error::{CcError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// Difference between the last two extrapolation levels.
    pub error: f64,
}

pub fn central_difference<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Extrapolates central differences taken at `steps` to zero step size.
///
/// The central difference error is a series in `h²`, so the estimates are
/// treated as samples of a polynomial in `t = h²` and evaluated at `t = 0`
/// with Neville's scheme. Steps need not be geometric.
pub fn richardson<F>(f: F, x: f64, steps: &[f64]) -> Result<Extrapolated>
where
    F: Fn(f64) -> Result<f64>,
{
    if steps.len() < 2 {
        return Err(CcError::Domain("need at least two step sizes".into()));
    }
    if steps.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(CcError::Domain(format!("invalid step sizes {steps:?}")));
    }
    let t: Vec<f64> = steps.iter().map(|h| h * h).collect();
    let mut table = steps
        .iter()
        .map(|&h| central_difference(&f, x, h))
        .collect::<Result<Vec<f64>>>()?;
    let mut previous = table[table.len() - 1];
    for level in 1..steps.len() {
        previous = table[table.len() - 1];
        for i in (level..steps.len()).rev() {
            let (ti, tj) = (t[i], t[i - level]);
            table[i] = (ti * table[i - 1] - tj * table[i]) / (ti - tj);
        }
    }
    let value = table[steps.len() - 1];
    Ok(Extrapolated {
        value,
        error: (value - previous).abs(),
    })
}

/// Two-level extrapolation from steps `h` and `h/2`.
pub fn richardson_central<F>(f: F, x: f64, h: f64) -> Result<Extrapolated>
where
    F: Fn(f64) -> Result<f64>,
{
    richardson(f, x, &[h, 0.5 * h])
}
