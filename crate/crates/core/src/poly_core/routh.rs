use super::Polynomial;
use crate::error::{Error, Result};

/// Pivots at or below this fraction of the row scale count as zero.
pub const EPS_PIVOT: f64 = 1e-12;

/// Routh-Hurwitz test: `true` iff every root lies in the open left half-plane.
///
/// A vanishing first-column pivot (imaginary-axis roots or a symmetric root
/// pair) is reported as not Hurwitz.
pub fn routh_hurwitz(p: &Polynomial) -> Result<bool> {
    let n = match p.degree() {
        None => return Err(Error::Domain("Routh test of the zero polynomial".into())),
        Some(0) => return Err(Error::Domain("Routh test of a constant polynomial".into())),
        Some(n) => n,
    };
    if !p.coeffs().iter().all(|c| c.is_finite()) {
        return Err(Error::NonFinite("routh_hurwitz input"));
    }
    let q = balanced(p);
    let sign = q.leading().signum();
    // descending order, leading coefficient positive
    let desc: Vec<f64> = q.coeffs().iter().rev().map(|c| c * sign).collect();
    // necessary condition
    if desc.iter().any(|&c| c <= 0.0) {
        return Ok(false);
    }

    let width = n / 2 + 1;
    let mut upper: Vec<f64> = (0..width).map(|i| desc.get(2 * i).copied().unwrap_or(0.0)).collect();
    let mut lower: Vec<f64> = (0..width)
        .map(|i| desc.get(2 * i + 1).copied().unwrap_or(0.0))
        .collect();

    for _ in 1..=n {
        let scale = row_scale(&upper).max(row_scale(&lower));
        let pivot = lower[0];
        if pivot <= EPS_PIVOT * scale {
            return Ok(false);
        }
        let next: Vec<f64> = (0..width)
            .map(|i| {
                let a = upper.get(i + 1).copied().unwrap_or(0.0);
                let b = lower.get(i + 1).copied().unwrap_or(0.0);
                (pivot * a - upper[0] * b) / pivot
            })
            .collect();
        upper = lower;
        lower = next;
    }
    Ok(true)
}

fn row_scale(row: &[f64]) -> f64 {
    row.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Substitutes `s = 2^k σ` so the root magnitudes sit near one, then scales
/// the coefficients so the largest has unit magnitude. Both steps are exact
/// in binary floating point apart from the final division.
pub(crate) fn balanced(p: &Polynomial) -> Polynomial {
    balanced_with_scale(p).0
}

/// Like [`balanced`], also returning the variable scale `ρ` with `s = ρσ`.
pub(crate) fn balanced_with_scale(p: &Polynomial) -> (Polynomial, f64) {
    let Some(n) = p.degree() else {
        return (p.clone(), 1.0);
    };
    // lowest nonzero coefficient sets the geometric-mean root magnitude
    let (low, a_low) = p
        .coeffs()
        .iter()
        .enumerate()
        .find(|(_, c)| **c != 0.0)
        .map(|(i, c)| (i, *c))
        .unwrap_or((0, 1.0));
    let rho = if n > low {
        let mag = (a_low.abs() / p.leading().abs()).powf(1.0 / (n - low) as f64);
        2f64.powi(mag.log2().round() as i32)
    } else {
        1.0
    };
    let q = p.rescale_variable(rho);
    let m = q.max_abs_coeff();
    let m2 = 2f64.powi(m.log2().round() as i32);
    (q.scale(1.0 / m2), rho)
}
