use super::Matrix;
use crate::error::{Error, Result};

/// Order of the truncated Taylor series applied after scaling.
const SERIES_ORDER: usize = 18;
/// Target 1-norm for the scaled argument.
const SCALED_NORM: f64 = 0.5;

/// Returns `(e^{AT}, ∫₀ᵀ e^{Aτ} dτ)`.
///
/// Both come out of one exponential of the block matrix `[[A, I], [0, 0]]·T`:
/// the top-left block is `e^{AT}` and the top-right block is the integral.
pub fn expm_and_integral(a: &Matrix, t: f64) -> Result<(Matrix, Matrix)> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "matrix exponential of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !t.is_finite() || !a.is_finite() {
        return Err(Error::NonFinite("expm_and_integral input"));
    }
    if t <= 0.0 {
        return Err(Error::Domain(format!("horizon must be positive, got {t}")));
    }
    let n = a.rows();
    let mut aug = Matrix::zeros(2 * n, 2 * n);
    aug.set_block(0, 0, &a.scale(t));
    aug.set_block(0, n, &Matrix::identity(n).scale(t));
    let e = expm(&aug)?;
    Ok((e.block(0, 0, n, n), e.block(0, n, n, n)))
}

/// Scaling and squaring with a fixed-order Taylor series.
pub fn expm(a: &Matrix) -> Result<Matrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite("expm input"));
    }
    let norm = a.norm_1();
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(2f64.powi(-squarings));
    let n = a.rows();

    // Horner form: I + X(I + X/2(I + X/3(...)))
    let mut acc = Matrix::identity(n);
    for k in (1..=SERIES_ORDER).rev() {
        acc = scaled.matmul(&acc)?.scale(1.0 / k as f64);
        for i in 0..n {
            acc[(i, i)] += 1.0;
        }
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc)?;
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("expm result"));
    }
    Ok(acc)
}
