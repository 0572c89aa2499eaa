use super::{Matrix, Polynomial};
use crate::error::{Error, Result};

/// Monic characteristic polynomial `det(sI - M)` by the Faddeev-LeVerrier
/// recursion.
///
/// The matrix is first balanced with a power-of-two diagonal similarity,
/// which leaves the characteristic polynomial unchanged bit for bit but keeps
/// the trace recursion from mixing wildly different magnitudes.
pub fn char_poly(m: &Matrix) -> Result<Polynomial> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "characteristic polynomial of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("char_poly input"));
    }
    let n = m.rows();
    let a = balance(m);
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.matmul(&mk)?;
        let c_prev = coeffs[n - k + 1];
        for i in 0..n {
            next[(i, i)] += c_prev;
        }
        let am = a.matmul(&next)?;
        coeffs[n - k] = -am.trace() / k as f64;
        mk = next;
    }
    Ok(Polynomial::new(coeffs))
}

/// Parlett-Reinsch balancing with radix 2.
pub(crate) fn balance(m: &Matrix) -> Matrix {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let n = m.rows();
    let mut a = m.clone();
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_2x2() {
        let p = char_poly(&Matrix::identity(2)).unwrap();
        assert_eq!(p.coeffs(), &[1.0, -2.0, 1.0]);
    }

    #[test]
    fn zero_2x2() {
        let p = char_poly(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!(p.coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn companion_recovers_coefficients() {
        // companion of s^2 + 3s + 2
        let m = Matrix::from_rows(&[&[0.0, 1.0], &[-2.0, -3.0]]);
        let p = char_poly(&m).unwrap();
        assert!(p.max_abs_coeff_error(&Polynomial::new(vec![2.0, 3.0, 1.0])) < 1e-14);
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            char_poly(&Matrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn balancing_preserves_trace() {
        let m = Matrix::from_rows(&[&[1.0, 1e8], &[1e-8, 2.0]]);
        let b = balance(&m);
        assert_eq!(b.trace(), 3.0);
        assert!(b.norm_max() < 1e4);
    }
}
