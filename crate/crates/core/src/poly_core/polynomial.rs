use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative floor used when trimming numerically-zero high-order coefficients.
pub const EPS_TRIM: f64 = 1e-12;

/// Real-coefficient univariate polynomial, coefficients in ascending degree
/// order (`coeffs[i]` multiplies `s^i`).
///
/// Exact trailing zeros are always removed, so the zero polynomial is stored
/// as an empty coefficient vector and its degree is `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c * s^degree`
    pub fn monomial(c: f64, degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// Monic polynomial with the given roots. Complex roots are expected to
    /// come in conjugate pairs; the imaginary residue is dropped.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, &a) in acc.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            acc = next;
        }
        Self::new(acc.into_iter().map(|c| c.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops trailing coefficients whose magnitude is at most `eps` times the
    /// largest coefficient magnitude.
    pub fn trimmed(&self, eps: f64) -> Self {
        let floor = eps * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.abs() <= floor) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// Substitutes `s -> k*s`, i.e. multiplies coefficient `i` by `k^i`.
    pub fn rescale_variable(&self, k: f64) -> Self {
        let mut f = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * f;
                f *= k;
                out
            })
            .collect();
        Self::new(coeffs)
    }

    /// Max over coefficients of `|self_i - other_i| / |other_i|`. Coefficients
    /// where `other` is zero compare absolutely.
    pub fn max_rel_coeff_error(&self, other: &Polynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| {
                let (a, b) = (self.coeff(i), other.coeff(i));
                let d = (a - b).abs();
                if b == 0.0 {
                    d
                } else {
                    d / b.abs()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Max over coefficients of `|self_i - other_i|`.
    pub fn max_abs_coeff_error(&self, other: &Polynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).abs())
            .fold(0.0, f64::max)
    }
}

/// Convolution of the coefficient sequences.
pub fn poly_mul(p: &Polynomial, q: &Polynomial) -> Polynomial {
    if p.is_zero() || q.is_zero() {
        return Polynomial::zero();
    }
    let mut out = vec![0.0; p.coeffs.len() + q.coeffs.len() - 1];
    for (i, a) in p.coeffs.iter().enumerate() {
        for (j, b) in q.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    Polynomial::new(out)
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        poly_mul(self, rhs)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}s")?,
                _ => write!(f, "{a}s^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_square() {
        let p = Polynomial::new(vec![1.0, 1.0]);
        assert_eq!(poly_mul(&p, &p).coeffs(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn zero_annihilates() {
        let p = Polynomial::new(vec![3.0, -1.0, 2.0]);
        assert!(poly_mul(&p, &Polynomial::zero()).is_zero());
        assert!(poly_mul(&Polynomial::zero(), &p).is_zero());
        assert_eq!(Polynomial::zero().degree(), None);
        assert_eq!(Polynomial::new(vec![0.0, 0.0]).degree(), None);
    }

    #[test]
    fn horizon_factor_squared() {
        let p = Polynomial::new(vec![1.0, 0.8]);
        let sq = poly_mul(&p, &p);
        let expect = [1.0, 1.6, 0.64];
        for (a, b) in sq.coeffs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(sq.degree(), Some(2));
    }

    #[test]
    fn trimming_is_relative() {
        let p = Polynomial::new(vec![1.0, 2.0, 1e-14, 3e-13]);
        assert_eq!(p.trimmed(EPS_TRIM).degree(), Some(1));
        let q = Polynomial::new(vec![1.0, 2.0, 1e-9]);
        assert_eq!(q.trimmed(EPS_TRIM).degree(), Some(2));
    }

    #[test]
    fn from_roots_expands() {
        let p = Polynomial::from_roots(&[Complex64::new(-1.0, 0.0), Complex64::new(-2.0, 0.0)]);
        assert_eq!(p.coeffs(), &[2.0, 3.0, 1.0]);
    }

    #[test]
    fn display_reads_naturally() {
        let p = Polynomial::new(vec![2.0, -3.0, 1.0]);
        assert_eq!(p.to_string(), "1s^2 - 3s + 2");
    }
}
