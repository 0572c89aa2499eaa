//! Polynomial and dense-matrix numerics: arithmetic, characteristic
//! polynomials, matrix exponentials with their integral, Routh-Hurwitz
//! tests and polynomial roots.

mod charpoly;
mod expm;
mod matrix;
mod polynomial;
mod roots;
mod routh;

pub use charpoly::char_poly;
pub use expm::{expm, expm_and_integral};
pub use matrix::Matrix;
pub use polynomial::{poly_mul, Polynomial, EPS_TRIM};
pub use roots::{poly_roots, RootReport, EPS_HURWITZ, EPS_ROOT, MAX_ITER};
pub use routh::{routh_hurwitz, EPS_PIVOT};
