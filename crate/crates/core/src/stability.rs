//! α-stability certificates for linear plants under the Newton-Raphson flow
//! controller.
//!
//! The closed loop of a linear plant `ẋ = Ax + Bu, y = Cx` with the exact
//! linear predictor is again linear, with a system matrix that is affine in
//! the speedup factor α. Its characteristic polynomial `P_α(s)` is therefore
//! a polynomial of degree at most `m` in α. Writing `P_i` for the coefficient
//! of `α^{m-i}`, the loop is α-stable if both `P_0` and
//! `Q(s) = s^{-n} Σ_i lead(P_i)` are Hurwitz.
//!
//! Two routes produce `P_α`: a closed form valid for chains of integrators,
//! and a generic route that samples `det(sI - M(α))` at `m + 1` values of α
//! and interpolates. [`certify_trivial`] runs both and checks they agree.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly_core::{
    char_poly, expm_and_integral, poly_roots, routh_hurwitz, Matrix, Polynomial, RootReport,
    EPS_TRIM,
};

/// Condition-number ceiling for the predictor gain `C∫₀ᵀe^{Aτ}dτ B`.
pub const EPS_SING: f64 = 1e10;
/// Relative coefficient tolerance between the closed-form and generic routes.
pub const AGREEMENT_TOL: f64 = 1e-8;

/// Linear plant `(A, B, C)` with as many inputs as outputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearSystem {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

impl LinearSystem {
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        let n = a.rows();
        let m = b.cols();
        let mut problems = Vec::new();
        if !a.is_square() {
            problems.push(format!("A is {}x{}, expected square", a.rows(), a.cols()));
        }
        if b.rows() != n {
            problems.push(format!("B has {} rows, expected {n}", b.rows()));
        }
        if c.cols() != n {
            problems.push(format!("C has {} columns, expected {n}", c.cols()));
        }
        if c.rows() != m {
            problems.push(format!(
                "C has {} rows but B has {m} columns; the plant must be square",
                c.rows()
            ));
        }
        if n == 0 || m == 0 {
            problems.push("empty system".into());
        }
        if !problems.is_empty() {
            return Err(Error::Dimension(problems.join("; ")));
        }
        Ok(Self { a, b, c })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    /// `(e^{AT}, C∫₀ᵀe^{Aτ}dτ B)`.
    pub fn predictor_matrices(&self, horizon: f64) -> Result<(Matrix, Matrix)> {
        let (e, int) = expm_and_integral(&self.a, horizon)?;
        let gain = self.c.matmul(&int)?.matmul(&self.b)?;
        Ok((e, gain))
    }

    /// Closed-loop matrix of `[x; u]` for a given α.
    pub fn closed_loop_matrix(&self, horizon: f64, alpha: f64) -> Result<Matrix> {
        let (e, gain) = self.predictor_matrices(horizon)?;
        let inv = checked_gain_inverse(&gain)?;
        self.assemble_closed_loop(&inv.matmul(&self.c)?.matmul(&e)?, alpha)
    }

    fn assemble_closed_loop(&self, feedback: &Matrix, alpha: f64) -> Result<Matrix> {
        let (n, m) = (self.n(), self.m());
        let mut big = Matrix::zeros(n + m, n + m);
        big.set_block(0, 0, &self.a);
        big.set_block(0, n, &self.b);
        big.set_block(n, 0, &feedback.scale(-alpha));
        big.set_block(n, n, &Matrix::identity(m).scale(-alpha));
        Ok(big)
    }
}

fn checked_gain_inverse(gain: &Matrix) -> Result<Matrix> {
    let singular = |condition| Error::Singular {
        what: "predictor gain C·∫₀ᵀe^{Aτ}dτ·B".into(),
        condition,
    };
    let (inv, cond) = gain
        .inverse_with_condition()
        .map_err(|_| singular(f64::INFINITY))?;
    if !(cond <= EPS_SING) {
        return Err(singular(cond));
    }
    Ok(inv)
}

/// Chain-of-integrators flat dynamics: `m` outputs, state `y … y^{(k)}`,
/// input `y^{(k+1)}`, prediction horizon `T` and speedup factor α.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrivialFlatSpec {
    pub m: usize,
    pub k: usize,
    pub horizon: f64,
    pub alpha: f64,
}

impl TrivialFlatSpec {
    pub fn new(m: usize, k: usize, horizon: f64, alpha: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if m == 0 {
            problems.push("m must be at least 1".to_string());
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            problems.push(format!("horizon T must be positive, got {horizon}"));
        }
        if !(alpha > 1.0 && alpha.is_finite()) {
            problems.push(format!("alpha must exceed 1, got {alpha}"));
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        Ok(Self {
            m,
            k,
            horizon,
            alpha,
        })
    }

    /// State dimension `m(k+1)`.
    pub fn n(&self) -> usize {
        self.m * (self.k + 1)
    }

    /// `(k+1)!/T^{k+1}`, the inverse of the predictor's input gain.
    pub fn gain(&self) -> f64 {
        factorial(self.k + 1) / self.horizon.powi(self.k as i32 + 1)
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Block shift matrix with `I_m` on the block superdiagonal, `B` the last
/// block column of the identity and `C` the first block row.
#[allow(non_snake_case)]
pub fn trivial_ABC(spec: &TrivialFlatSpec) -> LinearSystem {
    let (m, n) = (spec.m, spec.n());
    let mut a = Matrix::zeros(n, n);
    for blk in 0..spec.k {
        a.set_block(blk * m, (blk + 1) * m, &Matrix::identity(m));
    }
    let mut b = Matrix::zeros(n, m);
    b.set_block(n - m, 0, &Matrix::identity(m));
    let mut c = Matrix::zeros(m, n);
    c.set_block(0, 0, &Matrix::identity(m));
    LinearSystem { a, b, c }
}

/// Same as [`trivial_ABC`] but with bottom block row `-K_1 I … -K_{k+1} I`,
/// giving each output the characteristic polynomial
/// `s^{k+1} + K_{k+1}s^k + … + K_1`.
#[allow(non_snake_case)]
pub fn gain_assigned_A(spec: &TrivialFlatSpec, gains: &[f64]) -> Result<Matrix> {
    if gains.len() != spec.k + 1 {
        return Err(Error::Dimension(format!(
            "expected {} gains for k = {}, got {}",
            spec.k + 1,
            spec.k,
            gains.len()
        )));
    }
    let m = spec.m;
    let mut a = trivial_ABC(spec).a;
    let last = spec.k * m;
    for (j, &g) in gains.iter().enumerate() {
        for i in 0..m {
            a[(last + i, j * m + i)] = -g;
        }
    }
    Ok(a)
}

/// `s^{k+2} + α(k+1)!/T^{k+1} Σ_{i=0}^{k+1} Tⁱ/i! sⁱ`, the factor whose
/// m-th power is `P_α` for the trivial system.
pub fn closed_form_base(spec: &TrivialFlatSpec, alpha: f64) -> Polynomial {
    let k = spec.k;
    let gain = alpha * spec.gain();
    let mut coeffs = Vec::with_capacity(k + 3);
    let mut term = 1.0;
    for i in 0..=k + 1 {
        if i > 0 {
            term *= spec.horizon / i as f64;
        }
        coeffs.push(gain * term);
    }
    coeffs.push(1.0);
    Polynomial::new(coeffs)
}

/// Closed-form `P_α(s)` of the trivial system at `spec.alpha`.
pub fn closed_form_p_alpha(spec: &TrivialFlatSpec) -> Polynomial {
    closed_form_p_alpha_at(spec, spec.alpha)
}

pub fn closed_form_p_alpha_at(spec: &TrivialFlatSpec, alpha: f64) -> Polynomial {
    closed_form_base(spec, alpha).pow(spec.m as u32)
}

/// The α-graded pieces of `P_α`: `p[i]` multiplies `α^{m-i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaDecomposition {
    pub p: Vec<Polynomial>,
}

impl AlphaDecomposition {
    pub fn m(&self) -> usize {
        self.p.len() - 1
    }

    pub fn p0(&self) -> &Polynomial {
        &self.p[0]
    }

    /// `Σ_i P_i α^{m-i}`.
    pub fn reconstruct(&self, alpha: f64) -> Polynomial {
        let m = self.m();
        self.p
            .iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (i, pi)| {
                &acc + &pi.scale(alpha.powi((m - i) as i32))
            })
    }
}

/// Interpolation nodes `α_j = j + 1`.
fn alpha_nodes(m: usize) -> Vec<f64> {
    (0..=m).map(|j| (j + 1) as f64).collect()
}

/// Recovers `P_0 … P_m` by sampling the closed-loop characteristic
/// polynomial at `m + 1` values of α and interpolating each s-coefficient.
///
/// The loop matrix is affine in α with α confined to `m` rows, so every
/// coefficient is a polynomial of degree at most `m` in α and the
/// interpolation is exact up to rounding.
pub fn generic_p_alpha_decomposition(
    sys: &LinearSystem,
    horizon: f64,
) -> Result<AlphaDecomposition> {
    let (m, n) = (sys.m(), sys.n());
    let (e, gain) = sys.predictor_matrices(horizon)?;
    let inv = checked_gain_inverse(&gain)?;
    let feedback = inv.matmul(&sys.c)?.matmul(&e)?;

    let nodes = alpha_nodes(m);
    let samples = nodes
        .iter()
        .map(|&alpha| char_poly(&sys.assemble_closed_loop(&feedback, alpha)?))
        .collect::<Result<Vec<_>>>()?;

    let basis = lagrange_basis(&nodes);
    let mut p = vec![vec![0.0; n + m + 1]; m + 1];
    #[allow(clippy::needless_range_loop)]
    for d in 0..=n + m {
        let mut graded = vec![0.0; m + 1];
        let mut scale: f64 = 0.0;
        for (sample, (num, den)) in samples.iter().zip(&basis) {
            let v = sample.coeff(d);
            scale = scale.max(v.abs());
            for (pow, l) in num.coeffs().iter().enumerate() {
                graded[pow] += v * l / den;
            }
        }
        // interpolation residue is not a coefficient
        for (pow, g) in graded.into_iter().enumerate() {
            if g.abs() > EPS_TRIM * scale {
                p[m - pow][d] = g;
            }
        }
    }
    Ok(AlphaDecomposition {
        p: p.into_iter().map(Polynomial::new).collect(),
    })
}

/// Lagrange basis over `nodes` as (numerator polynomial, denominator). For
/// integer nodes the numerators have exact integer coefficients.
fn lagrange_basis(nodes: &[f64]) -> Vec<(Polynomial, f64)> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold((Polynomial::one(), 1.0), |(num, den), (_, &xi)| {
                    (&num * &Polynomial::new(vec![-xi, 1.0]), den * (xj - xi))
                })
        })
        .collect()
}

/// Highest-degree monomial of `p`, ignoring coefficients below the relative
/// trim floor. The floor is applied after an exact power-of-two rescaling of
/// `s`, so a unit leading coefficient is not swamped by a huge constant term.
pub fn highest_degree_term(p: &Polynomial) -> Option<Polynomial> {
    let d = p.degree()?;
    let low = p.coeffs().iter().position(|c| *c != 0.0)?;
    let rho = if d > low {
        let mag = (p.coeff(low).abs() / p.leading().abs()).powf(1.0 / (d - low) as f64);
        2f64.powi(mag.log2().round() as i32)
    } else {
        1.0
    };
    let scaled = p.rescale_variable(rho);
    let floor = EPS_TRIM * scaled.max_abs_coeff();
    let top = (0..=d).rev().find(|&i| scaled.coeff(i).abs() > floor)?;
    Some(Polynomial::monomial(p.coeff(top), top))
}

/// `Q(s) = s^{-n} Σ_i P̃_i(s)` together with the `P̃_i`.
pub fn extract_q_with_terms(
    p_list: &[Polynomial],
    n: usize,
) -> Result<(Polynomial, Vec<Polynomial>)> {
    let tilde = p_list
        .iter()
        .enumerate()
        .map(|(i, pi)| {
            highest_degree_term(pi).ok_or_else(|| {
                Error::Inconsistent(format!(
                    "P_{i} vanishes, its highest-degree term is undefined"
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sum = tilde.iter().fold(Polynomial::zero(), |acc, t| &acc + t);
    let scale = sum.max_abs_coeff();
    if let Some((d, c)) = sum
        .coeffs()
        .iter()
        .enumerate()
        .take(n)
        .find(|(_, c)| c.abs() > EPS_TRIM * scale)
    {
        return Err(Error::Inconsistent(format!(
            "Σ P̃_i is not divisible by s^{n}: coefficient {c:e} at degree {d}"
        )));
    }
    let q = Polynomial::new(sum.coeffs().iter().skip(n).copied().collect());
    Ok((q, tilde))
}

pub fn extract_q(p_list: &[Polynomial], n: usize) -> Result<Polynomial> {
    extract_q_with_terms(p_list, n).map(|(q, _)| q)
}

/// Outcome of the sufficient α-stability test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityCertificate {
    /// The degree-(k+2) factor of the closed form; trivial systems only.
    pub p_alpha_base: Option<Polynomial>,
    pub p0: Polynomial,
    pub p_list: Vec<Polynomial>,
    pub p_tilde: Vec<Polynomial>,
    pub q: Polynomial,
    pub p0_hurwitz: bool,
    pub q_hurwitz: bool,
    pub alpha_stable_sufficient: bool,
    pub roots_p0: Option<RootReport>,
    pub roots_q: Option<RootReport>,
    /// Max relative coefficient gap between the closed-form and generic
    /// `P_α`; trivial systems only.
    pub agreement_residual: Option<f64>,
}

/// Runs the decomposition, extracts `P_0` and `Q`, and applies the Routh
/// test to both. The Routh verdict is authoritative; root reports are
/// attached when the root finder converges.
pub fn certify(sys: &LinearSystem, horizon: f64) -> Result<StabilityCertificate> {
    let dec = generic_p_alpha_decomposition(sys, horizon)?;
    let (q, p_tilde) = extract_q_with_terms(&dec.p, sys.n())?;
    let p0 = dec.p0().clone();
    if p0.degree().unwrap_or(0) == 0 {
        return Err(Error::Inconsistent(format!(
            "P_0 = {p0} has no roots to test"
        )));
    }
    let p0_hurwitz = routh_hurwitz(&p0)?;
    // a constant Q has no roots and imposes no condition
    let q_hurwitz = match q.degree() {
        Some(0) => true,
        _ => routh_hurwitz(&q)?,
    };
    let roots_q = match q.degree() {
        Some(0) => None,
        _ => poly_roots(&q).ok(),
    };
    Ok(StabilityCertificate {
        p_alpha_base: None,
        roots_p0: poly_roots(&p0).ok(),
        roots_q,
        p0,
        p_list: dec.p,
        p_tilde,
        q,
        p0_hurwitz,
        q_hurwitz,
        alpha_stable_sufficient: p0_hurwitz && q_hurwitz,
        agreement_residual: None,
    })
}

/// [`certify`] on the trivial system, cross-checked against the closed form
/// at `spec.alpha`.
pub fn certify_trivial(spec: &TrivialFlatSpec) -> Result<StabilityCertificate> {
    let sys = trivial_ABC(spec);
    let mut cert = certify(&sys, spec.horizon)?;
    let generic = AlphaDecomposition {
        p: cert.p_list.clone(),
    }
    .reconstruct(spec.alpha);
    let closed = closed_form_p_alpha(spec);
    let residual = generic.max_rel_coeff_error(&closed);
    if !(residual <= AGREEMENT_TOL) {
        return Err(Error::Inconsistent(format!(
            "generic and closed-form P_α disagree (relative residual {residual:e})"
        )));
    }
    cert.p_alpha_base = Some(closed_form_base(spec, spec.alpha));
    cert.agreement_residual = Some(residual);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: usize, k: usize, t: f64) -> TrivialFlatSpec {
        TrivialFlatSpec::new(m, k, t, 2.0).unwrap()
    }

    #[test]
    fn single_integrator() {
        let sys = trivial_ABC(&spec(1, 0, 1.0));
        assert_eq!(sys.a, Matrix::zeros(1, 1));
        assert_eq!(sys.b, Matrix::identity(1));
        assert_eq!(sys.c, Matrix::identity(1));
    }

    #[test]
    fn two_output_double_integrator() {
        let sys = trivial_ABC(&spec(2, 1, 1.0));
        let mut a = Matrix::zeros(4, 4);
        a.set_block(0, 2, &Matrix::identity(2));
        assert_eq!(sys.a, a);
        let mut b = Matrix::zeros(4, 2);
        b.set_block(2, 0, &Matrix::identity(2));
        assert_eq!(sys.b, b);
        let mut c = Matrix::zeros(2, 4);
        c.set_block(0, 0, &Matrix::identity(2));
        assert_eq!(sys.c, c);
    }

    #[test]
    fn shift_is_nilpotent() {
        let a = trivial_ABC(&spec(1, 3, 1.0)).a;
        let a2 = a.matmul(&a).unwrap();
        let a3 = a2.matmul(&a).unwrap();
        assert!(a3.norm_max() > 0.0);
        assert_eq!(a3.matmul(&a).unwrap(), Matrix::zeros(4, 4));
    }

    #[test]
    fn closed_form_examples() {
        let s = TrivialFlatSpec { m: 1, k: 0, horizon: 1.0, alpha: 2.0 };
        assert_eq!(closed_form_p_alpha(&s).coeffs(), &[2.0, 2.0, 1.0]);

        let s2 = TrivialFlatSpec { m: 2, ..s };
        let base = Polynomial::new(vec![2.0, 2.0, 1.0]);
        assert_eq!(closed_form_p_alpha(&s2), &base * &base);

        let s3 = TrivialFlatSpec { m: 1, k: 1, horizon: 0.5, alpha: 1.0 };
        let p = closed_form_p_alpha(&s3);
        assert!(p.max_abs_coeff_error(&Polynomial::new(vec![8.0, 4.0, 1.0, 1.0])) < 1e-14);
    }

    #[test]
    fn decomposition_single_integrator() {
        let dec = generic_p_alpha_decomposition(&trivial_ABC(&spec(1, 0, 1.0)), 1.0).unwrap();
        assert!(dec.p[0].max_abs_coeff_error(&Polynomial::new(vec![1.0, 1.0])) < 1e-12);
        assert!(dec.p[1].max_abs_coeff_error(&Polynomial::new(vec![0.0, 0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn decomposition_scalar_stable_plant() {
        // det [[s+1, -1], [α e⁻¹/d, s+α]] with d = 1 - e⁻¹
        let sys = LinearSystem::new(
            Matrix::from_rows(&[&[-1.0]]),
            Matrix::identity(1),
            Matrix::identity(1),
        )
        .unwrap();
        let dec = generic_p_alpha_decomposition(&sys, 1.0).unwrap();
        let d = 1.0 - (-1.0f64).exp();
        assert!(dec.p[0].max_abs_coeff_error(&Polynomial::new(vec![1.0 / d, 1.0])) < 1e-12);
        assert!(dec.p[1].max_abs_coeff_error(&Polynomial::new(vec![0.0, 1.0, 1.0])) < 1e-12);
        // interpolation is exact in α: check at a node that was not sampled
        let direct = char_poly(&sys.closed_loop_matrix(1.0, 7.5).unwrap()).unwrap();
        assert!(dec.reconstruct(7.5).max_abs_coeff_error(&direct) < 1e-10);
    }

    #[test]
    fn q_from_single_integrator() {
        let p = vec![Polynomial::new(vec![1.0, 1.0]), Polynomial::monomial(1.0, 2)];
        let (q, tilde) = extract_q_with_terms(&p, 1).unwrap();
        assert_eq!(tilde[0], Polynomial::monomial(1.0, 1));
        assert_eq!(q.coeffs(), &[1.0, 1.0]);
    }

    #[test]
    fn q_two_outputs() {
        let dec = generic_p_alpha_decomposition(&trivial_ABC(&spec(2, 0, 1.0)), 1.0).unwrap();
        let q = extract_q(&dec.p, 2).unwrap();
        assert!(q.max_abs_coeff_error(&Polynomial::new(vec![1.0, 2.0, 1.0])) < 1e-9);
    }

    #[test]
    fn vanishing_p_i_is_inconsistent() {
        let p = vec![Polynomial::new(vec![1.0, 1.0]), Polynomial::zero()];
        assert!(matches!(extract_q(&p, 1), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn low_degree_tilde_is_inconsistent() {
        let p = vec![Polynomial::constant(1.0), Polynomial::monomial(1.0, 2)];
        assert!(matches!(extract_q(&p, 1), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn certify_examples() {
        for m in 1..=3 {
            for t in [0.1, 1.0] {
                let c = certify_trivial(&spec(m, 3, t)).unwrap();
                assert!(c.alpha_stable_sufficient, "m={m} T={t}");
                let c = certify_trivial(&spec(m, 4, t)).unwrap();
                assert!(!c.p0_hurwitz && !c.alpha_stable_sufficient);
                assert!(c.q_hurwitz);
            }
        }
        let c = certify_trivial(&spec(2, 0, 0.02)).unwrap();
        assert!(c.alpha_stable_sufficient);
        let roots = c.roots_p0.unwrap();
        // double root: resolved to about sqrt(eps) relative
        for z in roots.roots {
            assert!((z + 50.0).norm() < 1e-4, "{z}");
        }
    }

    #[test]
    fn gain_assignment() {
        let a = gain_assigned_A(&spec(1, 0, 1.0), &[1.0]).unwrap();
        assert_eq!(a, Matrix::from_rows(&[&[-1.0]]));

        let a = gain_assigned_A(&spec(1, 1, 1.0), &[2.0, 3.0]).unwrap();
        assert_eq!(a, Matrix::from_rows(&[&[0.0, 1.0], &[-2.0, -3.0]]));
        let cp = char_poly(&a).unwrap();
        assert!(cp.max_abs_coeff_error(&Polynomial::new(vec![2.0, 3.0, 1.0])) < 1e-14);
        assert!(routh_hurwitz(&cp).unwrap());

        assert!(gain_assigned_A(&spec(1, 1, 1.0), &[1.0]).is_err());
    }

    #[test]
    fn gain_assigned_k4_certifies() {
        let s = TrivialFlatSpec::new(1, 4, 1.0, 2.0).unwrap();
        let a = gain_assigned_A(&s, &[1.0, 5.0, 10.0, 10.0, 5.0]).unwrap();
        assert!(routh_hurwitz(&char_poly(&a).unwrap()).unwrap());
        let base = trivial_ABC(&s);
        let sys = LinearSystem::new(a, base.b, base.c).unwrap();
        let cert = certify(&sys, 1.0).unwrap();
        assert!(cert.alpha_stable_sufficient, "{cert:?}");
    }

    #[test]
    fn singular_gain_is_named() {
        // C B = 0 and C A B = 0: the predictor gain vanishes
        let sys = LinearSystem::new(
            Matrix::zeros(1, 1),
            Matrix::identity(1),
            Matrix::zeros(1, 1),
        )
        .unwrap();
        match generic_p_alpha_decomposition(&sys, 1.0) {
            Err(Error::Singular { what, .. }) => assert!(what.contains("predictor gain")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dimension_checks() {
        assert!(LinearSystem::new(Matrix::zeros(2, 2), Matrix::zeros(2, 1), Matrix::zeros(2, 2))
            .is_err());
        assert!(TrivialFlatSpec::new(1, 0, 1.0, 1.0).is_err());
        assert!(TrivialFlatSpec::new(1, 0, 0.0, 2.0).is_err());
    }
}
