use num_complex::Complex64;
use proptest::prelude::*;

use flatrack::poly_core::{expm, expm_and_integral, poly_roots, routh_hurwitz, Matrix, Polynomial};

/// Up to 8 roots, built from real roots and conjugate pairs whose real
/// parts have the requested sign.
fn roots(sign: f64, max_pairs: usize) -> impl Strategy<Value = Vec<Complex64>> {
    (
        prop::collection::vec(0.1f64..5.0, 0..=4),
        prop::collection::vec((0.1f64..5.0, 0.1f64..5.0), 0..=max_pairs),
    )
        .prop_filter("non-empty", |(r, c)| !r.is_empty() || !c.is_empty())
        .prop_map(move |(reals, pairs)| {
            let mut out: Vec<Complex64> = reals.iter().map(|&x| Complex64::new(sign * x, 0.0)).collect();
            for (re, im) in pairs {
                out.push(Complex64::new(sign * re, im));
                out.push(Complex64::new(sign * re, -im));
            }
            out
        })
}

fn matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, n * n)
        .prop_map(move |v| Matrix::from_row_major(n, n, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stable_products_pass_routh(rs in roots(-1.0, 2)) {
        let p = Polynomial::from_roots(&rs);
        prop_assert!(routh_hurwitz(&p).unwrap());
    }

    #[test]
    fn one_unstable_root_fails_routh(rs in roots(-1.0, 2), bad in 0.1f64..5.0) {
        let mut rs = rs;
        rs.push(Complex64::new(bad, 0.0));
        let p = Polynomial::from_roots(&rs);
        prop_assert!(!routh_hurwitz(&p).unwrap());
    }

    #[test]
    fn rhp_pair_fails_routh(rs in roots(-1.0, 1), re in 0.1f64..5.0, im in 0.1f64..5.0) {
        let mut rs = rs;
        rs.push(Complex64::new(re, im));
        rs.push(Complex64::new(re, -im));
        let p = Polynomial::from_roots(&rs);
        prop_assert!(!routh_hurwitz(&p).unwrap());
    }

    #[test]
    fn roots_reconstruct_polynomial(rs in roots(-1.0, 2)) {
        let p = Polynomial::from_roots(&rs);
        let rep = poly_roots(&p).unwrap();
        prop_assert_eq!(rep.roots.len(), rs.len());
        let back = Polynomial::from_roots(&rep.roots);
        let scale = p.max_abs_coeff();
        prop_assert!(back.max_abs_coeff_error(&p) / scale < 1e-8,
            "{} vs {}", back, p);
    }

    #[test]
    fn expm_time_derivative(a in matrix(3), t in 0.1f64..2.0) {
        let h = 1e-5;
        let hi = expm(&a.scale(t + h)).unwrap();
        let lo = expm(&a.scale(t - h)).unwrap();
        let fd = hi.sub(&lo).unwrap().scale(0.5 / h);
        let exact = a.matmul(&expm(&a.scale(t)).unwrap()).unwrap();
        let err = fd.sub(&exact).unwrap().norm_max() / exact.norm_max().max(1.0);
        prop_assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn integral_derivative_is_exponential(a in matrix(3), t in 0.1f64..2.0) {
        let h = 1e-5;
        let (_, hi) = expm_and_integral(&a, t + h).unwrap();
        let (_, lo) = expm_and_integral(&a, t - h).unwrap();
        let (e, _) = expm_and_integral(&a, t).unwrap();
        let fd = hi.sub(&lo).unwrap().scale(0.5 / h);
        prop_assert!(fd.sub(&e).unwrap().norm_max() < 1e-5 * e.norm_max().max(1.0));
    }
}
