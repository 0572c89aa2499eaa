use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::routh::balanced_with_scale;
use super::Polynomial;
use crate::error::{Error, Result};

pub const EPS_ROOT: f64 = 1e-10;
pub const MAX_ITER: usize = 200;
const FLOOR_STEPS: u8 = 3;
/// Roots with real part at or above `-EPS_HURWITZ` are treated as marginal.
pub const EPS_HURWITZ: f64 = 1e-9;

/// All complex roots of a polynomial plus the derived stability verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootReport {
    #[serde(serialize_with = "roots_as_pairs")]
    pub roots: Vec<Complex64>,
    pub max_real_part: f64,
    pub hurwitz: bool,
}

impl RootReport {
    fn from_roots(mut roots: Vec<Complex64>) -> Self {
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let max_real_part = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        Self {
            hurwitz: max_real_part < -EPS_HURWITZ,
            roots,
            max_real_part,
        }
    }
}

fn roots_as_pairs<S: Serializer>(roots: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(roots.iter().map(|z| [z.re, z.im]))
}

/// Aberth-Ehrlich simultaneous iteration.
///
/// Starts from a rotated circle of radius given by the Cauchy bound. A root
/// estimate is considered settled once its update drops below `EPS_ROOT`
/// (relative to its magnitude), or after `FLOOR_STEPS` further steps once the
/// residual has sunk into the rounding floor of Horner evaluation. Stopping
/// right at the floor leaves near-multiple roots off by about
/// noise/|p'|; the extra steps let the repulsion term pull the cluster apart.
pub fn poly_roots(p: &Polynomial) -> Result<RootReport> {
    match p.degree() {
        None | Some(0) => {
            return Err(Error::Domain(
                "root finding needs a polynomial of degree >= 1".into(),
            ))
        }
        _ => {}
    }
    if !p.coeffs().iter().all(|c| c.is_finite()) {
        return Err(Error::NonFinite("poly_roots input"));
    }

    // zero roots factor out exactly
    let zeros = p.coeffs().iter().take_while(|c| **c == 0.0).count();
    let reduced = Polynomial::new(p.coeffs()[zeros..].to_vec());
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if reduced.degree().unwrap_or(0) > 0 {
        let (q, rho) = balanced_with_scale(&reduced);
        roots.extend(aberth(&q)?.into_iter().map(|z| z * rho));
    }
    Ok(RootReport::from_roots(roots))
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    let n = p.degree().expect("nonzero");
    let monic = p.scale(1.0 / p.leading());
    let dp = monic.derivative();
    let abs_coeffs = Polynomial::new(monic.coeffs().iter().map(|c| c.abs()).collect());

    let cauchy = 1.0 + monic.coeffs()[..n].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(cauchy, angle)
        })
        .collect();
    let mut done = vec![false; n];
    let mut at_floor = vec![0u8; n];
    let mut max_update = f64::INFINITY;

    for _ in 0..MAX_ITER {
        max_update = 0.0;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let zk = z[k];
            let pv = monic.eval_complex(zk);
            let noise = 4.0 * (n as f64 + 1.0) * f64::EPSILON * abs_coeffs.eval(zk.norm());
            if pv.norm() <= noise {
                at_floor[k] += 1;
                if pv.norm() == 0.0 || at_floor[k] > FLOOR_STEPS {
                    done[k] = true;
                    continue;
                }
            }
            let ratio = pv / dp.eval_complex(zk);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (zk - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !w.is_finite() {
                continue;
            }
            z[k] = zk - w;
            let rel = w.norm() / zk.norm().max(1.0);
            max_update = f64::max(max_update, rel);
            if rel < EPS_ROOT {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(conjugate_cleanup(z));
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        max_update,
        best: z,
    })
}

/// Snaps imaginary parts that are pure rounding residue to zero.
fn conjugate_cleanup(z: Vec<Complex64>) -> Vec<Complex64> {
    z.into_iter()
        .map(|r| {
            if r.im.abs() <= 1e-12 * r.norm().max(1.0) {
                Complex64::new(r.re, 0.0)
            } else {
                r
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(r: &RootReport) -> Vec<f64> {
        r.roots.iter().map(|z| z.re).collect()
    }

    #[test]
    fn near_double_root_reconstructs() {
        let rs = [
            Complex64::new(-3.760504515068242, 0.0),
            Complex64::new(-4.711985960563478, 0.0),
            Complex64::new(-4.951858847818244, 0.0),
            Complex64::new(-4.708810452845745, 0.0),
            Complex64::new(-3.8853937065621755, 1.2599093401888468),
            Complex64::new(-3.8853937065621755, -1.2599093401888468),
        ];
        let p = Polynomial::from_roots(&rs);
        let back = Polynomial::from_roots(&poly_roots(&p).unwrap().roots);
        assert!(back.max_abs_coeff_error(&p) / p.max_abs_coeff() < 1e-8);
    }

    #[test]
    fn factorable_quadratic() {
        let r = poly_roots(&Polynomial::new(vec![2.0, 3.0, 1.0])).unwrap();
        let re = sorted_re(&r);
        assert!((re[0] + 2.0).abs() < 1e-12 && (re[1] + 1.0).abs() < 1e-12);
        assert!(r.roots.iter().all(|z| z.im == 0.0));
        assert!(r.hurwitz);
    }

    #[test]
    fn triple_root() {
        let r = poly_roots(&Polynomial::new(vec![1.0, 3.0, 3.0, 1.0])).unwrap();
        assert_eq!(r.roots.len(), 3);
        // individual members of a triple root are only determined to about
        // the cube root of the evaluation noise; the cluster centroid is sharp
        for z in &r.roots {
            assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-4, "{z}");
        }

    }

    #[test]
    fn quartic_exp_truncation_is_stable() {
        let p = Polynomial::new(vec![1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0]);
        let r = poly_roots(&p).unwrap();
        assert!(r.hurwitz);
        assert!(r.max_real_part < -0.2);
    }

    #[test]
    fn zero_roots_are_exact() {
        let r = poly_roots(&Polynomial::new(vec![0.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(r.roots.iter().filter(|z| **z == Complex64::new(0.0, 0.0)).count(), 2);
        assert!(!r.hurwitz);
    }

    #[test]
    fn constant_rejected() {
        assert!(poly_roots(&Polynomial::constant(1.0)).is_err());
    }

    #[test]
    fn serializes_as_pairs() {
        let r = poly_roots(&Polynomial::new(vec![1.0, 0.0, 1.0])).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["roots"].as_array().unwrap()[0].as_array().unwrap().len(), 2);
        assert_eq!(v["hurwitz"], false);
    }
}
