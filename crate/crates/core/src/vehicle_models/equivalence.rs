//! Numerical checks that the flat-coordinates controller is the direct
//! Newton-Raphson controller plus a drift term `∂u/∂ỹ·ẏ̃`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::FlatVehicleModel;
use crate::error::Result;
use crate::poly_core::Matrix;
use crate::stability::factorial;
use crate::trivial_flat::FlatState;

/// Central finite-difference step.
pub const H_FD: f64 = 1e-6;
/// Relative tolerance for finite-difference comparisons.
pub const TOL_FD: f64 = 1e-4;
/// Relative tolerance for the α-scaled part of the two controllers.
pub const TOL_ALPHA_PART: f64 = 1e-9;

/// Residuals of the Jacobian block identities at one state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianReport {
    /// `‖∂Ψ/∂z · ∂Φ/∂w − I‖_max`
    pub identity_residual: f64,
    /// `‖∂ỹ/∂u‖_max`, relative to the Jacobian scale.
    pub zero_block_residual: f64,
    /// `‖∂g/∂u − ∂g/∂ν · ∂ν/∂u‖_max`, relative.
    pub chain_residual: f64,
}

impl JacobianReport {
    pub fn max_residual(&self) -> f64 {
        self.identity_residual
            .max(self.zero_block_residual)
            .max(self.chain_residual)
    }

    pub fn passes(&self) -> bool {
        self.max_residual() < TOL_FD
    }
}

/// Split of the flat-coordinates controller into an α-part and a drift.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionCheck {
    pub flat: Vec<f64>,
    pub direct: Vec<f64>,
    /// Flat controller at α = 0, i.e. the non-α-scaled remainder.
    pub drift: Vec<f64>,
    /// `∂u/∂ỹ · ẏ̃` by central differences, reordered as commanded rates.
    pub drift_fd: Vec<f64>,
    /// Relative gap between `flat − drift` and `direct`.
    pub alpha_part_residual: f64,
    /// Relative gap between `drift` and `drift_fd`.
    pub drift_residual: f64,
}

impl DecompositionCheck {
    pub fn passes(&self) -> bool {
        self.alpha_part_residual < TOL_ALPHA_PART && self.drift_residual < TOL_FD
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub model: String,
    pub samples: usize,
    pub seed: u64,
    /// No samples were drawn, so every check holds trivially.
    pub vacuous: bool,
    pub max_identity_residual: f64,
    pub max_zero_block_residual: f64,
    pub max_chain_residual: f64,
    pub max_alpha_part_residual: f64,
    pub max_drift_residual: f64,
    pub tol_fd: f64,
    pub tol_alpha_part: f64,
    pub pass: bool,
}

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

fn w_vec(f: &FlatState) -> Vec<f64> {
    let mut w = f.stacked();
    w.extend_from_slice(&f.nu);
    w
}

fn w_from_vec(w: &[f64]) -> Result<FlatState> {
    let (stack, nu) = w.split_at(w.len() - 2);
    FlatState::from_stacked(2, stack, nu)
}

/// Central-difference Jacobian of `f` at `x`.
fn fd_jacobian(
    x: &[f64],
    rows: usize,
    f: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<Matrix> {
    let mut jac = Matrix::zeros(rows, x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        xp[j] = x[j] + H_FD;
        let hi = f(&xp)?;
        xp[j] = x[j] - H_FD;
        let lo = f(&xp)?;
        xp[j] = x[j];
        for i in 0..rows {
            jac[(i, j)] = (hi[i] - lo[i]) / (2.0 * H_FD);
        }
    }
    Ok(jac)
}

/// Verifies `∂Ψ/∂z·∂Φ/∂w = I`, `∂ỹ/∂u = 0` and `∂g/∂u = ∂g/∂ν·∂ν/∂u`
/// by central finite differences, with `u` the last two entries of `z`.
pub fn jacobian_block_check(
    model: &dyn FlatVehicleModel,
    z: &[f64],
    horizon: f64,
) -> Result<JacobianReport> {
    model.check_state(z)?;
    let n = z.len();
    let w0 = w_vec(&model.forward(z)?);
    let d_psi = fd_jacobian(z, n, |z| Ok(w_vec(&model.forward(z)?)))?;
    let d_phi = fd_jacobian(&w0, n, |w| model.inverse(&w_from_vec(w)?))?;

    let identity_residual = d_psi
        .matmul(&d_phi)?
        .sub(&Matrix::identity(n))?
        .norm_max();

    let scale = d_psi.norm_max().max(1.0);
    let u0 = n - 2;
    let zero_block_residual = d_psi.block(0, u0, n - 2, 2).norm_max() / scale;

    let k = model.flat_order();
    let dg_dnu = horizon.powi(k as i32 + 1) / factorial(k + 1);
    let dnu_du = d_psi.block(n - 2, u0, 2, 2);
    let dg_dz = fd_jacobian(z, 2, |z| Ok(model.predict(z, horizon)?.to_vec()))?;
    let dg_du = dg_dz.block(0, u0, 2, 2);
    let chain_residual = dg_du.sub(&dnu_du.scale(dg_dnu))?.norm_max() / dg_du.norm_max().max(1.0);

    Ok(JacobianReport {
        identity_residual,
        zero_block_residual,
        chain_residual,
    })
}

/// Compares the flat-coordinates controller against the direct controller
/// and the finite-difference drift `∂u/∂ỹ·ẏ̃`.
pub fn controller_decomposition_check(
    model: &dyn FlatVehicleModel,
    z: &[f64],
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
) -> Result<DecompositionCheck> {
    let flat = model.flat_control(z, r_future, alpha, horizon)?;
    let direct = model.direct_nr(z, r_future, alpha, horizon)?;
    let drift = model.flat_control(z, r_future, 0.0, horizon)?;

    let f = model.forward(z)?;
    // ẏ̃ is ỹ shifted by one derivative
    let stack = f.stacked();
    let mut dir: Vec<f64> = stack[2..].to_vec();
    dir.extend_from_slice(&f.nu);
    let u_at = |h: f64| -> Result<Vec<f64>> {
        let moved: Vec<f64> = stack.iter().zip(&dir).map(|(s, d)| s + h * d).collect();
        let z = model.inverse(&FlatState::from_stacked(2, &moved, &f.nu)?)?;
        Ok(z[z.len() - 2..].to_vec())
    };
    let (hi, lo) = (u_at(H_FD)?, u_at(-H_FD)?);
    let du: Vec<f64> = hi.iter().zip(&lo).map(|(a, b)| (a - b) / (2.0 * H_FD)).collect();
    // commanded rates list d/dt u[1] first
    let drift_fd = vec![du[1], du[0]];

    let alpha_part: Vec<f64> = flat.iter().zip(&drift).map(|(a, b)| a - b).collect();
    Ok(DecompositionCheck {
        alpha_part_residual: rel_gap(&alpha_part, &direct),
        drift_residual: rel_gap(&drift, &drift_fd),
        flat,
        direct,
        drift,
        drift_fd,
    })
}

/// Seeded pseudo-random non-singular states:
/// `p ∈ [−20, 20]²`, `θ ∈ (−3, 3)`, `v ∈ [0.5, 10]`, and for the bicycle
/// `δ ∈ [−1.2, 1.2]`, `a ∈ [−3, 3]`.
pub fn sample_states(model: &dyn FlatVehicleModel, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sample_state(model, &mut rng)).collect()
}

fn sample_state(model: &dyn FlatVehicleModel, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut z = vec![
        rng.gen_range(-20.0..=20.0),
        rng.gen_range(-20.0..=20.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(0.5..=10.0),
    ];
    if model.flat_order() == 1 {
        z.push(rng.gen_range(-1.2..=1.2));
        z.push(rng.gen_range(-3.0..=3.0));
    }
    z
}

/// Runs both checks on `samples` seeded states. Each state gets a reference
/// offset in `[−5, 5]²` from its own prediction, `α ∈ [2, 100]` and
/// `T ∈ [0.05, 1]`.
pub fn equivalence_report(
    model: &dyn FlatVehicleModel,
    samples: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = EquivalenceReport {
        model: model.name().to_string(),
        samples,
        seed,
        vacuous: samples == 0,
        max_identity_residual: 0.0,
        max_zero_block_residual: 0.0,
        max_chain_residual: 0.0,
        max_alpha_part_residual: 0.0,
        max_drift_residual: 0.0,
        tol_fd: TOL_FD,
        tol_alpha_part: TOL_ALPHA_PART,
        pass: true,
    };
    for _ in 0..samples {
        let z = sample_state(model, &mut rng);
        let alpha = rng.gen_range(2.0..=100.0);
        let horizon = rng.gen_range(0.05..=1.0);
        let y_hat = model.predict(&z, horizon)?;
        let r = [
            y_hat[0] + rng.gen_range(-5.0..=5.0),
            y_hat[1] + rng.gen_range(-5.0..=5.0),
        ];
        let jac = jacobian_block_check(model, &z, horizon)?;
        let dec = controller_decomposition_check(model, &z, &r, alpha, horizon)?;
        rep.max_identity_residual = rep.max_identity_residual.max(jac.identity_residual);
        rep.max_zero_block_residual = rep.max_zero_block_residual.max(jac.zero_block_residual);
        rep.max_chain_residual = rep.max_chain_residual.max(jac.chain_residual);
        rep.max_alpha_part_residual = rep.max_alpha_part_residual.max(dec.alpha_part_residual);
        rep.max_drift_residual = rep.max_drift_residual.max(dec.drift_residual);
        rep.pass &= jac.passes() && dec.passes();
    }
    Ok(rep)
}
