//! Differentially flat vehicle models: the kinematic unicycle and the
//! dynamic bicycle, each with flat-coordinate maps, the fused flat-space
//! controller and the Newton-Raphson controller applied directly to the
//! vehicle state.
//!
//! Both models use the planar position as flat output and carry their
//! dynamically extended inputs in the state vector `z = (x, u)`:
//!
//! | model    | `z`                      | commanded rates |
//! |----------|--------------------------|-----------------|
//! | unicycle | `(px, py, θ, v)`         | `(v̇, ω)`        |
//! | bicycle  | `(px, py, θ, v, δ, a)`   | `(ȧ, ω_δ)`      |

mod bicycle;
mod equivalence;
mod unicycle;

pub use bicycle::{
    bicycle_direct_nr, bicycle_flat_control, bicycle_forward, bicycle_from_flat, bicycle_inverse,
    bicycle_inverse_rate, bicycle_predict, wrap_steering, Bicycle, BicycleState,
};
pub use equivalence::{
    controller_decomposition_check, equivalence_report, jacobian_block_check, sample_states,
    DecompositionCheck, EquivalenceReport, JacobianReport, H_FD, TOL_ALPHA_PART, TOL_FD,
};
pub use unicycle::{
    unicycle_direct_nr, unicycle_flat_control, unicycle_forward, unicycle_from_flat,
    unicycle_inverse_rate, unicycle_predict, Unicycle, UnicycleState,
};

use crate::error::Result;
use crate::trivial_flat::FlatState;

/// Speed below which flat inversion is refused.
pub const V_MIN: f64 = 1e-3;
/// Steering magnitude past which a bicycle run is flagged as near-singular.
pub const STEER_WARN: f64 = std::f64::consts::FRAC_PI_2 - 0.05;

/// A vehicle whose planar position is a flat output.
pub trait FlatVehicleModel: Send + Sync {
    fn name(&self) -> &'static str;
    /// Column names of the state vector `z`.
    fn state_names(&self) -> &'static [&'static str];
    /// Column names of the commanded rates.
    fn input_names(&self) -> &'static [&'static str];
    /// Order of the flat state: `ỹ = (y, …, y^{(k)})`, `ν = y^{(k+1)}`.
    fn flat_order(&self) -> usize;
    /// Speed floor for the singularity guard.
    fn v_min(&self) -> f64;

    /// `ż` for commanded rates.
    fn dynamics(&self, z: &[f64], rates: &[f64]) -> Vec<f64>;
    /// Ψ: vehicle state to flat coordinates.
    fn forward(&self, z: &[f64]) -> Result<FlatState>;
    /// Φ: flat coordinates back to the vehicle state.
    fn inverse(&self, w: &FlatState) -> Result<Vec<f64>>;
    /// Commanded rates that realise a flat input rate `ν̇`.
    fn inverse_rate(&self, w: &FlatState, nu_dot: &[f64]) -> Result<Vec<f64>>;
    /// Output prediction `ŷ(t+T)` written in vehicle coordinates.
    fn predict(&self, z: &[f64], horizon: f64) -> Result<[f64; 2]>;
    /// Fused closed-form flat-space controller.
    fn flat_control(&self, z: &[f64], r_future: &[f64], alpha: f64, horizon: f64)
        -> Result<Vec<f64>>;
    /// Newton-Raphson flow controller on the vehicle state itself.
    fn direct_nr(&self, z: &[f64], r_future: &[f64], alpha: f64, horizon: f64)
        -> Result<Vec<f64>>;
    /// Errors if `z` is outside the region where the maps are defined.
    fn check_state(&self, z: &[f64]) -> Result<()>;

    /// Reorders commanded rates into `u̇` with `u` the last two entries of `z`.
    fn u_dot(&self, rates: &[f64]) -> [f64; 2] {
        // both models command (d/dt u[1], d/dt u[0])
        [rates[1], rates[0]]
    }

    fn euler_step(&self, z: &[f64], rates: &[f64], dt: f64) -> Vec<f64> {
        let dz = self.dynamics(z, rates);
        z.iter().zip(&dz).map(|(x, d)| x + dt * d).collect()
    }
}

/// World-frame vector expressed in the body frame of heading `theta`.
pub(crate) fn to_body(theta: f64, e: &[f64]) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c * e[0] + s * e[1], -s * e[0] + c * e[1]]
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v[0].hypot(v[1])
}

/// Solves a 2×2 system `[[a, b], [c, d]] x = rhs`.
pub(crate) fn solve2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0_f64, |s, x| s.max(x.abs()));
    if det == 0.0 || det.abs() <= 1e-14 * scale * scale {
        return None;
    }
    Some([
        (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
    ])
}
