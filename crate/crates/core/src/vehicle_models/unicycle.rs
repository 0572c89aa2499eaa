use serde::{Deserialize, Serialize};

use super::{norm2, solve2, to_body, FlatVehicleModel, V_MIN};
use crate::error::{Error, Result};
use crate::trivial_flat::FlatState;

/// Kinematic unicycle with the speed promoted to a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnicycleState {
    pub px: f64,
    pub py: f64,
    pub theta: f64,
    pub v: f64,
}

impl UnicycleState {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.px, self.py, self.theta, self.v]
    }

    pub fn from_slice(z: &[f64]) -> Result<Self> {
        match *z {
            [px, py, theta, v] => Ok(Self { px, py, theta, v }),
            _ => Err(Error::Dimension(format!(
                "unicycle state has 4 entries, got {}",
                z.len()
            ))),
        }
    }
}

fn speed_guard(v: f64, v_min: f64) -> Result<()> {
    if !(v.abs() >= v_min) {
        return Err(Error::Singularity(format!(
            "velocity too small for flat inversion (|v| = {:e} < {v_min:e})",
            v.abs()
        )));
    }
    Ok(())
}

/// `y = (px, py)`, `ν = ẏ = v(cos θ, sin θ)`.
pub fn unicycle_forward(s: &UnicycleState) -> FlatState {
    let (sn, cs) = s.theta.sin_cos();
    FlatState {
        y_stack: vec![vec![s.px, s.py]],
        nu: vec![s.v * cs, s.v * sn],
    }
}

/// Heading and speed recovered from the flat state.
pub fn unicycle_from_flat(f: &FlatState) -> Result<UnicycleState> {
    let v = norm2(&f.nu);
    speed_guard(v, V_MIN)?;
    Ok(UnicycleState {
        px: f.y()[0],
        py: f.y()[1],
        theta: f.nu[1].atan2(f.nu[0]),
        v,
    })
}

/// `(v̇, ω)` realising the flat rate `ν̇`.
pub fn unicycle_inverse_rate(f: &FlatState, nu_dot: &[f64]) -> Result<(f64, f64)> {
    inverse_rate(f, nu_dot, V_MIN)
}

fn inverse_rate(f: &FlatState, nu_dot: &[f64], v_min: f64) -> Result<(f64, f64)> {
    let nu = &f.nu;
    let v2 = nu[0] * nu[0] + nu[1] * nu[1];
    let v = v2.sqrt();
    speed_guard(v, v_min)?;
    let v_dot = (nu[0] * nu_dot[0] + nu[1] * nu_dot[1]) / v;
    let omega = (nu_dot[1] * nu[0] - nu[1] * nu_dot[0]) / v2;
    Ok((v_dot, omega))
}

/// `ŷ(t+T) = p + T v (cos θ, sin θ)`.
pub fn unicycle_predict(s: &UnicycleState, horizon: f64) -> [f64; 2] {
    let (sn, cs) = s.theta.sin_cos();
    [s.px + horizon * s.v * cs, s.py + horizon * s.v * sn]
}

/// Fused flat-space controller,
/// `(v̇, ω) = α/T · diag(1, 1/v) · R(θ)ᵀ (r(t+T) − p) + (−αv, 0)`.
///
/// The position error is resolved in the body frame; the `−αv` term is the
/// `Tṗ` part of the prediction pulled out of the error.
pub fn unicycle_flat_control(
    s: &UnicycleState,
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
) -> Result<(f64, f64)> {
    flat_control(s, r_future, alpha, horizon, V_MIN)
}

fn flat_control(
    s: &UnicycleState,
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
    v_min: f64,
) -> Result<(f64, f64)> {
    speed_guard(s.v, v_min)?;
    let e_body = to_body(s.theta, &[r_future[0] - s.px, r_future[1] - s.py]);
    let k = alpha / horizon;
    Ok((k * e_body[0] - alpha * s.v, k * e_body[1] / s.v))
}

/// Newton-Raphson flow controller with `u = (θ, v)`:
/// `u̇ = α (∂ŷ/∂u)⁻¹ (r(t+T) − ŷ(t+T))`, returned as `(v̇, ω)`.
pub fn unicycle_direct_nr(
    s: &UnicycleState,
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
) -> Result<(f64, f64)> {
    direct_nr(s, r_future, alpha, horizon, V_MIN)
}

fn direct_nr(
    s: &UnicycleState,
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
    v_min: f64,
) -> Result<(f64, f64)> {
    speed_guard(s.v, v_min)?;
    let y_hat = unicycle_predict(s, horizon);
    let e = [alpha * (r_future[0] - y_hat[0]), alpha * (r_future[1] - y_hat[1])];
    let (sn, cs) = s.theta.sin_cos();
    let t = horizon;
    // columns: ∂ŷ/∂θ, ∂ŷ/∂v
    let jac = [[-t * s.v * sn, t * cs], [t * s.v * cs, t * sn]];
    let [theta_dot, v_dot] = solve2(jac, e).ok_or_else(|| {
        Error::Singularity("unicycle prediction Jacobian ∂ŷ/∂(θ, v) is singular".into())
    })?;
    Ok((v_dot, theta_dot))
}

/// Kinematic unicycle as a [`FlatVehicleModel`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unicycle {
    pub v_min: f64,
}

impl Default for Unicycle {
    fn default() -> Self {
        Self { v_min: V_MIN }
    }
}

impl FlatVehicleModel for Unicycle {
    fn name(&self) -> &'static str {
        "unicycle"
    }

    fn state_names(&self) -> &'static [&'static str] {
        &["px", "py", "theta", "v"]
    }

    fn input_names(&self) -> &'static [&'static str] {
        &["v_dot", "omega"]
    }

    fn flat_order(&self) -> usize {
        0
    }

    fn v_min(&self) -> f64 {
        self.v_min
    }

    fn dynamics(&self, z: &[f64], rates: &[f64]) -> Vec<f64> {
        let (sn, cs) = z[2].sin_cos();
        vec![z[3] * cs, z[3] * sn, rates[1], rates[0]]
    }

    fn forward(&self, z: &[f64]) -> Result<FlatState> {
        Ok(unicycle_forward(&UnicycleState::from_slice(z)?))
    }

    fn inverse(&self, w: &FlatState) -> Result<Vec<f64>> {
        speed_guard(norm2(&w.nu), self.v_min)?;
        Ok(unicycle_from_flat(w)?.to_vec())
    }

    fn inverse_rate(&self, w: &FlatState, nu_dot: &[f64]) -> Result<Vec<f64>> {
        let (a, b) = inverse_rate(w, nu_dot, self.v_min)?;
        Ok(vec![a, b])
    }

    fn predict(&self, z: &[f64], horizon: f64) -> Result<[f64; 2]> {
        Ok(unicycle_predict(&UnicycleState::from_slice(z)?, horizon))
    }

    fn flat_control(
        &self,
        z: &[f64],
        r_future: &[f64],
        alpha: f64,
        horizon: f64,
    ) -> Result<Vec<f64>> {
        let (a, b) = flat_control(&UnicycleState::from_slice(z)?, r_future, alpha, horizon, self.v_min)?;
        Ok(vec![a, b])
    }

    fn direct_nr(
        &self,
        z: &[f64],
        r_future: &[f64],
        alpha: f64,
        horizon: f64,
    ) -> Result<Vec<f64>> {
        let (a, b) = direct_nr(&UnicycleState::from_slice(z)?, r_future, alpha, horizon, self.v_min)?;
        Ok(vec![a, b])
    }

    fn check_state(&self, z: &[f64]) -> Result<()> {
        let s = UnicycleState::from_slice(z)?;
        if !z.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("unicycle state"));
        }
        speed_guard(s.v, self.v_min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::TrivialFlatSpec;
    use crate::trivial_flat::nr_flat_rate;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn st(px: f64, py: f64, theta: f64, v: f64) -> UnicycleState {
        UnicycleState { px, py, theta, v }
    }

    #[test]
    fn forward_examples() {
        let f = unicycle_forward(&st(0.0, 0.0, 0.0, 1.0));
        assert_eq!(f.y(), &[0.0, 0.0]);
        assert_eq!(f.nu, vec![1.0, 0.0]);

        let f = unicycle_forward(&st(12.0, -4.0, FRAC_PI_2, 1.0));
        assert_eq!(f.y(), &[12.0, -4.0]);
        assert!(f.nu[0].abs() < 1e-15 && (f.nu[1] - 1.0).abs() < 1e-15);

        let f = unicycle_forward(&st(0.0, 0.0, FRAC_PI_4, SQRT_2));
        assert!((f.nu[0] - 1.0).abs() < 1e-15 && (f.nu[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_rate_examples() {
        let f = FlatState::new(vec![vec![0.0, 0.0]], vec![1.0, 0.0]).unwrap();
        assert_eq!(unicycle_inverse_rate(&f, &[0.0, 1.0]).unwrap(), (0.0, 1.0));
        assert_eq!(unicycle_inverse_rate(&f, &[0.0, 0.0]).unwrap(), (0.0, 0.0));

        let slow = FlatState::new(vec![vec![0.0, 0.0]], vec![0.0, 1e-4]).unwrap();
        match unicycle_inverse_rate(&slow, &[1.0, 0.0]) {
            Err(Error::Singularity(msg)) => assert!(msg.contains("velocity too small")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flat_control_examples() {
        let (alpha, t) = (30.0, 0.8);
        let s = st(1.0, 2.0, 0.3, 1.0);
        let (v_dot, omega) = unicycle_flat_control(&s, &[1.0, 2.0], alpha, t).unwrap();
        assert!((v_dot + alpha).abs() < 1e-12 && omega.abs() < 1e-12);

        let c = 4.0;
        let s = st(0.0, 0.0, 0.0, 1.0);
        let (v_dot, _) = unicycle_flat_control(&s, &[t / alpha * c, 0.0], alpha, t).unwrap();
        assert!((v_dot - (c - alpha)).abs() < 1e-12);
    }

    #[test]
    fn flat_control_matches_composition() {
        let (alpha, t) = (100.0, 0.02);
        let spec = TrivialFlatSpec { m: 2, k: 0, horizon: t, alpha };
        for i in 0..50 {
            let x = i as f64;
            let s = st(x.sin() * 5.0, x.cos() * 3.0, 0.37 * x - 2.0, 0.5 + 0.1 * x);
            let r = [s.px + (1.3 * x).cos(), s.py + (0.7 * x).sin()];
            let f = unicycle_forward(&s);
            let nu_dot = nr_flat_rate(&f, &r, &spec);
            let (a1, b1) = unicycle_inverse_rate(&f, &nu_dot).unwrap();
            let (a2, b2) = unicycle_flat_control(&s, &r, alpha, t).unwrap();
            assert!((a1 - a2).abs() < 1e-9 * a1.abs().max(1.0), "{a1} {a2}");
            assert!((b1 - b2).abs() < 1e-9 * b1.abs().max(1.0), "{b1} {b2}");
        }
    }

    #[test]
    fn direct_nr_gain_by_hand() {
        let (alpha, t) = (100.0, 0.02);
        let s = st(0.0, 0.0, 0.0, 1.0);
        // ŷ = (T, 0), so this reference gives e = (1, 1)
        let (v_dot, omega) = unicycle_direct_nr(&s, &[1.0 + t, 1.0], alpha, t).unwrap();
        assert!((v_dot - alpha / t).abs() < 1e-9);
        assert!((omega - alpha / t).abs() < 1e-9);

        let y_hat = unicycle_predict(&s, t);
        assert_eq!(unicycle_direct_nr(&s, &y_hat, alpha, t).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn direct_and_flat_coincide() {
        let s = st(3.0, -1.0, 2.1, 2.5);
        let r = [4.0, 0.5];
        let a = unicycle_direct_nr(&s, &r, 40.0, 0.3).unwrap();
        let b = unicycle_flat_control(&s, &r, 40.0, 0.3).unwrap();
        assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10);
    }

    #[test]
    fn stopped_vehicle_is_singular() {
        let s = st(0.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            unicycle_flat_control(&s, &[1.0, 0.0], 2.0, 1.0),
            Err(Error::Singularity(_))
        ));
        assert!(matches!(
            unicycle_direct_nr(&s, &[1.0, 0.0], 2.0, 1.0),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn flat_roundtrip() {
        let s = st(1.0, -2.0, -2.5, 3.0);
        let back = unicycle_from_flat(&unicycle_forward(&s)).unwrap();
        assert!((back.theta - s.theta).abs() < 1e-12 && (back.v - s.v).abs() < 1e-12);
    }
}
