use serde::{Deserialize, Serialize};

use super::{norm2, solve2, to_body, FlatVehicleModel, V_MIN};
use crate::error::{Error, Result};
use crate::trivial_flat::FlatState;

/// Dynamic bicycle with steering angle and acceleration promoted to states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BicycleState {
    pub px: f64,
    pub py: f64,
    pub theta: f64,
    pub v: f64,
    pub delta: f64,
    pub a: f64,
    pub wheelbase_l: f64,
}

impl BicycleState {
    /// `z = (px, py, θ, v, δ, a)`; the wheelbase is a parameter, not a state.
    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.px, self.py, self.theta, self.v, self.delta, self.a]
    }

    pub fn from_slice(z: &[f64], wheelbase_l: f64) -> Result<Self> {
        match *z {
            [px, py, theta, v, delta, a] => Ok(Self {
                px,
                py,
                theta,
                v,
                delta,
                a,
                wheelbase_l,
            }),
            _ => Err(Error::Dimension(format!(
                "bicycle state has 6 entries, got {}",
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

fn steering_guard(delta: f64) -> Result<()> {
    if !(delta.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "steering angle |δ| = {} is not below π/2",
            delta.abs()
        )));
    }
    Ok(())
}

/// Representative of `delta` mod π in `(−π/2, π/2]`.
pub fn wrap_steering(delta: f64) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    let w = delta - PI * (delta / PI).round();
    if w <= -FRAC_PI_2 {
        w + PI
    } else {
        w
    }
}

/// Curvature-induced lateral acceleration `(v²/l) tan δ`.
fn lateral(s: &BicycleState) -> f64 {
    s.v * s.v / s.wheelbase_l * s.delta.tan()
}

/// `y = p`, `ẏ = v(cos θ, sin θ)`, `ν = p̈ = a(cos θ, sin θ) + (v²/l) tan δ (−sin θ, cos θ)`.
pub fn bicycle_forward(s: &BicycleState) -> Result<FlatState> {
    steering_guard(s.delta)?;
    let (sn, cs) = s.theta.sin_cos();
    let lat = lateral(s);
    Ok(FlatState {
        y_stack: vec![vec![s.px, s.py], vec![s.v * cs, s.v * sn]],
        nu: vec![s.a * cs - lat * sn, s.a * sn + lat * cs],
    })
}

/// `q = ẏ₁ν₂ − ẏ₂ν₁`, `v³ tan δ / l` along a bicycle trajectory.
fn cross(yd: &[f64], nu: &[f64]) -> f64 {
    yd[0] * nu[1] - yd[1] * nu[0]
}

fn check_order(f: &FlatState) -> Result<()> {
    if f.k() != 1 || f.m() != 2 {
        return Err(Error::Dimension(format!(
            "bicycle flat state is (m, k) = (2, 1), got ({}, {})",
            f.m(),
            f.k()
        )));
    }
    Ok(())
}

/// Full state recovered from the flat state via `θ = atan2(ẏ)`, `v = ‖ẏ‖`,
/// `tan δ = l q / v³`, `a = ẏ·ν / v`.
pub fn bicycle_from_flat(f: &FlatState, wheelbase_l: f64) -> Result<BicycleState> {
    from_flat(f, wheelbase_l, V_MIN)
}

fn from_flat(f: &FlatState, l: f64, v_min: f64) -> Result<BicycleState> {
    check_order(f)?;
    let yd = &f.y_stack[1];
    let v = norm2(yd);
    speed_guard(v, v_min)?;
    let nu = &f.nu;
    Ok(BicycleState {
        px: f.y()[0],
        py: f.y()[1],
        theta: yd[1].atan2(yd[0]),
        v,
        delta: (l * cross(yd, nu) / (v * v * v)).atan(),
        a: (yd[0] * nu[0] + yd[1] * nu[1]) / v,
        wheelbase_l: l,
    })
}

/// Acceleration and steering rate `(a, ω_δ)` realising a flat rate `ν̇`:
/// `a = ẏ·ν/v` and `ω_δ = lv/(v⁶ + l²q²)·(q̇v² − 3qav)`.
pub fn bicycle_inverse(f: &FlatState, nu_dot: &[f64], wheelbase_l: f64) -> Result<(f64, f64)> {
    let (a, _, omega) = inverse_parts(f, nu_dot, wheelbase_l, V_MIN)?;
    Ok((a, omega))
}

/// Commanded rates `(ȧ, ω_δ)` realising a flat rate `ν̇`, where
/// `ȧ = (‖ν‖² + ẏ·ν̇ − a²)/v` is the time derivative of `a = ẏ·ν/v`.
pub fn bicycle_inverse_rate(
    f: &FlatState,
    nu_dot: &[f64],
    wheelbase_l: f64,
) -> Result<(f64, f64)> {
    let (_, a_dot, omega) = inverse_parts(f, nu_dot, wheelbase_l, V_MIN)?;
    Ok((a_dot, omega))
}

fn inverse_parts(f: &FlatState, nu_dot: &[f64], l: f64, v_min: f64) -> Result<(f64, f64, f64)> {
    check_order(f)?;
    let yd = &f.y_stack[1];
    let nu = &f.nu;
    let v = norm2(yd);
    speed_guard(v, v_min)?;
    let a = (yd[0] * nu[0] + yd[1] * nu[1]) / v;
    let a_dot = (nu[0] * nu[0] + nu[1] * nu[1] + yd[0] * nu_dot[0] + yd[1] * nu_dot[1] - a * a) / v;
    let q = cross(yd, nu);
    let q_dot = cross(yd, nu_dot);
    let v2 = v * v;
    let omega = l * v / (v2 * v2 * v2 + l * l * q * q) * (q_dot * v2 - 3.0 * q * a * v);
    Ok((a, a_dot, omega))
}

/// `ŷ(t+T) = p + Tẏ + T²/2 p̈`.
pub fn bicycle_predict(s: &BicycleState, horizon: f64) -> Result<[f64; 2]> {
    let f = bicycle_forward(s)?;
    let h2 = 0.5 * horizon * horizon;
    Ok([
        s.px + horizon * f.y_stack[1][0] + h2 * f.nu[0],
        s.py + horizon * f.y_stack[1][1] + h2 * f.nu[1],
    ])
}

/// Fused flat-space controller for the bicycle:
///
/// ```text
/// ȧ   = 2α/T² (e_b,x − Tv − T²a/2)         + v³ tan²δ / l²
/// ω_δ = 2α/T² (l cos²δ / v²) e_b,y − α sinδ cosδ − 3(a/v) sinδ cosδ
/// ```
///
/// with `e_b = R(θ)ᵀ (r(t+T) − p)` the position error in the body frame.
pub fn bicycle_flat_control(
    s: &BicycleState,
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
) -> Result<(f64, f64)> {
    flat_control(s, r_future, alpha, horizon, V_MIN)
}

fn flat_control(
    s: &BicycleState,
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
    v_min: f64,
) -> Result<(f64, f64)> {
    speed_guard(s.v, v_min)?;
    steering_guard(s.delta)?;
    let eb = to_body(s.theta, &[r_future[0] - s.px, r_future[1] - s.py]);
    let k = 2.0 * alpha / (horizon * horizon);
    let (sd, cd) = s.delta.sin_cos();
    let tan_d = sd / cd;
    let l = s.wheelbase_l;
    let v = s.v;
    let a_dot = k * (eb[0] - horizon * v - 0.5 * horizon * horizon * s.a)
        + v * v * v * tan_d * tan_d / (l * l);
    let omega = k * l * cd * cd / (v * v) * eb[1] - alpha * sd * cd - 3.0 * s.a / v * sd * cd;
    Ok((a_dot, omega))
}

/// Newton-Raphson flow controller with `u = (δ, a)`, returned as `(ȧ, ω_δ)`.
///
/// Columns of `∂ŷ/∂u` are `T²/2 (v²/l) sec²δ (−sin θ, cos θ)` and
/// `T²/2 (cos θ, sin θ)`.
pub fn bicycle_direct_nr(
    s: &BicycleState,
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
) -> Result<(f64, f64)> {
    direct_nr(s, r_future, alpha, horizon, V_MIN)
}

fn direct_nr(
    s: &BicycleState,
    r_future: &[f64],
    alpha: f64,
    horizon: f64,
    v_min: f64,
) -> Result<(f64, f64)> {
    speed_guard(s.v, v_min)?;
    let y_hat = bicycle_predict(s, horizon)?;
    let e = [alpha * (r_future[0] - y_hat[0]), alpha * (r_future[1] - y_hat[1])];
    let (sn, cs) = s.theta.sin_cos();
    let h2 = 0.5 * horizon * horizon;
    let cd = s.delta.cos();
    let steer = h2 * s.v * s.v / (s.wheelbase_l * cd * cd);
    let jac = [[-steer * sn, h2 * cs], [steer * cs, h2 * sn]];
    let [delta_dot, a_dot] = solve2(jac, e).ok_or_else(|| {
        Error::Singularity("bicycle prediction Jacobian ∂ŷ/∂(δ, a) is singular".into())
    })?;
    Ok((a_dot, delta_dot))
}

/// Dynamic bicycle as a [`FlatVehicleModel`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bicycle {
    pub wheelbase_l: f64,
    pub v_min: f64,
}

impl Bicycle {
    pub fn new(wheelbase_l: f64) -> Result<Self> {
        if !(wheelbase_l > 0.0 && wheelbase_l.is_finite()) {
            return Err(Error::Domain(format!(
                "wheelbase must be positive and finite, got {wheelbase_l}"
            )));
        }
        Ok(Self {
            wheelbase_l,
            v_min: V_MIN,
        })
    }

    fn state(&self, z: &[f64]) -> Result<BicycleState> {
        BicycleState::from_slice(z, self.wheelbase_l)
    }
}

impl FlatVehicleModel for Bicycle {
    fn name(&self) -> &'static str {
        "bicycle"
    }

    fn state_names(&self) -> &'static [&'static str] {
        &["px", "py", "theta", "v", "delta", "a"]
    }

    fn input_names(&self) -> &'static [&'static str] {
        &["a_dot", "omega_delta"]
    }

    fn flat_order(&self) -> usize {
        1
    }

    fn v_min(&self) -> f64 {
        self.v_min
    }

    fn dynamics(&self, z: &[f64], rates: &[f64]) -> Vec<f64> {
        let (sn, cs) = z[2].sin_cos();
        let v = z[3];
        vec![
            v * cs,
            v * sn,
            v / self.wheelbase_l * z[4].tan(),
            z[5],
            rates[1],
            rates[0],
        ]
    }

    /// Euler step with δ reduced mod π into `(−π/2, π/2]`. Every map of the
    /// model sees δ only through `tan δ`, `cos²δ` and `sin δ cos δ`, so the
    /// reduction leaves the dynamics unchanged; it only keeps a large
    /// steering step from landing outside the chart of the flat maps.
    fn euler_step(&self, z: &[f64], rates: &[f64], dt: f64) -> Vec<f64> {
        let dz = self.dynamics(z, rates);
        let mut next: Vec<f64> = z.iter().zip(&dz).map(|(x, d)| x + dt * d).collect();
        next[4] = wrap_steering(next[4]);
        next
    }

    fn forward(&self, z: &[f64]) -> Result<FlatState> {
        bicycle_forward(&self.state(z)?)
    }

    fn inverse(&self, w: &FlatState) -> Result<Vec<f64>> {
        Ok(from_flat(w, self.wheelbase_l, self.v_min)?.to_vec())
    }

    fn inverse_rate(&self, w: &FlatState, nu_dot: &[f64]) -> Result<Vec<f64>> {
        let (_, a_dot, omega) = inverse_parts(w, nu_dot, self.wheelbase_l, self.v_min)?;
        Ok(vec![a_dot, omega])
    }

    fn predict(&self, z: &[f64], horizon: f64) -> Result<[f64; 2]> {
        bicycle_predict(&self.state(z)?, horizon)
    }

    fn flat_control(
        &self,
        z: &[f64],
        r_future: &[f64],
        alpha: f64,
        horizon: f64,
    ) -> Result<Vec<f64>> {
        let (a, b) = flat_control(&self.state(z)?, r_future, alpha, horizon, self.v_min)?;
        Ok(vec![a, b])
    }

    fn direct_nr(
        &self,
        z: &[f64],
        r_future: &[f64],
        alpha: f64,
        horizon: f64,
    ) -> Result<Vec<f64>> {
        let (a, b) = direct_nr(&self.state(z)?, r_future, alpha, horizon, self.v_min)?;
        Ok(vec![a, b])
    }

    fn check_state(&self, z: &[f64]) -> Result<()> {
        let s = self.state(z)?;
        if !z.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("bicycle state"));
        }
        steering_guard(s.delta)?;
        speed_guard(s.v, self.v_min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::TrivialFlatSpec;
    use crate::trivial_flat::nr_flat_rate;
    use std::f64::consts::FRAC_PI_4;

    fn st(theta: f64, v: f64, delta: f64, a: f64) -> BicycleState {
        BicycleState {
            px: 0.0,
            py: 0.0,
            theta,
            v,
            delta,
            a,
            wheelbase_l: 2.0,
        }
    }

    fn flat(yd: [f64; 2], nu: [f64; 2]) -> FlatState {
        FlatState::new(vec![vec![0.0, 0.0], yd.to_vec()], nu.to_vec()).unwrap()
    }

    #[test]
    fn forward_examples() {
        for (theta, v) in [(0.0, 1.0), (1.3, 7.0), (-2.0, 0.4)] {
            let f = bicycle_forward(&st(theta, v, 0.0, 0.0)).unwrap();
            assert_eq!(f.nu.iter().map(|x| x.abs()).sum::<f64>(), 0.0);
        }
        let f = bicycle_forward(&st(0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(f.nu, vec![1.0, 0.0]);

        let f = bicycle_forward(&st(0.0, 1.0, FRAC_PI_4, 0.0)).unwrap();
        assert!(f.nu[0].abs() < 1e-15 && (f.nu[1] - 0.5).abs() < 1e-15);

        assert!(matches!(
            bicycle_forward(&st(0.0, 1.0, 1.6, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inverse_examples() {
        let zero = [0.0, 0.0];
        assert_eq!(bicycle_inverse(&flat([1.0, 0.0], zero), &zero, 2.0).unwrap(), (0.0, 0.0));
        assert_eq!(bicycle_inverse(&flat([1.0, 0.0], [1.0, 0.0]), &zero, 2.0).unwrap(), (1.0, 0.0));
        assert_eq!(bicycle_inverse(&flat([1.0, 0.0], [0.0, 1.0]), &zero, 2.0).unwrap(), (0.0, 0.0));
        assert!(matches!(
            bicycle_inverse(&flat([0.0, 1e-4], zero), &zero, 2.0),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn straight_line_equilibrium() {
        let (alpha, t) = (30.0, 0.8);
        let s = st(0.7, 3.0, 0.0, 0.0);
        let (sn, cs) = s.theta.sin_cos();
        let r = [t * s.v * cs, t * s.v * sn];
        let (a_dot, omega) = bicycle_flat_control(&s, &r, alpha, t).unwrap();
        assert!(a_dot.abs() < 1e-12 && omega.abs() < 1e-12);
    }

    #[test]
    fn flat_control_matches_composition() {
        let (alpha, t) = (30.0, 0.8);
        let spec = TrivialFlatSpec { m: 2, k: 1, horizon: t, alpha };
        for i in 0..100 {
            let x = i as f64;
            let mut s = st(
                (0.37 * x).sin() * 3.0,
                0.5 + 9.5 * (0.5 + 0.5 * (1.1 * x).cos()),
                1.2 * (0.73 * x).sin(),
                3.0 * (0.91 * x).cos(),
            );
            s.px = (0.3 * x).cos() * 10.0;
            s.py = (0.2 * x).sin() * 10.0;
            let r = [s.px + 5.0 * (1.7 * x).sin(), s.py + 5.0 * (0.6 * x).cos()];
            let f = bicycle_forward(&s).unwrap();
            let nu_dot = nr_flat_rate(&f, &r, &spec);
            let (a1, w1) = bicycle_inverse_rate(&f, &nu_dot, s.wheelbase_l).unwrap();
            let (a2, w2) = bicycle_flat_control(&s, &r, alpha, t).unwrap();
            assert!((a1 - a2).abs() <= 1e-8 * a1.abs().max(1.0), "{i}: {a1} {a2}");
            assert!((w1 - w2).abs() <= 1e-8 * w1.abs().max(1.0), "{i}: {w1} {w2}");
        }
    }

    #[test]
    fn direct_nr_zero_error() {
        let s = st(0.4, 2.0, 0.3, -1.0);
        let y_hat = bicycle_predict(&s, 0.8).unwrap();
        assert_eq!(bicycle_direct_nr(&s, &y_hat, 30.0, 0.8).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn steering_wraps_mod_pi() {
        use std::f64::consts::{FRAC_PI_2, PI};
        assert_eq!(wrap_steering(0.3), 0.3);
        assert!((wrap_steering(2.22) - (2.22 - PI)).abs() < 1e-15);
        assert!((wrap_steering(-2.0) - (PI - 2.0)).abs() < 1e-15);
        assert_eq!(wrap_steering(-FRAC_PI_2), FRAC_PI_2);
        for d in [-7.0, -1.0, 0.5, 4.0, 11.0] {
            assert!((wrap_steering(d).tan() - f64::tan(d)).abs() < 1e-9 * f64::tan(d).abs().max(1.0));
        }
        // a steering step past π/2 lands back inside the chart
        let b = Bicycle::new(2.0).unwrap();
        let z = b.euler_step(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0], &[0.0, 2220.0], 1e-3);
        assert!((z[4] - (2.22 - PI)).abs() < 1e-12);
        assert!(b.check_state(&z).is_ok());
    }

    #[test]
    fn flat_roundtrip() {
        let s = BicycleState {
            px: 3.0,
            py: -1.0,
            theta: 2.2,
            v: 4.0,
            delta: -0.9,
            a: 1.5,
            wheelbase_l: 2.0,
        };
        let back = bicycle_from_flat(&bicycle_forward(&s).unwrap(), 2.0).unwrap();
        for (a, b) in back.to_vec().iter().zip(s.to_vec()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
