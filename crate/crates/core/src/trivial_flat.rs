//! Chain-of-integrators flat dynamics and the controllers that act on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly_core::Matrix;
use crate::stability::{LinearSystem, TrivialFlatSpec, EPS_SING};

/// Flat coordinates `ỹ = (y, ẏ, …, y^{(k)})` and input `ν = y^{(k+1)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatState {
    pub y_stack: Vec<Vec<f64>>,
    pub nu: Vec<f64>,
}

impl FlatState {
    pub fn new(y_stack: Vec<Vec<f64>>, nu: Vec<f64>) -> Result<Self> {
        let m = nu.len();
        if y_stack.is_empty() {
            return Err(Error::Dimension("flat state needs at least y".into()));
        }
        if let Some(bad) = y_stack.iter().position(|v| v.len() != m) {
            return Err(Error::Dimension(format!(
                "derivative {bad} has dimension {}, expected {m}",
                y_stack[bad].len()
            )));
        }
        let s = Self { y_stack, nu };
        if !s.is_finite() {
            return Err(Error::NonFinite("flat state"));
        }
        Ok(s)
    }

    pub fn zeros(m: usize, k: usize) -> Self {
        Self {
            y_stack: vec![vec![0.0; m]; k + 1],
            nu: vec![0.0; m],
        }
    }

    pub fn m(&self) -> usize {
        self.nu.len()
    }

    pub fn k(&self) -> usize {
        self.y_stack.len() - 1
    }

    pub fn y(&self) -> &[f64] {
        &self.y_stack[0]
    }

    pub fn is_finite(&self) -> bool {
        self.y_stack.iter().flatten().chain(&self.nu).all(|x| x.is_finite())
    }

    /// `ỹ` stacked into one vector of length `m(k+1)`.
    pub fn stacked(&self) -> Vec<f64> {
        self.y_stack.iter().flatten().copied().collect()
    }

    /// Inverse of [`FlatState::stacked`] plus `ν`.
    pub fn from_stacked(m: usize, stacked: &[f64], nu: &[f64]) -> Result<Self> {
        if m == 0 || !stacked.len().is_multiple_of(m) || stacked.is_empty() {
            return Err(Error::Dimension(format!(
                "cannot split {} values into blocks of {m}",
                stacked.len()
            )));
        }
        Self::new(
            stacked.chunks(m).map(<[f64]>::to_vec).collect(),
            nu.to_vec(),
        )
    }

    /// Derivative `i` of y, where `i = k+1` is ν.
    fn derivative(&self, i: usize) -> &[f64] {
        if i < self.y_stack.len() {
            &self.y_stack[i]
        } else {
            &self.nu
        }
    }
}

/// `e = r(t+T) − ŷ(t+T)` with the horizon it was formed at.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionError {
    pub e: Vec<f64>,
    pub horizon_t: f64,
}

impl PredictionError {
    pub fn norm(&self) -> f64 {
        self.e.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Taylor step `Σ_{i=0}^{k+1} Tⁱ/i! y^{(i)}` with `y^{(k+1)} = ν`.
pub fn trivial_predict(state: &FlatState, spec: &TrivialFlatSpec) -> Vec<f64> {
    taylor(state, spec.horizon, 0)
}

/// `Σ_{i=0}^{k+1-shift} Tⁱ/i! y^{(i+shift)}`.
fn taylor(state: &FlatState, t: f64, shift: usize) -> Vec<f64> {
    let k = state.k();
    let mut out = vec![0.0; state.m()];
    let mut w = 1.0;
    for i in 0..=k + 1 - shift {
        if i > 0 {
            w *= t / i as f64;
        }
        for (o, d) in out.iter_mut().zip(state.derivative(i + shift)) {
            *o += w * d;
        }
    }
    out
}

pub fn prediction_error(
    state: &FlatState,
    r_future: &[f64],
    spec: &TrivialFlatSpec,
) -> PredictionError {
    let y_hat = trivial_predict(state, spec);
    PredictionError {
        e: r_future.iter().zip(&y_hat).map(|(r, y)| r - y).collect(),
        horizon_t: spec.horizon,
    }
}

/// Newton-Raphson flow law on the flat dynamics,
/// `ν̇ = α (k+1)!/T^{k+1} (r(t+T) − ŷ(t+T))`.
pub fn nr_flat_rate(state: &FlatState, r_future: &[f64], spec: &TrivialFlatSpec) -> Vec<f64> {
    let g = spec.alpha * spec.gain();
    prediction_error(state, r_future, spec)
        .e
        .into_iter()
        .map(|e| g * e)
        .collect()
}

/// Flow law with the predictor drift cancelled,
/// `ν̇ = (k+1)!/T^{k+1} (α e − C e^{AT} ẏ̃)`, under which `ė = −αe` for a
/// constant reference.
pub fn modified_flat_rate(
    state: &FlatState,
    r_future: &[f64],
    spec: &TrivialFlatSpec,
) -> Vec<f64> {
    let e = prediction_error(state, r_future, spec).e;
    // C e^{AT} (Aỹ + Bν) is the Taylor sum shifted by one derivative
    let drift = taylor(state, spec.horizon, 1);
    let g = spec.gain();
    e.iter()
        .zip(&drift)
        .map(|(e, d)| g * (spec.alpha * e - d))
        .collect()
}

/// Forward-Euler step of the integrator chain.
pub fn step_trivial(state: &FlatState, nu_dot: &[f64], dt: f64) -> FlatState {
    let k = state.k();
    let y_stack = (0..=k)
        .map(|i| {
            state.y_stack[i]
                .iter()
                .zip(state.derivative(i + 1))
                .map(|(y, d)| y + dt * d)
                .collect()
        })
        .collect();
    let nu = state.nu.iter().zip(nu_dot).map(|(n, d)| n + dt * d).collect();
    FlatState { y_stack, nu }
}

/// Richardson diagnostic: max-norm gap between one Euler step of `dt` and
/// two of `dt/2`, holding `ν̇` fixed. Shrinks like `dt²`.
pub fn euler_step_gap(state: &FlatState, nu_dot: &[f64], dt: f64) -> f64 {
    let full = step_trivial(state, nu_dot, dt);
    let half = step_trivial(&step_trivial(state, nu_dot, dt / 2.0), nu_dot, dt / 2.0);
    full.stacked()
        .iter()
        .chain(&full.nu)
        .zip(half.stacked().iter().chain(&half.nu))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Exact linear predictor `ŷ(t+T) = C e^{AT} x + C∫₀ᵀe^{Aτ}dτ B u` of a
/// linear plant, with the Newton-Raphson flow laws built on it.
#[derive(Clone, Debug)]
pub struct LinearPredictor {
    sys: LinearSystem,
    horizon: f64,
    c_exp: Matrix,
    gain: Matrix,
    gain_inv: Matrix,
}

impl LinearPredictor {
    pub fn new(sys: LinearSystem, horizon: f64) -> Result<Self> {
        let (e, gain) = sys.predictor_matrices(horizon)?;
        let (gain_inv, cond) = gain.inverse_with_condition()?;
        if !(cond <= EPS_SING) {
            return Err(Error::Singular {
                what: "predictor gain C·∫₀ᵀe^{Aτ}dτ·B".into(),
                condition: cond,
            });
        }
        Ok(Self {
            c_exp: sys.c.matmul(&e)?,
            sys,
            horizon,
            gain,
            gain_inv,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `C∫₀ᵀe^{Aτ}dτ B`, the Jacobian of the prediction in the input.
    pub fn input_gain(&self) -> &Matrix {
        &self.gain
    }

    pub fn predict(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let a = self.c_exp.mul_vec(x)?;
        let b = self.gain.mul_vec(u)?;
        Ok(a.iter().zip(&b).map(|(a, b)| a + b).collect())
    }

    /// `u̇ = α (C∫e^{Aτ}dτB)⁻¹ (r − ŷ)`.
    pub fn nr_rate(&self, x: &[f64], u: &[f64], r_future: &[f64], alpha: f64) -> Result<Vec<f64>> {
        let y_hat = self.predict(x, u)?;
        let e: Vec<f64> = r_future.iter().zip(&y_hat).map(|(r, y)| alpha * (r - y)).collect();
        self.gain_inv.mul_vec(&e)
    }

    /// `u̇ = (C∫e^{Aτ}dτB)⁻¹ (α(r − ŷ) − C e^{AT}(Ax + Bu))`.
    pub fn modified_rate(
        &self,
        x: &[f64],
        u: &[f64],
        r_future: &[f64],
        alpha: f64,
    ) -> Result<Vec<f64>> {
        let y_hat = self.predict(x, u)?;
        let ax = self.sys.a.mul_vec(x)?;
        let bu = self.sys.b.mul_vec(u)?;
        let xdot: Vec<f64> = ax.iter().zip(&bu).map(|(a, b)| a + b).collect();
        let drift = self.c_exp.mul_vec(&xdot)?;
        let v: Vec<f64> = r_future
            .iter()
            .zip(&y_hat)
            .zip(&drift)
            .map(|((r, y), d)| alpha * (r - y) - d)
            .collect();
        self.gain_inv.mul_vec(&v)
    }
}
