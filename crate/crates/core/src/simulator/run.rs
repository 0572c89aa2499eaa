use std::path::Path;

use serde::Serialize;

use super::config::{ControllerKind, ModelKind, ScenarioConfig};
use super::reference::Reference;
use crate::error::{Error, Result};
use crate::stability::{trivial_ABC, TrivialFlatSpec};
use crate::trivial_flat::{
    modified_flat_rate, nr_flat_rate, step_trivial, trivial_predict, FlatState, LinearPredictor,
};
use crate::vehicle_models::{Bicycle, FlatVehicleModel, Unicycle};

/// One sample of a closed-loop run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub t: f64,
    pub state: Vec<f64>,
    /// Rates applied over `[t, t + dt)`; absent on the final record and
    /// where the controller could not be evaluated.
    pub rates: Option<Vec<f64>>,
    /// `ỹ` stacked, then `ν`. Empty if the flat map is undefined here.
    pub flat: Vec<f64>,
    pub r: [f64; 2],
    pub r_future: [f64; 2],
    pub y_hat: [f64; 2],
    pub y: [f64; 2],
    /// `‖r(t) − y(t)‖`
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// The run stopped early at `t`; the trace holds everything up to it.
    Truncated { t: f64, reason: String },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, Self::Completed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimTrace {
    pub model: ModelKind,
    pub controller: ControllerKind,
    pub state_names: Vec<String>,
    pub input_names: Vec<String>,
    pub dt: f64,
    pub horizon: f64,
    /// Steps the run was configured for; the trace has `steps + 1` records
    /// unless truncated.
    pub steps: usize,
    pub records: Vec<Record>,
    pub status: RunStatus,
    pub warnings: Vec<String>,
}

/// Number of Euler steps, `floor(duration/dt)` with a relative guard so
/// that e.g. `0.5 / 1e-5` is not rounded down by representation error.
pub fn step_count(duration: f64, dt: f64) -> usize {
    let ratio = duration / dt;
    (ratio + 1e-9 * ratio.max(1.0)).floor() as usize
}

enum Plant {
    Vehicle(Box<dyn FlatVehicleModel>),
    Trivial {
        spec: TrivialFlatSpec,
        direct: Option<Box<LinearPredictor>>,
    },
}

impl Plant {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let p = &cfg.model_params;
        Ok(match cfg.model {
            ModelKind::Unicycle => Self::Vehicle(Box::new(Unicycle { v_min: p.v_min })),
            ModelKind::Bicycle => Self::Vehicle(Box::new(Bicycle {
                wheelbase_l: p.l,
                v_min: p.v_min,
            })),
            ModelKind::Trivial => {
                let spec = TrivialFlatSpec::new(2, p.k, cfg.horizon, cfg.alpha)?;
                let direct = match cfg.controller {
                    ControllerKind::NrDirect => {
                        Some(Box::new(LinearPredictor::new(trivial_ABC(&spec), cfg.horizon)?))
                    }
                    _ => None,
                };
                Self::Trivial { spec, direct }
            }
        })
    }

    fn names(&self) -> (Vec<String>, Vec<String>) {
        match self {
            Self::Vehicle(m) => (
                m.state_names().iter().map(|s| s.to_string()).collect(),
                m.input_names().iter().map(|s| s.to_string()).collect(),
            ),
            Self::Trivial { spec, .. } => {
                let mut state = Vec::new();
                for i in 0..=spec.k {
                    let stem = if i == 0 { "y".to_string() } else { format!("y{i}") };
                    state.push(format!("{stem}_x"));
                    state.push(format!("{stem}_y"));
                }
                state.push("nu_x".into());
                state.push("nu_y".into());
                (state, vec!["nu_dot_x".into(), "nu_dot_y".into()])
            }
        }
    }

    fn flat(&self, z: &[f64]) -> Result<FlatState> {
        match self {
            Self::Vehicle(m) => m.forward(z),
            Self::Trivial { .. } => {
                let (stack, nu) = z.split_at(z.len() - 2);
                FlatState::from_stacked(2, stack, nu)
            }
        }
    }

    fn predict(&self, z: &[f64], horizon: f64) -> Result<[f64; 2]> {
        match self {
            Self::Vehicle(m) => m.predict(z, horizon),
            Self::Trivial { spec, .. } => {
                let p = trivial_predict(&self.flat(z)?, spec);
                Ok([p[0], p[1]])
            }
        }
    }

    fn rates(
        &self,
        z: &[f64],
        r_future: &[f64],
        controller: ControllerKind,
        alpha: f64,
        horizon: f64,
    ) -> Result<Vec<f64>> {
        match self {
            Self::Vehicle(m) => match controller {
                ControllerKind::NrFlat => m.flat_control(z, r_future, alpha, horizon),
                ControllerKind::NrDirect => m.direct_nr(z, r_future, alpha, horizon),
                ControllerKind::Modified => {
                    let spec = TrivialFlatSpec {
                        m: 2,
                        k: m.flat_order(),
                        horizon,
                        alpha,
                    };
                    let f = m.forward(z)?;
                    m.inverse_rate(&f, &modified_flat_rate(&f, r_future, &spec))
                }
            },
            Self::Trivial { spec, direct } => {
                let f = self.flat(z)?;
                match (controller, direct) {
                    (ControllerKind::NrDirect, Some(p)) => {
                        p.nr_rate(&f.stacked(), &f.nu, r_future, alpha)
                    }
                    (ControllerKind::Modified, _) => Ok(modified_flat_rate(&f, r_future, spec)),
                    _ => Ok(nr_flat_rate(&f, r_future, spec)),
                }
            }
        }
    }

    fn step(&self, z: &[f64], rates: &[f64], dt: f64) -> Result<Vec<f64>> {
        match self {
            Self::Vehicle(m) => Ok(m.euler_step(z, rates, dt)),
            Self::Trivial { .. } => {
                let next = step_trivial(&self.flat(z)?, rates, dt);
                let mut out = next.stacked();
                out.extend(next.nu);
                Ok(out)
            }
        }
    }
}

/// Tracks how far the bicycle steering strays toward `±π/2`.
#[derive(Default)]
struct SteerWatch {
    first_t: Option<f64>,
    steps: usize,
    peak: f64,
}

/// Runs a scenario whose file references resolve against the working
/// directory.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimTrace> {
    run_scenario_in(cfg, Path::new("."))
}

/// Forward-Euler closed loop. Each step evaluates `r(t+T)` (analytically
/// past the end of the run), computes the controller rates, records, and
/// integrates. A singularity or a non-finite state ends the run early with
/// a [`RunStatus::Truncated`] status rather than an error.
pub fn run_scenario_in(cfg: &ScenarioConfig, base_dir: &Path) -> Result<SimTrace> {
    cfg.validate()?;
    let reference = cfg.reference.load(base_dir)?;
    let plant = Plant::new(cfg)?;
    let (state_names, input_names) = plant.names();
    let steps = step_count(cfg.duration, cfg.dt);
    let horizon = cfg.horizon;

    let mut z = cfg.full_initial_state();
    let mut records = Vec::with_capacity(steps + 1);
    let mut status = RunStatus::Completed;
    let mut steer = SteerWatch::default();

    for i in 0..=steps {
        let t = i as f64 * cfg.dt;
        let mut rec = match observe(&plant, &reference, &z, t, horizon) {
            Ok(rec) => rec,
            Err(e) => {
                records.push(bare_record(&z, t));
                status = truncated(t, e);
                break;
            }
        };
        if cfg.model == ModelKind::Bicycle && z[4].abs() > cfg.model_params.steer_warn {
            steer.first_t.get_or_insert(t);
            steer.steps += 1;
            steer.peak = steer.peak.max(z[4].abs());
        }
        if i == steps {
            records.push(rec);
            break;
        }
        let rates = match plant
            .rates(&z, &rec.r_future, cfg.controller, cfg.alpha, horizon)
            .and_then(|u| finite(u, "controller rates"))
        {
            Ok(u) => u,
            Err(e) => {
                records.push(rec);
                status = truncated(t, e);
                break;
            }
        };
        let next = plant.step(&z, &rates, cfg.dt)?;
        rec.rates = Some(rates);
        records.push(rec);
        if !next.iter().all(|x| x.is_finite()) {
            status = truncated(t + cfg.dt, Error::NonFinite("state after Euler step"));
            break;
        }
        z = next;
    }

    let mut warnings = Vec::new();
    if let Some(t0) = steer.first_t {
        warnings.push(format!(
            "steering near singular: |delta| > {:.4} rad from t = {t0:.3} s on {} recorded steps (peak {:.4} rad)",
            cfg.model_params.steer_warn, steer.steps, steer.peak
        ));
    }

    Ok(SimTrace {
        model: cfg.model,
        controller: cfg.controller,
        state_names,
        input_names,
        dt: cfg.dt,
        horizon,
        steps,
        records,
        status,
        warnings,
    })
}

fn finite(u: Vec<f64>, what: &'static str) -> Result<Vec<f64>> {
    if u.iter().all(|x| x.is_finite()) {
        Ok(u)
    } else {
        Err(Error::NonFinite(what))
    }
}

fn truncated(t: f64, e: Error) -> RunStatus {
    RunStatus::Truncated {
        t,
        reason: e.to_string(),
    }
}

fn observe(
    plant: &Plant,
    reference: &Reference,
    z: &[f64],
    t: f64,
    horizon: f64,
) -> Result<Record> {
    let r = reference.eval(t)?;
    let r_future = reference.eval(t + horizon)?;
    let y_hat = plant.predict(z, horizon)?;
    let f = plant.flat(z)?;
    let mut flat = f.stacked();
    flat.extend_from_slice(&f.nu);
    let y = [z[0], z[1]];
    Ok(Record {
        t,
        state: z.to_vec(),
        rates: None,
        flat,
        r,
        r_future,
        y_hat,
        y,
        err: (r[0] - y[0]).hypot(r[1] - y[1]),
    })
}

/// Record for a state where the observation itself failed.
fn bare_record(z: &[f64], t: f64) -> Record {
    Record {
        t,
        state: z.to_vec(),
        rates: None,
        flat: Vec::new(),
        r: [f64::NAN; 2],
        r_future: [f64::NAN; 2],
        y_hat: [f64::NAN; 2],
        y: [z[0], z[1]],
        err: f64::NAN,
    }
}
