use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::reference::ReferenceSpec;
use crate::error::{Error, Result};
use crate::vehicle_models::{STEER_WARN, V_MIN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Unicycle,
    Bicycle,
    /// Two parallel integrator chains of order `k+1`.
    Trivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    /// Newton-Raphson flow law in flat coordinates.
    NrFlat,
    /// Newton-Raphson flow law on the model's own predictor.
    NrDirect,
    /// Flat law with the predictor drift cancelled.
    Modified,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Unicycle => "unicycle",
            Self::Bicycle => "bicycle",
            Self::Trivial => "trivial",
        })
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NrFlat => "nr_flat",
            Self::NrDirect => "nr_direct",
            Self::Modified => "modified",
        })
    }
}

fn default_l() -> f64 {
    2.0
}
fn default_v_min() -> f64 {
    V_MIN
}
fn default_steer_warn() -> f64 {
    STEER_WARN
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Bicycle wheelbase in meters.
    #[serde(default = "default_l")]
    pub l: f64,
    #[serde(default = "default_v_min")]
    pub v_min: f64,
    /// Integrator-chain order of the trivial model.
    #[serde(default)]
    pub k: usize,
    /// Steering magnitude that triggers a near-singularity warning.
    #[serde(default = "default_steer_warn")]
    pub steer_warn: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            l: default_l(),
            v_min: default_v_min(),
            k: 0,
            steer_warn: default_steer_warn(),
        }
    }
}

fn default_settle_fraction() -> f64 {
    0.02
}

/// One closed-loop simulation. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelKind,
    pub controller: ControllerKind,
    pub alpha: f64,
    #[serde(rename = "horizon_T", alias = "horizon")]
    pub horizon: f64,
    pub dt: f64,
    pub duration: f64,
    pub reference: ReferenceSpec,
    /// Vehicles accept `[px, py, θ]` or the full state; the trivial model
    /// takes the stacked `ỹ` optionally followed by `ν`. Missing entries use
    /// `v = 1`, `δ = 0`, `a = 0`, zero derivatives.
    #[serde(default)]
    pub initial_state: Option<Vec<f64>>,
    #[serde(default)]
    pub model_params: ModelParams,
    #[serde(default = "default_settle_fraction")]
    pub settle_fraction: f64,
    /// Output directory used by the command-line front end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            v.push(format!("dt: must be > 0 (got {})", self.dt));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            v.push(format!("duration: must be >= 0 (got {})", self.duration));
        }
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            v.push(format!("alpha: must be > 1 (got {})", self.alpha));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            v.push(format!("horizon_T: must be > 0 (got {})", self.horizon));
        }
        if !(self.settle_fraction > 0.0 && self.settle_fraction < 1.0) {
            v.push(format!(
                "settle_fraction: must lie in (0, 1) (got {})",
                self.settle_fraction
            ));
        }
        let p = &self.model_params;
        if !(p.l > 0.0 && p.l.is_finite()) {
            v.push(format!("model_params.l: must be > 0 (got {})", p.l));
        }
        if !(p.v_min > 0.0 && p.v_min.is_finite()) {
            v.push(format!("model_params.v_min: must be > 0 (got {})", p.v_min));
        }
        if !(p.steer_warn > 0.0) {
            v.push(format!("model_params.steer_warn: must be > 0 (got {})", p.steer_warn));
        }
        if self.model != ModelKind::Trivial && p.k != 0 {
            v.push(format!(
                "model_params.k: only applies to the trivial model (got {} for {})",
                p.k, self.model
            ));
        }
        if let Some(z) = &self.initial_state {
            let allowed = self.initial_state_lengths();
            if !allowed.contains(&z.len()) {
                v.push(format!(
                    "initial_state: {} expects {} entries (got {})",
                    self.model,
                    allowed
                        .iter()
                        .map(usize::to_string)
                        .collect::<Vec<_>>()
                        .join(" or "),
                    z.len()
                ));
            }
            if z.iter().any(|x| !x.is_finite()) {
                v.push("initial_state: entries must be finite".into());
            }
        }
        v.extend(self.reference.violations());
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    fn initial_state_lengths(&self) -> Vec<usize> {
        match self.model {
            ModelKind::Unicycle => vec![3, 4],
            ModelKind::Bicycle => vec![3, 6],
            ModelKind::Trivial => {
                let n = 2 * (self.model_params.k + 1);
                vec![n, n + 2]
            }
        }
    }

    /// The initial state with defaults filled in.
    pub fn full_initial_state(&self) -> Vec<f64> {
        let given = self.initial_state.clone().unwrap_or_default();
        let defaults: Vec<f64> = match self.model {
            ModelKind::Unicycle => vec![0.0, 0.0, 0.0, 1.0],
            ModelKind::Bicycle => vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            ModelKind::Trivial => vec![0.0; 2 * (self.model_params.k + 2)],
        };
        defaults
            .iter()
            .enumerate()
            .map(|(i, d)| given.get(i).copied().unwrap_or(*d))
            .collect()
    }
}
