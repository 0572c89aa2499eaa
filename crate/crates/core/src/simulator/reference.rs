use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn sine_x_rate() -> f64 {
    0.2
}
fn sine_amplitude() -> f64 {
    10.0
}
fn sine_period() -> f64 {
    50.0
}
fn spiral_growth() -> f64 {
    0.0125
}
fn spiral_angular_rate() -> f64 {
    0.25
}
fn spiral_s0() -> f64 {
    284.0
}

/// Reference trajectory as written in a scenario file.
///
/// Analytic kinds default to the sine wave `(t/5, 10 sin(2πt/50))` and the
/// spiral `e^{0.0125s}(cos 0.25s, sin 0.25s)` with `s = 284 − t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    Sine {
        #[serde(default = "sine_x_rate")]
        x_rate: f64,
        #[serde(default = "sine_amplitude")]
        amplitude: f64,
        #[serde(default = "sine_period")]
        period: f64,
    },
    Spiral {
        #[serde(default = "spiral_growth")]
        growth: f64,
        #[serde(default = "spiral_angular_rate")]
        angular_rate: f64,
        #[serde(default = "spiral_s0")]
        s0: f64,
    },
    Constant {
        point: [f64; 2],
    },
    /// CSV of `t,x,y` rows; a non-numeric first line is taken as a header.
    File {
        path: PathBuf,
        #[serde(default)]
        interpolation: Interpolation,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Zero-order hold on the most recent sample.
    Hold,
}

impl ReferenceSpec {
    pub fn sine() -> Self {
        Self::Sine {
            x_rate: sine_x_rate(),
            amplitude: sine_amplitude(),
            period: sine_period(),
        }
    }

    pub fn spiral() -> Self {
        Self::Spiral {
            growth: spiral_growth(),
            angular_rate: spiral_angular_rate(),
            s0: spiral_s0(),
        }
    }

    /// Problems with the parameters, each prefixed by its field name.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut finite = |name: &str, x: f64| {
            if !x.is_finite() {
                out.push(format!("reference.{name}: must be finite (got {x})"));
            }
        };
        match self {
            Self::Sine {
                x_rate,
                amplitude,
                period,
            } => {
                finite("x_rate", *x_rate);
                finite("amplitude", *amplitude);
                if !(*period > 0.0 && period.is_finite()) {
                    out.push(format!("reference.period: must be > 0 (got {period})"));
                }
            }
            Self::Spiral {
                growth,
                angular_rate,
                s0,
            } => {
                finite("growth", *growth);
                finite("angular_rate", *angular_rate);
                finite("s0", *s0);
            }
            Self::Constant { point } => {
                finite("point[0]", point[0]);
                finite("point[1]", point[1]);
            }
            Self::File { .. } => {}
        }
        out
    }

    /// Resolves the spec into an evaluable reference; file paths are taken
    /// relative to `base_dir`.
    pub fn load(&self, base_dir: &Path) -> Result<Reference> {
        match self {
            Self::File {
                path,
                interpolation,
            } => {
                let full = base_dir.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| Error::Io(format!("{}: {e}", full.display())))?;
                let samples = parse_samples(&text)
                    .map_err(|m| Error::Config(vec![format!("reference.path ({}): {m}", full.display())]))?;
                Reference::sampled(samples, *interpolation)
            }
            other => Ok(Reference::Analytic(other.clone())),
        }
    }
}

fn parse_samples(text: &str) -> std::result::Result<Vec<[f64; 3]>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse()).collect();
        match parsed {
            Ok(v) if v.len() == 3 => out.push([v[0], v[1], v[2]]),
            Ok(v) => return Err(format!("line {}: expected 3 columns, got {}", i + 1, v.len())),
            Err(_) if out.is_empty() && i == 0 => continue,
            Err(e) => return Err(format!("line {}: {e}", i + 1)),
        }
    }
    Ok(out)
}

/// An evaluable reference `r(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    Analytic(ReferenceSpec),
    Sampled {
        samples: Vec<[f64; 3]>,
        interpolation: Interpolation,
    },
}

impl Reference {
    /// Validates that sample times are finite and strictly increasing.
    pub fn sampled(samples: Vec<[f64; 3]>, interpolation: Interpolation) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Config(vec!["reference: no samples".into()]));
        }
        if let Some(bad) = samples.iter().position(|s| !s.iter().all(|x| x.is_finite())) {
            return Err(Error::Config(vec![format!("reference: sample {bad} is not finite")]));
        }
        if let Some(i) = samples.windows(2).position(|w| w[1][0] <= w[0][0]) {
            return Err(Error::Config(vec![format!(
                "reference: sample times must increase strictly (t = {} then {})",
                samples[i][0],
                samples[i + 1][0]
            )]));
        }
        Ok(Self::Sampled {
            samples,
            interpolation,
        })
    }

    pub fn eval(&self, t: f64) -> Result<[f64; 2]> {
        match self {
            Self::Analytic(spec) => Ok(eval_analytic(spec, t)),
            Self::Sampled {
                samples,
                interpolation,
            } => eval_sampled(samples, *interpolation, t),
        }
    }
}

/// `r(t)` for a reference.
pub fn eval_reference(reference: &Reference, t: f64) -> Result<[f64; 2]> {
    reference.eval(t)
}

fn eval_analytic(spec: &ReferenceSpec, t: f64) -> [f64; 2] {
    match *spec {
        ReferenceSpec::Sine {
            x_rate,
            amplitude,
            period,
        } => [x_rate * t, amplitude * (TAU * t / period).sin()],
        ReferenceSpec::Spiral {
            growth,
            angular_rate,
            s0,
        } => {
            let s = s0 - t;
            let (sn, cs) = (angular_rate * s).sin_cos();
            let g = (growth * s).exp();
            [g * cs, g * sn]
        }
        ReferenceSpec::Constant { point } => point,
        ReferenceSpec::File { .. } => unreachable!("file references are resolved by load"),
    }
}

fn eval_sampled(samples: &[[f64; 3]], mode: Interpolation, t: f64) -> Result<[f64; 2]> {
    let first = samples[0];
    if t < first[0] {
        return Err(Error::Domain(format!(
            "reference queried at t = {t} before its first sample at {}",
            first[0]
        )));
    }
    // index of the last sample with time <= t
    let i = samples.partition_point(|s| s[0] <= t) - 1;
    let lo = samples[i];
    let Some(hi) = samples.get(i + 1) else {
        return Ok([lo[1], lo[2]]);
    };
    Ok(match mode {
        Interpolation::Hold => [lo[1], lo[2]],
        Interpolation::Linear => {
            let w = (t - lo[0]) / (hi[0] - lo[0]);
            [lo[1] + w * (hi[1] - lo[1]), lo[2] + w * (hi[2] - lo[2])]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(spec: ReferenceSpec, t: f64) -> [f64; 2] {
        Reference::Analytic(spec).eval(t).unwrap()
    }

    #[test]
    fn sine_values() {
        assert_eq!(at(ReferenceSpec::sine(), 0.0), [0.0, 0.0]);
        let r = at(ReferenceSpec::sine(), 12.5);
        assert!((r[0] - 2.5).abs() < 1e-15 && (r[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn spiral_ends_on_unit_circle() {
        assert_eq!(at(ReferenceSpec::spiral(), 284.0), [1.0, 0.0]);
        let r = at(ReferenceSpec::spiral(), 0.0);
        let radius = r[0].hypot(r[1]);
        assert!((radius - (0.0125_f64 * 284.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn defaults_fill_in() {
        let spec: ReferenceSpec = serde_json::from_str(r#"{"kind": "spiral"}"#).unwrap();
        assert_eq!(spec, ReferenceSpec::spiral());
        let bad = serde_json::from_str::<ReferenceSpec>(r#"{"kind": "sine", "freq": 1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn sampled_interpolation() {
        let s = vec![[0.0, 0.0, 0.0], [1.0, 2.0, -2.0], [3.0, 2.0, 2.0]];
        let lin = Reference::sampled(s.clone(), Interpolation::Linear).unwrap();
        assert_eq!(lin.eval(0.5).unwrap(), [1.0, -1.0]);
        assert_eq!(lin.eval(2.0).unwrap(), [2.0, 0.0]);
        assert_eq!(lin.eval(1.0).unwrap(), [2.0, -2.0]);
        assert_eq!(lin.eval(50.0).unwrap(), [2.0, 2.0]);
        assert!(matches!(lin.eval(-0.1), Err(Error::Domain(_))));

        let hold = Reference::sampled(s, Interpolation::Hold).unwrap();
        assert_eq!(hold.eval(2.9).unwrap(), [2.0, -2.0]);
    }

    #[test]
    fn sample_times_must_increase() {
        let s = vec![[0.0, 0.0, 0.0], [0.0, 1.0, 1.0]];
        assert!(matches!(
            Reference::sampled(s, Interpolation::Linear),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn csv_with_header() {
        let s = parse_samples("t,x,y\n0,1,2\n1, 3, 4\n").unwrap();
        assert_eq!(s, vec![[0.0, 1.0, 2.0], [1.0, 3.0, 4.0]]);
        assert!(parse_samples("0,1\n").is_err());
    }
}
