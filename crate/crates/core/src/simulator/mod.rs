//! Fixed-step closed-loop simulation of a (model, controller, reference)
//! combination, with trace recording, tracking metrics and CSV/JSON/SVG
//! output.

mod config;
mod metrics;
mod output;
mod reference;
mod run;

pub use config::{ControllerKind, ModelKind, ModelParams, ScenarioConfig};
pub use metrics::{compute_metrics, max_error_between, InputExtrema, Metrics};
pub use output::{csv_header, csv_string, render_svg, summarize, write_csv, Summary};
pub use reference::{eval_reference, Interpolation, Reference, ReferenceSpec};
pub use run::{run_scenario, run_scenario_in, step_count, Record, RunStatus, SimTrace};
