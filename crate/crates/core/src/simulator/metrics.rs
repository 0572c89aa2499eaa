use serde::Serialize;

use super::run::SimTrace;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputExtrema {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub records: usize,
    /// Set when the run was truncated, so the figures cover only part of it.
    pub partial: bool,
    pub settle_fraction: f64,
    pub initial_error: f64,
    pub final_error: f64,
    pub max_error: f64,
    /// First time after which the error stays at or below
    /// `settle_fraction × initial_error`; `None` if it never does.
    pub settling_time: Option<f64>,
    /// Largest error over the final half of the recorded time span.
    pub steady_state_max_error: f64,
    pub input_extrema: Vec<InputExtrema>,
}

/// Summary figures for a trace. Expects at least one record.
pub fn compute_metrics(trace: &SimTrace, settle_fraction: f64) -> Metrics {
    let recs = &trace.records;
    let first = recs.first().map_or(f64::NAN, |r| r.err);
    let last = recs.last().map_or(f64::NAN, |r| r.err);
    let t_end = recs.last().map_or(0.0, |r| r.t);

    let threshold = settle_fraction * first;
    // index just past the last record that is above the band
    let settled_from = match recs.iter().rposition(|r| !(r.err <= threshold)) {
        None => Some(0),
        Some(i) if i + 1 < recs.len() => Some(i + 1),
        Some(_) => None,
    };

    let input_extrema = trace
        .input_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let (lo, hi) = recs
                .iter()
                .filter_map(|r| r.rates.as_ref().map(|u| u[j]))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(x), hi.max(x))
                });
            InputExtrema {
                name: name.clone(),
                min: lo,
                max: hi,
            }
        })
        .collect();

    Metrics {
        records: recs.len(),
        partial: !trace.status.is_completed(),
        settle_fraction,
        initial_error: first,
        final_error: last,
        max_error: recs.iter().map(|r| r.err).fold(0.0, f64::max),
        settling_time: settled_from.map(|i| recs[i].t),
        steady_state_max_error: max_error_between(trace, 0.5 * t_end, t_end).unwrap_or(f64::NAN),
        input_extrema,
    }
}

/// Largest tracking error over records with `t0 ≤ t ≤ t1`.
pub fn max_error_between(trace: &SimTrace, t0: f64, t1: f64) -> Option<f64> {
    trace
        .records
        .iter()
        .filter(|r| r.t >= t0 && r.t <= t1)
        .map(|r| r.err)
        .reduce(f64::max)
}
