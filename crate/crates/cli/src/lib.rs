//! Command implementations behind the `flatrack` binary. Every command
//! writes to caller-supplied streams and returns its exit status, so the
//! commands can be driven in-process as well as from the shell.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use flatrack::poly_core::{char_poly, poly_roots, routh_hurwitz};
use flatrack::simulator::{
    render_svg, run_scenario_in, summarize, write_csv, RunStatus, ScenarioConfig, Summary,
};
use flatrack::stability::{
    certify, certify_trivial, gain_assigned_A, trivial_ABC, LinearSystem, StabilityCertificate,
    TrivialFlatSpec,
};
use flatrack::vehicle_models::{equivalence_report, Bicycle, FlatVehicleModel, Unicycle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_TRUNCATED: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
/// An equivalence check ran but a residual exceeded its tolerance.
pub const EXIT_CHECK_FAILED: i32 = 4;

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "FLATRACK_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "flatrack", version, about = "Newton-Raphson flow tracking for flat systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write trace.csv, summary.json and trajectory.svg.
    Simulate(SimulateArgs),
    /// Certify α-stability of the trivial closed loop.
    Stability(StabilityArgs),
    /// Check the flat/direct controller equivalence on seeded random states.
    Equivalence(EquivalenceArgs),
    /// Run several scenarios on a worker pool.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Defaults to the config's out_dir, then $FLATRACK_OUT_DIR, then ".".
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long = "T")]
    pub horizon: f64,
    /// Speedup factor for the closed-form cross-check and closed-loop roots.
    #[arg(long, default_value_t = 30.0)]
    pub alpha: f64,
    /// Comma-separated K_1..K_{k+1} of s^{k+1} + K_{k+1}s^k + … + K_1; a
    /// trailing leading coefficient 1 is accepted and dropped.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gains: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VehicleArg {
    Unicycle,
    Bicycle,
}

#[derive(Debug, Args)]
pub struct EquivalenceArgs {
    #[arg(long, value_enum)]
    pub model: VehicleArg,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bicycle wheelbase in meters.
    #[arg(long, default_value_t = 2.0)]
    pub l: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(required = true)]
    pub configs: Vec<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Each scenario writes into `<out-dir>/<config stem>`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses `argv` and runs the command. Usage errors exit with 1.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::Stability(a) => cmd_stability(&a, out, err),
        Command::Equivalence(a) => cmd_equivalence(&a, out, err),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
    }
}

fn default_out_root() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Result of one scenario as reported by `simulate` and `sweep`.
#[derive(Debug, Serialize)]
pub struct ScenarioOutcome {
    pub config: String,
    pub exit: i32,
    pub out_dir: Option<String>,
    pub error: Option<String>,
    pub summary: Option<Summary>,
}

/// Loads, runs and writes one scenario.
pub fn simulate_one(config: &Path, out_dir: Option<&Path>) -> ScenarioOutcome {
    let mut outcome = ScenarioOutcome {
        config: config.display().to_string(),
        exit: EXIT_USAGE,
        out_dir: None,
        error: None,
        summary: None,
    };
    let cfg = match ScenarioConfig::from_path(config) {
        Ok(c) => c,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return outcome;
        }
    };
    let base = config_dir(config);
    let dir = match out_dir {
        Some(d) => d.to_path_buf(),
        None => match &cfg.out_dir {
            Some(d) => base.join(d),
            None => default_out_root(),
        },
    };
    outcome.out_dir = Some(dir.display().to_string());
    let trace = match run_scenario_in(&cfg, &base) {
        Ok(t) => t,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return outcome;
        }
    };
    let summary = summarize(&trace, &cfg);
    let written = (|| -> std::io::Result<()> {
        fs::create_dir_all(&dir)?;
        let mut csv = BufWriter::new(fs::File::create(dir.join("trace.csv"))?);
        write_csv(&trace, &mut csv)?;
        csv.flush()?;
        let json = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
        fs::write(dir.join("summary.json"), json + "\n")?;
        fs::write(dir.join("trajectory.svg"), render_svg(&trace))
    })();
    if let Err(e) = written {
        outcome.error = Some(format!("{}: {e}", dir.display()));
        return outcome;
    }
    outcome.exit = match &trace.status {
        RunStatus::Completed => EXIT_OK,
        RunStatus::Truncated { t, reason } => {
            outcome.error = Some(format!("run truncated at t = {t}: {reason}"));
            EXIT_TRUNCATED
        }
    };
    outcome.summary = Some(summary);
    outcome
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let o = simulate_one(&args.config, args.out_dir.as_deref());
    if let Some(e) = &o.error {
        let _ = writeln!(err, "flatrack simulate: {e}");
    }
    if let (Some(s), Some(dir)) = (&o.summary, &o.out_dir) {
        let m = &s.metrics;
        let _ = writeln!(
            out,
            "{} {}: {} records, steady-state max error {:.6e} m, settling time {} -> {dir}",
            s.model,
            s.controller,
            s.records,
            m.steady_state_max_error,
            m.settling_time
                .map_or_else(|| "none".to_string(), |t| format!("{t:.3} s"))
        );
    }
    o.exit
}

/// Closed-loop check at a specific α, alongside the α-independent
/// certificate.
#[derive(Debug, Serialize)]
pub struct ClosedLoopCheck {
    pub alpha: f64,
    pub hurwitz: bool,
    pub max_real_part: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct StabilityOutput {
    pub k: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub gains: Option<Vec<f64>>,
    pub certificate: StabilityCertificate,
    pub closed_loop: ClosedLoopCheck,
}

/// Certificate for the trivial loop, or its gain-assigned variant.
pub fn stability_output(args: &StabilityArgs) -> flatrack::Result<StabilityOutput> {
    let spec = TrivialFlatSpec::new(args.m, args.k, args.horizon, args.alpha)?;
    let gains = args.gains.as_ref().map(|g| {
        let mut g = g.clone();
        if g.len() == args.k + 2 && g.last() == Some(&1.0) {
            g.pop();
        }
        g
    });
    let (sys, certificate) = match &gains {
        None => (trivial_ABC(&spec), certify_trivial(&spec)?),
        Some(g) => {
            let base = trivial_ABC(&spec);
            let sys = LinearSystem::new(gain_assigned_A(&spec, g)?, base.b, base.c)?;
            let cert = certify(&sys, spec.horizon)?;
            (sys, cert)
        }
    };
    let p = char_poly(&sys.closed_loop_matrix(spec.horizon, spec.alpha)?)?;
    let closed_loop = ClosedLoopCheck {
        alpha: spec.alpha,
        hurwitz: routh_hurwitz(&p)?,
        max_real_part: poly_roots(&p).ok().map(|r| r.max_real_part),
    };
    Ok(StabilityOutput {
        k: args.k,
        m: args.m,
        horizon: args.horizon,
        gains,
        certificate,
        closed_loop,
    })
}

pub fn cmd_stability(args: &StabilityArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match stability_output(args) {
        Ok(o) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o).unwrap_or_default());
            if o.certificate.alpha_stable_sufficient {
                EXIT_OK
            } else {
                EXIT_UNSTABLE
            }
        }
        Err(e) => {
            let _ = writeln!(err, "flatrack stability: {e}");
            EXIT_USAGE
        }
    }
}

pub fn cmd_equivalence(args: &EquivalenceArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let model: Box<dyn FlatVehicleModel> = match args.model {
        VehicleArg::Unicycle => Box::new(Unicycle::default()),
        VehicleArg::Bicycle => match Bicycle::new(args.l) {
            Ok(b) => Box::new(b),
            Err(e) => {
                let _ = writeln!(err, "flatrack equivalence: {e}");
                return EXIT_USAGE;
            }
        },
    };
    match equivalence_report(model.as_ref(), args.samples, args.seed) {
        Ok(rep) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&rep).unwrap_or_default());
            if rep.vacuous {
                let _ = writeln!(err, "flatrack equivalence: no samples drawn; report is vacuous");
            }
            if rep.pass {
                EXIT_OK
            } else {
                let _ = writeln!(err, "flatrack equivalence: residual above tolerance");
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "flatrack equivalence: {e}");
            EXIT_CHECK_FAILED
        }
    }
}

/// Output directory per config: the file stem, suffixed with its position
/// when two configs share a stem.
fn sweep_dirs(root: &Path, configs: &[PathBuf]) -> Vec<PathBuf> {
    let stems: Vec<String> = configs
        .iter()
        .map(|c| {
            c.file_stem()
                .map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned())
        })
        .collect();
    stems
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if stems.iter().filter(|t| *t == s).count() > 1 {
                root.join(format!("{s}-{i}"))
            } else {
                root.join(s)
            }
        })
        .collect()
}

/// Runs every config on `jobs` workers; outcomes come back in input order.
pub fn sweep(configs: &[PathBuf], out_root: &Path, jobs: usize) -> Vec<ScenarioOutcome> {
    let dirs = sweep_dirs(out_root, configs);
    let slots: Vec<Mutex<Option<ScenarioOutcome>>> =
        configs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, configs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= configs.len() {
                    break;
                }
                let o = simulate_one(&configs[i], Some(&dirs[i]));
                *slots[i].lock().expect("slot lock") = Some(o);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every slot filled"))
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let jobs = args.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    if jobs == 0 {
        let _ = writeln!(err, "flatrack sweep: --jobs must be at least 1");
        return EXIT_USAGE;
    }
    let root = args.out_dir.clone().unwrap_or_else(default_out_root);
    let outcomes = sweep(&args.configs, &root, jobs);
    for o in &outcomes {
        if let Some(e) = &o.error {
            let _ = writeln!(err, "flatrack sweep: {}: {e}", o.config);
        }
        let line = serde_json::json!({
            "config": o.config,
            "exit": o.exit,
            "out_dir": o.out_dir,
            "status": o.summary.as_ref().map(|s| &s.run),
            "steady_state_max_error": o.summary.as_ref().map(|s| s.metrics.steady_state_max_error),
        });
        let _ = writeln!(out, "{line}");
    }
    // config errors dominate truncations
    if outcomes.iter().any(|o| o.exit == EXIT_USAGE) {
        EXIT_USAGE
    } else if outcomes.iter().any(|o| o.exit == EXIT_TRUNCATED) {
        EXIT_TRUNCATED
    } else {
        EXIT_OK
    }
}
