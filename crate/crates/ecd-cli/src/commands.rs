//! Subcommand implementations and artifact writing.

use crate::config::FileConfig;
use clap::Args;
use ecd::analysis::{basin_spec_for, basin_volume, volume_ratio, BasinSpec};
use ecd::harness::{
    basin_experiment, run_experiment, ExperimentConfig, InitStrategy, ObjectiveSpec,
};
use ecd::objectives::{calibrate_epsilon, TWO_BASIN_C1, TWO_BASIN_C2};
use ecd::optimizers::{GdmHyperParams, OptimizerSpec};
use ecd::{BbiHyperParams, EcdError, ParameterVector, RunSummary, StopReason};
use serde::Serialize;
use std::path::{Path, PathBuf};

pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn analysis(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    pub fn divergence(message: impl Into<String>) -> Self {
        CliError { code: 4, message: message.into() }
    }
}

impl From<EcdError> for CliError {
    fn from(err: EcdError) -> Self {
        let code = match err {
            EcdError::InvalidConfig(_)
            | EcdError::InvalidHyperParams(_)
            | EcdError::DimensionMismatch { .. }
            | EcdError::NonPositiveInitialLoss(_) => 2,
            EcdError::Diverged(_) => 4,
            _ => 3,
        };
        CliError { code, message: err.to_string() }
    }
}

// ---- shared argument groups ----

#[derive(Args)]
pub struct CommonArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $ECD_OUT_DIR, else the current directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Base seed for all randomness.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Record every Nth trace row (0 disables tracing).
    #[arg(long = "trace-every")]
    pub trace_every: Option<u64>,
}

#[derive(Args)]
pub struct ObjectiveArgs {
    /// Objective: ackley, zakharov, two_basin or quadratic.
    #[arg(long)]
    pub objective: Option<String>,
    /// Dimension (zakharov only).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Depth correction of the narrow two_basin well (default: calibrated).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Curvature parameter m of the quadratic valley.
    #[arg(long)]
    pub mass: Option<f64>,
}

#[derive(Args)]
pub struct HyperArgs {
    /// Step size.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Loss shift / accuracy target.
    #[arg(long = "dV")]
    pub dv: Option<f64>,
    /// Extra initial energy.
    #[arg(long = "dE")]
    pub de: Option<f64>,
    /// Fixed-bounce interval.
    #[arg(long = "T0")]
    pub t0: Option<u64>,
    /// No-progress bounce threshold.
    #[arg(long = "T1")]
    pub t1: Option<u64>,
    /// Number of fixed bounces.
    #[arg(long = "Nb")]
    pub nb: Option<u64>,
    /// Momentum-rescaling tolerance.
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Stopping threshold.
    #[arg(long)]
    pub eps2: Option<f64>,
    /// Lower the loss shift instead of stopping when V goes negative.
    #[arg(long = "adapt-dV")]
    pub adapt_dv: bool,
    /// Iteration budget.
    #[arg(long = "max-iters")]
    pub max_iters: Option<u64>,
    /// GDM learning rate.
    #[arg(long)]
    pub eta: Option<f64>,
    /// GDM momentum coefficient.
    #[arg(long)]
    pub mu: Option<f64>,
}

// ---- config/flag merging ----

fn load_config(common: &CommonArgs) -> Result<FileConfig, CliError> {
    match &common.config {
        Some(path) => FileConfig::load(path).map_err(CliError::usage),
        None => Ok(FileConfig::default()),
    }
}

/// Applies flag overrides on top of the file config; flags win.
fn merge(
    mut cfg: FileConfig,
    common: &CommonArgs,
    obj: &ObjectiveArgs,
    hp: &HyperArgs,
) -> FileConfig {
    cfg.seed = common.seed.or(cfg.seed);
    cfg.trace_every = common.trace_every.or(cfg.trace_every);
    cfg.objective = obj.objective.clone().or(cfg.objective);
    cfg.dim = obj.dim.or(cfg.dim);
    cfg.epsilon = obj.epsilon.or(cfg.epsilon);
    cfg.mass = obj.mass.or(cfg.mass);
    cfg.dt = hp.dt.or(cfg.dt);
    cfg.dv = hp.dv.or(cfg.dv);
    cfg.de = hp.de.or(cfg.de);
    cfg.t0 = hp.t0.or(cfg.t0);
    cfg.t1 = hp.t1.or(cfg.t1);
    cfg.nb = hp.nb.or(cfg.nb);
    cfg.eps1 = hp.eps1.or(cfg.eps1);
    cfg.eps2 = hp.eps2.or(cfg.eps2);
    if hp.adapt_dv {
        cfg.adapt_dv = Some(true);
    }
    cfg.max_iters = hp.max_iters.or(cfg.max_iters);
    cfg.eta = hp.eta.or(cfg.eta);
    cfg.mu = hp.mu.or(cfg.mu);
    cfg
}

fn objective_spec(cfg: &FileConfig) -> ObjectiveSpec {
    ObjectiveSpec {
        name: cfg.objective.clone().unwrap_or_else(|| "ackley".into()),
        dim: cfg.dim,
        epsilon: cfg.epsilon,
        mass: cfg.mass,
    }
}

fn bbi_hyperparams(cfg: &FileConfig) -> BbiHyperParams {
    let d = BbiHyperParams::default();
    BbiHyperParams {
        dt: cfg.dt.unwrap_or(d.dt),
        dv: cfg.dv.unwrap_or(d.dv),
        de: cfg.de.unwrap_or(d.de),
        t0: cfg.t0.unwrap_or(d.t0),
        t1: cfg.t1.unwrap_or(d.t1),
        nb: cfg.nb.unwrap_or(d.nb),
        eps1: cfg.eps1.unwrap_or(d.eps1),
        eps2: cfg.eps2.unwrap_or(d.eps2),
        max_iters: cfg.max_iters.unwrap_or(d.max_iters),
        adapt_dv: cfg.adapt_dv.unwrap_or(false),
    }
}

fn optimizer_spec(name: &str, cfg: &FileConfig) -> Result<OptimizerSpec, CliError> {
    match name {
        "bbi" => Ok(OptimizerSpec::Bbi(bbi_hyperparams(cfg))),
        "mecd" => Ok(OptimizerSpec::Mecd(bbi_hyperparams(cfg))),
        "gdm" => Ok(OptimizerSpec::Gdm {
            hp: GdmHyperParams { eta: cfg.eta.unwrap_or(1e-3), mu: cfg.mu.unwrap_or(0.9) },
            max_iters: cfg.max_iters.unwrap_or(100_000),
        }),
        other => Err(CliError::usage(format!(
            "unknown optimizer '{other}' (expected bbi, mecd or gdm)"
        ))),
    }
}

fn default_theta(spec: &ObjectiveSpec) -> Result<Vec<f64>, CliError> {
    match spec.name.as_str() {
        "ackley" => Ok(vec![2.0, 2.0]),
        "zakharov" => Ok(vec![-1.0; spec.dim.unwrap_or(10)]),
        "two_basin" => Ok(vec![0.0, 0.0]),
        "quadratic" => Ok(vec![1.0]),
        other => Err(CliError::usage(format!("unknown objective '{other}'"))),
    }
}

// ---- artifact plumbing ----

fn resolve_out_dir(flag: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = flag
        .clone()
        .or_else(|| std::env::var_os("ECD_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::analysis(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::analysis(format!("cannot write {}: {e}", path.display())))
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

// ---- run ----

#[derive(Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Optimizer: bbi, mecd or gdm.
    #[arg(long)]
    pub opt: Option<String>,
    /// Starting point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let cfg = merge(load_config(&args.common)?, &args.common, &args.objective, &args.hyper);
    let opt_name = args.opt.clone().or(cfg.opt.clone()).unwrap_or_else(|| "bbi".into());
    let optimizer = optimizer_spec(&opt_name, &cfg)?;
    let obj_spec = objective_spec(&cfg);
    let obj = obj_spec.build()?;
    let theta0 = ParameterVector::new(match args.theta.clone().or(cfg.theta.clone()) {
        Some(t) => t,
        None => default_theta(&obj_spec)?,
    });
    let seed = cfg.seed.unwrap_or(0);
    let trace_every = cfg.trace_every.unwrap_or(1);

    let summary = optimizer.run(obj.as_ref(), &theta0, seed, trace_every)?;
    let dir = resolve_out_dir(&args.common.out_dir)?;
    write_artifact(&dir, "run_trace.csv", &summary.trace_csv())?;
    let mut stored = summary.clone();
    stored.trace = None;
    write_artifact(&dir, "run_summary.json", &stored.to_json())?;
    println!("{}", stored.to_json());
    if summary.stop_reason == StopReason::Diverged {
        return Err(CliError::divergence("run diverged"));
    }
    Ok(())
}

// ---- sweep ----

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Optimizer: bbi, mecd or gdm.
    #[arg(long)]
    pub opt: Option<String>,
    /// Number of independent runs.
    #[arg(long = "n-runs")]
    pub n_runs: Option<u64>,
    /// Fixed starting point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    /// Uniform-box lower corner for random starts, comma separated.
    #[arg(long = "init-lo", value_delimiter = ',', allow_hyphen_values = true)]
    pub init_lo: Option<Vec<f64>>,
    /// Uniform-box upper corner for random starts, comma separated.
    #[arg(long = "init-hi", value_delimiter = ',', allow_hyphen_values = true)]
    pub init_hi: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct SweepReport {
    n_runs: u64,
    base_seed: u64,
    objective: String,
    optimizer: String,
    converged: u64,
    diverged: u64,
    min_best_f: f64,
    summaries: Vec<RunSummary>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = merge(load_config(&args.common)?, &args.common, &args.objective, &args.hyper);
    let opt_name = args.opt.clone().or(cfg.opt.clone()).unwrap_or_else(|| "bbi".into());
    let optimizer = optimizer_spec(&opt_name, &cfg)?;
    let obj_spec = objective_spec(&cfg);
    let init = match (
        args.init_lo.clone().or(cfg.init_lo.clone()),
        args.init_hi.clone().or(cfg.init_hi.clone()),
    ) {
        (Some(lo), Some(hi)) => InitStrategy::UniformBox { lo, hi },
        (None, None) => InitStrategy::FixedPoint {
            theta: match args.theta.clone().or(cfg.theta.clone()) {
                Some(t) => t,
                None => default_theta(&obj_spec)?,
            },
        },
        _ => return Err(CliError::usage("--init-lo and --init-hi must be given together")),
    };
    let experiment = ExperimentConfig {
        objective: obj_spec,
        optimizer,
        n_runs: args.n_runs.or(cfg.n_runs).unwrap_or(10),
        base_seed: cfg.seed.unwrap_or(0),
        init,
        trace_every: cfg.trace_every.unwrap_or(0),
    };
    let summaries = run_experiment(&experiment)?;
    let converged = summaries
        .iter()
        .filter(|s| matches!(s.stop_reason, StopReason::Converged | StopReason::NegativeLoss))
        .count() as u64;
    let diverged =
        summaries.iter().filter(|s| s.stop_reason == StopReason::Diverged).count() as u64;
    let report = SweepReport {
        n_runs: experiment.n_runs,
        base_seed: experiment.base_seed,
        objective: experiment.objective.name.clone(),
        optimizer: experiment.optimizer.name().into(),
        converged,
        diverged,
        min_best_f: summaries.iter().map(|s| s.best_f).fold(f64::INFINITY, f64::min),
        summaries,
    };
    let dir = resolve_out_dir(&args.common.out_dir)?;
    write_artifact(&dir, "sweep.json", &to_pretty_json(&report))?;
    println!(
        "{{\"n_runs\": {}, \"converged\": {}, \"diverged\": {}, \"min_best_f\": {}}}",
        report.n_runs, report.converged, report.diverged, report.min_best_f
    );
    Ok(())
}

// ---- basins ----

#[derive(Args)]
pub struct BasinsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Number of evolutions.
    #[arg(long = "n-runs")]
    pub n_runs: Option<u64>,
    /// Shared starting point, comma separated (default: the origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub start: Option<Vec<f64>>,
    /// Depth correction of the narrow well (default: calibrated).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Serialize)]
struct BasinsReport {
    epsilon: f64,
    centers: Vec<ParameterVector>,
    counts: Vec<u64>,
    unresolved: u64,
    final_ratio: f64,
    n_runs: u64,
    base_seed: u64,
}

pub fn cmd_basins(args: &BasinsArgs) -> Result<(), CliError> {
    let no_obj = ObjectiveArgs { objective: None, dim: None, epsilon: None, mass: None };
    let cfg = merge(load_config(&args.common)?, &args.common, &no_obj, &args.hyper);
    // Mixing-experiment defaults: one early fixed bounce, generous
    // no-progress threshold, accuracy target 1e-3.
    let hp = BbiHyperParams {
        dt: cfg.dt.unwrap_or(1e-2),
        dv: cfg.dv.unwrap_or(1e-3),
        de: cfg.de.unwrap_or(0.0),
        t0: cfg.t0.unwrap_or(20),
        t1: cfg.t1.unwrap_or(750),
        nb: cfg.nb.unwrap_or(1),
        eps1: cfg.eps1.unwrap_or(1e-10),
        eps2: cfg.eps2.unwrap_or(1e-40),
        max_iters: cfg.max_iters.unwrap_or(30_000),
        adapt_dv: cfg.adapt_dv.unwrap_or(false),
    };
    let experiment = ExperimentConfig {
        objective: ObjectiveSpec {
            name: "two_basin".into(),
            dim: None,
            epsilon: args.epsilon.or(cfg.epsilon),
            mass: None,
        },
        optimizer: OptimizerSpec::Bbi(hp),
        n_runs: args.n_runs.or(cfg.n_runs).unwrap_or(1000),
        base_seed: cfg.seed.unwrap_or(0),
        init: InitStrategy::FixedPoint {
            theta: args.start.clone().unwrap_or_else(|| vec![0.0, 0.0]),
        },
        trace_every: 0,
    };
    let result = basin_experiment(&experiment)?;
    let report = BasinsReport {
        epsilon: result.epsilon,
        centers: result.centers,
        counts: result.tally.counts.clone(),
        unresolved: result.tally.unresolved,
        final_ratio: result.tally.final_ratio(),
        n_runs: experiment.n_runs,
        base_seed: experiment.base_seed,
    };
    let dir = resolve_out_dir(&args.common.out_dir)?;
    write_artifact(&dir, "basins.json", &to_pretty_json(&report))?;
    write_artifact(&dir, "ratio.csv", &result.tally.ratio_csv())?;
    println!("{}", to_pretty_json(&report));
    Ok(())
}

// ---- volume ----

#[derive(Args)]
pub struct VolumeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Objective (only two_basin has two characterized minima).
    #[arg(long, default_value = "two_basin")]
    pub objective: String,
    /// Depth correction of the narrow well (default: calibrated).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Conserved energy at which the volumes are evaluated.
    #[arg(long)]
    pub energy: Option<f64>,
    /// Shift subtracted from the refined minimum losses to form V_I.
    #[arg(long)]
    pub shift: Option<f64>,
}

#[derive(Serialize)]
struct VolumeReport {
    epsilon: f64,
    energy: f64,
    basins: Vec<BasinSpec>,
    /// Absolute per-basin volumes; absent when V_I <= 0 (log divergence).
    volumes: Vec<Option<f64>>,
    predicted_ratio: f64,
}

pub fn cmd_volume(args: &VolumeArgs) -> Result<(), CliError> {
    if args.objective != "two_basin" {
        return Err(CliError::usage(format!(
            "volume analysis requires the two_basin objective, got '{}'",
            args.objective
        )));
    }
    let cfg = load_config(&args.common)?;
    let epsilon = match args.epsilon.or(cfg.epsilon) {
        Some(e) => e,
        None => calibrate_epsilon()?,
    };
    let energy = args.energy.or(cfg.energy).unwrap_or(1.0);
    let shift = args.shift.unwrap_or(0.0);
    let obj = ecd::objectives::TwoBasin::new(epsilon);
    let b1 = basin_spec_for(&obj, &ParameterVector::new(TWO_BASIN_C1.to_vec()), shift)?;
    let b2 = basin_spec_for(&obj, &ParameterVector::new(TWO_BASIN_C2.to_vec()), shift)?;
    let predicted_ratio = volume_ratio(&b1, &b2, energy)?;
    let volumes = [&b1, &b2]
        .iter()
        .map(|b| {
            if b.v_min > 0.0 {
                basin_volume(b, energy).ok().map(|v| v.value)
            } else {
                None
            }
        })
        .collect();
    let report = VolumeReport { epsilon, energy, basins: vec![b1, b2], volumes, predicted_ratio };
    let dir = resolve_out_dir(&args.common.out_dir)?;
    write_artifact(&dir, "volume.json", &to_pretty_json(&report))?;
    println!("{}", to_pretty_json(&report));
    Ok(())
}

// ---- compare ----

#[derive(Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// First optimizer: bbi, mecd or gdm.
    #[arg(long = "opt-a")]
    pub opt_a: Option<String>,
    /// Second optimizer: bbi, mecd or gdm.
    #[arg(long = "opt-b")]
    pub opt_b: Option<String>,
    /// Iteration budget for both optimizers.
    #[arg(long)]
    pub steps: Option<u64>,
    /// Shared starting point, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
}

/// Raw objective value from a trace row (the energy-conserving optimizers log
/// the shifted loss V = F - dV).
fn raw_loss(spec: &OptimizerSpec, v: f64) -> f64 {
    match spec {
        OptimizerSpec::Bbi(hp) | OptimizerSpec::Mecd(hp) => v + hp.dv,
        OptimizerSpec::Gdm { .. } => v,
    }
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let cfg = merge(load_config(&args.common)?, &args.common, &args.objective, &args.hyper);
    let steps = args.steps.or(cfg.max_iters).unwrap_or(10_000);
    let name_a = args.opt_a.clone().or(cfg.opt_a.clone()).unwrap_or_else(|| "bbi".into());
    let name_b = args.opt_b.clone().or(cfg.opt_b.clone()).unwrap_or_else(|| "gdm".into());
    let spec_a = optimizer_spec(&name_a, &cfg)?.with_max_iters(steps);
    let spec_b = optimizer_spec(&name_b, &cfg)?.with_max_iters(steps);
    let obj_spec = objective_spec(&cfg);
    let obj = obj_spec.build()?;
    let theta0 = ParameterVector::new(match args.theta.clone().or(cfg.theta.clone()) {
        Some(t) => t,
        None => default_theta(&obj_spec)?,
    });
    let seed = cfg.seed.unwrap_or(0);
    let trace_every = cfg.trace_every.unwrap_or(1).max(1);

    let run_a = spec_a.run(obj.as_ref(), &theta0, seed, trace_every)?;
    let run_b = spec_b.run(obj.as_ref(), &theta0, seed, trace_every)?;

    // Joined loss-versus-step table; a run that stopped early holds its last
    // loss for the remaining rows.
    let mut csv = format!("step,loss_{name_a},loss_{name_b}\n");
    let trace_a = run_a.trace.as_deref().unwrap_or(&[]);
    let trace_b = run_b.trace.as_deref().unwrap_or(&[]);
    let (mut ia, mut ib) = (0usize, 0usize);
    let (mut last_a, mut last_b) = (f64::NAN, f64::NAN);
    let mut step = 0u64;
    while step <= steps {
        while ia < trace_a.len() && trace_a[ia].step <= step {
            last_a = raw_loss(&spec_a, trace_a[ia].v);
            ia += 1;
        }
        while ib < trace_b.len() && trace_b[ib].step <= step {
            last_b = raw_loss(&spec_b, trace_b[ib].v);
            ib += 1;
        }
        csv.push_str(&format!("{step},{last_a},{last_b}\n"));
        step += trace_every;
    }

    #[derive(Serialize)]
    struct CompareReport {
        objective: String,
        steps: u64,
        seed: u64,
        a: RunSummary,
        b: RunSummary,
    }
    let mut stored_a = run_a.clone();
    stored_a.trace = None;
    let mut stored_b = run_b.clone();
    stored_b.trace = None;
    let report = CompareReport {
        objective: obj_spec.name.clone(),
        steps,
        seed,
        a: stored_a,
        b: stored_b,
    };
    let dir = resolve_out_dir(&args.common.out_dir)?;
    write_artifact(&dir, "compare.csv", &csv)?;
    write_artifact(&dir, "compare.json", &to_pretty_json(&report))?;
    println!("{}", to_pretty_json(&report));
    if run_a.stop_reason == StopReason::Diverged || run_b.stop_reason == StopReason::Diverged {
        return Err(CliError::divergence("at least one optimizer diverged"));
    }
    Ok(())
}
