//! Seeded multi-run experiments: basin-convergence statistics, success-rate
//! sweeps and random hyperparameter search.

use crate::error::{EcdError, Result};
use crate::objectives::{
    calibrate_epsilon, two_basin_minima, Ackley, Objective, ShallowQuadratic, TwoBasin, Zakharov,
};
use crate::optimizers::{GdmHyperParams, OptimizerSpec};
use crate::rng::{derive_seed, CounterRng};
use crate::state::{BbiHyperParams, RunSummary, StopReason};
use crate::vector::ParameterVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Benchmark selection by name, as used in configs and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    /// One of "ackley", "zakharov", "two_basin", "quadratic".
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// two_basin depth correction; omitted means calibrated automatically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// quadratic curvature parameter m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

impl ObjectiveSpec {
    pub fn named(name: &str) -> Self {
        ObjectiveSpec { name: name.into(), dim: None, epsilon: None, mass: None }
    }

    pub fn build(&self) -> Result<Box<dyn Objective>> {
        match self.name.as_str() {
            "ackley" => Ok(Box::new(Ackley)),
            "zakharov" => Ok(Box::new(Zakharov::new(self.dim.unwrap_or(10))?)),
            "two_basin" => {
                let eps = match self.epsilon {
                    Some(e) => e,
                    None => calibrate_epsilon()?,
                };
                Ok(Box::new(TwoBasin::new(eps)))
            }
            "quadratic" => Ok(Box::new(ShallowQuadratic::new(self.mass.unwrap_or(1.0))?)),
            other => Err(EcdError::InvalidConfig(format!("unknown objective '{other}'"))),
        }
    }
}

/// How each run's starting point is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitStrategy {
    FixedPoint { theta: Vec<f64> },
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
}

impl InitStrategy {
    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            InitStrategy::FixedPoint { theta } => {
                if theta.len() != dim {
                    return Err(EcdError::DimensionMismatch { expected: dim, got: theta.len() });
                }
            }
            InitStrategy::UniformBox { lo, hi } => {
                if lo.len() != dim || hi.len() != dim {
                    return Err(EcdError::DimensionMismatch { expected: dim, got: lo.len() });
                }
                if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
                    return Err(EcdError::InvalidConfig(
                        "uniform box requires lo < hi componentwise".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut CounterRng) -> ParameterVector {
        match self {
            InitStrategy::FixedPoint { theta } => ParameterVector::new(theta.clone()),
            InitStrategy::UniformBox { lo, hi } => ParameterVector::new(
                lo.iter().zip(hi).map(|(&l, &h)| rng.uniform_in(l, h)).collect(),
            ),
        }
    }
}

/// A seeded batch of independent optimizer runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub objective: ObjectiveSpec,
    pub optimizer: OptimizerSpec,
    pub n_runs: u64,
    pub base_seed: u64,
    pub init: InitStrategy,
    /// Trace subsampling stride; 0 disables per-step logs.
    #[serde(default)]
    pub trace_every: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_runs < 1 {
            return Err(EcdError::InvalidConfig("n_runs must be >= 1".into()));
        }
        let obj = self.objective.build()?;
        self.init.validate(obj.dim())
    }
}

/// Separates the starting-point draw from the optimizer's own stream.
const INIT_STREAM: u64 = 0x494e_4954;

/// The starting point of run `run_index` under this config.
pub fn run_theta0(cfg: &ExperimentConfig, run_index: u64) -> ParameterVector {
    let run_seed = derive_seed(cfg.base_seed, run_index);
    let mut init_rng = CounterRng::new(derive_seed(run_seed, INIT_STREAM));
    cfg.init.sample(&mut init_rng)
}

fn run_one(cfg: &ExperimentConfig, obj: &dyn Objective, run_index: u64) -> RunSummary {
    let run_seed = derive_seed(cfg.base_seed, run_index);
    let theta0 = run_theta0(cfg, run_index);
    match cfg.optimizer.run(obj, &theta0, run_seed, cfg.trace_every) {
        Ok(summary) => summary,
        Err(_) => {
            // Record the failure without aborting the batch.
            let f0 = obj.eval(&theta0);
            let f0 = if f0.is_finite() { f0 } else { f64::MAX };
            RunSummary {
                final_theta: theta0,
                final_v: f0,
                stop_reason: StopReason::Diverged,
                steps_taken: 0,
                bounce_count: 0,
                best_f: f0,
                seed: run_seed,
                trace: None,
            }
        }
    }
}

/// Runs `cfg.n_runs` independent seeded runs (in parallel; results ordered by
/// run index, so the aggregate is deterministic for a fixed base seed).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    cfg.validate()?;
    let obj = cfg.objective.build()?;
    Ok((0..cfg.n_runs)
        .into_par_iter()
        .map(|i| run_one(cfg, obj.as_ref(), i))
        .collect())
}

/// Nearest basin center by Euclidean distance; ties break to the lowest
/// index.
pub fn classify_basin(final_theta: &ParameterVector, centers: &[ParameterVector]) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let d = final_theta.distance(c);
        if d < best_dist {
            best_dist = d;
            best = i;
        }
    }
    best
}

/// Per-basin convergence counts with the running ratio after each run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinTally {
    pub counts: Vec<u64>,
    pub unresolved: u64,
    /// counts[0]/counts[1] after each completed run (NaN until both seen).
    pub partial_ratios: Vec<f64>,
}

impl BasinTally {
    pub fn from_summaries(summaries: &[RunSummary], centers: &[ParameterVector]) -> Self {
        let mut counts = vec![0u64; centers.len()];
        let mut unresolved = 0u64;
        let mut partial_ratios = Vec::with_capacity(summaries.len());
        for s in summaries {
            let converged =
                matches!(s.stop_reason, StopReason::Converged | StopReason::NegativeLoss);
            if converged {
                counts[classify_basin(&s.final_theta, centers)] += 1;
            } else {
                unresolved += 1;
            }
            partial_ratios.push(if counts.len() > 1 && counts[1] > 0 {
                counts[0] as f64 / counts[1] as f64
            } else {
                f64::NAN
            });
        }
        BasinTally { counts, unresolved, partial_ratios }
    }

    pub fn final_ratio(&self) -> f64 {
        *self.partial_ratios.last().unwrap_or(&f64::NAN)
    }

    /// CSV `run_index,ratio`.
    pub fn ratio_csv(&self) -> String {
        let mut out = String::from("run_index,ratio\n");
        for (i, r) in self.partial_ratios.iter().enumerate() {
            out.push_str(&format!("{i},{r}\n"));
        }
        out
    }
}

/// Outcome of the two-basin mixing experiment.
#[derive(Debug, Clone)]
pub struct BasinExperimentResult {
    pub epsilon: f64,
    pub centers: Vec<ParameterVector>,
    pub tally: BasinTally,
    pub summaries: Vec<RunSummary>,
}

/// Runs the two-basin protocol: calibrates ε (unless pinned in the config),
/// refines the two minima, evolves `n_runs` trajectories and tallies which
/// basin each converged run landed in.
pub fn basin_experiment(cfg: &ExperimentConfig) -> Result<BasinExperimentResult> {
    if cfg.objective.name != "two_basin" {
        return Err(EcdError::InvalidConfig(
            "basin_experiment requires the two_basin objective".into(),
        ));
    }
    let epsilon = match cfg.objective.epsilon {
        Some(e) => e,
        None => calibrate_epsilon()?,
    };
    let mut cfg = cfg.clone();
    cfg.objective.epsilon = Some(epsilon);
    let (m1, m2) = two_basin_minima(epsilon)?;
    let centers = vec![m1, m2];
    let summaries = run_experiment(&cfg)?;
    let tally = BasinTally::from_summaries(&summaries, &centers);
    Ok(BasinExperimentResult { epsilon, centers, tally, summaries })
}

/// What random search samples for each optimizer family. Step sizes and
/// learning rates are drawn log-uniformly, momentum uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "optimizer", rename_all = "lowercase", deny_unknown_fields)]
pub enum SearchSpace {
    Bbi { base: BbiHyperParams, dt_range: (f64, f64) },
    Mecd { base: BbiHyperParams, dt_range: (f64, f64) },
    Gdm { eta_range: (f64, f64), mu_range: (f64, f64), max_iters: u64 },
}

impl SearchSpace {
    fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo > 0.0 && lo <= hi;
        let valid = match self {
            SearchSpace::Bbi { dt_range, .. } | SearchSpace::Mecd { dt_range, .. } => {
                ok(*dt_range)
            }
            SearchSpace::Gdm { eta_range, mu_range, .. } => {
                ok(*eta_range) && mu_range.0 >= 0.0 && mu_range.0 <= mu_range.1 && mu_range.1 < 1.0
            }
        };
        if valid {
            Ok(())
        } else {
            Err(EcdError::InvalidConfig("invalid search ranges".into()))
        }
    }

    fn sample(&self, rng: &mut CounterRng) -> OptimizerSpec {
        match self {
            SearchSpace::Bbi { base, dt_range } => {
                let mut hp = base.clone();
                hp.dt = rng.log_uniform_in(dt_range.0, dt_range.1);
                OptimizerSpec::Bbi(hp)
            }
            SearchSpace::Mecd { base, dt_range } => {
                let mut hp = base.clone();
                hp.dt = rng.log_uniform_in(dt_range.0, dt_range.1);
                OptimizerSpec::Mecd(hp)
            }
            SearchSpace::Gdm { eta_range, mu_range, max_iters } => OptimizerSpec::Gdm {
                hp: GdmHyperParams {
                    eta: rng.log_uniform_in(eta_range.0, eta_range.1),
                    mu: rng.uniform_in(mu_range.0, mu_range.1),
                },
                max_iters: *max_iters,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: OptimizerSpec,
    /// Lowest raw objective value seen during the winning trial.
    pub best_score: f64,
    pub trial_index: u64,
}

/// Seeded uniform/log-uniform random search: each trial draws hyperparameters,
/// evolves for `steps_per_trial` steps and is scored by the lowest objective
/// value observed. Ties go to the earlier trial.
pub fn random_search(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    space: &SearchSpace,
    trials: u64,
    steps_per_trial: u64,
    base_seed: u64,
) -> Result<SearchOutcome> {
    if trials < 1 {
        return Err(EcdError::InvalidConfig("need at least one trial".into()));
    }
    space.validate()?;
    let results: Vec<(OptimizerSpec, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = CounterRng::new(derive_seed(base_seed, i));
            let spec = space.sample(&mut rng);
            let run_seed = derive_seed(derive_seed(base_seed, i), 1);
            let score = match spec.clone().with_max_iters(steps_per_trial).run(
                obj,
                theta0,
                run_seed,
                0,
            ) {
                Ok(summary) if summary.stop_reason != StopReason::Diverged => summary.best_f,
                _ => f64::INFINITY,
            };
            (spec, score)
        })
        .collect();
    let mut best: Option<(u64, OptimizerSpec, f64)> = None;
    for (i, (spec, score)) in results.into_iter().enumerate() {
        if score.is_finite() && best.as_ref().map_or(true, |(_, _, b)| score < *b) {
            best = Some((i as u64, spec, score));
        }
    }
    match best {
        Some((trial_index, best, best_score)) => Ok(SearchOutcome { best, best_score, trial_index }),
        None => Err(EcdError::SearchFailed("all trials diverged".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_cfg() -> ExperimentConfig {
        ExperimentConfig {
            objective: ObjectiveSpec { mass: Some(1.0), ..ObjectiveSpec::named("quadratic") },
            optimizer: OptimizerSpec::Bbi(BbiHyperParams {
                dt: 1e-2,
                de: 0.1,
                t0: 1_000_000,
                t1: 1_000_000,
                nb: 0,
                max_iters: 2_000,
                ..Default::default()
            }),
            n_runs: 4,
            base_seed: 11,
            init: InitStrategy::FixedPoint { theta: vec![1.0] },
            trace_every: 0,
        }
    }

    #[test]
    fn single_run_experiment_equals_direct_run() {
        let mut cfg = quadratic_cfg();
        cfg.n_runs = 1;
        let batch = run_experiment(&cfg).unwrap();
        let obj = cfg.objective.build().unwrap();
        let direct = cfg
            .optimizer
            .run(obj.as_ref(), &run_theta0(&cfg, 0), derive_seed(cfg.base_seed, 0), 0)
            .unwrap();
        assert_eq!(batch[0], direct);
    }

    #[test]
    fn experiment_is_deterministic() {
        let cfg = quadratic_cfg();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_summary_is_reexecutable_in_isolation() {
        let cfg = quadratic_cfg();
        let batch = run_experiment(&cfg).unwrap();
        let obj = cfg.objective.build().unwrap();
        for (i, summary) in batch.iter().enumerate() {
            let again = cfg
                .optimizer
                .run(obj.as_ref(), &run_theta0(&cfg, i as u64), summary.seed, 0)
                .unwrap();
            assert_eq!(*summary, again);
        }
    }

    #[test]
    fn classify_basin_nearest_and_ties() {
        let centers = vec![
            ParameterVector::new(vec![-2.0, -2.0]),
            ParameterVector::new(vec![2.0, 2.0]),
        ];
        assert_eq!(classify_basin(&ParameterVector::new(vec![-2.01, -1.98]), &centers), 0);
        assert_eq!(classify_basin(&ParameterVector::new(vec![1.5, 2.2]), &centers), 1);
        // equidistant: lowest index wins
        assert_eq!(classify_basin(&ParameterVector::new(vec![0.0, 0.0]), &centers), 0);
    }

    #[test]
    fn tally_counts_sum_to_runs() {
        let cfg = ExperimentConfig {
            objective: ObjectiveSpec { epsilon: Some(2.8e-6), ..ObjectiveSpec::named("two_basin") },
            optimizer: OptimizerSpec::Bbi(BbiHyperParams {
                dt: 1e-2,
                dv: 1e-3,
                t0: 20,
                t1: 750,
                nb: 1,
                max_iters: 30_000,
                ..Default::default()
            }),
            n_runs: 8,
            base_seed: 5,
            init: InitStrategy::FixedPoint { theta: vec![0.0, 0.0] },
            trace_every: 0,
        };
        let result = basin_experiment(&cfg).unwrap();
        let total: u64 = result.tally.counts.iter().sum();
        assert_eq!(total + result.tally.unresolved, cfg.n_runs);
        assert_eq!(result.tally.partial_ratios.len() as u64, cfg.n_runs);
    }

    #[test]
    fn random_search_is_deterministic_and_handles_degenerate_range() {
        let obj = ShallowQuadratic::new(1.0).unwrap();
        let theta0 = ParameterVector::new(vec![1.0]);
        let space = SearchSpace::Bbi {
            base: BbiHyperParams { de: 0.1, t0: 1_000_000, t1: 1_000_000, nb: 0, ..Default::default() },
            dt_range: (1e-2, 1e-2),
        };
        let a = random_search(&obj, &theta0, &space, 3, 200, 42).unwrap();
        let b = random_search(&obj, &theta0, &space, 3, 200, 42).unwrap();
        assert_eq!(a.best, b.best);
        match &a.best {
            OptimizerSpec::Bbi(hp) => assert_eq!(hp.dt, 1e-2),
            _ => unreachable!(),
        }
        assert_eq!(a.trial_index, 0);
    }

    #[test]
    fn uniform_box_validation() {
        let mut cfg = quadratic_cfg();
        cfg.init = InitStrategy::UniformBox { lo: vec![1.0], hi: vec![0.0] };
        assert!(cfg.validate().is_err());
        cfg.init = InitStrategy::UniformBox { lo: vec![-1.0], hi: vec![1.0] };
        cfg.validate().unwrap();
    }
}
