//! Optimizers: bouncing Born-Infeld (BBI), the massive energy-conserving
//! variant (MECD), and the gradient-descent-with-momentum baseline (GDM),
//! behind one stepping interface.

mod ecd_core;
mod gdm;

pub use ecd_core::{
    bbi_bounce, bbi_init, bbi_kick_drift, bbi_rescale_momentum, bbi_run, bbi_run_traced,
    bbi_step, bi_energy, mecd_energy, mecd_init, mecd_run, mecd_run_traced, mecd_step, StepInfo,
};
pub use gdm::{gdm_run, gdm_run_traced, GdmHyperParams};

use crate::error::Result;
use crate::objectives::Objective;
use crate::state::{BbiHyperParams, RunSummary};
use crate::vector::ParameterVector;
use serde::{Deserialize, Serialize};

/// A fully specified optimizer, selectable by name in configs and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", deny_unknown_fields)]
pub enum OptimizerSpec {
    #[serde(rename = "bbi")]
    Bbi(BbiHyperParams),
    #[serde(rename = "mecd")]
    Mecd(BbiHyperParams),
    #[serde(rename = "gdm")]
    Gdm {
        #[serde(flatten)]
        hp: GdmHyperParams,
        #[serde(default = "default_gdm_iters")]
        max_iters: u64,
    },
}

fn default_gdm_iters() -> u64 {
    100_000
}

impl OptimizerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            OptimizerSpec::Bbi(_) => "bbi",
            OptimizerSpec::Mecd(_) => "mecd",
            OptimizerSpec::Gdm { .. } => "gdm",
        }
    }

    pub fn max_iters(&self) -> u64 {
        match self {
            OptimizerSpec::Bbi(hp) | OptimizerSpec::Mecd(hp) => hp.max_iters,
            OptimizerSpec::Gdm { max_iters, .. } => *max_iters,
        }
    }

    /// Overrides the per-run iteration budget.
    pub fn with_max_iters(mut self, iters: u64) -> Self {
        match &mut self {
            OptimizerSpec::Bbi(hp) | OptimizerSpec::Mecd(hp) => hp.max_iters = iters,
            OptimizerSpec::Gdm { max_iters, .. } => *max_iters = iters,
        }
        self
    }

    /// Runs the optimizer to completion. `trace_every = 0` disables tracing.
    pub fn run(
        &self,
        obj: &dyn Objective,
        theta0: &ParameterVector,
        seed: u64,
        trace_every: u64,
    ) -> Result<RunSummary> {
        match self {
            OptimizerSpec::Bbi(hp) => bbi_run_traced(obj, theta0, hp, seed, trace_every),
            OptimizerSpec::Mecd(hp) => mecd_run_traced(obj, theta0, hp, seed, trace_every),
            OptimizerSpec::Gdm { hp, max_iters } => {
                gdm_run_traced(obj, theta0, hp, *max_iters, seed, trace_every)
            }
        }
    }
}
