//! Flat JSON config schema shared by all subcommands.
//!
//! Every Algorithm-1 hyperparameter is a top-level key named as in the
//! integrator (`dt`, `dV`, `dE`, `T0`, `T1`, `Nb`, `eps1`, `eps2`,
//! `adapt_dV`), next to objective selection, the GDM baseline's `eta`/`mu`
//! and experiment plumbing. Unknown keys are rejected; command-line flags
//! override config values.

use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    // objective selection
    pub objective: Option<String>,
    pub dim: Option<usize>,
    pub epsilon: Option<f64>,
    pub mass: Option<f64>,

    // optimizer selection
    pub opt: Option<String>,
    pub opt_a: Option<String>,
    pub opt_b: Option<String>,

    // energy-conserving hyperparameters
    pub dt: Option<f64>,
    #[serde(rename = "dV")]
    pub dv: Option<f64>,
    #[serde(rename = "dE")]
    pub de: Option<f64>,
    #[serde(rename = "T0")]
    pub t0: Option<u64>,
    #[serde(rename = "T1")]
    pub t1: Option<u64>,
    #[serde(rename = "Nb")]
    pub nb: Option<u64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    #[serde(rename = "adapt_dV")]
    pub adapt_dv: Option<bool>,
    pub max_iters: Option<u64>,

    // GDM baseline
    pub eta: Option<f64>,
    pub mu: Option<f64>,

    // experiment plumbing
    pub theta: Option<Vec<f64>>,
    pub n_runs: Option<u64>,
    pub init_lo: Option<Vec<f64>>,
    pub init_hi: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub trace_every: Option<u64>,
    pub energy: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}
