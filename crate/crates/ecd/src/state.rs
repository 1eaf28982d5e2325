//! Optimizer state, hyperparameters and run outcomes.

use crate::error::{EcdError, Result};
use crate::rng::CounterRng;
use crate::vector::ParameterVector;
use serde::{Deserialize, Serialize};

/// Hyperparameters of the bouncing Born-Infeld optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BbiHyperParams {
    /// Step size Δt.
    pub dt: f64,
    /// Constant shift ΔV subtracted from the raw objective; doubles as the
    /// accuracy target.
    #[serde(rename = "dV")]
    pub dv: f64,
    /// Extra initial energy δE for escaping barriers above the starting loss.
    #[serde(rename = "dE")]
    pub de: f64,
    /// Fixed-bounce interval T0 (steps).
    #[serde(rename = "T0")]
    pub t0: u64,
    /// No-progress bounce threshold T1 (steps).
    #[serde(rename = "T1")]
    pub t1: u64,
    /// Number of fixed bounces Nb.
    #[serde(rename = "Nb")]
    pub nb: u64,
    /// Momentum-rescaling tolerance ε1.
    pub eps1: f64,
    /// Stopping threshold ε2.
    pub eps2: f64,
    /// Hard cap on the number of integration steps.
    pub max_iters: u64,
    /// When true, ΔV is lowered on observing V < 0 and the run continues.
    #[serde(rename = "adapt_dV")]
    pub adapt_dv: bool,
}

impl Default for BbiHyperParams {
    fn default() -> Self {
        BbiHyperParams {
            dt: 1e-3,
            dv: 0.0,
            de: 0.0,
            t0: 20,
            t1: 100,
            nb: 4,
            eps1: 1e-10,
            eps2: 1e-40,
            max_iters: 100_000,
            adapt_dv: false,
        }
    }
}

impl BbiHyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(EcdError::InvalidHyperParams(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.dv >= 0.0) {
            return Err(EcdError::InvalidHyperParams(format!("dV must be >= 0, got {}", self.dv)));
        }
        if !(self.de >= 0.0) {
            return Err(EcdError::InvalidHyperParams(format!("dE must be >= 0, got {}", self.de)));
        }
        if self.t0 < 1 || self.t1 < 1 {
            return Err(EcdError::InvalidHyperParams(format!(
                "T0 and T1 must be >= 1, got T0 = {}, T1 = {}",
                self.t0, self.t1
            )));
        }
        if !(self.eps1 > 0.0) || !(self.eps2 > 0.0) {
            return Err(EcdError::InvalidHyperParams(format!(
                "eps1 and eps2 must be > 0, got {} and {}",
                self.eps1, self.eps2
            )));
        }
        if self.eps2 >= self.eps1 {
            return Err(EcdError::InvalidHyperParams(format!(
                "eps2 must be smaller than eps1, got eps2 = {} >= eps1 = {}",
                self.eps2, self.eps1
            )));
        }
        Ok(())
    }
}

/// Full per-run optimizer state for the energy-conserving integrators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdState {
    pub theta: ParameterVector,
    pub pi: ParameterVector,
    /// Conserved energy E. Constant across a run except when adaptive ΔV
    /// re-anchors it.
    pub energy: f64,
    /// Current shifted loss V = F(Θ) − ΔV.
    pub v_current: f64,
    /// Running minimum of V over the run.
    pub v_best: f64,
    /// Running minimum of the raw objective F over the run.
    pub f_best: f64,
    /// Effective shift ΔV (mutated only by adaptive tuning).
    pub dv: f64,
    /// Fixed-bounce counter c0.
    pub c0: u64,
    /// No-progress counter c1.
    pub c1: u64,
    /// Fixed bounces performed so far.
    pub n_b: u64,
    /// Integration step index t (bounces do not advance it).
    pub step: u64,
    pub rng: CounterRng,
}

/// Why a finished run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// V ≤ ε2.
    Converged,
    /// Iteration cap reached.
    MaxIters,
    /// V < 0 observed with adaptive ΔV disabled.
    NegativeLoss,
    /// A non-finite value was encountered.
    Diverged,
}

/// One row of a per-step trajectory log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub v: f64,
    pub pi_norm: f64,
    /// Drift speed ‖ΔΘ‖/Δt of the step that produced this row.
    pub speed: f64,
    /// |√(V(V+Π²)) − E| after the step.
    pub energy_err: f64,
    /// Whether a bounce occurred since the previous integration step.
    pub bounce: bool,
}

/// End-of-run outcome plus an optional subsampled trajectory log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub final_theta: ParameterVector,
    pub final_v: f64,
    pub stop_reason: StopReason,
    pub steps_taken: u64,
    pub bounce_count: u64,
    /// Lowest raw objective value F observed during the run.
    pub best_f: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceRecord>>,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run summary serializes")
    }

    /// Trace as CSV with header `step,V,pi_norm,speed,energy_err,bounce`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,V,pi_norm,speed,energy_err,bounce\n");
        if let Some(trace) = &self.trace {
            for r in trace {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.step, r.v, r.pi_norm, r.speed, r.energy_err, r.bounce as u8
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_hyperparams_validate() {
        BbiHyperParams::default().validate().unwrap();
    }

    #[test]
    fn bad_hyperparams_rejected() {
        let mut hp = BbiHyperParams { dt: 0.0, ..Default::default() };
        assert!(hp.validate().is_err());
        hp.dt = 1e-2;
        hp.eps2 = 1e-5; // eps2 >= eps1
        assert!(hp.validate().is_err());
        hp.eps2 = 1e-40;
        hp.t0 = 0;
        assert!(hp.validate().is_err());
    }

    #[test]
    fn state_serialization_round_trips_exactly() {
        let state = EcdState {
            theta: ParameterVector::new(vec![0.1, -2.5e-17, 3.333333333333333]),
            pi: ParameterVector::new(vec![1.0 / 3.0, 7.25, -0.0]),
            energy: 6.02e23_f64.ln(),
            v_current: 1e-22,
            v_best: 1e-22,
            f_best: 1e-22,
            dv: 1e-3,
            c0: 19,
            c1: 3,
            n_b: 2,
            step: 12345,
            rng: {
                let mut r = CounterRng::new(77);
                r.next_u64();
                r
            },
        };
        let json = serde_json::to_string(&state).unwrap();
        let back: EcdState = serde_json::from_str(&json).unwrap();
        assert_eq!(state, back);
    }

    #[test]
    fn trace_csv_header_and_rows() {
        let summary = RunSummary {
            final_theta: ParameterVector::zeros(1),
            final_v: 0.5,
            stop_reason: StopReason::MaxIters,
            steps_taken: 1,
            bounce_count: 0,
            best_f: 0.5,
            seed: 1,
            trace: Some(vec![TraceRecord {
                step: 0,
                v: 0.5,
                pi_norm: 0.0,
                speed: 0.0,
                energy_err: 0.0,
                bounce: false,
            }]),
        };
        let csv = summary.trace_csv();
        assert!(csv.starts_with("step,V,pi_norm,speed,energy_err,bounce\n"));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn hyperparams_json_rejects_unknown_keys() {
        let res: std::result::Result<BbiHyperParams, _> =
            serde_json::from_str(r#"{"dt": 0.01, "bogus": 1}"#);
        assert!(res.is_err());
    }
}
