//! Gradient descent with momentum, the frictional baseline.
//!
//! Update rule (ML convention): v ← μv − ∇F(Θ), Θ ← Θ + η v.

use crate::error::{EcdError, Result};
use crate::objectives::{eval_checked, Objective};
use crate::state::{RunSummary, StopReason, TraceRecord};
use crate::vector::ParameterVector;
use serde::{Deserialize, Serialize};

/// Loss below which a GDM run is declared converged.
const GDM_TOL: f64 = 1e-40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdmHyperParams {
    /// Learning rate η.
    pub eta: f64,
    /// Momentum coefficient μ in [0, 1).
    pub mu: f64,
}

impl GdmHyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(EcdError::InvalidHyperParams(format!("eta must be > 0, got {}", self.eta)));
        }
        if !(0.0..1.0).contains(&self.mu) {
            return Err(EcdError::InvalidHyperParams(format!(
                "mu must be in [0, 1), got {}",
                self.mu
            )));
        }
        Ok(())
    }
}

pub fn gdm_run(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &GdmHyperParams,
    max_iters: u64,
) -> Result<RunSummary> {
    gdm_run_traced(obj, theta0, hp, max_iters, 0, 0)
}

pub fn gdm_run_traced(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &GdmHyperParams,
    max_iters: u64,
    seed: u64,
    trace_every: u64,
) -> Result<RunSummary> {
    hp.validate()?;
    let mut theta = theta0.clone();
    let mut momentum = ParameterVector::zeros(theta0.len());
    let mut f = eval_checked(obj, theta0)?;
    if !f.is_finite() {
        return Err(EcdError::Diverged("objective non-finite at the initial point".into()));
    }
    let mut best_f = f;
    let mut trace = if trace_every > 0 {
        Some(vec![TraceRecord {
            step: 0,
            v: f,
            pi_norm: 0.0,
            speed: 0.0,
            energy_err: 0.0,
            bounce: false,
        }])
    } else {
        None
    };
    let mut step = 0u64;
    let stop_reason = loop {
        if f <= GDM_TOL {
            break StopReason::Converged;
        }
        if step >= max_iters {
            break StopReason::MaxIters;
        }
        let grad = obj.grad(&theta);
        if !grad.is_finite() {
            break StopReason::Diverged;
        }
        momentum.scale_mut(hp.mu);
        momentum.axpy(-1.0, &grad);
        theta.axpy(hp.eta, &momentum);
        step += 1;
        if !theta.is_finite() {
            break StopReason::Diverged;
        }
        f = obj.eval(&theta);
        if !f.is_finite() {
            break StopReason::Diverged;
        }
        if f < best_f {
            best_f = f;
        }
        if let Some(t) = &mut trace {
            if step % trace_every == 0 {
                t.push(TraceRecord {
                    step,
                    v: f,
                    pi_norm: momentum.norm(),
                    speed: momentum.norm(),
                    energy_err: 0.0,
                    bounce: false,
                });
            }
        }
    };
    Ok(RunSummary {
        final_theta: theta,
        final_v: f,
        stop_reason,
        steps_taken: step,
        bounce_count: 0,
        best_f,
        seed,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::ShallowQuadratic;
    use approx::assert_relative_eq;

    #[test]
    fn zero_momentum_reduces_to_plain_gradient_descent() {
        let obj = ShallowQuadratic::new(1.0).unwrap();
        let hp = GdmHyperParams { eta: 0.3, mu: 0.0 };
        let summary =
            gdm_run(&obj, &ParameterVector::new(vec![1.0]), &hp, 1).unwrap();
        assert_relative_eq!(summary.final_theta[0], 1.0 - 0.3, max_relative = 1e-15);
    }

    #[test]
    fn invalid_hyperparams_rejected() {
        assert!(GdmHyperParams { eta: 0.0, mu: 0.5 }.validate().is_err());
        assert!(GdmHyperParams { eta: 0.1, mu: 1.0 }.validate().is_err());
        assert!(GdmHyperParams { eta: 0.1, mu: -0.1 }.validate().is_err());
    }

    #[test]
    fn divergence_detected_on_large_step() {
        let obj = ShallowQuadratic::new(1.0).unwrap();
        let hp = GdmHyperParams { eta: 1e6, mu: 0.9 };
        let summary =
            gdm_run(&obj, &ParameterVector::new(vec![1.0]), &hp, 10_000).unwrap();
        assert_eq!(summary.stop_reason, StopReason::Diverged);
    }

    #[test]
    fn converges_on_quadratic() {
        let obj = ShallowQuadratic::new(1.0).unwrap();
        let hp = GdmHyperParams { eta: 0.5, mu: 0.1 };
        let summary =
            gdm_run(&obj, &ParameterVector::new(vec![1.0]), &hp, 200_000).unwrap();
        assert_eq!(summary.stop_reason, StopReason::Converged);
        assert!(summary.final_v <= GDM_TOL);
    }
}
