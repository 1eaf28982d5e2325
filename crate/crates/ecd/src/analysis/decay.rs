//! Exponential decay-rate fitting for trajectory envelopes.

use crate::error::{EcdError, Result};
use crate::state::TraceRecord;

/// Least-squares slope of log‖Θ‖ versus time over `samples` = (t, ‖Θ‖).
/// Returns the positive decay rate.
pub fn fit_decay_rate(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 10 {
        return Err(EcdError::InsufficientData(format!(
            "decay fit needs at least 10 points, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(_, norm)| !(norm > 0.0)) {
        return Err(EcdError::DomainError("decay fit requires positive norms".into()));
    }
    let n = samples.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, norm) in samples {
        let y = norm.ln();
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return Err(EcdError::InsufficientData("degenerate time axis".into()));
    }
    let slope = (n * sty - st * sy) / denom;
    Ok(-slope)
}

/// Extracts (t, ‖Θ‖) samples from a trace, keeping rows in the asymptotic
/// window V/E < `v_over_e_max` and V > `v_floor`. The position norm is
/// recovered from the record via `norm_of` (e.g. √(2V)/m on a quadratic
/// valley).
pub fn windowed_samples(
    trace: &[TraceRecord],
    dt: f64,
    energy: f64,
    v_over_e_max: f64,
    v_floor: f64,
    norm_of: impl Fn(&TraceRecord) -> f64,
) -> Vec<(f64, f64)> {
    trace
        .iter()
        .filter(|r| r.v / energy < v_over_e_max && r.v > v_floor)
        .map(|r| (r.step as f64 * dt, norm_of(r)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_exponential_series_recovered() {
        let dt = 0.05;
        let samples: Vec<(f64, f64)> =
            (0..100).map(|k| (k as f64 * dt, (-0.7 * k as f64 * dt).exp())).collect();
        let rate = fit_decay_rate(&samples).unwrap();
        assert_relative_eq!(rate, 0.7, max_relative = 1e-9);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let samples: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 1.0)).collect();
        assert!(matches!(fit_decay_rate(&samples), Err(EcdError::InsufficientData(_))));
    }

    #[test]
    fn window_filters_records() {
        let trace = vec![
            TraceRecord { step: 0, v: 0.5, pi_norm: 0.0, speed: 0.0, energy_err: 0.0, bounce: false },
            TraceRecord { step: 1, v: 0.005, pi_norm: 0.0, speed: 0.0, energy_err: 0.0, bounce: false },
            TraceRecord { step: 2, v: 1e-30, pi_norm: 0.0, speed: 0.0, energy_err: 0.0, bounce: false },
        ];
        let samples = windowed_samples(&trace, 0.1, 1.0, 0.01, 1e-20, |r| r.v.sqrt());
        assert_eq!(samples.len(), 1);
        assert_relative_eq!(samples[0].0, 0.1);
    }
}
