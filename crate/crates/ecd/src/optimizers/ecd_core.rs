//! Shared machinery for the two energy-conserving integrators.
//!
//! Both optimizers discretize frictionless Hamiltonian dynamics with a
//! loss-dependent speed limit, restore the conserved energy by rescaling the
//! momentum, and mix via random momentum bounces at fixed ‖Π‖. They differ
//! only in their kinematics:
//!
//!   BBI   E = √(V(V+Π²))   Π̇ = −½(E/V + V/E)∇V   Θ̇ = (V/E)Π
//!   MECD  E = ½VΠ²          Π̇ = −(E/V)∇V           Θ̇ = VΠ

use crate::error::{EcdError, Result};
use crate::objectives::{eval_checked, Objective};
use crate::rng::CounterRng;
use crate::state::{BbiHyperParams, EcdState, RunSummary, StopReason, TraceRecord};
use crate::vector::ParameterVector;

/// The kinematic closures distinguishing one energy-conserving model from
/// another. All coefficients are evaluated at the pre-step loss V.
pub(crate) trait Kinematics {
    /// Squared momentum norm on the energy shell at loss v.
    fn target_pi_sq(e: f64, v: f64) -> f64;
    /// Coefficient of −Δt ∇V in the momentum kick.
    fn kick_coeff(e: f64, v: f64) -> f64;
    /// Coefficient of Δt Π in the position drift.
    fn drift_coeff(e: f64, v: f64) -> f64;
    /// Instantaneous energy from loss and squared momentum norm.
    fn energy_of(v: f64, pi_sq: f64) -> f64;
}

/// Born-Infeld: relativistic particle with squared speed limit V.
pub(crate) struct BornInfeld;

impl Kinematics for BornInfeld {
    fn target_pi_sq(e: f64, v: f64) -> f64 {
        v * (e * e / (v * v) - 1.0)
    }
    fn kick_coeff(e: f64, v: f64) -> f64 {
        0.5 * (v / e + e / v)
    }
    fn drift_coeff(e: f64, v: f64) -> f64 {
        v / e
    }
    fn energy_of(v: f64, pi_sq: f64) -> f64 {
        (v * (v + pi_sq)).sqrt()
    }
}

/// Position-dependent mass 1/V: H = ½VΠ².
pub(crate) struct MassiveEcd;

impl Kinematics for MassiveEcd {
    fn target_pi_sq(e: f64, v: f64) -> f64 {
        2.0 * e / v
    }
    fn kick_coeff(e: f64, v: f64) -> f64 {
        e / v
    }
    fn drift_coeff(_e: f64, v: f64) -> f64 {
        v
    }
    fn energy_of(v: f64, pi_sq: f64) -> f64 {
        0.5 * v * pi_sq
    }
}

/// Instantaneous BI energy √(V(V+Π²)).
pub fn bi_energy(v: f64, pi_sq: f64) -> f64 {
    BornInfeld::energy_of(v, pi_sq)
}

/// Instantaneous massive-ECD energy ½VΠ².
pub fn mecd_energy(v: f64, pi_sq: f64) -> f64 {
    MassiveEcd::energy_of(v, pi_sq)
}

/// Diagnostics from one integration step.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    /// Whether the energy-restoring rescale was actually performed.
    pub rescaled: bool,
    /// Drift speed ‖ΔΘ‖/Δt of this step.
    pub speed: f64,
}

fn init_state<K: Kinematics>(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &BbiHyperParams,
    seed: u64,
) -> Result<EcdState> {
    hp.validate()?;
    let f0 = eval_checked(obj, theta0)?;
    if !f0.is_finite() {
        return Err(EcdError::Diverged("objective non-finite at the initial point".into()));
    }
    let v0 = f0 - hp.dv;
    if v0 <= 0.0 {
        return Err(EcdError::NonPositiveInitialLoss(v0));
    }
    let energy = v0 + hp.de;
    let grad = obj.grad(theta0);
    if !grad.is_finite() {
        return Err(EcdError::Diverged("gradient non-finite at the initial point".into()));
    }
    let mut rng = CounterRng::new(seed);
    let pi_norm_sq = K::target_pi_sq(energy, v0).max(0.0);
    let pi = if pi_norm_sq == 0.0 {
        ParameterVector::zeros(theta0.len())
    } else {
        let norm = pi_norm_sq.sqrt();
        let grad_norm = grad.norm();
        if grad_norm > 0.0 {
            grad.scale(-norm / grad_norm)
        } else {
            // Stationary start with extra energy: random direction.
            random_direction(&mut rng, theta0.len()).scale(norm)
        }
    };
    Ok(EcdState {
        theta: theta0.clone(),
        pi,
        energy,
        v_current: v0,
        v_best: v0,
        f_best: f0,
        dv: hp.dv,
        c0: 0,
        c1: 0,
        n_b: 0,
        step: 0,
        rng,
    })
}

fn random_direction(rng: &mut CounterRng, n: usize) -> ParameterVector {
    loop {
        let v = ParameterVector::new((0..n).map(|_| rng.standard_normal()).collect());
        let norm = v.norm();
        if norm > 0.0 {
            return v.scale(1.0 / norm);
        }
    }
}

/// Sub-steps (a)-(b) of an iteration: compares Π² with its on-shell value and
/// homogeneously rescales Π when the discrepancy exceeds ε1 and the target is
/// non-negative. Returns whether a rescale was performed.
fn rescale_momentum<K: Kinematics>(state: &mut EcdState, hp: &BbiHyperParams) -> bool {
    let target = K::target_pi_sq(state.energy, state.v_current);
    let pi_sq = state.pi.norm_sq();
    if target >= 0.0 && (pi_sq - target).abs() >= hp.eps1 && pi_sq > 0.0 {
        state.pi.scale_mut((target / pi_sq).sqrt());
        true
    } else {
        false
    }
}

/// Sub-steps (c)-(f): momentum kick, position drift, counter bookkeeping and
/// loss recomputation. Returns the drift speed ‖ΔΘ‖/Δt.
fn kick_drift<K: Kinematics>(
    state: &mut EcdState,
    obj: &dyn Objective,
    hp: &BbiHyperParams,
) -> Result<f64> {
    let v = state.v_current;
    let e = state.energy;
    let grad = obj.grad(&state.theta);
    if !grad.is_finite() {
        return Err(EcdError::Diverged(format!("non-finite gradient at step {}", state.step)));
    }
    state.pi.axpy(-hp.dt * K::kick_coeff(e, v), &grad);
    let drift = hp.dt * K::drift_coeff(e, v);
    let speed = drift.abs() * state.pi.norm() / hp.dt;
    state.theta.axpy(drift, &state.pi);
    state.c0 += 1;
    state.c1 += 1;
    state.step += 1;
    if !state.theta.is_finite() || !state.pi.is_finite() {
        return Err(EcdError::Diverged(format!("non-finite state at step {}", state.step)));
    }
    let f = obj.eval(&state.theta);
    if !f.is_finite() {
        return Err(EcdError::Diverged(format!("non-finite loss at step {}", state.step)));
    }
    // Progress is judged on the raw objective so that adaptive ΔV re-anchoring
    // does not spuriously reset the no-progress counter.
    if f < state.f_best {
        state.f_best = f;
        state.c1 = 0;
    }
    state.v_current = f - state.dv;
    if state.v_current < state.v_best {
        state.v_best = state.v_current;
    }
    Ok(speed)
}

fn step<K: Kinematics>(
    state: &mut EcdState,
    obj: &dyn Objective,
    hp: &BbiHyperParams,
) -> Result<StepInfo> {
    let rescaled = rescale_momentum::<K>(state, hp);
    let speed = kick_drift::<K>(state, obj, hp)?;
    Ok(StepInfo { rescaled, speed })
}

/// Bounce branch: replaces Π by a random direction of identical norm (no-op
/// on zero momentum) and updates the bounce counters.
fn bounce(state: &mut EcdState, hp: &BbiHyperParams) {
    let pi_sq = state.pi.norm_sq();
    if pi_sq > 0.0 {
        let dir = random_direction(&mut state.rng, state.pi.len());
        state.pi = dir.scale(pi_sq.sqrt());
    }
    if state.c0 == hp.t0 && state.n_b < hp.nb {
        state.n_b += 1;
        state.c0 = 0;
    }
    state.c1 = 0;
}

fn trace_record<K: Kinematics>(state: &EcdState, speed: f64, bounced: bool) -> TraceRecord {
    let pi_sq = state.pi.norm_sq();
    TraceRecord {
        step: state.step,
        v: state.v_current,
        pi_norm: pi_sq.sqrt(),
        speed,
        energy_err: (K::energy_of(state.v_current, pi_sq) - state.energy).abs(),
        bounce: bounced,
    }
}

fn run_loop<K: Kinematics>(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &BbiHyperParams,
    seed: u64,
    trace_every: u64,
) -> Result<RunSummary> {
    let mut state = init_state::<K>(obj, theta0, hp, seed)?;
    let mut trace = if trace_every > 0 {
        Some(vec![trace_record::<K>(&state, 0.0, false)])
    } else {
        None
    };
    let mut bounce_count = 0u64;
    let mut pending_bounce = false;
    let stop_reason = loop {
        if state.v_current <= hp.eps2 {
            break StopReason::Converged;
        }
        if state.step >= hp.max_iters {
            break StopReason::MaxIters;
        }
        if (state.c0 == hp.t0 && state.n_b < hp.nb) || state.c1 == hp.t1 {
            bounce(&mut state, hp);
            bounce_count += 1;
            pending_bounce = true;
            continue;
        }
        let info = match step::<K>(&mut state, obj, hp) {
            Ok(info) => info,
            Err(_) => break StopReason::Diverged,
        };
        if state.v_current < 0.0 {
            if hp.adapt_dv && state.f_best > 0.0 {
                // Overshot the guessed optimum: tighten ΔV toward the best raw
                // loss seen and re-anchor the energy.
                let f_current = state.v_current + state.dv;
                state.dv = 0.9 * state.f_best;
                state.v_current = f_current - state.dv;
                state.energy = state.v_current + hp.de;
                state.v_best = state.v_current;
                if state.v_current <= 0.0 {
                    break StopReason::NegativeLoss;
                }
            } else {
                if let Some(t) = &mut trace {
                    t.push(trace_record::<K>(&state, info.speed, pending_bounce));
                }
                break StopReason::NegativeLoss;
            }
        }
        if let Some(t) = &mut trace {
            if state.step % trace_every == 0 {
                t.push(trace_record::<K>(&state, info.speed, pending_bounce));
                pending_bounce = false;
            }
        }
    };
    Ok(RunSummary {
        final_theta: state.theta,
        final_v: state.v_current,
        stop_reason,
        steps_taken: state.step,
        bounce_count,
        best_f: state.f_best,
        seed,
        trace,
    })
}

// ---- BBI public surface ----

/// Initializes a BBI run: E = V0 + δE and Π0 along −∇F with the on-shell
/// norm √(E²/V0 − V0) (zero when δE = 0; random direction at a stationary
/// start with δE > 0).
pub fn bbi_init(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &BbiHyperParams,
    seed: u64,
) -> Result<EcdState> {
    init_state::<BornInfeld>(obj, theta0, hp, seed)
}

/// The energy-restoring rescale sub-step in isolation; returns whether the
/// rescale was performed.
pub fn bbi_rescale_momentum(state: &mut EcdState, hp: &BbiHyperParams) -> bool {
    rescale_momentum::<BornInfeld>(state, hp)
}

/// Momentum kick + position drift + bookkeeping; returns the drift speed.
pub fn bbi_kick_drift(
    state: &mut EcdState,
    obj: &dyn Objective,
    hp: &BbiHyperParams,
) -> Result<f64> {
    kick_drift::<BornInfeld>(state, obj, hp)
}

/// One full non-bounce iteration.
pub fn bbi_step(
    state: &mut EcdState,
    obj: &dyn Objective,
    hp: &BbiHyperParams,
) -> Result<StepInfo> {
    step::<BornInfeld>(state, obj, hp)
}

/// Bounce branch: randomize the momentum direction at fixed ‖Π‖.
pub fn bbi_bounce(state: &mut EcdState, hp: &BbiHyperParams) {
    bounce(state, hp)
}

pub fn bbi_run(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &BbiHyperParams,
    seed: u64,
) -> Result<RunSummary> {
    run_loop::<BornInfeld>(obj, theta0, hp, seed, 0)
}

pub fn bbi_run_traced(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &BbiHyperParams,
    seed: u64,
    trace_every: u64,
) -> Result<RunSummary> {
    run_loop::<BornInfeld>(obj, theta0, hp, seed, trace_every)
}

// ---- massive-ECD public surface ----

/// Initializes a massive-ECD run with the same energy convention as BBI:
/// E = V0 + δE, |Π0| = √(2E/V0).
pub fn mecd_init(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &BbiHyperParams,
    seed: u64,
) -> Result<EcdState> {
    init_state::<MassiveEcd>(obj, theta0, hp, seed)
}

/// One full non-bounce iteration of the massive-ECD integrator.
pub fn mecd_step(
    state: &mut EcdState,
    obj: &dyn Objective,
    hp: &BbiHyperParams,
) -> Result<StepInfo> {
    step::<MassiveEcd>(state, obj, hp)
}

pub fn mecd_run(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &BbiHyperParams,
    seed: u64,
) -> Result<RunSummary> {
    run_loop::<MassiveEcd>(obj, theta0, hp, seed, 0)
}

pub fn mecd_run_traced(
    obj: &dyn Objective,
    theta0: &ParameterVector,
    hp: &BbiHyperParams,
    seed: u64,
    trace_every: u64,
) -> Result<RunSummary> {
    run_loop::<MassiveEcd>(obj, theta0, hp, seed, trace_every)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Ackley, ShallowQuadratic};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    /// Flat landscape with a positive offset; every point is stationary.
    struct Plateau;

    impl Objective for Plateau {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, _theta: &ParameterVector) -> f64 {
            1.0
        }
        fn grad(&self, _theta: &ParameterVector) -> ParameterVector {
            ParameterVector::zeros(2)
        }
    }

    fn quadratic() -> ShallowQuadratic {
        ShallowQuadratic::new(1.0).unwrap()
    }

    #[test]
    fn init_sets_energy_and_on_shell_momentum() {
        // F = 4 at theta = sqrt(8); with dE = 2: E = 6 and |Pi|^2 = 4(36/16 - 1) = 5
        let obj = quadratic();
        let theta0 = ParameterVector::new(vec![8.0f64.sqrt()]);
        let hp = BbiHyperParams { de: 2.0, ..Default::default() };
        let state = bbi_init(&obj, &theta0, &hp, 1).unwrap();
        assert_relative_eq!(state.energy, 6.0, max_relative = 1e-15);
        assert_relative_eq!(state.pi.norm_sq(), 5.0, max_relative = 1e-14);
        // momentum opposes the gradient
        assert!(state.pi[0] < 0.0);
        assert_relative_eq!(
            bi_energy(state.v_current, state.pi.norm_sq()),
            state.energy,
            max_relative = 1e-14
        );
    }

    #[test]
    fn init_without_extra_energy_starts_at_rest() {
        let state =
            bbi_init(&quadratic(), &ParameterVector::new(vec![1.0]), &Default::default(), 1)
                .unwrap();
        assert_eq!(state.pi.as_slice(), &[0.0]);
        assert_eq!(state.energy, state.v_current);
    }

    #[test]
    fn init_rejects_nonpositive_shifted_loss() {
        let hp = BbiHyperParams { dv: 0.5, ..Default::default() };
        let res = bbi_init(&quadratic(), &ParameterVector::new(vec![1.0]), &hp, 1);
        assert!(matches!(res, Err(EcdError::NonPositiveInitialLoss(_))));
    }

    #[test]
    fn stationary_start_with_extra_energy_gets_a_random_direction() {
        let hp = BbiHyperParams { de: 1.0, ..Default::default() };
        let state = bbi_init(&Plateau, &ParameterVector::zeros(2), &hp, 7).unwrap();
        // |Pi|^2 = V(E^2/V^2 - 1) = 1*(4 - 1) = 3
        assert_relative_eq!(state.pi.norm_sq(), 3.0, max_relative = 1e-14);
        let other = bbi_init(&Plateau, &ParameterVector::zeros(2), &hp, 8).unwrap();
        assert_ne!(state.pi, other.pi);
    }

    #[test]
    fn one_step_matches_hand_computed_fixture() {
        // m = 1, theta0 = 1: V0 = 0.5, E = 1, |Pi0| = sqrt(1.5).
        let obj = quadratic();
        let hp = BbiHyperParams { dt: 0.01, de: 0.5, ..Default::default() };
        let mut state = bbi_init(&obj, &ParameterVector::new(vec![1.0]), &hp, 1).unwrap();
        let pi0 = -(1.5f64.sqrt());
        assert_eq!(state.pi.as_slice(), &[pi0]);

        let info = bbi_step(&mut state, &obj, &hp).unwrap();
        assert!(!info.rescaled); // exactly on shell at start
        // kick coefficient (V/E + E/V)/2 = 1.25, drift coefficient V/E = 0.5
        let pi1 = pi0 + -(0.01 * 1.25) * 1.0;
        let theta1 = 1.0 + (0.01 * 0.5) * pi1;
        assert_eq!(state.pi.as_slice(), &[pi1]);
        assert_eq!(state.theta.as_slice(), &[theta1]);
        assert_abs_diff_eq!(pi1, -1.2372448713915890, epsilon = 1e-15);
        assert_abs_diff_eq!(theta1, 0.9938137756430420, epsilon = 1e-15);
        assert_eq!(state.step, 1);
        assert_eq!((state.c0, state.c1), (1, 0)); // new raw-loss minimum resets c1
    }

    #[test]
    fn rescale_restores_the_energy_shell_exactly() {
        let obj = Ackley;
        let hp = BbiHyperParams { dt: 1e-2, de: 2.0, ..Default::default() };
        let mut state =
            bbi_init(&obj, &ParameterVector::new(vec![2.3, -1.1]), &hp, 3).unwrap();
        for _ in 0..200 {
            bbi_rescale_momentum(&mut state, &hp);
            let target = state.energy * state.energy / state.v_current - state.v_current;
            assert!((state.pi.norm_sq() - target).abs() < hp.eps1);
            // the speed limit sqrt(V) holds on the energy shell
            let speed = state.v_current / state.energy * state.pi.norm();
            assert!(speed * speed <= state.v_current * (1.0 + 1e-9));
            bbi_kick_drift(&mut state, &obj, &hp).unwrap();
        }
    }

    #[test]
    fn bounce_preserves_momentum_norm_and_position() {
        let obj = Ackley;
        let hp = BbiHyperParams { de: 1.0, ..Default::default() };
        let mut state =
            bbi_init(&obj, &ParameterVector::new(vec![1.0, 2.0]), &hp, 9).unwrap();
        let norm_before = state.pi.norm();
        let theta_before = state.theta.clone();
        let step_before = state.step;
        bbi_bounce(&mut state, &hp);
        assert_relative_eq!(state.pi.norm(), norm_before, max_relative = 1e-12);
        assert_eq!(state.theta, theta_before);
        assert_eq!(state.step, step_before);
        assert_eq!(state.c1, 0);
    }

    #[test]
    fn fixed_bounces_happen_exactly_nb_times() {
        let obj = Plateau; // no progress, but c1 is kept out of reach
        let hp = BbiHyperParams {
            de: 1.0,
            t0: 10,
            t1: 1_000_000,
            nb: 2,
            max_iters: 100,
            ..Default::default()
        };
        let summary = bbi_run(&obj, &ParameterVector::zeros(2), &hp, 4).unwrap();
        assert_eq!(summary.bounce_count, 2);
        assert_eq!(summary.stop_reason, StopReason::MaxIters);
        assert_eq!(summary.steps_taken, 100);
    }

    #[test]
    fn nb_zero_disables_fixed_bounces() {
        let hp = BbiHyperParams {
            de: 1.0,
            t0: 10,
            t1: 1_000_000,
            nb: 0,
            max_iters: 100,
            ..Default::default()
        };
        let summary = bbi_run(&Plateau, &ParameterVector::zeros(2), &hp, 4).unwrap();
        assert_eq!(summary.bounce_count, 0);
    }

    #[test]
    fn no_progress_bounces_fire_on_plateaus() {
        let hp = BbiHyperParams {
            de: 1.0,
            t0: 1_000_000,
            t1: 10,
            nb: 0,
            max_iters: 95,
            ..Default::default()
        };
        let summary = bbi_run(&Plateau, &ParameterVector::zeros(2), &hp, 4).unwrap();
        // c1 reaches 10 after every 10 steps of no improvement
        assert_eq!(summary.bounce_count, 9);
    }

    #[test]
    fn overshooting_the_shift_stops_with_negative_loss() {
        let obj = quadratic();
        let hp = BbiHyperParams { dt: 0.01, dv: 0.3, de: 2.0, ..Default::default() };
        let summary = bbi_run(&obj, &ParameterVector::new(vec![1.0]), &hp, 1).unwrap();
        assert_eq!(summary.stop_reason, StopReason::NegativeLoss);
        assert!(summary.final_v < 0.0);
        assert!(summary.best_f < 0.3);
    }

    #[test]
    fn adaptive_shift_recovers_from_overshoot() {
        let obj = quadratic();
        let hp = BbiHyperParams {
            dt: 0.01,
            dv: 0.3,
            de: 2.0,
            adapt_dv: true,
            max_iters: 5_000,
            ..Default::default()
        };
        let summary = bbi_run(&obj, &ParameterVector::new(vec![1.0]), &hp, 1).unwrap();
        assert_ne!(summary.stop_reason, StopReason::NegativeLoss);
        // the shift was tightened below the overshot best loss
        assert!(summary.best_f < 0.3);
        assert!(summary.final_v >= 0.0);
    }

    #[test]
    fn runs_are_bitwise_deterministic() {
        let obj = Ackley;
        let hp = BbiHyperParams { de: 2.0, t0: 20, nb: 4, max_iters: 3_000, ..Default::default() };
        let theta0 = ParameterVector::new(vec![3.7, -2.2]);
        let a = bbi_run_traced(&obj, &theta0, &hp, 42, 100).unwrap();
        let b = bbi_run_traced(&obj, &theta0, &hp, 42, 100).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        let c = bbi_run_traced(&obj, &theta0, &hp, 43, 100).unwrap();
        assert_ne!(a.final_theta, c.final_theta);
    }

    #[test]
    fn trace_is_subsampled_and_bounded() {
        let obj = Ackley;
        let hp = BbiHyperParams { de: 2.0, max_iters: 100, ..Default::default() };
        let summary =
            bbi_run_traced(&obj, &ParameterVector::new(vec![1.5, 0.5]), &hp, 2, 10).unwrap();
        let trace = summary.trace.as_ref().unwrap();
        assert!(trace.len() <= summary.steps_taken as usize + 1);
        for r in trace {
            assert_eq!(r.step % 10, 0);
        }
        let untraced = bbi_run(&obj, &ParameterVector::new(vec![1.5, 0.5]), &hp, 2).unwrap();
        assert!(untraced.trace.is_none());
    }

    #[test]
    fn descent_starts_from_rest_without_stalling() {
        // dE = 0: the momentum builds up from the gradient kicks alone.
        let obj = quadratic();
        let hp = BbiHyperParams { dt: 1e-2, max_iters: 2_000, ..Default::default() };
        let summary = bbi_run(&obj, &ParameterVector::new(vec![1.0]), &hp, 1).unwrap();
        assert!(summary.final_v < 0.5 * 0.1 * 0.1, "no progress: {}", summary.final_v);
    }

    #[test]
    fn mecd_init_momentum_norm() {
        // V0 = 0.5, dE = 0.5: E = 1, |Pi0|^2 = 2E/V0 = 4
        let obj = quadratic();
        let hp = BbiHyperParams { de: 0.5, ..Default::default() };
        let state = mecd_init(&obj, &ParameterVector::new(vec![1.0]), &hp, 1).unwrap();
        assert_relative_eq!(state.pi.norm_sq(), 4.0, max_relative = 1e-14);
        assert_relative_eq!(
            mecd_energy(state.v_current, state.pi.norm_sq()),
            1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn mecd_conserves_energy_and_descends() {
        let obj = quadratic();
        let hp = BbiHyperParams { dt: 1e-3, de: 0.5, max_iters: 2_000, ..Default::default() };
        let summary =
            mecd_run_traced(&obj, &ParameterVector::new(vec![1.0]), &hp, 5, 10).unwrap();
        for r in summary.trace.as_ref().unwrap() {
            assert!(r.energy_err < 0.05, "energy drift {} at step {}", r.energy_err, r.step);
        }
        assert!(summary.final_v < 0.5);
    }

    proptest! {
        #[test]
        fn prop_init_is_on_shell(v0 in 1e-3..10.0f64, de in 0.0..10.0f64) {
            let obj = quadratic();
            let theta0 = ParameterVector::new(vec![(2.0 * v0).sqrt()]);
            let hp = BbiHyperParams { de, ..Default::default() };
            let state = bbi_init(&obj, &theta0, &hp, 1).unwrap();
            let e = bi_energy(state.v_current, state.pi.norm_sq());
            prop_assert!((e - state.energy).abs() <= 1e-9 * state.energy);
        }

        #[test]
        fn prop_bounce_preserves_norm(
            components in proptest::collection::vec(-10.0..10.0f64, 1..6),
            seed in 0u64..1000,
        ) {
            let mut rng = CounterRng::new(seed);
            let dir = random_direction(&mut rng, components.len());
            let pi = ParameterVector::new(components);
            let rotated = dir.scale(pi.norm());
            prop_assert!((rotated.norm() - pi.norm()).abs() <= 1e-12 * pi.norm().max(1.0));
        }
    }
}
