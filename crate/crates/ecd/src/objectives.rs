//! Differentiable objective interface and analytic benchmark landscapes.
//!
//! Gradients (and Hessians where provided) are hand-coded analytic
//! expressions; the finite-difference routines in [`crate::analysis`] serve as
//! an independent cross-check.

use crate::error::{EcdError, Result};
use crate::rng::CounterRng;
use crate::vector::ParameterVector;
use nalgebra::DMatrix;

/// A differentiable scalar field F(Θ) with exact gradient.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, theta: &ParameterVector) -> f64;

    fn grad(&self, theta: &ParameterVector) -> ParameterVector;

    /// Analytic Hessian, where available.
    fn hess(&self, _theta: &ParameterVector) -> Option<DMatrix<f64>> {
        None
    }

    /// Re-draws any internal sample set, changing the potential in time.
    /// The synthetic benchmarks are deterministic and leave this a no-op.
    fn resample(&mut self, _rng: &mut CounterRng) {}
}

/// Evaluates with an explicit dimension check.
pub fn eval_checked(obj: &dyn Objective, theta: &ParameterVector) -> Result<f64> {
    if theta.len() != obj.dim() {
        return Err(EcdError::DimensionMismatch { expected: obj.dim(), got: theta.len() });
    }
    Ok(obj.eval(theta))
}

/// The two-dimensional Ackley function: many local minima, global minimum 0
/// at the origin.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ackley;

impl Objective for Ackley {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, theta: &ParameterVector) -> f64 {
        let (x, y) = (theta[0], theta[1]);
        let r = (0.5 * (x * x + y * y)).sqrt();
        let c = 0.5 * ((std::f64::consts::TAU * x).cos() + (std::f64::consts::TAU * y).cos());
        -20.0 * (-0.2 * r).exp() - c.exp() + std::f64::consts::E + 20.0
    }

    fn grad(&self, theta: &ParameterVector) -> ParameterVector {
        let (x, y) = (theta[0], theta[1]);
        let r = (0.5 * (x * x + y * y)).sqrt();
        // The square root is non-smooth at the origin, which is the global
        // minimum; the zero subgradient keeps it stationary.
        if r == 0.0 {
            return ParameterVector::zeros(2);
        }
        let e1 = (-0.2 * r).exp();
        let c = 0.5 * ((std::f64::consts::TAU * x).cos() + (std::f64::consts::TAU * y).cos());
        let e2 = c.exp();
        let radial = 2.0 * e1 / r;
        let gx = radial * x + std::f64::consts::PI * (std::f64::consts::TAU * x).sin() * e2;
        let gy = radial * y + std::f64::consts::PI * (std::f64::consts::TAU * y).sin() * e2;
        ParameterVector::new(vec![gx, gy])
    }
}

/// The n-dimensional Zakharov function: no local minima, global minimum 0 at
/// the origin inside a nearly flat valley.
#[derive(Debug, Clone, Copy)]
pub struct Zakharov {
    dim: usize,
}

impl Zakharov {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(EcdError::InvalidConfig("zakharov needs dim >= 1".into()));
        }
        Ok(Zakharov { dim })
    }

    fn weighted_sum(&self, theta: &ParameterVector) -> f64 {
        0.5 * theta.iter().enumerate().map(|(i, x)| (i + 1) as f64 * x).sum::<f64>()
    }
}

impl Objective for Zakharov {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, theta: &ParameterVector) -> f64 {
        let s = self.weighted_sum(theta);
        theta.norm_sq() + s * s + s.powi(4)
    }

    fn grad(&self, theta: &ParameterVector) -> ParameterVector {
        let s = self.weighted_sum(theta);
        let common = s + 2.0 * s * s * s;
        ParameterVector::new(
            theta
                .iter()
                .enumerate()
                .map(|(i, x)| 2.0 * x + (i + 1) as f64 * common)
                .collect(),
        )
    }

    fn hess(&self, theta: &ParameterVector) -> Option<DMatrix<f64>> {
        let s = self.weighted_sum(theta);
        let common = 1.0 + 6.0 * s * s;
        let n = self.dim;
        let mut h = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let mut v = ((j + 1) * (k + 1)) as f64 * 0.5 * common;
                if j == k {
                    v += 2.0;
                }
                h[(j, k)] = v;
            }
        }
        Some(h)
    }
}

/// Gaussian-well centers of the two-basin landscape.
pub const TWO_BASIN_C1: [f64; 2] = [-2.0, -2.0];
pub const TWO_BASIN_C2: [f64; 2] = [2.0, 2.0];

const TWO_BASIN_QUARTIC: f64 = 1e-3;

/// A two-dimensional landscape with two global minima whose basins have
/// different shapes: a wide Gaussian well at c1 = (−2,−2), a narrow one at
/// c2 = (2,2), plus a small quartic confining term.
#[derive(Debug, Clone, Copy)]
pub struct TwoBasin {
    /// Depth correction on the narrow well, tuned so the two minima sit at
    /// the same height. See [`calibrate_epsilon`].
    pub epsilon: f64,
}

impl TwoBasin {
    pub fn new(epsilon: f64) -> Self {
        TwoBasin { epsilon }
    }

    /// With the depth correction obtained from [`calibrate_epsilon`].
    pub fn calibrated() -> Result<Self> {
        Ok(TwoBasin { epsilon: calibrate_epsilon()? })
    }

    fn displacements(theta: &ParameterVector) -> ([f64; 2], [f64; 2]) {
        (
            [theta[0] - TWO_BASIN_C1[0], theta[1] - TWO_BASIN_C1[1]],
            [theta[0] - TWO_BASIN_C2[0], theta[1] - TWO_BASIN_C2[1]],
        )
    }
}

impl Objective for TwoBasin {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, theta: &ParameterVector) -> f64 {
        let (d1, d2) = Self::displacements(theta);
        let r1sq = d1[0] * d1[0] + d1[1] * d1[1];
        let r2sq = d2[0] * d2[0] + d2[1] * d2[1];
        -(-0.4 * r1sq).exp() - (1.0 - self.epsilon) * (-0.8 * r2sq).exp()
            + TWO_BASIN_QUARTIC * r1sq * r2sq
            + 1.0
    }

    fn grad(&self, theta: &ParameterVector) -> ParameterVector {
        let (d1, d2) = Self::displacements(theta);
        let r1sq = d1[0] * d1[0] + d1[1] * d1[1];
        let r2sq = d2[0] * d2[0] + d2[1] * d2[1];
        let w1 = 0.8 * (-0.4 * r1sq).exp();
        let w2 = 1.6 * (1.0 - self.epsilon) * (-0.8 * r2sq).exp();
        let g = |i: usize| {
            w1 * d1[i] + w2 * d2[i] + 2.0 * TWO_BASIN_QUARTIC * (d1[i] * r2sq + d2[i] * r1sq)
        };
        ParameterVector::new(vec![g(0), g(1)])
    }

    fn hess(&self, theta: &ParameterVector) -> Option<DMatrix<f64>> {
        let (d1, d2) = Self::displacements(theta);
        let r1sq = d1[0] * d1[0] + d1[1] * d1[1];
        let r2sq = d2[0] * d2[0] + d2[1] * d2[1];
        let w1 = 0.8 * (-0.4 * r1sq).exp();
        let w2 = 1.6 * (1.0 - self.epsilon) * (-0.8 * r2sq).exp();
        let mut h = DMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                // Gaussian wells: 2aA e^{-a r^2} (I - 2a d d^T), already folded
                // into w1/w2 = 2aA e^{-a r^2}.
                let gauss =
                    w1 * (delta - 0.8 * d1[i] * d1[j]) + w2 * (delta - 1.6 * d2[i] * d2[j]);
                let quartic = 2.0
                    * TWO_BASIN_QUARTIC
                    * ((r1sq + r2sq) * delta + 2.0 * (d1[i] * d2[j] + d2[i] * d1[j]));
                h[(i, j)] = gauss + quartic;
            }
        }
        Some(h)
    }
}

/// One-dimensional shallow valley V = ½ m² θ².
#[derive(Debug, Clone, Copy)]
pub struct ShallowQuadratic {
    pub m: f64,
}

impl ShallowQuadratic {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(EcdError::InvalidConfig(format!("quadratic needs m > 0, got {m}")));
        }
        Ok(ShallowQuadratic { m })
    }
}

impl Objective for ShallowQuadratic {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, theta: &ParameterVector) -> f64 {
        0.5 * self.m * self.m * theta[0] * theta[0]
    }

    fn grad(&self, theta: &ParameterVector) -> ParameterVector {
        ParameterVector::new(vec![self.m * self.m * theta[0]])
    }

    fn hess(&self, _theta: &ParameterVector) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, self.m * self.m))
    }
}

/// Refines a local minimum starting from `start` until ‖∇F‖ < 1e-10: damped
/// gradient descent with backtracking to get close, then Newton polish on the
/// analytic Hessian. Plain descent alone cannot reach the tolerance here
/// because its accepted displacements fall below the floating-point
/// resolution of Θ before the gradient does.
pub fn refine_minimum(obj: &dyn Objective, start: &ParameterVector) -> Result<ParameterVector> {
    const GRAD_TOL: f64 = 1e-10;
    const COARSE_TOL: f64 = 1e-5;
    const BASE_STEP: f64 = 1e-2;
    let mut theta = start.clone();
    let mut step = BASE_STEP;
    for _ in 0..100_000 {
        let g = obj.grad(&theta);
        if !g.is_finite() {
            return Err(EcdError::RefinementFailed("non-finite gradient".into()));
        }
        if g.norm() < COARSE_TOL {
            break;
        }
        let f0 = obj.eval(&theta);
        loop {
            let mut cand = theta.clone();
            cand.axpy(-step, &g);
            let f1 = obj.eval(&cand);
            if f1 <= f0 {
                theta = cand;
                step = (step * 1.5).min(BASE_STEP);
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                return Err(EcdError::RefinementFailed(format!(
                    "backtracking stalled at ‖∇F‖ = {}",
                    g.norm()
                )));
            }
        }
    }
    for _ in 0..100 {
        let g = obj.grad(&theta);
        if !g.is_finite() {
            return Err(EcdError::RefinementFailed("non-finite gradient".into()));
        }
        if g.norm() < GRAD_TOL {
            return Ok(theta);
        }
        let h = obj
            .hess(&theta)
            .ok_or_else(|| EcdError::RefinementFailed("no Hessian for Newton polish".into()))?;
        let gv = nalgebra::DVector::from_column_slice(g.as_slice());
        let delta = h
            .lu()
            .solve(&gv)
            .ok_or_else(|| EcdError::RefinementFailed("singular Hessian".into()))?;
        for (i, d) in delta.iter().enumerate() {
            theta[i] -= d;
        }
    }
    Err(EcdError::RefinementFailed("Newton polish did not converge".into()))
}

/// The refined locations of the two minima of [`TwoBasin`] for a given ε.
pub fn two_basin_minima(epsilon: f64) -> Result<(ParameterVector, ParameterVector)> {
    let obj = TwoBasin::new(epsilon);
    let m1 = refine_minimum(&obj, &ParameterVector::new(TWO_BASIN_C1.to_vec()))?;
    let m2 = refine_minimum(&obj, &ParameterVector::new(TWO_BASIN_C2.to_vec()))?;
    Ok((m1, m2))
}

/// Finds the ε for which the two refined minima of [`TwoBasin`] have equal
/// function values to |ΔF| < 1e-12, by bisection on ε ∈ [0, 1e-4].
pub fn calibrate_epsilon() -> Result<f64> {
    const TOL: f64 = 1e-12;
    let height_gap = |eps: f64| -> Result<f64> {
        let obj = TwoBasin::new(eps);
        let (m1, m2) = two_basin_minima(eps)?;
        Ok(obj.eval(&m2) - obj.eval(&m1))
    };
    let (mut lo, mut hi) = (0.0_f64, 1e-4_f64);
    let g_lo = height_gap(lo)?;
    let g_hi = height_gap(hi)?;
    if g_lo.abs() < TOL {
        return Ok(lo);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(EcdError::CalibrationFailed(format!(
            "no sign change on [0, 1e-4]: gap({lo}) = {g_lo}, gap({hi}) = {g_hi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g_mid = height_gap(mid)?;
        if g_mid.abs() < TOL {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(EcdError::CalibrationFailed("bisection did not reach |ΔF| < 1e-12".into()))
}
