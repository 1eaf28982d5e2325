//! Phase-space volumes of basins of attraction.
//!
//! For an energy-conserving Born-Infeld trajectory the late-time probability
//! of finding the particle in a basin is proportional to the basin's
//! phase-space volume, which near a quadratic minimum factorizes into a
//! universal prefactor and a radial integral that grows like |log V_I| as the
//! minimum's loss V_I approaches zero.

use crate::analysis::hessian::{hessian_eigenvalues, numerical_hessian};
use crate::analysis::quadrature::{adaptive_quadrature, composite_gauss10};
use crate::error::{EcdError, Result};
use crate::objectives::{refine_minimum, Objective};
use crate::vector::ParameterVector;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// A quadratic minimum characterized for the volume formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinSpec {
    pub minimum_location: ParameterVector,
    /// Loss value V_I at the minimum.
    pub v_min: f64,
    /// Hessian eigenvalues m_{Ii}² (all strictly positive).
    pub hessian_eigenvalues: Vec<f64>,
}

impl BasinSpec {
    pub fn new(
        minimum_location: ParameterVector,
        v_min: f64,
        hessian_eigenvalues: Vec<f64>,
    ) -> Result<Self> {
        if hessian_eigenvalues.len() != minimum_location.len() {
            return Err(EcdError::DimensionMismatch {
                expected: minimum_location.len(),
                got: hessian_eigenvalues.len(),
            });
        }
        if hessian_eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(EcdError::DomainError(
                "Hessian eigenvalues must be strictly positive at a minimum".into(),
            ));
        }
        Ok(BasinSpec { minimum_location, v_min, hessian_eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.minimum_location.len()
    }

    /// Positive square roots m_{Ii} of the eigenvalues.
    pub fn masses(&self) -> Vec<f64> {
        self.hessian_eigenvalues.iter().map(|l| l.sqrt()).collect()
    }

    pub fn mass_product(&self) -> f64 {
        self.masses().iter().product()
    }
}

/// The radial integral ∫₀¹ η^{n−1} / (V_I + ½η²)^{n/2} dη by adaptive
/// quadrature to 1e-9 relative tolerance.
pub fn basin_radial_volume(v_i: f64, n: usize) -> Result<f64> {
    if !(v_i > 0.0) {
        return Err(EcdError::DomainError(format!(
            "radial volume requires V_I > 0 (integral diverges), got {v_i}"
        )));
    }
    if n < 1 {
        return Err(EcdError::DomainError("dimension must be >= 1".into()));
    }
    let half_n = n as f64 / 2.0;
    let integrand = move |eta: f64| eta.powi(n as i32 - 1) / (v_i + 0.5 * eta * eta).powf(half_n);
    Ok(adaptive_quadrature(&integrand, 0.0, 1.0, 1e-9))
}

/// The same radial integral via the closed form
/// (V_I^{−n/2}/n) · ₂F₁(n/2, n/2; n/2+1; −1/(2V_I)), with the hypergeometric
/// function evaluated through its Euler integral representation on an
/// independent fixed quadrature rule.
pub fn hypergeometric_radial_volume(v_i: f64, n: usize) -> Result<f64> {
    if !(v_i > 0.0) {
        return Err(EcdError::DomainError(format!("requires V_I > 0, got {v_i}")));
    }
    if n < 1 {
        return Err(EcdError::DomainError("dimension must be >= 1".into()));
    }
    let half_n = n as f64 / 2.0;
    let z = -1.0 / (2.0 * v_i);
    // 2F1(a, b; c; z) with a = b = n/2, c = n/2 + 1:
    // Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^{b−1} (1−zt)^{−a} dt, and Γ(c)/Γ(b) = n/2.
    let euler = composite_gauss10(
        &move |t: f64| t.powf(half_n - 1.0) * (1.0 - z * t).powf(-half_n),
        0.0,
        1.0,
        4000,
    );
    let f21 = half_n * euler;
    Ok(v_i.powf(-half_n) / n as f64 * f21)
}

/// A basin volume together with a regime flag (the formula assumes
/// V_I ≪ E; the flag is false when V_I ≥ 0.1·E).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasinVolume {
    pub value: f64,
    pub in_regime: bool,
}

/// Basin phase-space volume: (2π^{n/2}/Γ(n/2))² · E^{n−1}/∏m_{Ii} times the
/// radial integral.
pub fn basin_volume(basin: &BasinSpec, energy: f64) -> Result<BasinVolume> {
    if !(energy > 0.0) {
        return Err(EcdError::DomainError(format!("energy must be > 0, got {energy}")));
    }
    let n = basin.dim();
    let half_n = n as f64 / 2.0;
    let angular = 2.0 * std::f64::consts::PI.powf(half_n) / gamma(half_n);
    let prefactor = angular * angular * energy.powi(n as i32 - 1) / basin.mass_product();
    let radial = basin_radial_volume(basin.v_min, n)?;
    Ok(BasinVolume { value: prefactor * radial, in_regime: basin.v_min < 0.1 * energy })
}

/// Predicted ratio Vol(M₁)/Vol(M₂) at fixed energy. When the two minima sit
/// at the same height the radial integrals cancel exactly and the ratio
/// reduces to ∏m₂/∏m₁.
pub fn volume_ratio(basin1: &BasinSpec, basin2: &BasinSpec, energy: f64) -> Result<f64> {
    if basin1.dim() != basin2.dim() {
        return Err(EcdError::DimensionMismatch { expected: basin1.dim(), got: basin2.dim() });
    }
    let rel_gap = (basin1.v_min - basin2.v_min).abs() / basin1.v_min.abs().max(1e-300);
    if (basin1.v_min - basin2.v_min).abs() < 1e-9 || rel_gap < 1e-6 {
        return Ok(basin2.mass_product() / basin1.mass_product());
    }
    let v1 = basin_volume(basin1, energy)?;
    let v2 = basin_volume(basin2, energy)?;
    Ok(v1.value / v2.value)
}

/// The non-relativistic comparison integrand (E − V)^{(n−2)/2}: finite as
/// V → 0, hence no small-V dominance.
pub fn nonrelativistic_volume_weight(v: f64, energy: f64, n: usize) -> Result<f64> {
    if !(v >= 0.0) || v >= energy {
        return Err(EcdError::DomainError(format!(
            "requires 0 <= V < E, got V = {v}, E = {energy}"
        )));
    }
    Ok((energy - v).powf((n as f64 - 2.0) / 2.0))
}

/// Characterizes the minimum reached from `seed_point`: refines it by damped
/// descent, then takes the eigenvalues of the central-difference Hessian.
/// `shift` is subtracted from the refined loss to produce V_I.
pub fn basin_spec_for(
    obj: &dyn Objective,
    seed_point: &ParameterVector,
    shift: f64,
) -> Result<BasinSpec> {
    let minimum = refine_minimum(obj, seed_point)?;
    let hess = numerical_hessian(obj, &minimum)?;
    let eigenvalues = hessian_eigenvalues(&hess);
    let v_min = obj.eval(&minimum) - shift;
    BasinSpec::new(minimum, v_min, eigenvalues)
}
