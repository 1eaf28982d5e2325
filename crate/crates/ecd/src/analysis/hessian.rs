//! Finite-difference derivatives and Hessian eigenvalues.

use crate::error::{EcdError, Result};
use crate::objectives::Objective;
use crate::vector::ParameterVector;
use nalgebra::DMatrix;

/// Central-difference gradient with step h_i = 1e-5 · max(1, |θ_i|). The
/// independent oracle for the analytic gradients.
pub fn central_diff_gradient(obj: &dyn Objective, theta: &ParameterVector) -> ParameterVector {
    let n = theta.len();
    let mut g = ParameterVector::zeros(n);
    for i in 0..n {
        let h = 1e-5 * theta[i].abs().max(1.0);
        let mut plus = theta.clone();
        plus[i] += h;
        let mut minus = theta.clone();
        minus[i] -= h;
        g[i] = (obj.eval(&plus) - obj.eval(&minus)) / (2.0 * h);
    }
    g
}

/// Central-difference Hessian with step h_i = 1e-4 · max(1, |θ_i|),
/// symmetrized as (H + Hᵀ)/2.
pub fn numerical_hessian(obj: &dyn Objective, theta: &ParameterVector) -> Result<DMatrix<f64>> {
    let n = theta.len();
    let steps: Vec<f64> = (0..n).map(|i| 1e-4 * theta[i].abs().max(1.0)).collect();
    let f0 = obj.eval(theta);
    let mut h = DMatrix::zeros(n, n);
    let shifted = |offsets: &[(usize, f64)]| {
        let mut t = theta.clone();
        for &(i, d) in offsets {
            t[i] += d;
        }
        obj.eval(&t)
    };
    for i in 0..n {
        let hi = steps[i];
        let fp = shifted(&[(i, hi)]);
        let fm = shifted(&[(i, -hi)]);
        h[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in (i + 1)..n {
            let hj = steps[j];
            let fpp = shifted(&[(i, hi), (j, hj)]);
            let fpm = shifted(&[(i, hi), (j, -hj)]);
            let fmp = shifted(&[(i, -hi), (j, hj)]);
            let fmm = shifted(&[(i, -hi), (j, -hj)]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(EcdError::Diverged("non-finite Hessian evaluation".into()));
    }
    let sym = (&h + h.transpose()) * 0.5;
    Ok(sym)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn hessian_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut eig: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{ShallowQuadratic, TwoBasin, Zakharov};
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_hessian_is_m_squared() {
        let obj = ShallowQuadratic::new(2.0).unwrap();
        let h = numerical_hessian(&obj, &ParameterVector::new(vec![0.7])).unwrap();
        assert_relative_eq!(h[(0, 0)], 4.0, max_relative = 1e-7);
    }

    #[test]
    fn zakharov_hessian_at_origin() {
        let obj = Zakharov::new(2).unwrap();
        let h = numerical_hessian(&obj, &ParameterVector::zeros(2)).unwrap();
        assert_relative_eq!(h[(0, 0)], 2.5, max_relative = 1e-6);
        assert_relative_eq!(h[(0, 1)], 1.0, max_relative = 1e-5);
        assert_relative_eq!(h[(1, 0)], 1.0, max_relative = 1e-5);
        assert_relative_eq!(h[(1, 1)], 4.0, max_relative = 1e-6);
    }

    #[test]
    fn numerical_matches_analytic_hessian() {
        let obj = TwoBasin::new(1e-6);
        let theta = ParameterVector::new(vec![-1.3, 0.4]);
        let num = numerical_hessian(&obj, &theta).unwrap();
        let ana = obj.hess(&theta).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let scale = ana[(i, j)].abs().max(1.0);
                assert!(
                    (num[(i, j)] - ana[(i, j)]).abs() / scale < 1e-5,
                    "mismatch at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn symmetry_after_symmetrization() {
        let obj = Zakharov::new(4).unwrap();
        let theta = ParameterVector::new(vec![0.3, -0.2, 0.9, 1.4]);
        let h = numerical_hessian(&obj, &theta).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((h[(i, j)] - h[(j, i)]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalues_sorted_ascending() {
        let h = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 2.5]);
        let eig = hessian_eigenvalues(&h);
        assert!(eig[0] < eig[1]);
        // trace and determinant preserved
        assert_relative_eq!(eig[0] + eig[1], 6.5, max_relative = 1e-12);
        assert_relative_eq!(eig[0] * eig[1], 9.0, max_relative = 1e-12);
    }
}
