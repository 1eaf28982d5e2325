//! Phase-space-volume theory and trajectory diagnostics.

mod decay;
mod hessian;
mod quadrature;
mod volume;

pub use decay::{fit_decay_rate, windowed_samples};
pub use hessian::{central_diff_gradient, hessian_eigenvalues, numerical_hessian};
pub use quadrature::{adaptive_quadrature, composite_gauss10};
pub use volume::{
    basin_radial_volume, basin_spec_for, basin_volume, hypergeometric_radial_volume,
    nonrelativistic_volume_weight, volume_ratio, BasinSpec, BasinVolume,
};
