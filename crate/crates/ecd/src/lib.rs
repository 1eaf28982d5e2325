//! Energy-conserving descent optimizers and supporting analysis.
//!
//! The core algorithm evolves relativistic Born-Infeld dynamics on a shifted
//! loss surface V = F − ΔV at fixed energy, with occasional momentum
//! "bounces" for mixing, so trajectories slow down and concentrate near low
//! loss instead of converging to the first critical point. The crate bundles:
//!
//! * [`optimizers`]: the bouncing Born-Infeld integrator, a massive
//!   energy-conserving variant, and a gradient-descent-with-momentum
//!   baseline.
//! * [`objectives`]: benchmark functions with analytic gradients.
//! * [`analysis`]: numerical Hessians, phase-space basin volumes and decay
//!   rate fits.
//! * [`harness`]: seeded multi-run experiments and random hyperparameter
//!   search.
//!
//! All randomness flows through a counter-based generator, so every run is
//! reproducible from a single `u64` seed.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod objectives;
pub mod optimizers;
pub mod rng;
pub mod state;
pub mod vector;

pub use error::{EcdError, Result};
pub use state::{BbiHyperParams, EcdState, RunSummary, StopReason, TraceRecord};
pub use vector::ParameterVector;
