//! Numerical laboratory for renewal pinning models with Gaussian disorder.
//!
//! - [`kernel`]: inter-arrival laws with exact power tails, renewal functions, renewal sampling.
//! - [`homogeneous`]: free energy, contact fraction and critical behaviour without disorder.
//! - [`quenched`]: partition-function recursions, Monte Carlo free energy, variance diagnostics, critical scans.
//! - [`bounds`]: fractional-moment certificates of delocalization.
//! - [`smoothing`]: rare-stretch estimates and the quadratic smoothing check.
//! - [`sampler`]: exact draws from the quenched constrained Gibbs measure.
//! - [`config`], [`cli`]: experiment files and the `pinlab` runner.
//!
//! Runnable examples live in `examples/`: `kernels`, `homogeneous`,
//! `quenched_free_energy`, `variance`, `certificates`, `smoothing`, `sampler`,
//! `critical_scan`, `config_run`.
//!
//! ```
//! use pinlab::homogeneous::free_energy_value;
//! use pinlab::kernel::InterArrivalLaw;
//!
//! let law = InterArrivalLaw::geometric(0.5).unwrap();
//! let f = free_energy_value(&law, 3f64.ln()).unwrap();
//! assert!((f - 2f64.ln()).abs() < 1e-12);
//! ```

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod convolution;

pub mod bounds;
pub mod cli;
pub mod config;
pub mod error;
pub mod homogeneous;
pub mod kernel;
pub mod numeric;
pub mod quenched;
pub mod rng;
pub mod sampler;
pub mod smoothing;

pub use error::{PinError, Result};
