//! Tail-index inference for panels of random-coefficient AR(1) series.
//!
//! The crate simulates panels `X_i(t) = a_i X_i(t-1) + ζ_i(t)` whose
//! coefficients have a beta-type law with tail index β at the unit root,
//! estimates β from the per-series lag-1 autocorrelations with a truncated
//! Goldie–Smith estimator, selects the threshold adaptively, tests for long
//! memory (`H0: β ≥ 2`) and runs seeded Monte Carlo experiments.
//!
//! ```
//! use rcar_tail::acf::lag1_autocorr;
//! use rcar_tail::model::{simulate_panel, CoefficientLaw, InnovationSpec, PanelConfig};
//! use rcar_tail::tailest::{confidence_interval, long_memory_test, tail_index_noisy};
//! use rcar_tail::threshold::adaptive_delta;
//!
//! # fn main() -> rcar_tail::Result<()> {
//! let cfg = PanelConfig {
//!     n_series: 750,
//!     series_len: 1000,
//!     law: CoefficientLaw::new(0.75, 1.5)?,
//!     innovations: InnovationSpec::default(),
//!     seed: 7,
//! };
//! let panel = simulate_panel(&cfg, false)?;
//! let a_hat: Vec<f64> = panel.iter_series().map(lag1_autocorr).collect::<Result<_, _>>()?;
//! let threshold = adaptive_delta(&a_hat, 0.9)?;
//! let est = tail_index_noisy(&a_hat, threshold.delta, 10.0)?;
//! let (lo, hi) = confidence_interval(&est, 0.95)?;
//! let test = long_memory_test(&est, 0.05)?;
//! assert!(lo < est.beta_hat && est.beta_hat < hi);
//! assert_eq!(test.reject_h0, test.z_stat < test.critical);
//! # Ok(())
//! # }
//! ```

// Negated comparisons are deliberate: they reject NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acf;
pub mod cli;
pub mod error;
pub mod io;
pub mod mc;
pub mod model;
pub mod quad;
pub mod rng;
pub mod special;
pub mod tailest;
pub mod theory;
pub mod threshold;

pub use error::{Error, Result};
