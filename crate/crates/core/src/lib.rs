//! Rician K-factor of random scatterer clouds.
//!
//! Three layers compute the same quantity with increasing fidelity:
//!
//! * [`analytic`]: closed forms for K versus frequency, scatterer count,
//!   density and far-field packing, plus the Rician envelope density.
//! * [`ensemble`]: Monte-Carlo simulation of the single-scattering voltage
//!   model with seeded, thread-count independent streams.
//! * [`mom`]: a thin-wire method-of-moments solver that includes multiple
//!   scattering and mutual coupling between resonant dipoles.
//!
//! [`stats`] fits Rician parameters to envelope samples, [`table`] holds
//! sweep results and writes them as CSV, and [`cli`] is the batch front-end.

// NaN must fail validation, so `!(x > 0.0)` is intended throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod cloud;
pub mod ensemble;
pub mod error;
pub mod estimate;
pub mod mom;
pub mod scenario;
pub mod special;
pub mod stats;
pub mod table;

pub use error::{Error, Result};
pub use estimate::KFactorEstimate;
pub use scenario::{Frequency, ScenarioConfig};
pub use table::{Method, SweepTable};
