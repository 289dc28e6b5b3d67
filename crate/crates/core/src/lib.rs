//! Power analysis for the slope test in simple linear regression when the
//! predictor is itself random and normal.
//!
//! The model is `X ~ N(mu_x, sigma_x^2)`, `Y | X ~ N(beta0 + beta1 X, sigma^2)`
//! and the test statistic is `T = beta1_hat * sigma_x_hat / sigma_hat`.
//! The crate provides
//!
//! - [`distmath`]: normal, Student t and noncentral t distribution functions,
//!   plus the fixed-design power formula;
//! - [`stochastics`]: counter-keyed random streams, normal and chi-square
//!   variates, empirical quantiles and the [`SimPlan`] replication plan;
//! - [`exactnull`]: the chi-square product law for `T^2` under `beta1 = 0`,
//!   the marginal density and moments of `beta1_hat`;
//! - [`critvals`]: Monte Carlo and normal-approximation critical values,
//!   Table-1 style grids and an on-disk cache;
//! - [`powersim`]: regression simulation, power estimation and the noisy
//!   sample-size search with validation;
//! - [`corroute`]: the correlation-coefficient test, the effect-size to
//!   correlation bridge and slope-versus-correlation contrasts.
//!
//! Monte Carlo results depend only on the plan's master seed, never on the
//! number of worker threads.

pub mod corroute;
pub mod critvals;
pub mod distmath;
pub mod error;
pub mod exactnull;
pub mod exec;
pub mod powersim;
pub mod stochastics;

#[cfg(test)]
mod testutil;

pub use critvals::{CriticalMethod, CriticalValueCache, CriticalValueEstimate};
pub use error::{CoreError, FitError, Result};
pub use exactnull::{EffectSize, ModelParams};
pub use exec::Execution;
pub use powersim::{PowerEstimate, Route, SampleSizeResult};
pub use stochastics::{SimPlan, StreamKey};
