//! Seeded random variates with a parallelism-invariant reproducibility
//! contract, plus empirical quantiles.
//!
//! Every Monte Carlo task draws from its own [`StreamKey`]: a
//! `(master_seed, task_id, stream_id)` triple mapped onto a ChaCha8 key and
//! nonce. Two different triples never share a key/nonce pair, and results do
//! not depend on which thread ran which task.

mod plan;
mod quantile;
mod stream;
mod variates;

pub use plan::SimPlan;
pub use quantile::{empirical_quantile, quantile_in_place};
pub use stream::{KeyedRng, StreamKey, StreamRole};
pub use variates::{chisq, gamma, sample_chisq, sample_normal, standard_normal};
