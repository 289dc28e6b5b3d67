//! Critical values `C_{n,alpha}` for `|T|`.
//!
//! The Monte Carlo route draws `reps_inner` values of `T^2` from the
//! chi-square product law, takes the `(1 - alpha)` empirical quantile and its
//! square root, repeats that `reps_outer` times and reports the mean and
//! standard deviation across repetitions. The normal route uses
//! `z_{1 - alpha/2} * sqrt(E(T^2))`.

mod cache;

pub use cache::{CacheEntry, CriticalValueCache};

use crate::distmath::normal_quantile;
use crate::error::{check_probability, invalid, Result};
use crate::exactnull::{expected_t2, t2_null_draw};
use crate::stochastics::{quantile_in_place, SimPlan, StreamKey, StreamRole};
use serde::{Deserialize, Serialize};
use std::ops::RangeInclusive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalMethod {
    ExactMc,
    NormalApprox,
}

impl std::fmt::Display for CriticalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CriticalMethod::ExactMc => "exact_mc",
            CriticalMethod::NormalApprox => "normal_approx",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueEstimate {
    pub n: u32,
    pub alpha: f64,
    /// Mean of the outer replicates (exact) or the closed form (normal).
    pub value: f64,
    /// Spread across outer replicates; zero for the normal approximation.
    pub sd: f64,
    pub method: CriticalMethod,
}

/// Monte Carlo critical value for a single level.
pub fn critical_value_mc(n: u32, alpha: f64, plan: &SimPlan) -> Result<CriticalValueEstimate> {
    Ok(critical_values_mc(n, &[alpha], plan)?.remove(0))
}

/// Monte Carlo critical values for several levels at once. All levels are
/// read off the same simulated draws, so `C` is exactly monotone in `alpha`.
pub fn critical_values_mc(n: u32, alphas: &[f64], plan: &SimPlan) -> Result<Vec<CriticalValueEstimate>> {
    if n < 3 {
        return Err(invalid(format!("n must be at least 3, got {n}")));
    }
    for &a in alphas {
        check_probability("alpha", a)?;
    }
    plan.validate()?;
    let nf = n as f64;
    let inner = plan.reps_inner as usize;
    let per_replicate: Vec<Vec<f64>> = plan.execution.map_collect(plan.reps_outer as u64, |r| {
        let mut rng = StreamKey::for_role(plan.master_seed, StreamRole::CriticalValue, r, 0).rng();
        let mut draws: Vec<f64> = (0..inner).map(|_| t2_null_draw(&mut rng, nf)).collect();
        alphas
            .iter()
            .map(|&a| {
                quantile_in_place(&mut draws, 1.0 - a)
                    .expect("draws are finite and nonempty")
                    .sqrt()
            })
            .collect()
    });

    let outer = per_replicate.len() as f64;
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(k, &alpha)| {
            let mean = per_replicate.iter().map(|v| v[k]).sum::<f64>() / outer;
            let sd = if per_replicate.len() > 1 {
                let ss: f64 = per_replicate.iter().map(|v| (v[k] - mean).powi(2)).sum();
                (ss / (outer - 1.0)).sqrt()
            } else {
                0.0
            };
            CriticalValueEstimate {
                n,
                alpha,
                value: mean,
                sd,
                method: CriticalMethod::ExactMc,
            }
        })
        .collect())
}

/// Critical value from the large-sample normal approximation of `T`.
pub fn critical_value_normal(n: u32, alpha: f64) -> Result<CriticalValueEstimate> {
    if n <= 4 {
        return Err(invalid(format!(
            "n must exceed 4 for the normal approximation (variance undefined), got {n}"
        )));
    }
    check_probability("alpha", alpha)?;
    let z = normal_quantile(1.0 - 0.5 * alpha)?;
    Ok(CriticalValueEstimate {
        n,
        alpha,
        value: z * expected_t2(n)?.sqrt(),
        sd: 0.0,
        method: CriticalMethod::NormalApprox,
    })
}

/// One row of the critical-value grid, named after the published layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub samplesize: u32,
    pub normal10: f64,
    pub criticalvalue10: f64,
    pub normal5: f64,
    pub criticalvalue5: f64,
    pub normal1: f64,
    pub criticalvalue1: f64,
}

pub const TABLE1_COLUMNS: [&str; 7] = [
    "samplesize",
    "normal10",
    "criticalvalue10",
    "normal5",
    "criticalvalue5",
    "normal1",
    "criticalvalue1",
];

/// Normal and Monte Carlo critical values at the 10%, 5% and 1% levels.
pub fn table1(n_range: RangeInclusive<u32>, plan: &SimPlan) -> Result<Vec<Table1Row>> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo < 5 || hi > 1_000_000 || lo > hi {
        return Err(invalid(format!(
            "sample-size range must lie within [5, 1000000], got {lo}..={hi}"
        )));
    }
    n_range
        .map(|n| {
            let exact = critical_values_mc(n, &[0.10, 0.05, 0.01], plan)?;
            Ok(Table1Row {
                samplesize: n,
                normal10: critical_value_normal(n, 0.10)?.value,
                criticalvalue10: exact[0].value,
                normal5: critical_value_normal(n, 0.05)?.value,
                criticalvalue5: exact[1].value,
                normal1: critical_value_normal(n, 0.01)?.value,
                criticalvalue1: exact[2].value,
            })
        })
        .collect()
}
