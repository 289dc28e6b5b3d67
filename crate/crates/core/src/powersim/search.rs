//! Minimal sample size for a target power, found on noisy power estimates.
//!
//! 1. Probe phase: starting from a normal-theory guess, gallop to bracket
//!    and bisect on `n` using `reps_inner` trials per probe. Every probe uses
//!    the same trial streams (common random numbers).
//! 2. Validation phase: gallop and bisect again from the probe answer on the
//!    validated mean power (`reps_outer` replicates of `power_trials` trials,
//!    also common across `n`). An `n` passes when its validated mean is at
//!    least `target - tol`, where `tol` is the smaller of `slack` and two
//!    standard errors of that mean.

use super::{Route, SampleSizeResult, Scratch, Statistic, TrialSampler, TrialSpec};
use crate::critvals::{critical_value_normal, CriticalValueCache};
use crate::distmath::{normal_quantile, t_quantile, DegreesOfFreedom};
use crate::error::{check_probability, invalid, CoreError, Result};
use crate::exactnull::{EffectSize, ModelParams};
use crate::stochastics::{SimPlan, StreamRole};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Where the rejection threshold at each probed `n` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalSource {
    /// Monte Carlo critical value from the chi-square product law.
    ExactMc,
    /// `z_{1-alpha/2} sqrt(E(T^2))`.
    NormalApprox,
    /// Monte Carlo below the given `n`, normal approximation from it on.
    ExactBelow(u32),
    /// `t_{1-alpha/2, n-2} / sqrt(n - 1)`, the exact law of `T` computed
    /// from the fitted regression.
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub critical: CriticalSource,
    pub sampler: TrialSampler,
    pub ceiling: u32,
    pub slack: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            critical: CriticalSource::ExactMc,
            sampler: TrialSampler::Regression,
            ceiling: 1_000_000,
            slack: 0.005,
        }
    }
}

/// Mean and spread of `reps_outer` independent power estimates at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidatedPower {
    pub n: u32,
    pub threshold: f64,
    pub mean: f64,
    pub sd: f64,
}

/// One row in the layout `lambda, power, n, mean, sd`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTableRow {
    pub lambda: f64,
    pub power: f64,
    pub n: u32,
    pub mean: f64,
    pub sd: f64,
}

const MIN_N: u32 = 5;

/// Rejection threshold for `|T|` at `n` under the chosen source.
pub fn critical_threshold(
    n: u32,
    alpha: f64,
    source: CriticalSource,
    plan: &SimPlan,
    cache: &CriticalValueCache,
) -> Result<f64> {
    let exact = match source {
        CriticalSource::ExactMc => true,
        CriticalSource::NormalApprox => false,
        CriticalSource::ExactBelow(m) => n < m,
        CriticalSource::StudentT => {
            let df = DegreesOfFreedom::new(n - 2)?;
            return Ok(t_quantile(1.0 - 0.5 * alpha, df)? / ((n - 1) as f64).sqrt());
        }
    };
    if exact {
        Ok(cache.get_or_compute(n, alpha, plan)?.value)
    } else {
        Ok(critical_value_normal(n, alpha)?.value)
    }
}

/// Validated power at `n`: `plan.reps_outer` replicates of
/// `plan.power_trials` trials each.
pub fn validate_power(
    n: u32,
    lambda: EffectSize,
    alpha: f64,
    threshold: f64,
    plan: &SimPlan,
    sampler: TrialSampler,
) -> Result<ValidatedPower> {
    if n < MIN_N {
        return Err(invalid(format!("n must be at least {MIN_N}, got {n}")));
    }
    check_probability("alpha", alpha)?;
    plan.validate()?;
    let spec = TrialSpec {
        n,
        params: ModelParams::standardized(lambda),
        sampler,
        statistic: Statistic::Slope,
        threshold,
    };
    let trials = plan.power_trials;
    let powers: Vec<f64> = plan.execution.map_collect(plan.reps_outer as u64, |r| {
        let mut buf = Scratch::with_capacity(n as usize);
        let tally = spec.count_sequential(
            plan.master_seed,
            StreamRole::PowerValidation,
            r * trials as u64,
            trials,
            &mut buf,
        );
        tally.hits as f64 / trials as f64
    });
    let k = powers.len() as f64;
    let mean = powers.iter().sum::<f64>() / k;
    let sd = if powers.len() > 1 {
        (powers.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ValidatedPower { n, threshold, mean, sd })
}

/// Sample-size search with the default configuration and a private
/// in-memory critical-value cache.
pub fn find_sample_size_slope(lambda: EffectSize, alpha: f64, target: f64, plan: &SimPlan) -> Result<SampleSizeResult> {
    find_sample_size_slope_with(
        lambda,
        alpha,
        target,
        plan,
        &SearchConfig::default(),
        &CriticalValueCache::in_memory(),
    )
}

pub fn find_sample_size_slope_with(
    lambda: EffectSize,
    alpha: f64,
    target: f64,
    plan: &SimPlan,
    config: &SearchConfig,
    cache: &CriticalValueCache,
) -> Result<SampleSizeResult> {
    if lambda.get() == 0.0 {
        return Err(invalid("effect size must be nonzero"));
    }
    check_probability("alpha", alpha)?;
    check_probability("target power", target)?;
    plan.validate()?;
    if config.ceiling < MIN_N {
        return Err(invalid(format!("ceiling must be at least {MIN_N}")));
    }
    if !(0.0..target).contains(&config.slack) {
        return Err(invalid(format!("slack must lie in [0, target), got {}", config.slack)));
    }

    let mut thresholds: HashMap<u32, f64> = HashMap::new();
    let mut threshold_at = |n: u32| -> Result<f64> {
        if let Some(&c) = thresholds.get(&n) {
            return Ok(c);
        }
        let c = critical_threshold(n, alpha, config.critical, plan, cache)?;
        thresholds.insert(n, c);
        Ok(c)
    };

    let params = ModelParams::standardized(lambda);
    let guess = initial_guess(lambda.get(), alpha, target)?.clamp(MIN_N, config.ceiling);
    let probe_n = {
        let mut probe = |n: u32| -> Result<bool> {
            let spec = TrialSpec {
                n,
                params,
                sampler: config.sampler,
                statistic: Statistic::Slope,
                threshold: threshold_at(n)?,
            };
            let tally = spec.count(
                plan.master_seed,
                StreamRole::PowerSearch,
                0,
                plan.reps_inner,
                plan.execution,
            );
            Ok(tally.hits as f64 / plan.reps_inner as f64 >= target)
        };
        smallest_passing(guess, MIN_N, config.ceiling, target, &mut probe)?
    };
    log::debug!("probe phase settled at n = {probe_n}");

    let mut validated: HashMap<u32, (f64, f64)> = HashMap::new();
    let final_n = {
        let mut check = |n: u32| -> Result<bool> {
            let v = validate_power(n, lambda, alpha, threshold_at(n)?, plan, config.sampler)?;
            validated.insert(n, (v.mean, v.sd));
            let se = v.sd / (plan.reps_outer as f64).sqrt();
            Ok(v.mean >= target - config.slack.min(2.0 * se))
        };
        smallest_passing(probe_n, MIN_N, config.ceiling, target, &mut check)?
    };
    let (mean, sd) = validated[&final_n];
    Ok(SampleSizeResult {
        n: final_n,
        target_power: target,
        validated_mean: mean,
        validated_sd: sd,
        route: Route::Slope,
    })
}

/// `((z_{1-alpha/2} + z_target) / lambda)^2 + 2`, rounded up.
fn initial_guess(lambda: f64, alpha: f64, target: f64) -> Result<u32> {
    let z = normal_quantile(1.0 - 0.5 * alpha)? + normal_quantile(target)?;
    let n = (z / lambda).powi(2) + 2.0;
    Ok(if n.is_finite() && n < u32::MAX as f64 {
        n.ceil() as u32
    } else {
        u32::MAX
    })
}

/// Smallest `n` in `[floor, ceiling]` for which `pass` holds, assuming
/// `pass` is monotone. Gallops from `start`, then bisects.
fn smallest_passing<F>(start: u32, floor: u32, ceiling: u32, target: f64, pass: &mut F) -> Result<u32>
where
    F: FnMut(u32) -> Result<bool>,
{
    let (mut lo, mut hi);
    if pass(start)? {
        hi = start;
        let mut step = 1u32;
        loop {
            if hi == floor {
                return Ok(floor);
            }
            let cand = hi.saturating_sub(step).max(floor);
            if pass(cand)? {
                hi = cand;
                step = step.saturating_mul(2);
            } else {
                lo = cand;
                break;
            }
        }
    } else {
        lo = start;
        let mut step = 1u32;
        loop {
            if lo >= ceiling {
                return Err(CoreError::SearchCeiling { target, ceiling });
            }
            let cand = lo.saturating_add(step).min(ceiling);
            if pass(cand)? {
                hi = cand;
                break;
            }
            lo = cand;
            step = step.saturating_mul(2);
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pass(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Rows `lambda, power, n, mean, sd` for every `(lambda, target)` pair,
/// lambdas outermost.
pub fn power_table(alpha: f64, lambdas: &[f64], targets: &[f64], plan: &SimPlan) -> Result<Vec<PowerTableRow>> {
    power_table_with(
        alpha,
        lambdas,
        targets,
        plan,
        &SearchConfig::default(),
        &CriticalValueCache::in_memory(),
    )
}

pub fn power_table_with(
    alpha: f64,
    lambdas: &[f64],
    targets: &[f64],
    plan: &SimPlan,
    config: &SearchConfig,
    cache: &CriticalValueCache,
) -> Result<Vec<PowerTableRow>> {
    let mut rows = Vec::with_capacity(lambdas.len() * targets.len());
    for &lambda in lambdas {
        for &target in targets {
            let r = find_sample_size_slope_with(EffectSize::new(lambda)?, alpha, target, plan, config, cache)?;
            rows.push(PowerTableRow {
                lambda,
                power: target,
                n: r.n,
                mean: r.validated_mean,
                sd: r.validated_sd,
            });
        }
    }
    Ok(rows)
}
