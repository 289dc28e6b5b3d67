//! The correlation-coefficient test and its link to the slope test.
//!
//! With unit-variance standardisation the population correlation and the
//! effect size are related by `rho = lambda / sqrt(1 + lambda^2)`, so a
//! slope-test design can be translated into a correlation-test design and
//! back.

use crate::critvals::CriticalValueCache;
use crate::distmath::{normal_cdf, t_quantile, DegreesOfFreedom};
use crate::error::{check_probability, invalid, CoreError, Result};
use crate::exactnull::{EffectSize, ModelParams};
use crate::powersim::{
    estimate_from, find_sample_size_slope_with, PowerEstimate, Route, SampleSizeResult, SearchConfig, Statistic,
    TrialSampler, TrialSpec,
};
use crate::stochastics::{SimPlan, StreamRole};
use serde::{Deserialize, Serialize};

/// `sign(lambda) / sqrt(1 + 1 / lambda^2)`.
pub fn lambda_to_rho(lambda: EffectSize) -> f64 {
    let l = lambda.get();
    l / l.hypot(1.0)
}

/// Inverse of [`lambda_to_rho`]: `rho / sqrt(1 - rho^2)`.
pub fn rho_to_lambda(rho: f64) -> Result<EffectSize> {
    check_rho(rho)?;
    EffectSize::new(rho / ((1.0 - rho) * (1.0 + rho)).sqrt())
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho.abs() < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("correlation must lie in (-1, 1), got {rho}")))
    }
}

/// Two-sided power of the correlation t test by Fisher's z with the
/// `rho / (2(n - 1))` bias correction.
pub fn corr_power_approx(n: u32, rho: f64, alpha: f64) -> Result<f64> {
    if n < 4 {
        return Err(invalid(format!("n must be at least 4, got {n}")));
    }
    check_rho(rho)?;
    check_probability("alpha", alpha)?;
    let df = (n - 2) as f64;
    let t = t_quantile(1.0 - 0.5 * alpha, DegreesOfFreedom::new(n - 2)?)?;
    let r_c = (t * t / (t * t + df)).sqrt();
    let z_r = rho.atanh() + rho / (2.0 * (n as f64 - 1.0));
    let z_c = r_c.atanh();
    let s = (n as f64 - 3.0).sqrt();
    Ok(normal_cdf((z_r - z_c) * s) + normal_cdf((-z_r - z_c) * s))
}

/// Monte Carlo power of `|T1| > t_{1-alpha/2, n-2}` for bivariate normal
/// samples, `X ~ N(0, 1)`, `Y = rho X + sqrt(1 - rho^2) Z`, using
/// `plan.reps_inner` trials.
pub fn corr_power_mc(n: u32, rho: f64, alpha: f64, plan: &SimPlan) -> Result<PowerEstimate> {
    if n < 4 {
        return Err(invalid(format!("n must be at least 4, got {n}")));
    }
    check_rho(rho)?;
    check_probability("alpha", alpha)?;
    plan.validate()?;
    let spec = TrialSpec {
        n,
        params: ModelParams::new(0.0, rho, 0.0, 1.0, ((1.0 - rho) * (1.0 + rho)).sqrt())?,
        sampler: TrialSampler::Regression,
        statistic: Statistic::Corr,
        threshold: t_quantile(1.0 - 0.5 * alpha, DegreesOfFreedom::new(n - 2)?)?,
    };
    let tally = spec.count(
        plan.master_seed,
        StreamRole::Correlation,
        0,
        plan.reps_inner,
        plan.execution,
    );
    Ok(estimate_from(n, alpha, rho_to_lambda(rho)?, plan.reps_inner, tally))
}

/// Smallest `n` with [`corr_power_approx`] at least `target`, searched up to
/// one million.
pub fn find_sample_size_corr(rho: f64, alpha: f64, target: f64) -> Result<SampleSizeResult> {
    find_sample_size_corr_capped(rho, alpha, target, 1_000_000)
}

pub fn find_sample_size_corr_capped(rho: f64, alpha: f64, target: f64, ceiling: u32) -> Result<SampleSizeResult> {
    check_rho(rho)?;
    if rho == 0.0 {
        return Err(invalid("effect size must be nonzero"));
    }
    check_probability("alpha", alpha)?;
    check_probability("target power", target)?;
    let power = |n: u32| corr_power_approx(n, rho, alpha);
    let mut lo = 4u32;
    if power(lo)? >= target {
        return Ok(corr_result(lo, target, power(lo)?));
    }
    let mut hi = 8u32;
    loop {
        let hi_c = hi.min(ceiling);
        if power(hi_c)? >= target {
            hi = hi_c;
            break;
        }
        if hi_c >= ceiling {
            return Err(CoreError::SearchCeiling { target, ceiling });
        }
        lo = hi_c;
        hi = hi.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if power(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(corr_result(hi, target, power(hi)?))
}

fn corr_result(n: u32, target: f64, power: f64) -> SampleSizeResult {
    SampleSizeResult {
        n,
        target_power: target,
        validated_mean: power,
        validated_sd: 0.0,
        route: Route::Correlation,
    }
}

/// Slope-test and correlation-test sample sizes for one design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastRow {
    pub alpha: f64,
    pub lambda: EffectSize,
    pub rho: f64,
    pub target_power: f64,
    pub n_slope: u32,
    pub n_corr: u32,
    /// `n_slope - n_corr`.
    pub difference: i64,
}

pub fn contrast_table(alpha: f64, lambdas: &[f64], targets: &[f64], plan: &SimPlan) -> Result<Vec<ContrastRow>> {
    contrast_table_with(
        alpha,
        lambdas,
        targets,
        plan,
        &SearchConfig::default(),
        &CriticalValueCache::in_memory(),
    )
}

/// One row per `(lambda, target)`, lambdas outermost.
pub fn contrast_table_with(
    alpha: f64,
    lambdas: &[f64],
    targets: &[f64],
    plan: &SimPlan,
    config: &SearchConfig,
    cache: &CriticalValueCache,
) -> Result<Vec<ContrastRow>> {
    let mut rows = Vec::with_capacity(lambdas.len() * targets.len());
    for &l in lambdas {
        let lambda = EffectSize::new(l)?;
        let rho = lambda_to_rho(lambda);
        for &target in targets {
            let slope = find_sample_size_slope_with(lambda, alpha, target, plan, config, cache)?;
            let corr = find_sample_size_corr(rho, alpha, target)?;
            rows.push(ContrastRow {
                alpha,
                lambda,
                rho,
                target_power: target,
                n_slope: slope.n,
                n_corr: corr.n,
                difference: slope.n as i64 - corr.n as i64,
            });
        }
    }
    Ok(rows)
}

/// `(lambda, rho)` pairs over a grid, for plotting.
pub fn rho_lambda_curve(lambda_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    lambda_grid
        .iter()
        .map(|&l| Ok((l, lambda_to_rho(EffectSize::new(l)?))))
        .collect()
}
