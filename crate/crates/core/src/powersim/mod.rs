//! Power of the slope test by simulation, and the sample-size search.
//!
//! A trial draws `n` pairs from the five-parameter model, fits the line and
//! rejects when `|T|` exceeds the threshold. Trial `i` of a batch always uses
//! the stream keyed by `(seed, role, i)`, so batches at different `n` share
//! random numbers and power estimates move smoothly with `n`.

mod fit;
mod search;

pub use fit::{fit_slope_stats, FitStats};
pub use search::{
    critical_threshold, find_sample_size_slope, find_sample_size_slope_with, power_table, power_table_with,
    validate_power, CriticalSource, PowerTableRow, SearchConfig, ValidatedPower,
};

use crate::critvals::CriticalValueEstimate;
use crate::error::{check_probability, invalid, Result};
use crate::exactnull::{EffectSize, ModelParams};
use crate::exec::{Execution, Tally};
use crate::stochastics::{chisq, standard_normal, KeyedRng, SimPlan, StreamKey, StreamRole};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Slope,
    Correlation,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Slope => "slope",
            Route::Correlation => "correlation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub n: u32,
    pub alpha: f64,
    pub lambda: EffectSize,
    pub power: f64,
    /// Binomial standard error of `power`.
    pub sd: f64,
    pub trials: u32,
    /// Trials redrawn because the fit was degenerate.
    pub resampled: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSizeResult {
    pub n: u32,
    pub target_power: f64,
    pub validated_mean: f64,
    pub validated_sd: f64,
    pub route: Route,
}

/// How a single trial is generated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialSampler {
    /// Draw all `n` pairs and fit the regression.
    #[default]
    Regression,
    /// Draw `S_XX ~ sigma_x^2 chi2_{n-1}`, `beta1_hat | S_XX` normal and
    /// `RSS ~ sigma^2 chi2_{n-2}` directly. Same law as `Regression`, O(1)
    /// per trial.
    SufficientStats,
}

/// Which statistic a trial compares with the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Statistic {
    Slope,
    Corr,
}

/// Everything needed to run a batch of trials.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TrialSpec {
    pub n: u32,
    pub params: ModelParams,
    pub sampler: TrialSampler,
    pub statistic: Statistic,
    pub threshold: f64,
}

const MAX_ATTEMPTS: u32 = 1 << 20;

impl TrialSpec {
    /// Runs trial `task` (redrawing on degenerate fits) and reports
    /// `(rejected, redraws)`.
    fn run(&self, seed: u64, role: StreamRole, task: u64, buf: &mut Scratch) -> (bool, u64) {
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = StreamKey::for_role(seed, role, task, attempt).rng();
            if let Some(stat) = self.statistic_once(&mut rng, buf) {
                return (stat.abs() > self.threshold, attempt as u64);
            }
        }
        unreachable!("{MAX_ATTEMPTS} consecutive degenerate fits")
    }

    pub(crate) fn statistic_once(&self, rng: &mut KeyedRng, buf: &mut Scratch) -> Option<f64> {
        let p = &self.params;
        let nf = self.n as f64;
        match self.sampler {
            TrialSampler::Regression => {
                buf.xs.clear();
                buf.ys.clear();
                for _ in 0..self.n {
                    let x = p.mu_x + p.sigma_x * standard_normal(rng);
                    let y = p.beta0 + p.beta1 * x + p.sigma_eps * standard_normal(rng);
                    buf.xs.push(x);
                    buf.ys.push(y);
                }
                let f = fit_slope_stats(&buf.xs, &buf.ys).ok()?;
                Some(match self.statistic {
                    Statistic::Slope => f.t_slope,
                    Statistic::Corr => f.t_corr,
                })
            }
            TrialSampler::SufficientStats => {
                let sxx = p.sigma_x * p.sigma_x * chisq(rng, nf - 1.0);
                let b = p.beta1 + p.sigma_eps * standard_normal(rng) / sxx.sqrt();
                let rss = p.sigma_eps * p.sigma_eps * chisq(rng, nf - 2.0);
                if !(sxx > 0.0 && rss > 0.0) {
                    return None;
                }
                let t = b * (sxx / (nf - 1.0)).sqrt() / (rss / (nf - 2.0)).sqrt();
                Some(match self.statistic {
                    Statistic::Slope => t,
                    Statistic::Corr => t * (nf - 1.0).sqrt(),
                })
            }
        }
    }

    /// Rejections among tasks `first .. first + count`.
    pub fn count(&self, seed: u64, role: StreamRole, first: u64, count: u32, exec: Execution) -> Tally {
        exec.sum_with(
            count as u64,
            || Scratch::with_capacity(self.n as usize),
            |buf, i| {
                let (hit, redraws) = self.run(seed, role, first + i, buf);
                Tally {
                    hits: hit as u64,
                    resampled: redraws,
                }
            },
        )
    }

    /// Same as [`count`](Self::count) on the calling thread.
    pub fn count_sequential(&self, seed: u64, role: StreamRole, first: u64, count: u32, buf: &mut Scratch) -> Tally {
        (0..count as u64).fold(Tally::default(), |acc, i| {
            let (hit, redraws) = self.run(seed, role, first + i, buf);
            acc + Tally {
                hits: hit as u64,
                resampled: redraws,
            }
        })
    }
}

pub(crate) struct Scratch {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Scratch {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            xs: Vec::with_capacity(n),
            ys: Vec::with_capacity(n),
        }
    }
}

pub(crate) fn estimate_from(n: u32, alpha: f64, lambda: EffectSize, trials: u32, tally: Tally) -> PowerEstimate {
    let power = tally.hits as f64 / trials as f64;
    PowerEstimate {
        n,
        alpha,
        lambda,
        power,
        sd: (power * (1.0 - power) / trials as f64).sqrt(),
        trials,
        resampled: tally.resampled,
    }
}

/// Power of `|T| > c` in the standardised model at effect size `lambda`.
///
/// Uses `reps` full regressions keyed from `plan.master_seed`.
pub fn simulate_power_slope(
    n: u32,
    lambda: EffectSize,
    alpha: f64,
    c: &CriticalValueEstimate,
    reps: u32,
    plan: &SimPlan,
) -> Result<PowerEstimate> {
    if c.n != n || c.alpha != alpha {
        return Err(invalid(format!(
            "critical value is for (n={}, alpha={}), not (n={n}, alpha={alpha})",
            c.n, c.alpha
        )));
    }
    simulate_power_model(
        n,
        &ModelParams::standardized(lambda),
        alpha,
        c.value,
        reps,
        plan,
        TrialSampler::Regression,
    )
}

/// Power of `|T| > threshold` under arbitrary model parameters.
pub fn simulate_power_model(
    n: u32,
    params: &ModelParams,
    alpha: f64,
    threshold: f64,
    reps: u32,
    plan: &SimPlan,
    sampler: TrialSampler,
) -> Result<PowerEstimate> {
    if n < 5 {
        return Err(invalid(format!("n must be at least 5, got {n}")));
    }
    check_probability("alpha", alpha)?;
    params.validate()?;
    if reps == 0 {
        return Err(invalid("reps must be positive"));
    }
    if threshold.is_nan() || threshold < 0.0 {
        return Err(invalid(format!("threshold must be nonnegative, got {threshold}")));
    }
    let spec = TrialSpec {
        n,
        params: *params,
        sampler,
        statistic: Statistic::Slope,
        threshold,
    };
    let tally = spec.count(plan.master_seed, StreamRole::PowerEstimate, 0, reps, plan.execution);
    Ok(estimate_from(n, alpha, params.effect_size(), reps, tally))
}
