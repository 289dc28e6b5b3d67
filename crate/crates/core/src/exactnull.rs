//! Unconditional distribution theory for the slope statistic when the
//! predictor is normal.
//!
//! With `X ~ N(mu_x, sigma_x^2)` the least-squares slope has the marginal
//! density
//!
//! ```text
//! f(b) = sigma_x / (B(1/2, (n-1)/2) sigma) * (1 + (b - beta1)^2 sigma_x^2 / sigma^2)^(-n/2)
//! ```
//!
//! so `(sigma_x / sigma)(beta1_hat - beta1) sqrt(n - 1)` is `t_{n-1}`. The
//! null law used for critical values is the chi-square product
//! `T^2 ~ (n-2)/(n-1) * W1 W4 / (W2 W3)` with independent
//! `W1 ~ chi2_1`, `W2, W4 ~ chi2_{n-1}`, `W3 ~ chi2_{n-2}`.

use crate::distmath::special::ln_beta;
use crate::error::{invalid, CoreError, Result};
use crate::stochastics::chisq;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// The five-parameter model `X ~ N(mu_x, sigma_x^2)`,
/// `Y | X ~ N(beta0 + beta1 X, sigma_eps^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta0: f64,
    pub beta1: f64,
    pub mu_x: f64,
    pub sigma_x: f64,
    pub sigma_eps: f64,
}

impl ModelParams {
    pub fn new(beta0: f64, beta1: f64, mu_x: f64, sigma_x: f64, sigma_eps: f64) -> Result<Self> {
        let p = Self {
            beta0,
            beta1,
            mu_x,
            sigma_x,
            sigma_eps,
        };
        p.validate()?;
        Ok(p)
    }

    /// Standardised model: `sigma_x = sigma_eps = 1`, `mu_x = beta0 = 0`,
    /// `beta1 = lambda`.
    pub fn standardized(lambda: EffectSize) -> Self {
        Self {
            beta0: 0.0,
            beta1: lambda.get(),
            mu_x: 0.0,
            sigma_x: 1.0,
            sigma_eps: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.beta0, self.beta1, self.mu_x, self.sigma_x, self.sigma_eps]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("model parameters must be finite"));
        }
        if self.sigma_x.is_nan() || self.sigma_eps.is_nan() || self.sigma_x <= 0.0 || self.sigma_eps <= 0.0 {
            return Err(invalid("sigma_x and sigma_eps must be positive"));
        }
        Ok(())
    }

    pub fn effect_size(&self) -> EffectSize {
        EffectSize(self.beta1 * self.sigma_x / self.sigma_eps)
    }
}

/// `lambda = beta1 * sigma_x / sigma_eps`, the only parameter the non-null
/// law of `T` depends on.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EffectSize(f64);

impl EffectSize {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(invalid("effect size must be finite"));
        }
        Ok(Self(lambda))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for EffectSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// One draw of `T^2` from the chi-square product law.
pub fn sample_t2_null<R: Rng + ?Sized>(rng: &mut R, n: u32) -> Result<f64> {
    if n < 3 {
        return Err(invalid(format!("n must be at least 3, got {n}")));
    }
    Ok(t2_null_draw(rng, n as f64))
}

/// Unchecked [`sample_t2_null`]; `n >= 3`. Draw order is W1, W2, W3, W4.
#[inline]
pub(crate) fn t2_null_draw<R: Rng + ?Sized>(rng: &mut R, n: f64) -> f64 {
    let w1 = chisq(rng, 1.0);
    let w2 = chisq(rng, n - 1.0);
    let w3 = chisq(rng, n - 2.0);
    let w4 = chisq(rng, n - 1.0);
    (n - 2.0) / (n - 1.0) * (w1 * w4) / (w2 * w3)
}

/// Marginal density of `beta1_hat` at `b`.
pub fn beta1hat_density(b: f64, n: u32, params: &ModelParams) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    params.validate()?;
    let nf = n as f64;
    let u = (b - params.beta1) * params.sigma_x / params.sigma_eps;
    let ln_f =
        params.sigma_x.ln() - params.sigma_eps.ln() - ln_beta(0.5, 0.5 * (nf - 1.0)) - 0.5 * nf * (u * u).ln_1p();
    Ok(ln_f.exp())
}

/// Unconditional mean and variance of `beta1_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeMoments {
    pub mean: f64,
    pub variance: f64,
}

/// `E(beta1_hat) = beta1`, `Var(beta1_hat) = sigma^2 / ((n - 3) sigma_x^2)`;
/// the variance exists only for `n > 3`.
pub fn beta1hat_moments(n: u32, params: &ModelParams) -> Result<SlopeMoments> {
    params.validate()?;
    if n <= 3 {
        return Err(CoreError::UndefinedMoment(format!(
            "Var(beta1_hat) needs n > 3 (got n = {n}); the variance diverges"
        )));
    }
    let ratio = params.sigma_eps / params.sigma_x;
    Ok(SlopeMoments {
        mean: params.beta1,
        variance: ratio * ratio / (n as f64 - 3.0),
    })
}

/// `(sigma_x / sigma)(b - beta1) sqrt(n - 1)`, distributed as `t_{n-1}`.
pub fn scaled_t_transform(beta1hat: f64, n: u32, params: &ModelParams) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    params.validate()?;
    Ok(params.sigma_x / params.sigma_eps * (beta1hat - params.beta1) * (n as f64 - 1.0).sqrt())
}

/// `E(T^2) = (n - 2) / ((n - 3)(n - 4))` under the product law; needs `n > 4`.
pub fn expected_t2(n: u32) -> Result<f64> {
    if n <= 4 {
        return Err(CoreError::UndefinedMoment(format!("E(T^2) needs n > 4 (got n = {n})")));
    }
    let nf = n as f64;
    Ok((nf - 2.0) / ((nf - 3.0) * (nf - 4.0)))
}
