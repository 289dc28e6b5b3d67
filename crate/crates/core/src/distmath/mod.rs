//! Deterministic distribution math: normal, Student t and noncentral t
//! distribution functions and the fixed-design power of the slope t test.
//!
//! Everything here is a pure function of its arguments.

mod noncentral;
mod roots;
pub mod special;

pub use noncentral::noncentral_t_cdf;

use crate::error::{check_probability, invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Integer degrees of freedom, at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DegreesOfFreedom(u32);

impl DegreesOfFreedom {
    pub fn new(value: u32) -> Result<Self> {
        if value == 0 {
            return Err(invalid("degrees of freedom must be at least 1"));
        }
        Ok(Self(value))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

/// Noncentrality `delta` of a noncentral t variate `(Z + delta) / sqrt(V / df)`.
///
/// This is the t-scale parameter. The squared form `delta^2` is what some
/// texts call the (F-scale) noncentrality of the same test.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Noncentrality(f64);

impl Noncentrality {
    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(invalid("noncentrality must be finite"));
        }
        Ok(Self(delta))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * special::erfc(-x / SQRT_2)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    Ok(roots::invert_monotone(
        normal_cdf,
        p,
        -40.0,
        40.0,
        1e-16 * p.min(1.0 - p).max(1e-300),
    ))
}

/// Student t CDF with `df` degrees of freedom.
pub fn t_cdf(x: f64, df: DegreesOfFreedom) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.5;
    }
    if x.is_infinite() {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let nu = df.as_f64();
    let x2 = x * x;
    let w = nu / (nu + x2);
    let z = x2 / (nu + x2);
    let tail = 0.5 * special::beta_reg_xy(w, z, 0.5 * nu, 0.5);
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Student t quantile.
pub fn t_quantile(p: f64, df: DegreesOfFreedom) -> Result<f64> {
    check_probability("p", p)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    let f = |x: f64| t_cdf(x, df);
    let tol = 1e-15 * p.min(1.0 - p);
    if p > 0.5 {
        let mut hi = 2.0;
        while f(hi) < p {
            hi *= 2.0;
        }
        Ok(roots::invert_monotone(f, p, 0.0, hi, tol))
    } else {
        let mut lo = -2.0;
        while f(lo) > p {
            lo *= 2.0;
        }
        Ok(roots::invert_monotone(f, p, lo, 0.0, tol))
    }
}

/// Power of the two-sided fixed-design slope t test.
///
/// With the predictor values fixed (`S_XX = sxx`), the statistic
/// `beta1_hat * sqrt(S_XX) / sigma_hat` is noncentral t with `n - 2` degrees
/// of freedom and noncentrality `delta = a * sqrt(sxx) / sigma`; the squared
/// quantity `a^2 sxx / sigma^2` is the F-scale form of the same parameter.
pub fn fixed_design_power(a: f64, sxx: f64, sigma: f64, n: u32, alpha: f64) -> Result<f64> {
    if !(sxx.is_finite() && sxx > 0.0) {
        return Err(invalid(format!("S_XX must be positive, got {sxx}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    if !a.is_finite() {
        return Err(invalid("alternative slope must be finite"));
    }
    if n < 3 {
        return Err(invalid(format!("n must be at least 3, got {n}")));
    }
    check_probability("alpha", alpha)?;
    let df = DegreesOfFreedom::new(n - 2)?;
    let delta = Noncentrality::new(a * sxx.sqrt() / sigma)?;
    let crit = t_quantile(1.0 - 0.5 * alpha, df)?;
    let upper = 1.0 - noncentral_t_cdf(crit, df, delta)?;
    let lower = noncentral_t_cdf(-crit, df, delta)?;
    Ok((upper + lower).clamp(0.0, 1.0))
}
