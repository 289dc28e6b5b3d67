//! Noncentral t CDF as a Poisson-weighted series of incomplete beta
//! functions, summed outward from the modal term in both directions.
//!
//! For `t >= 0`:
//!
//! ```text
//! F(t; nu, delta) = Phi(-delta)
//!     + 1/2 * sum_j [ p_j I_y(j + 1/2, nu/2) + q_j I_y(j + 1, nu/2) ]
//! y   = t^2 / (t^2 + nu),  lambda = delta^2 / 2
//! p_j = e^-lambda lambda^j / j!
//! q_j = delta e^-lambda lambda^j / (sqrt(2) Gamma(j + 3/2))
//! ```
//!
//! and `F(t; nu, delta) = 1 - F(-t; nu, -delta)` for `t < 0`. Because every
//! incomplete beta is at most 1, the tail of the sum beyond term `j` is
//! bounded by a geometric series in the Poisson ratio, which gives a
//! rigorous stopping rule.

use super::special::{beta_reg_xy, ln_gamma};
use super::{normal_cdf, t_cdf, DegreesOfFreedom, Noncentrality};
use crate::error::{CoreError, Result};
use std::f64::consts::SQRT_2;

const TOLERANCE: f64 = 1e-12;
const MAX_TERMS: usize = 20_000;

/// CDF of the noncentral t distribution.
///
/// Fails with [`CoreError::NonConvergence`] when the series would need more
/// than 20,000 terms, which happens only for extreme `|ncp|` (beyond ~1000).
pub fn noncentral_t_cdf(x: f64, df: DegreesOfFreedom, ncp: Noncentrality) -> Result<f64> {
    let delta = ncp.get();
    if x.is_nan() {
        return Ok(f64::NAN);
    }
    if delta == 0.0 {
        return Ok(t_cdf(x, df));
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { 1.0 } else { 0.0 });
    }
    let value = if x >= 0.0 {
        upper_half(x, df.as_f64(), delta)?
    } else {
        1.0 - upper_half(-x, df.as_f64(), -delta)?
    };
    Ok(value.clamp(0.0, 1.0))
}

fn upper_half(t: f64, nu: f64, delta: f64) -> Result<f64> {
    let base = normal_cdf(-delta);
    if t == 0.0 {
        return Ok(base);
    }
    let t2 = t * t;
    let y = t2 / (t2 + nu);
    let ycomp = nu / (t2 + nu);
    let half_nu = 0.5 * nu;
    let lambda = 0.5 * delta * delta;

    let mode = lambda.floor();
    let ln_lambda = lambda.ln();
    let ln_mode_weight = -lambda + if mode > 0.0 { mode * ln_lambda } else { 0.0 };
    let p_mode = (ln_mode_weight - ln_gamma(mode + 1.0)).exp();
    let q_mode = delta / SQRT_2 * (ln_mode_weight - ln_gamma(mode + 1.5)).exp();

    let term = |j: f64, p: f64, q: f64| {
        p * beta_reg_xy(y, ycomp, j + 0.5, half_nu) + q * beta_reg_xy(y, ycomp, j + 1.0, half_nu)
    };

    let mut sum = term(mode, p_mode, q_mode);
    let mut terms = 1usize;

    // upward
    let (mut p, mut q, mut j) = (p_mode, q_mode, mode);
    loop {
        p *= lambda / (j + 1.0);
        q *= lambda / (j + 1.5);
        j += 1.0;
        sum += term(j, p, q);
        terms += 1;
        let ratio = lambda / (j + 1.0);
        if ratio < 1.0 && 0.5 * (p + q.abs()) * ratio / (1.0 - ratio) < 0.5 * TOLERANCE {
            break;
        }
        if terms > MAX_TERMS {
            return Err(non_convergence(delta));
        }
    }

    // downward
    let (mut p, mut q, mut j) = (p_mode, q_mode, mode);
    while j >= 1.0 {
        p *= j / lambda;
        q *= (j + 0.5) / lambda;
        j -= 1.0;
        sum += term(j, p, q);
        terms += 1;
        let ratio = (j + 0.5) / lambda;
        if ratio < 1.0 && 0.5 * (p + q.abs()) * ratio / (1.0 - ratio) < 0.5 * TOLERANCE {
            break;
        }
        if terms > MAX_TERMS {
            return Err(non_convergence(delta));
        }
    }

    Ok(base + 0.5 * sum)
}

fn non_convergence(delta: f64) -> CoreError {
    CoreError::NonConvergence(format!(
        "noncentral t series exceeded {MAX_TERMS} terms (|ncp| = {} is too extreme)",
        delta.abs()
    ))
}
