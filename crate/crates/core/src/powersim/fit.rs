use crate::error::FitError;
use serde::{Deserialize, Serialize};

/// Least-squares summary of one `(x, y)` sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitStats {
    pub n: usize,
    pub beta1_hat: f64,
    pub sigma_hat: f64,
    pub sigma_x_hat: f64,
    /// `beta1_hat * sigma_x_hat / sigma_hat`.
    pub t_slope: f64,
    pub rho_hat: f64,
    /// `sqrt(n - 2) * rho_hat / sqrt(1 - rho_hat^2)`.
    pub t_corr: f64,
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
    pub rss: f64,
}

/// Fits `y = b0 + b1 x` by least squares (two-pass, centred sums).
///
/// `S_XX` or `RSS` at or below a few ulps of the raw sums of squares counts
/// as exactly zero, so that fits differing only by rounding classify alike.
pub fn fit_slope_stats(xs: &[f64], ys: &[f64]) -> Result<FitStats, FitError> {
    let n = xs.len();
    if n != ys.len() || n < 3 {
        return Err(FitError::BadLength { xs: n, ys: ys.len() });
    }
    let nf = n as f64;
    let x_bar = xs.iter().sum::<f64>() / nf;
    let y_bar = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    let (mut x_scale, mut y_scale) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - x_bar, y - y_bar);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        x_scale += x * x;
        y_scale += y * y;
    }
    let tiny = 64.0 * f64::EPSILON;
    if sxx <= tiny * x_scale {
        return Err(FitError::DegenerateX);
    }
    let beta1_hat = sxy / sxx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = (y - y_bar) - beta1_hat * (x - x_bar);
            r * r
        })
        .sum();
    if rss <= tiny * y_scale.max(syy) {
        return Err(FitError::PerfectFit);
    }
    let sigma_hat = (rss / (nf - 2.0)).sqrt();
    let sigma_x_hat = (sxx / (nf - 1.0)).sqrt();
    let rho_hat = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(FitStats {
        n,
        beta1_hat,
        sigma_hat,
        sigma_x_hat,
        t_slope: beta1_hat * sigma_x_hat / sigma_hat,
        rho_hat,
        // 1 - rho^2 = RSS / S_YY, evaluated without cancellation
        t_corr: (nf - 2.0).sqrt() * rho_hat / (rss / syy).sqrt(),
        sxx,
        sxy,
        syy,
        rss,
    })
}
