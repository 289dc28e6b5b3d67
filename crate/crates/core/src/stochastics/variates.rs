use crate::distmath::DegreesOfFreedom;
use crate::error::{invalid, Result};
use rand::Rng;
use rand_distr::{Open01, StandardNormal};

#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Normal variate with mean `mu` and standard deviation `sd`.
pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mu: f64, sd: f64) -> Result<f64> {
    if !(sd.is_finite() && sd >= 0.0 && mu.is_finite()) {
        return Err(invalid(format!("normal needs finite mu and sd >= 0, got ({mu}, {sd})")));
    }
    if sd == 0.0 {
        return Ok(mu);
    }
    Ok(mu + sd * standard_normal(rng))
}

/// Chi-square variate with `df` degrees of freedom.
pub fn sample_chisq<R: Rng + ?Sized>(rng: &mut R, df: DegreesOfFreedom) -> f64 {
    chisq(rng, df.as_f64())
}

/// Unchecked chi-square draw for hot loops; `df` must be positive.
#[inline]
pub fn chisq<R: Rng + ?Sized>(rng: &mut R, df: f64) -> f64 {
    2.0 * gamma(rng, 0.5 * df)
}

/// Gamma(shape, 1) variate.
///
/// Marsaglia and Tsang's squeeze/accept-reject method for `shape >= 1`; for
/// `shape < 1` a Gamma(shape + 1) draw is boosted by `U^(1/shape)`.
pub fn gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let u: f64 = rng.sample(Open01);
        return gamma(rng, shape + 1.0) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z = standard_normal(rng);
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.sample(Open01);
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 {
            return d * v;
        }
        if u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}
