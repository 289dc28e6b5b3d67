use crate::error::{check_probability, invalid, Result};

/// Empirical `p`-quantile by linear interpolation between order statistics.
///
/// With `m = samples.len()` and `h = (m - 1) p`, returns
/// `x[floor(h)] + (h - floor(h)) (x[floor(h) + 1] - x[floor(h)])` on the
/// sorted sample (0-indexed). The input is left untouched.
pub fn empirical_quantile(samples: &[f64], p: f64) -> Result<f64> {
    let mut buf = samples.to_vec();
    quantile_in_place(&mut buf, p)
}

/// Same as [`empirical_quantile`] but reorders `samples` instead of copying.
/// Runs in linear time via selection.
pub fn quantile_in_place(samples: &mut [f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("quantile of an empty sample"));
    }
    check_probability("p", p)?;
    if samples.iter().any(|x| x.is_nan()) {
        return Err(invalid("sample contains NaN"));
    }
    let h = (samples.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    let (_, &mut below, rest) = samples.select_nth_unstable_by(lo, f64::total_cmp);
    if frac == 0.0 || rest.is_empty() {
        return Ok(below);
    }
    let above = rest.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(below + frac * (above - below))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_examples() {
        assert_eq!(empirical_quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5).unwrap(), 3.0);
        assert_eq!(empirical_quantile(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.5);
        assert_eq!(empirical_quantile(&[10.0, 20.0], 0.75).unwrap(), 17.5);
        assert_eq!(empirical_quantile(&[4.0], 0.3).unwrap(), 4.0);
    }

    #[test]
    fn order_does_not_matter() {
        let a = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(empirical_quantile(&a, 0.9).unwrap(), 4.6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(empirical_quantile(&[], 0.5).is_err());
        assert!(empirical_quantile(&[1.0], 0.0).is_err());
        assert!(empirical_quantile(&[1.0, f64::NAN], 0.5).is_err());
    }

    fn sorted_oracle(xs: &[f64], p: f64) -> f64 {
        let mut s = xs.to_vec();
        s.sort_by(f64::total_cmp);
        let h = (s.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(s.len() - 1);
        s[lo] + (h - lo as f64) * (s[hi] - s[lo])
    }

    proptest! {
        #[test]
        fn matches_full_sort(xs in proptest::collection::vec(-1e6f64..1e6, 1..200), p in 0.001f64..0.999) {
            let q = empirical_quantile(&xs, p).unwrap();
            prop_assert!((q - sorted_oracle(&xs, p)).abs() <= 1e-9 * (1.0 + q.abs()));
        }

        #[test]
        fn monotone_and_bounded(xs in proptest::collection::vec(-100f64..100.0, 1..100), p in 0.01f64..0.98, dp in 0.0f64..0.01) {
            let lo = empirical_quantile(&xs, p).unwrap();
            let hi = empirical_quantile(&xs, p + dp).unwrap();
            let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(hi >= lo - 1e-12);
            prop_assert!(lo >= min && hi <= max);
        }
    }
}
