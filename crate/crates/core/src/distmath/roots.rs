/// Finds `x` in `[lo, hi]` with `f(x) = target` for a nondecreasing `f`.
///
/// Bracketed bisection with an Illinois-modified secant step; the secant
/// point is only taken when it lands strictly inside the bracket.
/// Stops once `|f(x) - target| <= ftol` or the bracket collapses.
pub(crate) fn invert_monotone<F>(f: F, target: f64, mut lo: f64, mut hi: f64, ftol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo) - target;
    let mut fhi = f(hi) - target;
    if flo >= 0.0 {
        return lo;
    }
    if fhi <= 0.0 {
        return hi;
    }
    // 0 = last update moved lo, 1 = hi, for the Illinois halving
    let mut side = -1i8;
    let mut x = 0.5 * (lo + hi);
    for iter in 0..400 {
        let width = hi - lo;
        let secant = lo - flo * (hi - lo) / (fhi - flo);
        x = if iter % 3 != 2 && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let fx = f(x) - target;
        if fx.abs() <= ftol {
            return x;
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
            if side == 0 {
                fhi *= 0.5;
            }
            side = 0;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        if (hi - lo) <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || (hi - lo) >= width && iter > 300 {
            break;
        }
    }
    x
}
