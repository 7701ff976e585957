//! Monotone root finding for inverting derivatives of N-functions.

/// Solves `g(t) = target` for a continuous, strictly increasing `g` on
/// `[0, inf)` with `g(0) = 0`, using a doubling bracket and safeguarded Newton
/// steps (`dg` is the derivative, possibly infinite or zero at isolated points).
pub fn invert_increasing<G, D>(g: G, dg: D, target: f64, guess: f64) -> f64
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if target <= 0.0 {
        return 0.0;
    }
    let mut x = if guess.is_finite() && guess > 0.0 { guess } else { 1.0 };
    let (mut lo, mut hi);
    if g(x) < target {
        lo = x;
        hi = x * 2.0;
        while g(hi) < target {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
    } else {
        hi = x;
        lo = x * 0.5;
        while g(lo) >= target {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return lo;
            }
        }
    }
    x = 0.5 * (lo + hi);
    for _ in 0..300 {
        let gx = g(x) - target;
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
        let d = dg(x);
        let newton = x - gx / d;
        x = if d.is_finite() && d > 0.0 && newton > lo && newton < hi {
            newton
        } else if lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        // Newton has converged once the correction is at rounding level.
        if (gx / d).abs() <= 1e-16 * x && d.is_finite() {
            let gn = g(x) - target;
            if gn.abs() <= gx.abs() {
                return x;
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_cube() {
        let t = invert_increasing(|x| x * x * x, |x| 3.0 * x * x, 27.0, 1.0);
        assert!((t - 3.0).abs() < 1e-14);
    }

    #[test]
    fn inverts_across_scales() {
        for &s in &[1e-12, 1e-3, 1.0, 1e5, 1e12] {
            let t = invert_increasing(|x: f64| x.powf(0.5), |x: f64| 0.5 * x.powf(-0.5), s, 1.0);
            assert!((t.sqrt() / s - 1.0).abs() < 1e-14, "s={s} t={t}");
        }
    }

    #[test]
    fn zero_target() {
        assert_eq!(invert_increasing(|x| x, |_| 1.0, 0.0, 1.0), 0.0);
    }
}
