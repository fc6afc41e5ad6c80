//! Grids and one-dimensional root bracketing shared by the scanners.

use crate::error::{Error, Result};

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Invalid(format!("degenerate window ({lo}, {hi})")));
    }
    if n < 2 {
        return Err(Error::Invalid("a grid needs at least two points".into()));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    v[0] = lo;
    v[n - 1] = hi;
    Ok(v)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Bisects a sign change of `f` on `[lo, hi]` (with `f(lo)` and `f(hi)` of
/// opposite sign) until the bracket is narrower than `rel_width · x`.
pub fn bisect<F>(mut lo: f64, mut hi: f64, rel_width: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let neg_at_lo = f_lo < 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_width * mid.abs() || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = log_grid(1e-3, 10.0, 5).unwrap();
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[4], 10.0);
        assert!((g[2] - 0.1).abs() < 1e-15);
        assert!(log_grid(1.0, 1.0, 4).is_err());
        assert!(log_grid(0.0, 1.0, 4).is_err());
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(1.0, 2.0, 1e-14, |x| Ok(x * x - 2.0)).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
