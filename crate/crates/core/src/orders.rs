//! Order relations on weight vectors and on the laws they generate:
//! majorization, (weak) log-majorization, V-majorization with an explicit
//! witness, grid checks of stochastic dominance, the star order and the
//! supplemented likelihood ratio order.

use serde::{Deserialize, Serialize};

use crate::crossing::{sign_profile, Classification, ProfileOptions};
use crate::density::Density;
use crate::error::{Error, Result};
use crate::gconv::GammaConvolution;
use crate::grid::log_grid;
use crate::specfun::ShapeParam;
use crate::weights::{compensated_sum, WeightVector};

/// Relative tolerance for partial-sum comparisons.
pub const PARTIAL_SUM_RTOL: f64 = 1e-12;
/// Default tolerance of the slr and likelihood-ratio grid checks.
pub const SLR_TOL: f64 = 1e-9;

fn same_len(a: &WeightVector, b: &WeightVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

fn prefix_sums(v: &[f64]) -> Vec<f64> {
    (1..=v.len()).map(|l| compensated_sum(v[..l].iter().copied())).collect()
}

/// `upper` majorizes `lower` as plain real vectors: equal totals and every
/// ascending prefix sum of `upper` at most that of `lower`.
fn majorizes_slices(upper: &[f64], lower: &[f64]) -> bool {
    let mut u = upper.to_vec();
    let mut l = lower.to_vec();
    u.sort_by(f64::total_cmp);
    l.sort_by(f64::total_cmp);
    let scale = compensated_sum(u.iter().map(|x| x.abs())).max(compensated_sum(l.iter().map(|x| x.abs())));
    let tol = PARTIAL_SUM_RTOL * scale.max(f64::MIN_POSITIVE);
    let (pu, pl) = (prefix_sums(&u), prefix_sums(&l));
    let n = u.len();
    if (pu[n - 1] - pl[n - 1]).abs() > tol {
        return false;
    }
    pu.iter().zip(&pl).all(|(a, b)| *a <= *b + tol)
}

/// `eta ≺ theta`: equal sums and every top-k partial sum of θ at least
/// that of η.
pub fn majorizes(theta: &WeightVector, eta: &WeightVector) -> Result<bool> {
    same_len(theta, eta)?;
    Ok(majorizes_slices(theta.entries(), eta.entries()))
}

fn logs(v: &WeightVector) -> Result<Vec<f64>> {
    if !v.all_positive() {
        return Err(Error::Invalid("log-majorization needs strictly positive weights".into()));
    }
    Ok(v.entries().iter().map(|w| w.ln()).collect())
}

/// `log η ≺ log θ` (`weak = false`) or the weak form `log η ≺^w log θ`
/// (`weak = true`): every ascending prefix sum of log η is at least that of
/// log θ, with no condition on the totals.
pub fn log_majorizes(theta: &WeightVector, eta: &WeightVector, weak: bool) -> Result<bool> {
    same_len(theta, eta)?;
    let lt = logs(theta)?;
    let le = logs(eta)?;
    if !weak {
        return Ok(majorizes_slices(&lt, &le));
    }
    let mut st = lt;
    let mut se = le;
    st.sort_by(f64::total_cmp);
    se.sort_by(f64::total_cmp);
    let scale = compensated_sum(st.iter().chain(&se).map(|x| x.abs())).max(1.0);
    let tol = PARTIAL_SUM_RTOL * scale;
    Ok(prefix_sums(&se).iter().zip(prefix_sums(&st)).all(|(e, t)| *e + tol >= t))
}

/// Certificate that θ V-majorizes η: a θ̃ with η ≺ θ̃ and block indices
/// `k1 ∈ [0, n]`, `k2 ∈ [1, n + 1]` (1-based, as in the sorted views) such that
/// θ₍ᵢ₎ ≤ θ̃₍ᵢ₎ ≤ η₍ᵢ₎ for i ≤ k1, θ₍ᵢ₎ = θ̃₍ᵢ₎ for k1 < i < k2 and
/// θ₍ᵢ₎ ≥ θ̃₍ᵢ₎ ≥ η₍ᵢ₎ for i ≥ k2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VMajWitness {
    pub theta_tilde: WeightVector,
    pub k1: usize,
    pub k2: usize,
}

impl VMajWitness {
    /// Re-checks every defining inequality on the stored values.
    pub fn verify(&self, theta: &WeightVector, eta: &WeightVector) -> bool {
        let n = theta.len();
        if eta.len() != n || self.theta_tilde.len() != n || self.k1 >= self.k2 || self.k2 > n + 1 {
            return false;
        }
        let t = theta.sorted_asc();
        let e = eta.sorted_asc();
        let tt = self.theta_tilde.sorted_asc();
        let boxes_ok = (1..=n).all(|i| {
            let (a, b, c) = (t[i - 1], tt[i - 1], e[i - 1]);
            if i <= self.k1 {
                a <= b && b <= c
            } else if i < self.k2 {
                a == b
            } else {
                a >= b && b >= c
            }
        });
        boxes_ok && majorizes_slices(self.theta_tilde.entries(), eta.entries())
    }
}

/// Searches for a V-majorization witness.
///
/// For each block split `(k1, k2)` the admissible θ̃ form a polytope: a box
/// per coordinate, a fixed middle block, a fixed total Σ η and the
/// requirement that θ̃ stay sorted. Tightening the boxes to their monotone
/// envelopes and then filling the mass from the top coordinate downwards
/// gives the point minimizing every ascending prefix sum at once, so the
/// split is feasible iff that point is majorized-dominant over η.
pub fn v_majorizes(theta: &WeightVector, eta: &WeightVector) -> Result<Option<VMajWitness>> {
    same_len(theta, eta)?;
    let n = theta.len();
    let t = theta.sorted_asc();
    let e = eta.sorted_asc();
    let total = eta.sum();
    if majorizes_slices(&t, &e) {
        return Ok(Some(VMajWitness { theta_tilde: theta.clone(), k1: 0, k2: n + 1 }));
    }
    for k1 in 0..=n {
        for k2 in (k1 + 1)..=(n + 1) {
            if let Some(tt) = extremal_candidate(&t, &e, k1, k2, total) {
                let w = VMajWitness { theta_tilde: WeightVector::new(tt)?, k1, k2 };
                if w.verify(theta, eta) {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

fn extremal_candidate(t: &[f64], e: &[f64], k1: usize, k2: usize, total: f64) -> Option<Vec<f64>> {
    let n = t.len();
    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    for i in 1..=n {
        let j = i - 1;
        if i <= k1 {
            if t[j] > e[j] {
                return None;
            }
            lo[j] = t[j];
            hi[j] = e[j];
        } else if i < k2 {
            lo[j] = t[j];
            hi[j] = t[j];
        } else {
            if t[j] < e[j] {
                return None;
            }
            lo[j] = e[j];
            hi[j] = t[j];
        }
    }
    // Monotone envelopes: a sorted vector inside the boxes also lies inside these.
    for j in 1..n {
        lo[j] = lo[j].max(lo[j - 1]);
    }
    for j in (0..n - 1).rev() {
        hi[j] = hi[j].min(hi[j + 1]);
    }
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return None;
    }
    let base = compensated_sum(lo.iter().copied());
    let room = compensated_sum(lo.iter().zip(&hi).map(|(a, b)| b - a));
    let mut need = total - base;
    let slack = PARTIAL_SUM_RTOL * total.abs();
    if need < -slack || need > room + slack {
        return None;
    }
    let mut out = lo.clone();
    for j in (0..n).rev() {
        if need <= 0.0 {
            break;
        }
        let add = (hi[j] - lo[j]).min(need);
        out[j] = (lo[j] + add).min(hi[j]);
        need -= add;
    }
    Some(out)
}

/// True iff `F_lower(x) ≥ F_upper(x) − tol` at every grid point, i.e. the
/// `lower` law is stochastically smaller on the grid.
pub fn st_dominates(
    lower: &GammaConvolution,
    upper: &GammaConvolution,
    grid: &[f64],
    tol: f64,
) -> Result<bool> {
    if grid.is_empty() {
        return Err(Error::Invalid("st_dominates needs a nonempty grid".into()));
    }
    for &x in grid {
        if !(x > 0.0) {
            return Err(Error::Invalid(format!("grid points must be positive, got {x}")));
        }
        // Compare in whichever tail is more accurate.
        let (fl, fu) = (lower.cdf(x)?, upper.cdf(x)?);
        let diff = if fl > 0.5 && fu > 0.5 { upper.sf(x)? - lower.sf(x)? } else { fl - fu };
        if diff < -tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the star-order scan for one scale factor `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarOrderPoint {
    pub c: f64,
    pub classification: Classification,
}

/// Checks `F_η ≤_* F_θ` on a grid of scale factors: for every `c`,
/// `F_η(x) − F_θ(cx)` may change sign at most once, and only from − to +.
/// Undecided scans count as failures.
pub fn star_order_check(
    theta: &WeightVector,
    eta: &WeightVector,
    alpha: ShapeParam,
    c_grid: &[f64],
) -> Result<(bool, Vec<StarOrderPoint>)> {
    if c_grid.is_empty() {
        return Err(Error::Invalid("star_order_check needs a nonempty c grid".into()));
    }
    let mut points = Vec::with_capacity(c_grid.len());
    for &c in c_grid {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Invalid(format!("scale factors must be positive, got {c}")));
        }
        // F_θ(cx) is the CDF of Σ (θᵢ/c) Xᵢ at x.
        let theta_c = theta.scaled(1.0 / c)?;
        let report = sign_profile(&theta_c, eta, alpha, &ProfileOptions::default())?;
        points.push(StarOrderPoint { c, classification: report.classification });
    }
    let ok = points.iter().all(|p| {
        matches!(p.classification, Classification::NoCrossing | Classification::SingleCrossingBelow)
    });
    Ok((ok, points))
}

/// Which part of the slr definition failed, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlrOutcome {
    /// f'g ≤ f g' on the grid (likelihood ratio order).
    pub lr_holds: bool,
    /// f'/g' nonincreasing on {f' > 0}.
    pub ratio_on_f_increasing: bool,
    /// f'/g' nonincreasing on {g' < 0}.
    pub ratio_on_g_decreasing: bool,
}

impl SlrOutcome {
    pub fn holds(&self) -> bool {
        self.lr_holds && self.ratio_on_f_increasing && self.ratio_on_g_decreasing
    }
}

fn window_grid(window: (f64, f64), grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::Invalid("grid_size must be at least 2".into()));
    }
    log_grid(window.0, window.1, grid_size)
}

/// Grid check of `f ≤_slr g`: (a) `f'g ≤ f g'` and (b) `f'/g'` is
/// nonincreasing on each of `{f' > 0}` and `{g' < 0}`. "Decreasing" is read
/// weakly, up to a relative tolerance of [`SLR_TOL`].
pub fn slr_check<F: Density + ?Sized, G: Density + ?Sized>(
    f: &F,
    g: &G,
    window: (f64, f64),
    grid_size: usize,
) -> Result<SlrOutcome> {
    let xs = window_grid(window, grid_size)?;
    let vals = xs
        .iter()
        .map(|&x| Ok((x, f.derivs(x)?, g.derivs(x)?)))
        .collect::<Result<Vec<_>>>()?;
    let tol = SLR_TOL;
    let lr_holds = vals.iter().all(|(_, fd, gd)| {
        let (a, b) = (fd[1] * gd[0], fd[0] * gd[1]);
        a <= b + tol * (a.abs() + b.abs())
    });
    let ratio_monotone = |in_set: &dyn Fn(&[f64; 3], &[f64; 3], f64) -> bool| -> bool {
        let mut prev: Option<f64> = None;
        for (x, fd, gd) in &vals {
            if !in_set(fd, gd, *x) || gd[1] == 0.0 {
                prev = None;
                continue;
            }
            let r = fd[1] / gd[1];
            if let Some(p) = prev {
                if r > p + tol * p.abs().max(r.abs()) {
                    return false;
                }
            }
            prev = Some(r);
        }
        true
    };
    // Derivative sign thresholds scale like density / x.
    let ratio_on_f_increasing = ratio_monotone(&|fd, _, x| fd[1] > tol * fd[0] / x);
    let ratio_on_g_decreasing = ratio_monotone(&|_, gd, x| gd[1] < -tol * gd[0] / x);
    Ok(SlrOutcome { lr_holds, ratio_on_f_increasing, ratio_on_g_decreasing })
}

/// Grid check of the likelihood ratio order: `f/g` nonincreasing.
pub fn lr_check<F: Density + ?Sized, G: Density + ?Sized>(
    f: &F,
    g: &G,
    window: (f64, f64),
    grid_size: usize,
) -> Result<bool> {
    let xs = window_grid(window, grid_size)?;
    let mut prev: Option<f64> = None;
    for x in xs {
        let (fv, gv) = (f.value(x)?, g.value(x)?);
        if gv <= 0.0 {
            prev = None;
            continue;
        }
        let r = fv / gv;
        if let Some(p) = prev {
            if r > p + SLR_TOL * p.abs().max(r.abs()) {
                return Ok(false);
            }
        }
        prev = Some(r);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn majorization_examples() {
        let (eps, delta, lambda) = (0.1, 0.05, 1.0);
        let eta = wv(&[eps, eps, 1.0 + eps]);
        let theta = wv(&[
            eps - delta,
            eps + delta - lambda * delta * delta,
            1.0 + eps + lambda * delta * delta,
        ]);
        assert!(majorizes(&theta, &eta).unwrap());
        assert!(!majorizes(&eta, &theta).unwrap());
        assert!(majorizes(&theta, &theta).unwrap());
        assert!(!majorizes(&wv(&[1.0, 6.0, 10.0]), &wv(&[4.0, 5.0, 10.0])).unwrap());
        assert!(majorizes(&wv(&[1.0]), &wv(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn log_majorization_examples() {
        assert!(log_majorizes(&wv(&[1.0, 4.0]), &wv(&[2.0, 2.0]), false).unwrap());
        assert!(!log_majorizes(&wv(&[1.0, 4.0]), &wv(&[2.0, 3.0]), false).unwrap());
        // ∏η = 6 ≥ 4 = ∏θ and the smaller η entry dominates: weak form holds.
        assert!(log_majorizes(&wv(&[1.0, 4.0]), &wv(&[2.0, 3.0]), true).unwrap());
        assert!(log_majorizes(&wv(&[0.0, 4.0]), &wv(&[2.0, 3.0]), true).is_err());
    }

    #[test]
    fn v_majorization_examples() {
        let theta = wv(&[0.5, 2.0, 3.5]);
        let eta = wv(&[1.0, 2.0, 2.5]);
        let w = v_majorizes(&theta, &eta).unwrap().expect("witness");
        assert!(w.verify(&theta, &eta));
        assert!(w.k1 < w.k2 && (w.theta_tilde.sum() - 5.5).abs() < 1e-12);
        let hand = VMajWitness { theta_tilde: wv(&[0.8, 2.0, 2.7]), k1: 1, k2: 3 };
        assert!(hand.verify(&theta, &eta));

        let theta = wv(&[1.0, 1.0, 4.0]);
        let eta = wv(&[2.0, 2.0, 2.0]);
        let w = v_majorizes(&theta, &eta).unwrap().unwrap();
        assert_eq!((w.k1, w.k2), (0, 4));
        assert_eq!(w.theta_tilde, theta);

        // η has the larger maximum: no witness can exist.
        assert!(v_majorizes(&wv(&[1.0, 2.0]), &wv(&[0.5, 3.0])).unwrap().is_none());
    }
}
