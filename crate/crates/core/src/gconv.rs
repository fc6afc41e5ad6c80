//! Distribution of a sum of independent gamma(shape, scale) variables.
//!
//! The engine uses the single-gamma series expansion around the smallest
//! scale β₁ (Moschopoulos 1985): the sum is a mixture of gamma(ρ + k, β₁)
//! laws, ρ = Σ shapes, with nonnegative weights `p_k` summing to one. Density,
//! CDF and the termwise derivatives all come from the same weights.
//!
//! Writing `r_j = 1 − β₁/β_j`, the weights obey
//!
//! ```text
//! p_0     = Π_j (β₁/β_j)^{α_j}
//! p_m     = (1/m) Σ_j α_j S_j(m)
//! S_j(1)  = r_j p_0,    S_j(m+1) = r_j (p_m + S_j(m))
//! ```
//!
//! which is the usual `δ_k` recursion with `k γ_k = Σ_j α_j r_j^k` folded into
//! running sums, so setup is O(n·K) instead of O(K²).
//!
//! The series is truncated once a Chernoff bound on the mass of the omitted
//! weights drops below [`TAIL_TARGET`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::Density;
use crate::error::{domain, Error, Result};
use crate::specfun::{log_gamma, reg_lower_inc_gamma, reg_upper_inc_gamma, ShapeParam};
use crate::weights::{compensated_sum, WeightVector};

/// Upper bound on the probability mass dropped by series truncation.
pub const TAIL_TARGET: f64 = 1e-13;
/// Maximum number of series terms.
pub const MAX_TERMS: usize = 100_000;
/// Iteration cap of the quantile search.
pub const QUANTILE_MAX_ITER: usize = 200;
/// Scales closer than this (relatively) are merged into one component.
pub const MERGE_RTOL: f64 = 1e-12;

/// One summand `scale · Gamma(shape, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaComponent {
    pub shape: f64,
    pub scale: f64,
}

impl GammaComponent {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(domain("GammaComponent", format!("shape must be positive, got {shape}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(domain("GammaComponent", format!("scale must be positive, got {scale}")));
        }
        Ok(GammaComponent { shape, scale })
    }
}

#[derive(Debug, Clone)]
struct Series {
    base_scale: f64,
    rho: f64,
    weights: Vec<f64>,
    tail_bound: f64,
    rel_err: f64,
    ln_p0: f64,
    /// `(α_j, r_j)` for every scale above the base one.
    active: Vec<(f64, f64)>,
    r_max: f64,
    /// Recursion state after the last kept weight, for extending the
    /// series on demand.
    running: Vec<f64>,
}

/// A gamma convolution in canonical form: components sorted by scale,
/// equal scales merged.
#[derive(Debug, Clone)]
pub struct GammaConvolution {
    components: Vec<GammaComponent>,
    total_shape: f64,
    series: Series,
}

/// Builds the convolution for Σ θᵢ Xᵢ with Xᵢ ~ gamma(α, 1), where each
/// `(index, extra)` supplement adds `extra` to the shape of the component at
/// `weights[index]` (one unit per added θᵢZᵢ, Zᵢ ~ expo(1)). Zero weights are
/// dropped along with any supplements attached to them.
pub fn make_convolution(
    alpha: ShapeParam,
    weights: &WeightVector,
    supplements: &[(usize, f64)],
) -> Result<GammaConvolution> {
    let mut shapes = vec![alpha.get(); weights.len()];
    for &(idx, extra) in supplements {
        if idx >= weights.len() {
            return Err(Error::Invalid(format!(
                "supplement index {idx} out of range for {} weights",
                weights.len()
            )));
        }
        if !(extra.is_finite() && extra > 0.0) {
            return Err(Error::Invalid(format!("supplement shape must be positive, got {extra}")));
        }
        shapes[idx] += extra;
    }
    let comps = weights
        .entries()
        .iter()
        .zip(&shapes)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, s)| GammaComponent::new(*s, *w))
        .collect::<Result<Vec<_>>>()?;
    if comps.is_empty() {
        return Err(Error::Invalid("all weights are zero".into()));
    }
    GammaConvolution::new(comps)
}

impl GammaConvolution {
    pub fn new(mut components: Vec<GammaComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("a convolution needs at least one component".into()));
        }
        for c in &components {
            GammaComponent::new(c.shape, c.scale)?;
        }
        components.sort_by(|a, b| a.scale.total_cmp(&b.scale));
        let mut merged: Vec<GammaComponent> = Vec::with_capacity(components.len());
        for c in components {
            match merged.last_mut() {
                Some(last) if (c.scale - last.scale).abs() <= MERGE_RTOL * last.scale => {
                    last.shape += c.shape;
                }
                _ => merged.push(c),
            }
        }
        let total_shape = compensated_sum(merged.iter().map(|c| c.shape));
        let series = Series::build(&merged, total_shape)?;
        Ok(GammaConvolution {
            components: merged,
            total_shape,
            series,
        })
    }

    /// Single gamma(shape, scale) law.
    pub fn single(shape: f64, scale: f64) -> Result<Self> {
        Self::new(vec![GammaComponent::new(shape, scale)?])
    }

    pub fn components(&self) -> &[GammaComponent] {
        &self.components
    }

    pub fn total_shape(&self) -> f64 {
        self.total_shape
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.components.iter().map(|c| c.shape * c.scale))
    }

    pub fn variance(&self) -> f64 {
        compensated_sum(self.components.iter().map(|c| c.shape * c.scale * c.scale))
    }

    /// Number of series terms kept.
    pub fn n_terms(&self) -> usize {
        self.series.weights.len()
    }

    /// A bound on the absolute error of `cdf`: truncated mass plus
    /// accumulated rounding.
    pub fn error_estimate(&self) -> f64 {
        self.series.tail_bound + 64.0 * f64::EPSILON * (self.n_terms() as f64 + 8.0)
    }

    /// Same law with every scale multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.components
                .iter()
                .map(|k| GammaComponent::new(k.shape, k.scale * c))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    fn check_x(func: &'static str, x: f64, allow_zero: bool) -> Result<()> {
        if !x.is_finite() || x < 0.0 || (!allow_zero && x == 0.0) {
            return Err(domain(func, format!("x must be {} and finite, got {x}",
                if allow_zero { "nonnegative" } else { "positive" })));
        }
        Ok(())
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        Self::check_x("density", x, false)?;
        Ok(self.series.eval_density(x)[0])
    }

    /// First (`order = 1`) or second (`order = 2`) derivative of the density.
    pub fn density_derivative(&self, x: f64, order: u8) -> Result<f64> {
        Self::check_x("density_derivative", x, false)?;
        match order {
            1 => Ok(self.series.eval_density(x)[1]),
            2 => Ok(self.series.eval_density(x)[2]),
            _ => Err(domain("density_derivative", format!("order must be 1 or 2, got {order}"))),
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Self::check_x("cdf", x, true)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(self.series.eval_cdf(x)?.0)
    }

    /// Survival function 1 − F(x), accurate in the right tail.
    pub fn sf(&self, x: f64) -> Result<f64> {
        Self::check_x("sf", x, true)?;
        if x == 0.0 {
            return Ok(1.0);
        }
        Ok(self.series.eval_sf(x)?.0)
    }

    /// `(F(x), bound on |error|)`; the bound scales with F in the left tail.
    pub fn cdf_with_error(&self, x: f64) -> Result<(f64, f64)> {
        Self::check_x("cdf", x, true)?;
        if x == 0.0 {
            return Ok((0.0, 0.0));
        }
        self.series.eval_cdf(x)
    }

    /// `(1 − F(x), bound on |error|)`.
    pub fn sf_with_error(&self, x: f64) -> Result<(f64, f64)> {
        Self::check_x("sf", x, true)?;
        if x == 0.0 {
            return Ok((1.0, 0.0));
        }
        self.series.eval_sf(x)
    }

    /// Smallest-tail-accurate quantile: solves F(x) = p for p ≤ ½ and
    /// 1 − F(x) = 1 − p otherwise, by bracketing and log-scale bisection.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("quantile", format!("p must lie in (0, 1), got {p}")));
        }
        let lower = p <= 0.5;
        let target = if lower { p } else { 1.0 - p };
        // g(x) increases in x.
        let g = |x: f64| -> Result<f64> {
            if lower {
                Ok(self.cdf(x)? - target)
            } else {
                Ok(target - self.sf(x)?)
            }
        };
        let mut lo = self.mean();
        let mut hi = lo;
        let mut iters = 0;
        while g(lo)? > 0.0 {
            lo *= 0.5;
            iters += 1;
            if iters > 2 * QUANTILE_MAX_ITER || lo == 0.0 {
                return Err(Error::Convergence { func: "quantile (bracket)", iterations: iters });
            }
        }
        while g(hi)? < 0.0 {
            hi *= 2.0;
            iters += 1;
            if iters > 2 * QUANTILE_MAX_ITER || !hi.is_finite() {
                return Err(Error::Convergence { func: "quantile (bracket)", iterations: iters });
            }
        }
        for _ in 0..QUANTILE_MAX_ITER {
            let mid = (lo * hi).sqrt();
            let v = g(mid)?;
            if v.abs() <= 1e-10 * target || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(mid);
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Convergence { func: "quantile", iterations: QUANTILE_MAX_ITER })
    }

    /// Deterministic sample of `n` draws from a ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                self.components
                    .iter()
                    .map(|c| c.scale * sample_gamma(rng, c.shape))
                    .sum()
            })
            .collect()
    }
}

impl Density for GammaConvolution {
    fn derivs(&self, x: f64) -> Result<[f64; 3]> {
        Self::check_x("density", x, false)?;
        Ok(self.series.eval_density(x))
    }
}

/// Marsaglia–Tsang squeeze/rejection for shape ≥ 1; for shape < 1 draw at
/// shape + 1 and multiply by U^{1/shape}.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    if shape < 1.0 {
        let u: f64 = rng.random();
        return sample_gamma(rng, shape + 1.0) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

impl Series {
    fn build(comps: &[GammaComponent], rho: f64) -> Result<Self> {
        let base_scale = comps[0].scale;
        let ratios: Vec<f64> = comps.iter().map(|c| 1.0 - base_scale / c.scale).collect();
        let ln_p0 = compensated_sum(comps.iter().map(|c| c.shape * (base_scale / c.scale).ln()));
        if ln_p0 < -700.0 {
            return Err(domain(
                "GammaConvolution",
                format!("scale spread too large for the series (ln p0 = {ln_p0:.1})"),
            ));
        }
        let active: Vec<(f64, f64)> = comps
            .iter()
            .zip(&ratios)
            .filter(|(_, r)| **r > 0.0)
            .map(|(c, r)| (c.shape, *r))
            .collect();
        let p0 = ln_p0.exp();
        let mut weights = vec![p0];
        if active.is_empty() {
            let rel_err = relative_rounding(1, ln_p0);
            return Ok(Series {
                base_scale,
                rho,
                weights,
                tail_bound: 0.0,
                rel_err,
                ln_p0,
                active,
                r_max: 0.0,
                running: Vec::new(),
            });
        }
        let r_max = active.iter().map(|a| a.1).fold(0.0, f64::max);
        let mut running: Vec<f64> = active.iter().map(|(_, r)| r * p0).collect();
        for m in 1..MAX_TERMS {
            let pm = compensated_sum(active.iter().zip(&running).map(|((a, _), s)| a * s)) / m as f64;
            weights.push(pm);
            for ((_, r), s) in active.iter().zip(running.iter_mut()) {
                *s = r * (pm + *s);
            }
            if m.is_multiple_of(32) {
                let tail_bound = chernoff_tail(&active, r_max, m);
                if tail_bound <= TAIL_TARGET {
                    let rel_err = relative_rounding(weights.len(), ln_p0);
                    return Ok(Series { base_scale, rho, weights, tail_bound, rel_err, ln_p0, active, r_max, running });
                }
            }
        }
        Err(Error::Convergence { func: "gamma convolution series", iterations: MAX_TERMS })
    }

    /// Gamma densities g_{ρ+k}(y) for every kept k, by multiplicative
    /// recurrence from the index nearest the peak in k.
    fn unit_densities(&self, y: f64) -> Vec<f64> {
        let k_max = self.weights.len() - 1;
        let start = (y - self.rho + 1.0).round().clamp(0.0, k_max as f64) as usize;
        let mut g = vec![0.0; k_max + 2];
        let a0 = self.rho + start as f64;
        // log_gamma cannot fail for a0 ≥ ρ > 0.
        g[start] = ((a0 - 1.0) * y.ln() - y - log_gamma(a0).unwrap_or(f64::INFINITY)).exp();
        for k in start..=k_max {
            g[k + 1] = g[k] * y / (self.rho + k as f64);
        }
        for k in (1..=start).rev() {
            g[k - 1] = g[k] * (self.rho + k as f64 - 1.0) / y;
        }
        g
    }

    fn eval_density(&self, x: f64) -> [f64; 3] {
        let b = self.base_scale;
        let y = x / b;
        let g = self.unit_densities(y);
        let (mut f0, mut f1, mut f2) = (0.0, 0.0, 0.0);
        for (k, p) in self.weights.iter().enumerate() {
            let gk = g[k];
            if gk == 0.0 {
                continue;
            }
            let am1 = self.rho + k as f64 - 1.0;
            let u = am1 / y - 1.0;
            let w = p * gk;
            f0 += w;
            f1 += w * u;
            f2 += w * (u * u - am1 / (y * y));
        }
        [f0 / b, f1 / (b * b), f2 / (b * b * b)]
    }

    /// CDF together with an error bound that shrinks with the CDF itself:
    /// the dropped terms are each at most the top kept term's P(ρ+K, y).
    fn eval_cdf(&self, x: f64) -> Result<(f64, f64)> {
        let y = x / self.base_scale;
        let g = self.unit_densities(y);
        let k_max = self.weights.len() - 1;
        // P(a, y) = P(a + 1, y) + g_{a+1}(y): descend from the top term.
        let p_top = reg_lower_inc_gamma(self.rho + k_max as f64, y)?;
        let mut p = p_top;
        let mut acc = self.weights[k_max] * p;
        for k in (0..k_max).rev() {
            p += g[k + 1];
            acc += self.weights[k] * p.min(1.0);
        }
        let acc = acc.clamp(0.0, 1.0);
        Ok((acc, self.tail_bound * p_top + self.rel_err * acc))
    }

    fn eval_sf(&self, x: f64) -> Result<(f64, f64)> {
        let y = x / self.base_scale;
        let g = self.unit_densities(y);
        // Q(a + 1, y) = Q(a, y) + g_{a+1}(y): ascend from the bottom term.
        let q0 = reg_upper_inc_gamma(self.rho, y)?;
        let mut q = q0;
        let mut acc = self.weights[0] * q;
        for k in 1..self.weights.len() {
            q += g[k];
            acc += self.weights[k] * q.min(1.0);
        }
        if self.tail_bound > TAIL_TARGET * acc && !self.running.is_empty() {
            return Ok(self.extend_sf(y, acc, q, g[self.weights.len()], q0));
        }
        // Mass beyond the truncation point sits in the upper tail.
        let missing = self.tail_bound.min(1.0 - compensated_sum(self.weights.iter().copied())).max(0.0);
        let sf = (acc + missing).clamp(0.0, 1.0);
        Ok((sf, self.tail_bound + self.rel_err * sf + f64::EPSILON * q0))
    }

    /// Deep right tail: the absolute truncation bound swamps the survival
    /// probability, so keep generating weights past the stored ones until
    /// the omitted mass is small relative to the running sum (or the term
    /// cap is hit, in which case the bound stays absolute). `q` and `g_next`
    /// are Q(ρ+K, y) and g_{ρ+K+1}(y) for the last stored index K.
    fn extend_sf(&self, y: f64, mut acc: f64, mut q: f64, g_next: f64, q0: f64) -> (f64, f64) {
        let mut running = self.running.clone();
        let mut g = g_next;
        let mut m = self.weights.len();
        let mut tail = self.tail_bound;
        while m < MAX_TERMS {
            let pm = compensated_sum(self.active.iter().zip(&running).map(|((a, _), s)| a * s)) / m as f64;
            for ((_, r), s) in self.active.iter().zip(running.iter_mut()) {
                *s = r * (pm + *s);
            }
            q += g;
            acc += pm * q.min(1.0);
            g *= y / (self.rho + m as f64);
            if m.is_multiple_of(32) {
                tail = chernoff_tail(&self.active, self.r_max, m);
                if tail <= TAIL_TARGET * acc {
                    break;
                }
            }
            m += 1;
        }
        let sf = acc.clamp(0.0, 1.0);
        (sf, tail + relative_rounding(m + 1, self.ln_p0) * sf + f64::EPSILON * q0)
    }
}

fn relative_rounding(n_terms: usize, ln_p0: f64) -> f64 {
    f64::EPSILON * (64.0 * (n_terms as f64 + 8.0) + 4.0 * ln_p0.abs())
}

/// Chernoff bound P(K > m) ≤ E[z^K] / z^(m+1), minimized over
/// z ∈ (1, 1/r_max), where K is the series index (a sum of negative
/// binomials with generating function Π_j ((1 − r_j)/(1 − r_j z))^{α_j}).
fn chernoff_tail(active: &[(f64, f64)], r_max: f64, m: usize) -> f64 {
    let log_bound = |t: f64| -> f64 {
        let z = t.exp();
        active
            .iter()
            .map(|(a, r)| a * ((1.0 - r).ln() - (1.0 - r * z).ln()))
            .sum::<f64>()
            - (m as f64 + 1.0) * t
    };
    // Golden-section search for the convex minimum over t = ln z.
    let (mut lo, mut hi) = (0.0, -(r_max.ln()));
    let phi = 0.618_033_988_749_894_9;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut fa, mut fb) = (log_bound(a), log_bound(b));
    for _ in 0..80 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = log_bound(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = log_bound(b);
        }
    }
    fa.min(fb).min(0.0).exp()
}

/// Empirical CDF of a sample with its Dvoretzky–Kiefer–Wolfowitz band.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
    confidence: f64,
    half_width: f64,
}

/// Sorts the sample and computes the DKW half-width
/// `sqrt(ln(2 / (1 − confidence)) / (2n))`.
pub fn ecdf_band(samples: &[f64], confidence: f64) -> Result<Ecdf> {
    if samples.is_empty() {
        return Err(Error::Invalid("ecdf_band needs at least one sample".into()));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Invalid(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    if samples.iter().any(|s| s.is_nan()) {
        return Err(Error::Invalid("sample contains NaN".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.par_sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let half_width = ((2.0 / (1.0 - confidence)).ln() / (2.0 * n)).sqrt();
    Ok(Ecdf { sorted, confidence, half_width })
}

impl Ecdf {
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples ≤ x.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|s| *s <= x) as f64 / self.sorted.len() as f64
    }

    /// sup_x |F_n(x) − F(x)| for a continuous F, checked on both sides of
    /// every jump.
    pub fn max_deviation<F>(&self, cdf: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let n = self.sorted.len() as f64;
        self.sorted
            .par_iter()
            .enumerate()
            .map(|(i, x)| {
                let f = cdf(*x)?;
                Ok(((i as f64 + 1.0) / n - f).max(f - i as f64 / n))
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }

    /// Brackets `sup_x |F_n(x) − F(x)|` evaluating F only at every
    /// `stride`-th order statistic. Between two evaluated order statistics
    /// both F_n and F are monotone, which bounds the gap; the lower value is
    /// the exact deviation at the evaluated points.
    pub fn deviation_bounds<F>(&self, cdf: F, stride: usize) -> Result<(f64, f64)>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let n = self.sorted.len();
        let stride = stride.max(1);
        let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
        if idx.last() != Some(&(n - 1)) {
            idx.push(n - 1);
        }
        let f: Vec<f64> = idx.par_iter().map(|&i| cdf(self.sorted[i])).collect::<Result<_>>()?;
        let nf = n as f64;
        let mut lower = 0.0f64;
        let mut upper = f[0].max(1.0 - f[f.len() - 1]);
        for (k, &i) in idx.iter().enumerate() {
            lower = lower.max((i as f64 + 1.0) / nf - f[k]).max(f[k] - i as f64 / nf);
            if k + 1 < idx.len() {
                let j = idx[k + 1];
                upper = upper.max(j as f64 / nf - f[k]).max(f[k + 1] - (i as f64 + 1.0) / nf);
            }
        }
        Ok((lower, upper.max(lower)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(a: f64) -> ShapeParam {
        ShapeParam::new(a).unwrap()
    }

    #[test]
    fn deep_right_tail_is_relatively_accurate() {
        // Exponentials with means 1 and 2: S(x) = 2e^{-x/2} - e^{-x}.
        let f = GammaConvolution::new(vec![GammaComponent::new(1.0, 1.0).unwrap(), GammaComponent::new(1.0, 2.0).unwrap()])
            .unwrap();
        for x in [40.0, 200.0, 900.0] {
            let exact = 2.0 * (-x / 2.0f64).exp() - (-x).exp();
            let (s, err) = f.sf_with_error(x).unwrap();
            assert!((s - exact).abs() <= 1e-10 * exact, "x={x}: {s} vs {exact}");
            assert!(err < 1e-10 * exact && (s - exact).abs() <= err);
        }
    }

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn make_convolution_examples() {
        let d = 0.3;
        let gc = make_convolution(sp(1.0), &wv(&[d, 1.0]), &[]).unwrap();
        assert_eq!(
            gc.components(),
            &[GammaComponent { shape: 1.0, scale: d }, GammaComponent { shape: 1.0, scale: 1.0 }]
        );
        let gc = make_convolution(sp(1.0), &wv(&[d, 1.0]), &[(0, 1.0), (1, 1.0)]).unwrap();
        assert_eq!(gc.components()[0].shape, 2.0);
        assert_eq!(gc.components()[1].shape, 2.0);
        let gc = make_convolution(sp(0.5), &wv(&[2.0, 2.0, 5.0]), &[]).unwrap();
        assert_eq!(
            gc.components(),
            &[GammaComponent { shape: 1.0, scale: 2.0 }, GammaComponent { shape: 0.5, scale: 5.0 }]
        );
        assert!(make_convolution(sp(1.0), &wv(&[0.0, 0.0]), &[]).is_err());
        assert!(make_convolution(sp(1.0), &wv(&[1.0]), &[(3, 1.0)]).is_err());
        let gc = make_convolution(sp(1.0), &wv(&[0.0, 2.0]), &[]).unwrap();
        assert_eq!(gc.components().len(), 1);
    }

    #[test]
    fn single_component_reduces_to_gamma() {
        let gc = GammaConvolution::single(2.5, 1.7).unwrap();
        for x in [0.1, 1.0, 4.0, 12.0] {
            let want = crate::specfun::gamma_density(sp(2.5), x / 1.7, crate::specfun::Order::Value)
                .unwrap()
                / 1.7;
            assert!((gc.density(x).unwrap() - want).abs() < 1e-14);
            let want = reg_lower_inc_gamma(2.5, x / 1.7).unwrap();
            assert!((gc.cdf(x).unwrap() - want).abs() < 1e-14);
        }
        let gc = GammaConvolution::single(3.0, 1.0).unwrap();
        assert!(gc.density_derivative(2.0, 1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_exponentials_match_closed_form() {
        let d: f64 = 0.4;
        let gc = make_convolution(sp(1.0), &wv(&[d, 1.0]), &[]).unwrap();
        let want = ((-1.0f64).exp() - (-1.0 / d).exp()) / (1.0 - d);
        assert!((gc.density(1.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn supplemented_pair_matches_h2() {
        // 40-digit evaluation of h₂ at δ = 0.4, x = 1.
        let gc = make_convolution(sp(1.0), &wv(&[0.4, 1.0]), &[(0, 1.0), (1, 1.0)]).unwrap();
        let got = gc.density(1.0).unwrap();
        assert!((got - 0.191_403_286_292_453_004_251_089_769_545).abs() < 1e-12, "{got}");
    }

    #[test]
    fn cdf_and_sf_are_complementary() {
        let gc = make_convolution(sp(0.7), &wv(&[0.2, 1.0, 3.0]), &[]).unwrap();
        for x in [0.01, 0.3, 2.0, 9.0, 30.0] {
            let s = gc.cdf(x).unwrap() + gc.sf(x).unwrap();
            assert!((s - 1.0).abs() < 1e-12, "x={x}: {s}");
        }
        assert_eq!(gc.cdf(0.0).unwrap(), 0.0);
        assert!(gc.cdf(-1.0).is_err());
        assert!(gc.density(0.0).is_err());
        assert!(gc.density_derivative(1.0, 3).is_err());
    }

    #[test]
    fn quantile_examples() {
        let gc = GammaConvolution::single(1.0, 1.0).unwrap();
        let q = gc.quantile(1.0 - (-2.0f64).exp()).unwrap();
        assert!((q - 2.0).abs() < 1e-9);
        let gc = make_convolution(sp(0.5), &wv(&[1.0, 2.0, 3.0]), &[]).unwrap();
        let m = gc.quantile(0.5).unwrap();
        assert!((gc.cdf(m).unwrap() - 0.5).abs() <= 1e-10);
        assert!(gc.quantile(0.0).is_err());
        assert!(gc.quantile(1.0).is_err());
        let lo = gc.quantile(1e-12).unwrap();
        assert!((gc.cdf(lo).unwrap() - 1e-12).abs() < 1e-20);
        let p_hi = 1.0 - 1e-12;
        let hi = gc.quantile(p_hi).unwrap();
        assert!((gc.sf(hi).unwrap() - (1.0 - p_hi)).abs() < 1e-20);
    }

    #[test]
    fn sampling_is_deterministic() {
        let gc = make_convolution(sp(0.5), &wv(&[1.0, 2.0]), &[]).unwrap();
        assert_eq!(gc.sample(42, 100), gc.sample(42, 100));
        assert_ne!(gc.sample(42, 100), gc.sample(43, 100));
    }

    #[test]
    fn ecdf_basics() {
        let e = ecdf_band(&[3.0, 1.0, 2.0], 0.99).unwrap();
        assert_eq!(e.eval(3.0), 1.0);
        assert_eq!(e.eval(0.5), 0.0);
        assert!((e.eval(1.5) - 1.0 / 3.0).abs() < 1e-15);
        assert!(ecdf_band(&[], 0.99).is_err());
        let big = vec![0.0; 1_000_000];
        let e = ecdf_band(&big, 0.99).unwrap();
        // sqrt(ln 200 / 2e6) to 40 digits.
        assert!((e.half_width() - 0.001_627_623_630_718_729_255).abs() < 1e-15);
    }

    #[test]
    fn strided_bounds_bracket_exact_deviation() {
        let gc = make_convolution(sp(1.5), &wv(&[0.5, 1.0]), &[]).unwrap();
        let e = ecdf_band(&gc.sample(3, 20_000), 0.99).unwrap();
        let exact = e.max_deviation(|x| gc.cdf(x)).unwrap();
        let (lo, hi) = e.deviation_bounds(|x| gc.cdf(x), 16).unwrap();
        assert!(lo <= exact + 1e-15 && exact <= hi + 1e-15, "{lo} {exact} {hi}");
        assert!(hi - lo < 2e-3);
        assert_eq!(e.deviation_bounds(|x| gc.cdf(x), 1).unwrap().1, exact);
    }

    #[test]
    fn series_truncation_respects_target() {
        let gc = make_convolution(sp(0.5), &wv(&[0.01, 1.0, 2.0]), &[]).unwrap();
        let mass = compensated_sum(gc.series.weights.iter().copied());
        assert!((1.0 - mass).abs() < 1e-12, "mass = {mass}");
        assert!(gc.series.tail_bound <= TAIL_TARGET);
    }
}
