//! Mode structure of gamma mixtures and gamma-convolution mixtures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::density::{Density, UnitGamma};
use crate::error::{domain, Error, Result};
use crate::gconv::{GammaComponent, GammaConvolution};
use crate::grid::{bisect, linear_grid, log_grid};
use crate::specfun::{gamma_density, Order, ShapeParam};
use crate::verdict::Verdict;
use crate::weights::{compensated_sum, WeightVector};

/// Tolerance for classifying stationary points and for the derivative
/// inequalities in this module. Derivatives are compared against f/x and
/// f/x², the natural scales of f' and f''.
pub const MODE_TOL: f64 = 1e-9;

/// Finite mixture `Σ wᵢ fᵢ` with normalized weights.
pub struct MixtureSpec {
    components: Vec<(Box<dyn Density>, f64)>,
}

impl std::fmt::Debug for MixtureSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MixtureSpec").field("weights", &self.weights()).finish()
    }
}

impl MixtureSpec {
    /// Requires nonnegative weights summing to one within 1e-12.
    pub fn new(components: Vec<(Box<dyn Density>, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("a mixture needs at least one component".into()));
        }
        if components.iter().any(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Invalid("mixture weights must be finite and nonnegative".into()));
        }
        let total = compensated_sum(components.iter().map(|c| c.1));
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(MixtureSpec { components })
    }

    /// Rescales arbitrary nonnegative weights to sum to one.
    pub fn normalized(components: Vec<(Box<dyn Density>, f64)>) -> Result<Self> {
        let total = compensated_sum(components.iter().map(|c| c.1));
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Invalid("mixture weights must have a positive finite sum".into()));
        }
        Self::new(components.into_iter().map(|(d, w)| (d, w / total)).collect())
    }

    /// `p f1 + (1 − p) f2`.
    pub fn two<A, B>(f1: A, f2: B, p: f64) -> Result<Self>
    where
        A: Density + 'static,
        B: Density + 'static,
    {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Invalid(format!("mixing proportion must lie in [0, 1], got {p}")));
        }
        Self::new(vec![(Box::new(f1), p), (Box::new(f2), 1.0 - p)])
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.1).collect()
    }
}

impl Density for MixtureSpec {
    fn derivs(&self, x: f64) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (d, w) in &self.components {
            if *w == 0.0 {
                continue;
            }
            let v = d.derivs(x)?;
            for k in 0..3 {
                out[k] += w * v[k];
            }
        }
        Ok(out)
    }
}

/// `λ(x0) = −g'_α(x0) / g'_{1+α}(x0)`, the weight that makes
/// `λ g_{1+α} + g_α` stationary at x0. Positive exactly when x0 lies strictly
/// between the two modes, i.e. in `(max(0, α − 1), α)`.
pub fn lemma3_lambda(alpha: ShapeParam, x0: f64) -> Result<f64> {
    let a = alpha.get();
    let lo = (a - 1.0).max(0.0);
    if !(x0 > lo && x0 < a) {
        return Err(domain("lemma3_lambda", format!("x0 must lie in ({lo}, {a}), got {x0}")));
    }
    let a1 = ShapeParam::new(a + 1.0)?;
    let num = gamma_density(alpha, x0, Order::First)?;
    let den = gamma_density(a1, x0, Order::First)?;
    if den == 0.0 {
        return Err(domain("lemma3_lambda", "g'_{1+α}(x0) vanishes"));
    }
    Ok(-num / den)
}

/// The (unnormalized) mixture `λ g_{1+α} + g_α` as a normalized MixtureSpec.
pub fn lemma3_mixture(alpha: ShapeParam, lambda: f64) -> Result<MixtureSpec> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Invalid(format!("λ must be finite and nonnegative, got {lambda}")));
    }
    let a1 = ShapeParam::new(alpha.get() + 1.0)?;
    MixtureSpec::normalized(vec![
        (Box::new(UnitGamma(a1)), lambda),
        (Box::new(UnitGamma(alpha)), 1.0),
    ])
}

/// `(0, x_q)`: the x0 for which `λ g_{1+α} + g_α` has a local minimum at
/// x0. x_q is the positive root of `x² + 2(1 − α)x − α(1 − α)`, i.e.
/// `√(1 − α) − (1 − α)`.
pub fn bimodality_window(alpha: ShapeParam) -> Result<(f64, f64)> {
    let a = alpha.get();
    if a >= 1.0 {
        return Err(domain("bimodality_window", format!("empty for α ≥ 1, got α = {a}")));
    }
    let r = (1.0 - a).sqrt();
    // r − r² written without cancellation as α r / (1 + r).
    Ok((0.0, a * r / (1.0 + r)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Max,
    Min,
    Saddle,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub location: f64,
    pub kind: PointKind,
    pub second_derivative: f64,
    /// True for a maximum at a window end where the density is monotone
    /// towards the edge (e.g. a density unbounded at 0).
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub window: (f64, f64),
    pub points: Vec<StationaryPoint>,
}

impl ModeReport {
    pub fn maxima(&self) -> usize {
        self.points.iter().filter(|p| p.kind == PointKind::Max).count()
    }

    pub fn minima(&self) -> usize {
        self.points.iter().filter(|p| p.kind == PointKind::Min).count()
    }

    pub fn is_decided(&self) -> bool {
        !self.points.iter().any(|p| p.kind == PointKind::Undecided)
    }

    /// One maximum, no minima, no saddles; `Undecided` if any point is.
    pub fn unimodal(&self) -> Verdict {
        if !self.is_decided() {
            return Verdict::Undecided;
        }
        Verdict::from_bool(self.maxima() == 1 && self.points.len() == 1)
    }
}

#[derive(Clone, Copy)]
struct Probe {
    x: f64,
    d: [f64; 3],
}

impl Probe {
    /// Sign of f' when it clears the tolerance.
    fn slope(&self) -> Option<bool> {
        let scale = MODE_TOL * self.d[0].abs() / self.x;
        (self.d[1].abs() > scale).then_some(self.d[1] > 0.0)
    }
}

fn probe_all<D: Density + ?Sized>(f: &D, xs: &[f64]) -> Result<Vec<Probe>> {
    xs.par_iter().map(|&x| Ok(Probe { x, d: f.derivs(x)? })).collect()
}

fn classify(x: f64, d: [f64; 3], rising_before: bool) -> StationaryPoint {
    let scale = MODE_TOL * d[0].abs() / (x * x);
    let kind = if rising_before && d[2] < -scale {
        PointKind::Max
    } else if !rising_before && d[2] > scale {
        PointKind::Min
    } else {
        PointKind::Undecided
    };
    StationaryPoint { location: x, kind, second_derivative: d[2], boundary: false }
}

/// Every stationary point of `f` in `window`, found from sign changes of f'
/// on a log grid with three refinement passes around dips of |f'|, located
/// by bisection down to a few ulps and classified by the sign of f''.
/// Stretches where |f'| never clears the tolerance between equal slopes are
/// reported as saddles. A window end where f decreases towards it counts as
/// a boundary maximum.
pub fn mode_structure<D: Density + ?Sized>(f: &D, window: (f64, f64), grid_size: usize) -> Result<ModeReport> {
    if grid_size < 256 {
        return Err(Error::Invalid(format!("grid_size must be at least 256, got {grid_size}")));
    }
    let mut probes = probe_all(f, &log_grid(window.0, window.1, grid_size)?)?;
    for _ in 0..3 {
        let mut extra = Vec::new();
        for w in probes.windows(3) {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            let same = matches!((a.slope(), b.slope(), c.slope()), (Some(p), Some(q), Some(r)) if p == q && q == r);
            if same && b.d[1].abs() <= a.d[1].abs() && b.d[1].abs() <= c.d[1].abs() {
                extra.extend(log_grid(a.x, c.x, 18)?.into_iter().skip(1).take(16));
            }
        }
        if extra.is_empty() {
            break;
        }
        probes.extend(probe_all(f, &extra)?);
        probes.sort_by(|a, b| a.x.total_cmp(&b.x));
        probes.dedup_by(|a, b| a.x == b.x);
    }

    let mut points = Vec::new();
    let signed: Vec<(usize, bool)> =
        probes.iter().enumerate().filter_map(|(i, p)| p.slope().map(|s| (i, s))).collect();
    // Probes before the first signed slope sit inside the tolerance band
    // (near 0 the band f/x is wide), so only the direction matters here.
    if let Some(&(_, rising)) = signed.first() {
        if !rising {
            let p = probes[0];
            points.push(StationaryPoint { location: p.x, kind: PointKind::Max, second_derivative: p.d[2], boundary: true });
        }
    }
    for pair in signed.windows(2) {
        let ((i, si), (j, sj)) = (pair[0], pair[1]);
        if si != sj {
            let x = bisect(probes[i].x, probes[j].x, 4.0 * f64::EPSILON, |x| Ok(f.derivs(x)?[1]))?;
            points.push(classify(x, f.derivs(x)?, si));
        } else if j > i + 1 {
            // f' dips inside the tolerance band without changing sign.
            let k = (i + 1..j)
                .min_by(|&a, &b| probes[a].d[1].abs().total_cmp(&probes[b].d[1].abs()))
                .unwrap_or(i + 1);
            let p = probes[k];
            points.push(StationaryPoint { location: p.x, kind: PointKind::Saddle, second_derivative: p.d[2], boundary: false });
        }
    }
    if let Some(&(_, rising)) = signed.last() {
        if rising {
            let p = probes[probes.len() - 1];
            points.push(StationaryPoint { location: p.x, kind: PointKind::Max, second_derivative: p.d[2], boundary: true });
        }
    }
    Ok(ModeReport { window, points })
}

/// Log-concavity on a grid: `f'² − f f'' ≥ −tol·(f'² + |f f''|)` everywhere.
/// Both sides vanish together in exponential tails, so only the non-strict
/// form is testable.
pub fn logconcavity_check<D: Density + ?Sized>(f: &D, window: (f64, f64), grid_size: usize) -> Result<bool> {
    let probes = probe_all(f, &log_grid(window.0, window.1, grid_size)?)?;
    for p in probes {
        let [v, d1, d2] = p.d;
        if !(v > 0.0) {
            return Err(Error::Invalid(format!("density must be positive on the window, f({}) = {v}", p.x)));
        }
        let q = d1 * d1 - v * d2;
        if q < -MODE_TOL * (d1 * d1 + (v * d2).abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `f1'' f2' ≤ f2'' f1'` (within tolerance) wherever f1' and f2' have
/// strictly opposite signs inside `window`.
pub fn mixcond_check<A: Density + ?Sized, B: Density + ?Sized>(
    f1: &A,
    f2: &B,
    window: (f64, f64),
    grid_size: usize,
) -> Result<bool> {
    if !(window.1 > window.0) {
        return Err(Error::Invalid("mixcond window is empty".into()));
    }
    let xs = log_grid(window.0, window.1, grid_size)?;
    let vals: Vec<([f64; 3], [f64; 3], f64)> =
        xs.par_iter().map(|&x| Ok((f1.derivs(x)?, f2.derivs(x)?, x))).collect::<Result<_>>()?;
    Ok(vals.iter().all(|(a, b, x)| {
        let (t1, t2) = (MODE_TOL * a[0] / x, MODE_TOL * b[0] / x);
        let opposite = (a[1] < -t1 && b[1] > t2) || (a[1] > t1 && b[1] < -t2);
        if !opposite {
            return true;
        }
        let (l, r) = (a[2] * b[1], b[2] * a[1]);
        l <= r + MODE_TOL * (l.abs() + r.abs())
    }))
}

/// Mode of a unimodal density: the single maximum of `mode_structure`.
pub fn mode_of<D: Density + ?Sized>(f: &D, window: (f64, f64)) -> Result<f64> {
    let r = mode_structure(f, window, 1024)?;
    let maxima: Vec<f64> = r.points.iter().filter(|p| p.kind == PointKind::Max).map(|p| p.location).collect();
    match maxima.as_slice() {
        [m] => Ok(*m),
        _ => Err(Error::Invalid(format!("expected one mode, found {}", maxima.len()))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyPoint {
    pub p: f64,
    pub maxima: usize,
    pub minima: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub points: Vec<FamilyPoint>,
    pub verdict: Verdict,
}

/// `{k/128}` for k = 0..=128.
pub fn default_p_grid() -> Vec<f64> {
    linear_grid(0.0, 1.0, 129)
}

/// Mode counts of `p f1 + (1 − p) f2` for every p in `p_grid`, bisecting in p
/// (six halvings) wherever the maximum count changes between neighbours.
pub fn mixture_family_unimodal<A, B>(
    f1: &A,
    f2: &B,
    p_grid: &[f64],
    window: (f64, f64),
    grid_size: usize,
) -> Result<FamilyReport>
where
    A: Density + ?Sized,
    B: Density + ?Sized,
{
    if p_grid.is_empty() || p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Invalid("p_grid must be a nonempty subset of [0, 1]".into()));
    }
    let at = |p: f64| -> Result<FamilyPoint> {
        let mix = Pmix { f1, f2, p };
        let r = mode_structure(&mix, window, grid_size)?;
        Ok(FamilyPoint { p, maxima: r.maxima(), minima: r.minima(), verdict: r.unimodal() })
    };
    let mut ps = p_grid.to_vec();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let mut points: Vec<FamilyPoint> = ps.iter().map(|&p| at(p)).collect::<Result<_>>()?;
    let mut extra = Vec::new();
    for w in points.windows(2) {
        if w[0].maxima != w[1].maxima {
            let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
            for _ in 0..6 {
                let mid = at(0.5 * (lo.p + hi.p))?;
                let go_right = mid.maxima == lo.maxima;
                extra.push(mid.clone());
                if go_right {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
    points.extend(extra);
    points.sort_by(|a, b| a.p.total_cmp(&b.p));
    let verdict = if points.iter().any(|p| p.verdict == Verdict::Undecided) {
        Verdict::Undecided
    } else {
        Verdict::from_bool(points.iter().all(|p| p.verdict == Verdict::Pass))
    };
    Ok(FamilyReport { points, verdict })
}

struct Pmix<'a, A: ?Sized, B: ?Sized> {
    f1: &'a A,
    f2: &'a B,
    p: f64,
}

impl<A: Density + ?Sized, B: Density + ?Sized> Density for Pmix<'_, A, B> {
    fn derivs(&self, x: f64) -> Result<[f64; 3]> {
        let (mut out, p) = ([0.0; 3], self.p);
        if p > 0.0 {
            let a = self.f1.derivs(x)?;
            for k in 0..3 {
                out[k] += p * a[k];
            }
        }
        if p < 1.0 {
            let b = self.f2.derivs(x)?;
            for k in 0..3 {
                out[k] += (1.0 - p) * b[k];
            }
        }
        Ok(out)
    }
}

/// `e^{εx} + e^{−εx} − 2 − (εx)² + (λε + 2)²` with `ε = 1/δ − 1`.
pub fn lc1_identity(delta: f64, lambda: f64, x: f64) -> f64 {
    let eps = 1.0 / delta - 1.0;
    let ex = eps * x;
    // 2(cosh t − 1) = 4 sinh²(t/2), exact near t = 0.
    let s = (0.5 * ex).sinh();
    4.0 * s * s - ex * ex + (lambda * eps + 2.0).powi(2)
}

/// `e^{−εx}(q'² − q'' q)` for `q(x) = x(e^{εx} + 1) + λ(e^{εx} − 1)`,
/// computed directly from q and its derivatives.
pub fn lc1_direct(delta: f64, lambda: f64, x: f64) -> f64 {
    let eps = 1.0 / delta - 1.0;
    let e = (eps * x).exp();
    let q = x * (e + 1.0) + lambda * (e - 1.0);
    let q1 = e + 1.0 + eps * x * e + lambda * eps * e;
    let q2 = 2.0 * eps * e + eps * eps * x * e + lambda * eps * eps * e;
    (q1 * q1 - q2 * q) / e
}

/// Densities of `δ1 X1 + δ2 X2` and `δ1(X1 + Z1) + δ2(X2 + Z2)`.
pub fn lc1_pair(alpha: ShapeParam, d1: f64, d2: f64) -> Result<(GammaConvolution, GammaConvolution)> {
    let a = alpha.get();
    let lo = GammaConvolution::new(vec![GammaComponent::new(a, d1)?, GammaComponent::new(a, d2)?])?;
    let hi = GammaConvolution::new(vec![GammaComponent::new(a + 1.0, d1)?, GammaComponent::new(a + 1.0, d2)?])?;
    Ok((lo, hi))
}

/// The densities `f_j` of the local unimodality argument for sorted θ and the
/// 1-based split index k (1 < k < n − 1): for j < k the sum
/// `Σθᵢ Xᵢ + θ_j Z_j + θ_k Z_k`, for j > k + 1 the sum
/// `Σθᵢ Xᵢ + θ_j Z_j + θ_{k+1} Z_{k+1}`.
pub fn local_family(theta: &WeightVector, k: usize, alpha: ShapeParam) -> Result<Vec<GammaConvolution>> {
    let t = theta.sorted_asc();
    let n = t.len();
    if !(k > 1 && k + 1 < n) {
        return Err(Error::Invalid(format!("need 1 < k < n − 1, got k = {k}, n = {n}")));
    }
    if !theta.all_positive() {
        return Err(Error::Invalid("local family needs positive weights".into()));
    }
    let a = alpha.get();
    let mut out = Vec::new();
    for j in (1..=n).filter(|j| *j != k && *j != k + 1) {
        let partner = if j < k { k } else { k + 1 };
        let comps = (1..=n)
            .map(|i| {
                let extra = if i == j || i == partner { 1.0 } else { 0.0 };
                GammaComponent::new(a + extra, t[i - 1])
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(GammaConvolution::new(comps)?);
    }
    Ok(out)
}

/// Numeric surrogate for local unimodality of that family: every two-member
/// subfamily is scanned over `p_grid`, and `random_mixtures` further
/// Dirichlet(1) mixtures of the whole family (seeded) are checked for a
/// single mode.
pub fn local_family_unimodal(
    theta: &WeightVector,
    k: usize,
    alpha: ShapeParam,
    p_grid: &[f64],
    random_mixtures: usize,
    seed: u64,
) -> Result<Verdict> {
    let fam = local_family(theta, k, alpha)?;
    let lo = fam.iter().map(|f| f.quantile(1e-10)).collect::<Result<Vec<_>>>()?;
    let hi = fam.iter().map(|f| f.quantile(1.0 - 1e-10)).collect::<Result<Vec<_>>>()?;
    let window = (lo.iter().copied().fold(f64::INFINITY, f64::min), hi.iter().copied().fold(0.0, f64::max));
    let mut verdicts = Vec::new();
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            verdicts.push(mixture_family_unimodal(&fam[i], &fam[j], p_grid, window, 512)?.verdict);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_mixtures {
        let raw: Vec<f64> = (0..fam.len()).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let comps: Vec<(Box<dyn Density>, f64)> =
            fam.iter().cloned().zip(raw).map(|(f, w)| (Box::new(f) as Box<dyn Density>, w)).collect();
        let mix = MixtureSpec::normalized(comps)?;
        verdicts.push(mode_structure(&mix, window, 512)?.unimodal());
    }
    Ok(if verdicts.contains(&Verdict::Undecided) {
        Verdict::Undecided
    } else {
        Verdict::from_bool(verdicts.iter().all(|v| v.is_pass()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64) -> ShapeParam {
        ShapeParam::new(a).unwrap()
    }

    #[test]
    fn lambda_and_window() {
        // Closed form α(x0 − α + 1) / (x0(α − x0)).
        let l = lemma3_lambda(alpha(0.5), 0.1).unwrap();
        assert!((l - 7.5).abs() < 1e-13, "{l}");
        let s = lemma3_mixture(alpha(0.5), l).unwrap();
        assert!(s.derivs(0.1).unwrap()[1].abs() < 1e-12);
        assert!(lemma3_lambda(alpha(0.5), 0.5).is_err());
        assert!(lemma3_lambda(alpha(2.0), 0.5).is_err());
        assert!(lemma3_lambda(alpha(2.0), 1.5).is_ok());

        let (_, xq) = bimodality_window(alpha(0.5)).unwrap();
        assert!((xq - 0.2071067811865475).abs() < 1e-15);
        let (_, xq) = bimodality_window(alpha(0.9)).unwrap();
        assert!((xq - 0.2162277660168379).abs() < 1e-15);
        assert!(bimodality_window(alpha(1.0)).is_err());
        assert!(bimodality_window(alpha(1.0 - 1e-12)).unwrap().1 < 1e-5);
    }

    #[test]
    fn single_gamma_mode() {
        let r = mode_structure(&UnitGamma(alpha(2.0)), (1e-3, 30.0), 512).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].kind, PointKind::Max);
        assert!((r.points[0].location - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lemma3_mixture_is_bimodal() {
        let a = alpha(0.5);
        let s = lemma3_mixture(a, lemma3_lambda(a, 0.1).unwrap()).unwrap();
        let r = mode_structure(&s, (1e-20, 40.0), 2048).unwrap();
        assert_eq!((r.maxima(), r.minima()), (2, 1), "{r:?}");
        let min = r.points.iter().find(|p| p.kind == PointKind::Min).unwrap();
        assert!((min.location - 0.1).abs() < 1e-9);
        for p in &r.points {
            if !p.boundary {
                assert!(s.derivs(p.location).unwrap()[1].abs() < 1e-9);
            }
        }
        assert!(!logconcavity_check(&s, (1e-3, 10.0), 512).unwrap());
    }

    #[test]
    fn lc1_identity_matches_direct() {
        for &d in &[0.1, 0.4, 0.9] {
            for &l in &[-2.0 * d + 0.01, 0.0, 1.0, 10.0] {
                for &x in &[1e-3, 0.5, 2.0, 7.0] {
                    let (a, b) = (lc1_identity(d, l, x), lc1_direct(d, l, x));
                    assert!(a > 0.0);
                    assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{d} {l} {x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn exponential_sum_log_concave() {
        // 0.5·expo(0.3) + 0.5·expo(0.6), plus expo(1).
        let y = MixtureSpec::new(vec![
            (Box::new(GammaConvolution::new(vec![GammaComponent::new(1.0, 0.3).unwrap(), GammaComponent::new(1.0, 1.0).unwrap()]).unwrap()), 0.5),
            (Box::new(GammaConvolution::new(vec![GammaComponent::new(1.0, 0.6).unwrap(), GammaComponent::new(1.0, 1.0).unwrap()]).unwrap()), 0.5),
        ])
        .unwrap();
        assert!(logconcavity_check(&y, (1e-3, 30.0), 1024).unwrap());
    }

    #[test]
    fn mixcond_examples() {
        let a = 1.5;
        let c = |s: f64, t: f64| GammaComponent::new(s, t).unwrap();
        let w1 = GammaConvolution::new(vec![c(a, 2.0), c(a, 1.5), c(1.0, 1.0), c(1.0, 0.5)]).unwrap();
        let w3 = GammaConvolution::new(vec![c(a + 1.0, 1.5), c(a + 1.0, 2.0), c(1.0, 1.0), c(1.0, 0.5)]).unwrap();
        let win = (mode_of(&w1, (1e-3, 60.0)).unwrap(), mode_of(&w3, (1e-3, 60.0)).unwrap());
        assert!(win.0 < win.1);
        assert!(mixcond_check(&w1, &w3, win, 2048).unwrap());
        assert!(!mixcond_check(&w3, &w1, win, 2048).unwrap());
        assert!(mixcond_check(&w1, &w1, win, 256).unwrap());
    }

    #[test]
    fn lc1_family_unimodal() {
        let (f1, f2) = lc1_pair(alpha(1.5), 0.4, 1.0).unwrap();
        let r = mixture_family_unimodal(&f1, &f2, &linear_grid(0.0, 1.0, 17), (1e-4, 40.0), 512).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn lemma3_family_not_unimodal() {
        let a = alpha(0.5);
        let l = lemma3_lambda(a, 0.1).unwrap();
        let p = 1.0 / (1.0 + l);
        let r = mixture_family_unimodal(
            &UnitGamma(a),
            &UnitGamma(alpha(1.5)),
            &[0.0, p, 1.0],
            (1e-20, 40.0),
            1024,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }
}
