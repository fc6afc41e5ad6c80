//! Sign structure of `D(x) = F_η(x) − F_θ(x)` for two gamma convolutions
//! with a common shape, plus the two-weight closed forms used to study it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::gconv::{make_convolution, GammaComponent, GammaConvolution};
use crate::grid::{bisect, log_grid};
use crate::orders::log_majorizes;
use crate::specfun::{beta_cdf, ShapeParam};
use crate::weights::{compensated_sum, WeightVector};

/// Relative tolerance for deciding that two products or maxima tie.
pub const TIE_RTOL: f64 = 1e-12;
/// Lower and upper window quantiles.
pub const WINDOW_P: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "+")]
    Positive,
}

impl Sign {
    fn of(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "-",
            Sign::Positive => "+",
        })
    }
}

/// Direction of a sign change of D, read left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// From − to +.
    Up,
    /// From + to −.
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    NoCrossing,
    /// One sign change, from − to +.
    SingleCrossingBelow,
    /// One sign change, from + to −.
    SingleCrossingAbove,
    Multi(usize),
    Undecided,
}

impl Classification {
    pub fn crossing_count(&self) -> Option<usize> {
        match self {
            Classification::NoCrossing => Some(0),
            Classification::SingleCrossingBelow | Classification::SingleCrossingAbove => Some(1),
            Classification::Multi(k) => Some(*k),
            Classification::Undecided => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::NoCrossing => f.write_str("NO_CROSSING"),
            Classification::SingleCrossingBelow => f.write_str("SINGLE_CROSSING_BELOW"),
            Classification::SingleCrossingAbove => f.write_str("SINGLE_CROSSING_ABOVE"),
            Classification::Multi(k) => write!(f, "MULTI({k})"),
            Classification::Undecided => f.write_str("UNDECIDED"),
        }
    }
}

impl FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "NO_CROSSING" => Classification::NoCrossing,
            "SINGLE_CROSSING_BELOW" => Classification::SingleCrossingBelow,
            "SINGLE_CROSSING_ABOVE" => Classification::SingleCrossingAbove,
            "UNDECIDED" => Classification::Undecided,
            other => {
                let k = other
                    .strip_prefix("MULTI(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown classification {other:?}")))?;
                Classification::Multi(k)
            }
        })
    }
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Classification {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A certified sign change of D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub location: f64,
    pub direction: Direction,
    /// Smaller of the peak |D| values on the two adjacent sign runs.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub window: (f64, f64),
    pub sign_sequence: Vec<Sign>,
    pub crossings: Vec<Crossing>,
    pub classification: Classification,
    /// Largest per-point error bound on D met during the scan.
    pub error_estimate: f64,
    pub grid_points: usize,
    pub near_zero: Option<Sign>,
    pub at_infinity: Option<Sign>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileOptions {
    pub grid_size: usize,
    /// A sign run whose peak |D|, relative to the larger of the two tail
    /// probabilities compared at that point, does not exceed this is not
    /// trusted.
    pub tol: f64,
    pub refine_passes: usize,
    /// Factor by which the window is widened when the endpoint signs
    /// disagree with the scan.
    pub window_growth: f64,
    pub max_window_growths: usize,
    /// Extra grid density inside this interval (perturbation mode).
    pub seed_bracket: Option<(f64, f64)>,
    /// Initial window is `(lo / s, hi · s)` around the extreme quantiles.
    pub window_scale: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            grid_size: 2048,
            tol: 1e-8,
            refine_passes: 3,
            window_growth: 4.0,
            max_window_growths: 2,
            seed_bracket: None,
            window_scale: 1.0,
        }
    }
}

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_RTOL * (a.abs() + b.abs()).max(1.0)
}

/// Sign of D as x → 0⁺, or `None` when the leading terms tie. The law with
/// fewer summands has the fatter left tail; for equal counts the one with the
/// smaller weight product does.
pub fn near_zero_sign(theta: &WeightVector, eta: &WeightVector, _alpha: ShapeParam) -> Result<Option<Sign>> {
    let t = theta.strip_zeros()?;
    let e = eta.strip_zeros()?;
    if t.len() != e.len() {
        return Ok(Some(if t.len() < e.len() { Sign::Negative } else { Sign::Positive }));
    }
    let (lt, le) = (t.log_product(), e.log_product());
    if ties(lt, le) {
        return Ok(None);
    }
    Ok(Some(if lt < le { Sign::Negative } else { Sign::Positive }))
}

/// Leading behaviour of the right tail: `(max weight, multiplicity, log constant)`.
/// The tail of Σθᵢ Xᵢ is ~ C x^{mα−1} e^{−x/M} with
/// C ∝ Π_{θᵢ<M} (1 − θᵢ/M)^{−α}.
fn tail_key(w: &WeightVector, alpha: f64) -> (f64, usize, f64) {
    let m = w.max();
    let mut mult = 0;
    let mut terms = Vec::new();
    for &x in w.entries() {
        if ties(x / m, 1.0) {
            mult += 1;
        } else {
            terms.push(-alpha * (1.0 - x / m).ln());
        }
    }
    (m, mult, compensated_sum(terms))
}

/// Sign of D as x → ∞, or `None` when the leading tail terms tie.
pub fn tail_sign(theta: &WeightVector, eta: &WeightVector, alpha: ShapeParam) -> Result<Option<Sign>> {
    let t = theta.strip_zeros()?;
    let e = eta.strip_zeros()?;
    let (mt, kt, ct) = tail_key(&t, alpha.get());
    let (me, ke, ce) = tail_key(&e, alpha.get());
    // A heavier θ tail leaves F_θ below F_η, so D > 0.
    if !ties(mt / me, 1.0) {
        return Ok(Some(if mt > me { Sign::Positive } else { Sign::Negative }));
    }
    if kt != ke {
        return Ok(Some(if kt > ke { Sign::Positive } else { Sign::Negative }));
    }
    if ties(ct, ce) {
        return Ok(None);
    }
    Ok(Some(if ct > ce { Sign::Positive } else { Sign::Negative }))
}

/// Where the roots of `F_{θ+tδ} − F_θ` can sit for a small transfer δ: the
/// mode interval `[(nα+1)·min θ, (nα+1)·max θ]` of the gamma(nα+2, ·) laws
/// that sandwich the derivative's density in likelihood ratio.
pub fn perturbation_root_bracket(theta: &WeightVector, alpha: ShapeParam) -> Result<(f64, f64)> {
    let t = theta.strip_zeros()?;
    let k = t.len() as f64 * alpha.get() + 1.0;
    Ok((k * t.min(), k * t.max()))
}

struct Pair {
    theta: GammaConvolution,
    eta: GammaConvolution,
}

impl Pair {
    /// `(D(x), error bound, tail scale)`, evaluated in whichever tail is
    /// more accurate. The scale is the larger of the two tail probabilities
    /// being compared.
    fn diff(&self, x: f64) -> Result<(f64, f64, f64)> {
        let (ct, et) = self.theta.cdf_with_error(x)?;
        let (ce, ee) = self.eta.cdf_with_error(x)?;
        if ct > 0.5 && ce > 0.5 {
            let (st, est) = self.theta.sf_with_error(x)?;
            let (se, ese) = self.eta.sf_with_error(x)?;
            return Ok((st - se, est + ese, st.max(se)));
        }
        Ok((ce - ct, et + ee, ct.max(ce)))
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    x: f64,
    d: f64,
    err: f64,
    scale: f64,
}

impl Sample {
    fn sign(&self) -> Option<Sign> {
        (self.d.abs() > self.err).then(|| Sign::of(self.d))
    }
}

#[derive(Debug, Clone, Copy)]
struct Run {
    sign: Sign,
    first: usize,
    last: usize,
    peak: f64,
    /// Peak of |D| relative to the tail probabilities compared there.
    rel_peak: f64,
}

fn evaluate(pair: &Pair, xs: &[f64]) -> Result<Vec<Sample>> {
    xs.par_iter()
        .map(|&x| {
            let (d, err, scale) = pair.diff(x)?;
            Ok(Sample { x, d, err, scale })
        })
        .collect()
}

/// Interior points where |D| has a local minimum without a sign change:
/// places where a narrow excursion across zero could hide between samples.
fn dips(samples: &[Sample]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in samples.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let (Some(sa), Some(sb), Some(sc)) = (a.sign(), b.sign(), c.sign()) else {
            continue;
        };
        if sa == sb && sb == sc && b.d.abs() <= a.d.abs() && b.d.abs() <= c.d.abs() {
            out.push((a.x, c.x));
        }
    }
    out
}

fn runs(samples: &[Sample]) -> Vec<Run> {
    let mut out: Vec<Run> = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        let Some(sign) = s.sign() else { continue };
        let rel = if s.scale > 0.0 { s.d.abs() / s.scale } else { 0.0 };
        match out.last_mut() {
            Some(r) if r.sign == sign => {
                r.last = i;
                r.peak = r.peak.max(s.d.abs());
                r.rel_peak = r.rel_peak.max(rel);
            }
            _ => out.push(Run { sign, first: i, last: i, peak: s.d.abs(), rel_peak: rel }),
        }
    }
    out
}

struct Scan {
    samples: Vec<Sample>,
    runs: Vec<Run>,
}

fn scan(pair: &Pair, lo: f64, hi: f64, opts: &ProfileOptions) -> Result<Scan> {
    let mut xs = log_grid(lo, hi, opts.grid_size)?;
    if let Some((a, b)) = opts.seed_bracket {
        let (a, b) = (a.max(lo), b.min(hi));
        if b > a {
            xs.extend(log_grid(a, b, (opts.grid_size / 4).max(2))?);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut samples = evaluate(pair, &xs)?;
    let cap = (opts.grid_size / 4).max(8);
    for _ in 0..opts.refine_passes {
        let found = dips(&samples);
        if found.is_empty() {
            break;
        }
        let extra: Vec<f64> = found
            .iter()
            .take(cap)
            .flat_map(|&(a, b)| log_grid(a, b, 18).unwrap_or_default().into_iter().skip(1).take(16))
            .collect();
        let mut more = evaluate(pair, &extra)?;
        samples.append(&mut more);
        samples.sort_by(|a, b| a.x.total_cmp(&b.x));
        samples.dedup_by(|a, b| a.x == b.x);
    }
    let runs = runs(&samples);
    Ok(Scan { samples, runs })
}

fn window_for(pair: &Pair) -> Result<(f64, f64)> {
    let lo = pair.theta.quantile(WINDOW_P)?.min(pair.eta.quantile(WINDOW_P)?);
    let hi = pair.theta.quantile(1.0 - WINDOW_P)?.max(pair.eta.quantile(1.0 - WINDOW_P)?);
    Ok((lo, hi))
}

/// Locates and certifies every sign change of `D = F_η − F_θ`.
///
/// D is sampled on a log grid spanning both laws' extreme quantiles, with
/// extra points around dips of |D|. Samples with |D| below the engine's
/// error bound carry no sign. Consecutive signed samples form runs; each
/// change of run sign is a crossing, located by bisection. The result is
/// `UNDECIDED` when a run's peak |D|, relative to the tail probabilities
/// being compared, does not exceed `opts.tol`, or when the
/// analytic signs at 0⁺ and ∞ still disagree with the outermost runs after
/// widening the window.
pub fn sign_profile(
    theta: &WeightVector,
    eta: &WeightVector,
    alpha: ShapeParam,
    opts: &ProfileOptions,
) -> Result<CrossingReport> {
    if theta.len() != eta.len() {
        return Err(Error::LengthMismatch { left: theta.len(), right: eta.len() });
    }
    if opts.grid_size < 64 {
        return Err(Error::Invalid(format!("grid_size must be at least 64, got {}", opts.grid_size)));
    }
    if !(opts.window_scale >= 1.0 && opts.window_growth > 1.0) {
        return Err(Error::Invalid("window factors must exceed one".into()));
    }
    let t = theta.strip_zeros()?;
    let e = eta.strip_zeros()?;
    let near_zero = near_zero_sign(&t, &e, alpha)?;
    let at_infinity = tail_sign(&t, &e, alpha)?;
    let pair = Pair { theta: make_convolution(alpha, &t, &[])?, eta: make_convolution(alpha, &e, &[])? };
    let (lo0, hi0) = window_for(&pair)?;
    let (mut lo, mut hi) = (lo0 / opts.window_scale, hi0 * opts.window_scale);
    let mut report = CrossingReport {
        window: (lo, hi),
        sign_sequence: Vec::new(),
        crossings: Vec::new(),
        classification: Classification::NoCrossing,
        error_estimate: 0.0,
        grid_points: 0,
        near_zero,
        at_infinity,
        note: None,
    };
    if t.is_permutation_of(&e) {
        report.note = Some("weights are a rearrangement of each other".into());
        return Ok(report);
    }
    let ordered_products = t.len() == e.len()
        && ties(t.log_product(), e.log_product())
        && (log_majorizes(&t, &e, false)? || log_majorizes(&e, &t, false)?);

    let mut attempt = 0;
    let s = loop {
        let s = scan(&pair, lo, hi, opts)?;
        let first = s.runs.first().map(|r| r.sign);
        let last = s.runs.last().map(|r| r.sign);
        let bad_low = matches!((near_zero, first), (Some(a), Some(b)) if a != b);
        let bad_high = matches!((at_infinity, last), (Some(a), Some(b)) if a != b);
        if !(bad_low || bad_high) {
            break s;
        }
        if attempt == opts.max_window_growths {
            report.window = (lo, hi);
            report.grid_points = s.samples.len();
            report.sign_sequence = s.runs.iter().map(|r| r.sign).collect();
            report.classification = Classification::Undecided;
            report.note = Some(format!(
                "a sign change lies outside the resolvable window ({})",
                if bad_low { "near zero" } else { "in the right tail" }
            ));
            return Ok(report);
        }
        attempt += 1;
        if bad_low {
            lo /= opts.window_growth;
        }
        if bad_high {
            hi *= opts.window_growth;
        }
    };

    report.window = (lo, hi);
    report.grid_points = s.samples.len();
    report.error_estimate = s.samples.iter().map(|p| p.err).fold(0.0, f64::max);
    report.sign_sequence = s.runs.iter().map(|r| r.sign).collect();
    for pair_of_runs in s.runs.windows(2) {
        let (a, b) = (pair_of_runs[0], pair_of_runs[1]);
        let x = bisect(s.samples[a.last].x, s.samples[b.first].x, 1e-10, |x| Ok(pair.diff(x)?.0))?;
        report.crossings.push(Crossing {
            location: x,
            direction: if a.sign == Sign::Negative { Direction::Up } else { Direction::Down },
            margin: a.peak.min(b.peak),
        });
    }
    let weak = s.runs.len() >= 2 && s.runs.iter().any(|r| r.rel_peak <= opts.tol);
    report.classification = if weak {
        report.note = Some(format!("a sign run peaks below tol = {:e}", opts.tol));
        Classification::Undecided
    } else {
        match report.crossings.as_slice() {
            [] => Classification::NoCrossing,
            [c] if c.direction == Direction::Up => Classification::SingleCrossingBelow,
            [_] => Classification::SingleCrossingAbove,
            cs => Classification::Multi(cs.len()),
        }
    };
    if ordered_products {
        // Equal products with log-majorization force a one-signed D.
        match report.classification {
            Classification::NoCrossing => {}
            Classification::Undecided => {
                report.classification = Classification::NoCrossing;
                report.note = Some("one-signed by log-majorization with equal products".into());
            }
            _ => {
                report.classification = Classification::Undecided;
                report.note = Some("scan contradicts the log-majorization ordering".into());
            }
        }
    }
    Ok(report)
}

fn check_two_point(theta: [f64; 2], eta: [f64; 2]) -> Result<()> {
    let ok = theta.iter().chain(&eta).all(|v| v.is_finite() && *v >= 0.0)
        && theta[0] < eta[0]
        && eta[0] <= eta[1]
        && eta[1] < theta[1];
    if !ok {
        return Err(domain(
            "h_diff",
            format!("need θ1 < η1 ≤ η2 < θ2, got θ = {theta:?}, η = {eta:?}"),
        ));
    }
    Ok(())
}

/// `H_θ(u) − H_η(u)` where `H_θ(u) = P(θ1 B + θ2 (1 − B) ≤ u)` and
/// B ~ beta(α, α).
pub fn h_diff(theta: [f64; 2], eta: [f64; 2], alpha: ShapeParam, u: f64) -> Result<f64> {
    check_two_point(theta, eta)?;
    let a = alpha.get();
    let h = |w: [f64; 2]| -> Result<f64> {
        if w[0] == w[1] {
            return Ok(if u >= w[0] { 1.0 } else { 0.0 });
        }
        let z = ((w[1] - u) / (w[1] - w[0])).clamp(0.0, 1.0);
        Ok(1.0 - beta_cdf(a, a, z)?)
    };
    Ok(h(theta)? - h(eta)?)
}

/// The point where the affine maps `u ↦ (θ2 − u)/(θ2 − θ1)` and
/// `u ↦ (η2 − u)/(η2 − η1)` agree.
pub fn u_star(theta: [f64; 2], eta: [f64; 2]) -> Result<f64> {
    check_two_point(theta, eta)?;
    let den = theta[1] - theta[0] - eta[1] + eta[0];
    Ok((theta[1] * eta[0] - eta[1] * theta[0]) / den)
}

/// Relative gap between the central difference in δ of
/// `P(θ1 X1 + θ2 X2 + G ≤ x)`, with `θ = (θ1* − δ, θ2* + δ)`, and
/// `α (θ2 − θ1) f'(x)`, where f is the density of the same sum with one
/// extra exponential unit on each weighted term. Both sides zero gives 0.
pub fn lemma2_residual(
    theta_star: [f64; 2],
    tail: &[GammaComponent],
    alpha: ShapeParam,
    delta: f64,
    x: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid(format!("step must be positive, got {h}")));
    }
    let a = alpha.get();
    let build = |d: f64, extra: f64| -> Result<GammaConvolution> {
        let mut comps = vec![
            GammaComponent::new(a + extra, theta_star[0] - d)?,
            GammaComponent::new(a + extra, theta_star[1] + d)?,
        ];
        comps.extend_from_slice(tail);
        GammaConvolution::new(comps)
    };
    let lhs = (build(delta + h, 0.0)?.cdf(x)? - build(delta - h, 0.0)?.cdf(x)?) / (2.0 * h);
    let (t1, t2) = (theta_star[0] - delta, theta_star[1] + delta);
    let rhs = a * (t2 - t1) * build(delta, 1.0)?.density_derivative(x, 1)?;
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).abs() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn alpha(a: f64) -> ShapeParam {
        ShapeParam::new(a).unwrap()
    }

    #[test]
    fn endpoint_signs() {
        let a = alpha(1.0);
        let (t, e) = (wv(&[1.0, 6.0, 10.0]), wv(&[4.0, 5.0, 10.0]));
        assert_eq!(near_zero_sign(&t, &e, a).unwrap(), Some(Sign::Negative));
        assert_eq!(tail_sign(&t, &e, a).unwrap(), Some(Sign::Negative));
        let (t, e) = (wv(&[1.0, 4.0]), wv(&[2.0, 2.0]));
        assert_eq!(near_zero_sign(&t, &e, a).unwrap(), None);
        assert_eq!(tail_sign(&t, &e, a).unwrap(), Some(Sign::Positive));
        assert_eq!(near_zero_sign(&wv(&[0.0, 2.0]), &wv(&[1.0, 1.0]), a).unwrap(), Some(Sign::Negative));
    }

    #[test]
    fn classification_text_round_trip() {
        for c in [
            Classification::NoCrossing,
            Classification::SingleCrossingBelow,
            Classification::SingleCrossingAbove,
            Classification::Multi(3),
            Classification::Undecided,
        ] {
            assert_eq!(c.to_string().parse::<Classification>().unwrap(), c);
        }
        assert!("MULTI(x)".parse::<Classification>().is_err());
    }

    #[test]
    fn one_signed_when_weights_dominate() {
        let r = sign_profile(&wv(&[1.0, 6.0, 10.0]), &wv(&[4.0, 5.0, 10.0]), alpha(1.0), &ProfileOptions::default())
            .unwrap();
        assert_eq!(r.classification, Classification::NoCrossing, "{r:?}");
        assert_eq!(r.sign_sequence, vec![Sign::Negative]);
    }

    #[test]
    fn equal_weights_do_not_cross() {
        let r = sign_profile(&wv(&[2.0, 1.0]), &wv(&[1.0, 2.0]), alpha(0.7), &ProfileOptions::default()).unwrap();
        assert_eq!(r.classification, Classification::NoCrossing);
    }

    #[test]
    fn h_diff_examples() {
        let a = alpha(2.0);
        let us = u_star([1.0, 4.0], [2.0, 3.0]).unwrap();
        assert_eq!(us, 2.5);
        assert!(h_diff([1.0, 4.0], [2.0, 3.0], a, us).unwrap().abs() < 1e-15);
        assert!(h_diff([1.0, 4.0], [2.0, 3.0], a, 1.5).unwrap() > 0.0);
        assert!(h_diff([1.0, 4.0], [2.0, 3.0], a, 3.5).unwrap() < 0.0);
        assert!(h_diff([2.0, 4.0], [1.0, 3.0], a, 2.0).is_err());
    }

    #[test]
    fn lemma2_examples() {
        let a = alpha(1.3);
        let g = [GammaComponent::new(1.3, 0.8).unwrap()];
        assert!(lemma2_residual([1.0, 2.0], &g, a, 0.1, 2.5, 1e-4).unwrap() < 1e-6);
        assert_eq!(lemma2_residual([1.5, 1.5], &g, a, 0.0, 2.5, 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn perturbation_bracket_scales_with_weights() {
        let (lo, hi) = perturbation_root_bracket(&wv(&[1.0, 2.0, 3.0]), alpha(1.0)).unwrap();
        assert_eq!((lo, hi), (4.0, 12.0));
    }
}
