//! Three-weight pairs with η ≺ θ whose distribution functions cross at
//! least three times when the common shape is below one, with a
//! serializable certificate and an independent re-verification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crossing::{
    near_zero_sign, sign_profile, tail_sign, Classification, Crossing, Direction, ProfileOptions, Sign,
};
use crate::density::Density;
use crate::error::{domain, Error, Result};
use crate::hexfloat::HexF64;
use crate::mixtures::{bimodality_window, lemma3_lambda, lemma3_mixture, mode_structure};
use crate::orders::majorizes;
use crate::specfun::ShapeParam;
use crate::verdict::Verdict;
use crate::weights::WeightVector;
use crate::ENGINE_VERSION;

/// Certified margins must exceed the engine error bound by this factor.
pub const MARGIN_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleOptions {
    /// Stationary point of the bimodal mixture; defaults to the middle of
    /// the bimodality window.
    pub x0: Option<f64>,
    /// Number of ε halvings tried.
    pub search_budget: usize,
    /// δ = ratio · ε; must lie in (0, 1).
    pub delta_ratio: f64,
    pub profile: ProfileOptions,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        CounterexampleOptions { x0: None, search_budget: 40, delta_ratio: 0.5, profile: ProfileOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub grid_size: usize,
    pub tol: HexF64,
    pub bisection_rel_width: HexF64,
    pub margin_factor: HexF64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertCrossing {
    pub x: HexF64,
    pub direction: Direction,
    pub margin: HexF64,
}

/// Everything needed to replay a counterexample bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCertificate {
    pub alpha: HexF64,
    pub lambda: HexF64,
    pub x0: HexF64,
    pub w: HexF64,
    pub eps: HexF64,
    pub delta: HexF64,
    pub theta: [HexF64; 3],
    pub eta: [HexF64; 3],
    pub classification: Classification,
    pub window: [HexF64; 2],
    pub error_estimate: HexF64,
    pub crossings: Vec<CertCrossing>,
    pub tolerances: Tolerances,
    pub engine_version: String,
}

impl CounterexampleCertificate {
    pub fn theta(&self) -> Result<WeightVector> {
        WeightVector::new(self.theta.iter().map(|v| v.0).collect())
    }

    pub fn eta(&self) -> Result<WeightVector> {
        WeightVector::new(self.eta.iter().map(|v| v.0).collect())
    }

    pub fn margins(&self) -> Vec<f64> {
        self.crossings.iter().map(|c| c.margin.0).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad certificate: {e}")))
    }
}

/// `θ = (ε − δ, ε + δ − λδ², 1 + ε + λδ²)` and `η = (ε, ε, 1 + ε)`.
pub fn counterexample_vectors(eps: f64, delta: f64, lambda: f64) -> ([f64; 3], [f64; 3]) {
    let q = lambda * delta * delta;
    ([eps - delta, eps + delta - q, 1.0 + eps + q], [eps, eps, 1.0 + eps])
}

fn s_prime(alpha: ShapeParam, lambda: f64, x: f64) -> Result<f64> {
    Ok(lemma3_mixture(alpha, lambda)?.derivs(x)?[1])
}

/// Half the distance from x0 to the nearest other stationary point of
/// `λ g_{1+α} + g_α` (or to 0), falling back to a quarter, such that s' is
/// negative just left of x0 and positive just right of it.
pub fn choose_w(alpha: ShapeParam, lambda: f64, x0: f64) -> Result<f64> {
    let s = lemma3_mixture(alpha, lambda)?;
    let report = mode_structure(&s, (x0 * 1e-6, 50.0 + 10.0 * alpha.get()), 2048)?;
    let gap = report
        .points
        .iter()
        .filter(|p| !p.boundary && (p.location - x0).abs() > 1e-9 * x0)
        .map(|p| (p.location - x0).abs())
        .fold(x0, f64::min);
    for w in [gap / 2.0, gap / 4.0] {
        if s_prime(alpha, lambda, x0 - w)? < 0.0 && s_prime(alpha, lambda, x0 + w)? > 0.0 {
            return Ok(w);
        }
    }
    Err(domain("choose_w", format!("no valid half-width around x0 = {x0}")))
}

fn certified(cls: Classification, crossings: &[Crossing], err: f64, x0: f64, w: f64) -> bool {
    matches!(cls, Classification::Multi(k) if k >= 3)
        && crossings.iter().all(|c| c.margin > MARGIN_FACTOR * err)
        && crossings.iter().any(|c| c.location > x0 - w && c.location < x0 + w)
}

/// Runs the constructive search: x0 and λ from the bimodal mixture, a valid
/// w, then ε = ε₀ 2^{−j}, δ = ratio·ε until the scan certifies at least
/// three crossings, one of them inside (x0 − w, x0 + w).
pub fn build_counterexample(alpha: ShapeParam, opts: &CounterexampleOptions) -> Result<CounterexampleCertificate> {
    let a = alpha.get();
    if a >= 1.0 {
        return Err(domain(
            "build_counterexample",
            format!("no counterexample exists for α ≥ 1 (unique crossing holds there), got α = {a}"),
        ));
    }
    if !(opts.delta_ratio > 0.0 && opts.delta_ratio < 1.0) {
        return Err(Error::Invalid(format!("delta_ratio must lie in (0, 1), got {}", opts.delta_ratio)));
    }
    let (_, xq) = bimodality_window(alpha)?;
    let x0 = opts.x0.unwrap_or(0.5 * xq);
    if !(x0 > 0.0 && x0 < xq) {
        return Err(domain("build_counterexample", format!("x0 must lie in (0, {xq}), got {x0}")));
    }
    let lambda = lemma3_lambda(alpha, x0)?;
    let w = choose_w(alpha, lambda, x0)?;
    let mut eps = (0.5 / lambda).min(0.25);
    let mut best = 0.0f64;
    for _ in 0..opts.search_budget {
        let delta = opts.delta_ratio * eps;
        let (t, e) = counterexample_vectors(eps, delta, lambda);
        let (theta, eta) = (WeightVector::new(t.to_vec())?, WeightVector::new(e.to_vec())?);
        let report = match sign_profile(&theta, &eta, alpha, &opts.profile) {
            Ok(r) => r,
            // The series outgrows its term budget once ε is tiny.
            Err(Error::Convergence { .. }) => break,
            Err(e) => return Err(e),
        };
        if let Some(m) = report.crossings.iter().map(|c| c.margin).reduce(f64::min) {
            best = best.max(m);
        }
        if certified(report.classification, &report.crossings, report.error_estimate, x0, w) {
            let h = HexF64;
            return Ok(CounterexampleCertificate {
                alpha: h(a),
                lambda: h(lambda),
                x0: h(x0),
                w: h(w),
                eps: h(eps),
                delta: h(delta),
                theta: t.map(h),
                eta: e.map(h),
                classification: report.classification,
                window: [h(report.window.0), h(report.window.1)],
                error_estimate: h(report.error_estimate),
                crossings: report
                    .crossings
                    .iter()
                    .map(|c| CertCrossing { x: h(c.location), direction: c.direction, margin: h(c.margin) })
                    .collect(),
                tolerances: Tolerances {
                    grid_size: opts.profile.grid_size,
                    tol: h(opts.profile.tol),
                    bisection_rel_width: h(1e-10),
                    margin_factor: h(MARGIN_FACTOR),
                },
                engine_version: ENGINE_VERSION.to_string(),
            });
        }
        eps *= 0.5;
    }
    Err(Error::SearchExhausted { probes: opts.search_budget, best_margin: best })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub clauses: Vec<Clause>,
    pub recount: Option<Classification>,
}

impl VerificationReport {
    pub fn verdict(&self) -> Verdict {
        if self.clauses.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if self.clauses.iter().any(|c| c.verdict == Verdict::Undecided) {
            Verdict::Undecided
        } else {
            Verdict::Pass
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{:<10} {:<18} {}", c.verdict.to_string(), c.name, c.detail)?;
        }
        write!(f, "overall: {}", self.verdict())
    }
}

/// Re-derives every claim of a certificate from its stored inputs. The
/// crossing recount doubles the grid and halves the tolerance; margins at
/// or below `strict_tol` make the crossing clause undecided.
pub fn verify_certificate(cert: &CounterexampleCertificate, strict_tol: f64) -> VerificationReport {
    let mut clauses = Vec::new();
    let mut push = |name: &'static str, verdict: Verdict, detail: String| {
        clauses.push(Clause { name, verdict, detail });
    };
    let (a, lambda, x0, w, eps, delta) = (cert.alpha.0, cert.lambda.0, cert.x0.0, cert.w.0, cert.eps.0, cert.delta.0);
    let t: Vec<f64> = cert.theta.iter().map(|v| v.0).collect();
    let e: Vec<f64> = cert.eta.iter().map(|v| v.0).collect();

    let alpha = match ShapeParam::new(a) {
        Ok(s) if a < 1.0 => {
            push("shape", Verdict::Pass, format!("α = {a} < 1"));
            Some(s)
        }
        _ => {
            push("shape", Verdict::Fail, format!("α = {a} is not in (0, 1)"));
            None
        }
    };

    let (tt, ee) = counterexample_vectors(eps, delta, lambda);
    let exact = tt.iter().zip(&t).chain(ee.iter().zip(&e)).all(|(x, y)| x.to_bits() == y.to_bits());
    let order_ok = eps > delta && delta > 0.0 && eps * lambda < 1.0;
    push(
        "vector_algebra",
        Verdict::from_bool(exact && order_ok),
        format!("θ, η match their defining formulas: {exact}; ε > δ > 0 and ελ < 1: {order_ok}"),
    );

    let (st, se): (f64, f64) = (t.iter().sum(), e.iter().sum());
    let sum_ok = (st - se).abs() <= 1e-12 * (1.0 + 3.0 * eps);
    push("sum_identity", Verdict::from_bool(sum_ok), format!("Σθ − Ση = {:e}", st - se));

    let vectors = (WeightVector::new(t.clone()), WeightVector::new(e.clone()));
    let (theta, eta) = match vectors {
        (Ok(x), Ok(y)) => (x, y),
        _ => {
            push("weights", Verdict::Fail, "weights are not a valid nonnegative vector".into());
            return VerificationReport { clauses, recount: None };
        }
    };
    match majorizes(&theta, &eta) {
        Ok(m) => push("majorization", Verdict::from_bool(m), format!("η ≺ θ: {m}")),
        Err(err) => push("majorization", Verdict::Fail, err.to_string()),
    }

    let Some(alpha) = alpha else {
        return VerificationReport { clauses, recount: None };
    };

    match lemma3_lambda(alpha, x0) {
        Ok(l) => {
            let ok = (l - lambda).abs() <= 1e-12 * l.abs();
            push("lambda", Verdict::from_bool(ok), format!("λ(x0) recomputed as {l}"));
        }
        Err(err) => push("lambda", Verdict::Fail, err.to_string()),
    }
    match (s_prime(alpha, lambda, x0 - w), s_prime(alpha, lambda, x0 + w)) {
        (Ok(l), Ok(r)) => push(
            "w_brackets",
            Verdict::from_bool(w > 0.0 && w < x0 && l < 0.0 && r > 0.0),
            format!("s'(x0 − w) = {l:e}, s'(x0 + w) = {r:e}"),
        ),
        _ => push("w_brackets", Verdict::Fail, "s' could not be evaluated".into()),
    }

    let ends = (near_zero_sign(&theta, &eta, alpha), tail_sign(&theta, &eta, alpha));
    let ends_ok = matches!(ends, (Ok(Some(Sign::Negative)), Ok(Some(Sign::Positive))));
    let show = |s: &Result<Option<Sign>>| match s {
        Ok(Some(s)) => s.to_string(),
        Ok(None) => "tie".to_string(),
        Err(e) => e.to_string(),
    };
    push(
        "endpoint_signs",
        Verdict::from_bool(ends_ok),
        format!("D at 0⁺: {}, at ∞: {}", show(&ends.0), show(&ends.1)),
    );

    let opts = ProfileOptions {
        grid_size: 2 * cert.tolerances.grid_size,
        tol: 0.5 * cert.tolerances.tol.0,
        ..ProfileOptions::default()
    };
    let report = match sign_profile(&theta, &eta, alpha, &opts) {
        Ok(r) => r,
        Err(err) => {
            push("crossings", Verdict::Fail, err.to_string());
            return VerificationReport { clauses, recount: None };
        }
    };
    let k = report.crossings.len();
    let min_margin = report.crossings.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    let stored_min = cert.margins().into_iter().fold(f64::INFINITY, f64::min);
    let crossing_verdict = if report.classification == Classification::Undecided {
        Verdict::Undecided
    } else if !matches!(report.classification, Classification::Multi(j) if j >= 3)
        || report.classification != cert.classification
    {
        Verdict::Fail
    } else if min_margin <= strict_tol || stored_min <= strict_tol {
        Verdict::Undecided
    } else {
        Verdict::Pass
    };
    push(
        "crossings",
        crossing_verdict,
        format!(
            "recount {} ({k} changes) at grid {} tol {:e}; smallest margin {min_margin:e} vs strict tol {strict_tol:e}",
            report.classification, opts.grid_size, opts.tol
        ),
    );
    let local = report.crossings.iter().find(|c| c.location > x0 - w && c.location < x0 + w);
    push(
        "local_crossing",
        Verdict::from_bool(local.is_some()),
        match local {
            Some(c) => format!("crossing at {} inside ({}, {})", c.location, x0 - w, x0 + w),
            None => format!("no crossing inside ({}, {})", x0 - w, x0 + w),
        },
    );
    let err_ok = report.crossings.iter().all(|c| c.margin > MARGIN_FACTOR * report.error_estimate);
    push(
        "margin_vs_error",
        Verdict::from_bool(err_ok && k > 0),
        format!("smallest margin {min_margin:e}, engine error bound {:e}", report.error_estimate),
    );
    VerificationReport { clauses, recount: Some(report.classification) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_identities() {
        let (t, e) = counterexample_vectors(0.1, 0.05, 1.0);
        let st: f64 = t.iter().sum();
        let se: f64 = e.iter().sum();
        assert!((st - 1.3).abs() < 1e-15 && (se - 1.3).abs() < 1e-15);
        assert!(majorizes(&WeightVector::new(t.to_vec()).unwrap(), &WeightVector::new(e.to_vec()).unwrap()).unwrap());
    }

    #[test]
    fn refuses_large_shape() {
        let a = ShapeParam::new(1.2).unwrap();
        assert!(matches!(build_counterexample(a, &CounterexampleOptions::default()), Err(Error::Domain { .. })));
    }

    #[test]
    fn w_brackets_the_minimum() {
        let a = ShapeParam::new(0.5).unwrap();
        let w = choose_w(a, 7.5, 0.1).unwrap();
        assert!(w > 0.0 && w < 0.1);
    }
}
