//! Seeded random instance generators and the parallel classification sweep.
//!
//! Every trial draws from its own ChaCha stream: the generator is seeded
//! with the sweep seed and the stream number is the trial id, so results do
//! not depend on thread count or scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::counterexample::{build_counterexample, counterexample_vectors, CounterexampleOptions};
use crate::crossing::{sign_profile, Classification, ProfileOptions};
use crate::error::{Error, Result};
use crate::hexfloat::to_hex;
use crate::specfun::ShapeParam;
use crate::weights::WeightVector;

pub const CSV_HEADER: &str = "id,alpha,n,theta,eta,classification,k,crossings,margins,seed";

/// RNG for trial `id` under `seed`.
pub fn trial_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn nearly_permutation(a: &[f64], b: &[f64]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let scale = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 0.02 * scale)
}

/// Random `η ≺ θ`: θ uniform on [0.2, 3], η = Pθ for P a convex combination
/// of the identity and an average of random permutation matrices. Pairs
/// where η is (nearly) a rearrangement of θ are redrawn.
pub fn majorized_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<(WeightVector, WeightVector)> {
    if n < 2 {
        return Err(Error::Invalid(format!("need n ≥ 2, got {n}")));
    }
    loop {
        let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
        let t = rng.random_range(0.15..0.85);
        let m = rng.random_range(1..=3usize);
        let mut eta: Vec<f64> = theta.iter().map(|v| (1.0 - t) * v).collect();
        for _ in 0..m {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            for (i, &p) in perm.iter().enumerate() {
                eta[i] += t / m as f64 * theta[p];
            }
        }
        if !nearly_permutation(&theta, &eta) {
            return Ok((WeightVector::new(theta)?, WeightVector::new(eta)?));
        }
    }
}

/// Random positive pair with log-uniform entries on [0.2, 5]; with
/// probability 1/5 the pair is instead built with equal products and
/// `log η ≺ log θ`.
pub fn two_point_pair<R: Rng + ?Sized>(rng: &mut R) -> Result<(WeightVector, WeightVector)> {
    let draw = |rng: &mut R| (rng.random_range(0.2f64.ln()..5f64.ln())).exp();
    if rng.random_bool(0.2) {
        let (a, b) = (draw(rng), draw(rng));
        let (lo, hi) = (a.min(b), a.max(b) * 1.05);
        let r = rng.random_range(1.0..(hi / lo).sqrt());
        return Ok((WeightVector::new(vec![lo, hi])?, WeightVector::new(vec![lo * r, lo * hi / (lo * r)])?));
    }
    let v: Vec<f64> = (0..4).map(|_| draw(rng)).collect();
    Ok((WeightVector::new(v[..2].to_vec())?, WeightVector::new(v[2..].to_vec())?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Draw pairs around a certified counterexample instead of random
    /// majorized pairs.
    pub near_counterexample: bool,
    pub profile: ProfileOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub id: u64,
    pub alpha: f64,
    pub n: usize,
    pub theta: WeightVector,
    pub eta: WeightVector,
    pub classification: Classification,
    pub crossings: Vec<f64>,
    pub margins: Vec<f64>,
    pub seed: u64,
}

fn hex_list(v: &[f64]) -> String {
    v.iter().map(|x| to_hex(*x)).collect::<Vec<_>>().join(";")
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.id,
            to_hex(self.alpha),
            self.n,
            hex_list(self.theta.entries()),
            hex_list(self.eta.entries()),
            self.classification,
            self.classification.crossing_count().map(|k| k.to_string()).unwrap_or_default(),
            hex_list(&self.crossings),
            hex_list(&self.margins),
            self.seed
        )
    }
}

/// A trial that failed inside the engine.
#[derive(Debug)]
pub struct TrialError {
    pub id: u64,
    pub error: Error,
}

struct Trial {
    id: u64,
    alpha: f64,
    n: usize,
}

/// Per-α anchor for near-counterexample sampling: (ε, λ).
fn anchors(cfg: &SweepConfig) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::new();
    for &a in &cfg.alphas {
        let cert = build_counterexample(ShapeParam::new(a)?, &CounterexampleOptions::default())?;
        out.push((a, cert.eps.0, cert.lambda.0));
    }
    Ok(out)
}

fn near_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, eps: f64, lambda: f64) -> Result<(WeightVector, WeightVector)> {
    let e = eps * rng.random_range(0.5f64.ln()..2f64.ln()).exp();
    let e = e.min(0.99 / lambda);
    let d = e * rng.random_range(0.3..0.7);
    let (t, h) = counterexample_vectors(e, d, lambda);
    let mut theta = t.to_vec();
    let mut eta = h.to_vec();
    // Extra equal small components keep η ≺ θ.
    for k in 3..n {
        let tiny = e / (8.0 * (k as f64 - 1.0));
        theta.push(tiny);
        eta.push(tiny);
    }
    Ok((WeightVector::new(theta)?, WeightVector::new(eta)?))
}

/// Runs every (α, n, trial) instance and returns rows sorted by id, up to
/// the first failing trial, plus that failure if any.
pub fn run_sweep(cfg: &SweepConfig) -> Result<(Vec<SweepRow>, Option<TrialError>)> {
    if cfg.trials == 0 {
        return Err(Error::Invalid("trial count must be positive".into()));
    }
    if cfg.alphas.is_empty() || cfg.ns.is_empty() {
        return Err(Error::Invalid("need at least one α and one n".into()));
    }
    for &a in &cfg.alphas {
        ShapeParam::new(a)?;
        if cfg.near_counterexample && a >= 1.0 {
            return Err(Error::Invalid(format!("near-counterexample sampling needs α < 1, got {a}")));
        }
    }
    if cfg.ns.iter().any(|&n| n < 2 || (cfg.near_counterexample && n < 3)) {
        return Err(Error::Invalid("n must be at least 2 (3 near a counterexample)".into()));
    }
    let anchor = if cfg.near_counterexample { anchors(cfg)? } else { Vec::new() };
    let mut trials = Vec::new();
    let mut id = 0u64;
    for &alpha in &cfg.alphas {
        for &n in &cfg.ns {
            for _ in 0..cfg.trials {
                trials.push(Trial { id, alpha, n });
                id += 1;
            }
        }
    }
    let results: Vec<std::result::Result<SweepRow, TrialError>> = trials
        .par_iter()
        .map(|t| {
            let run = || -> Result<SweepRow> {
                let mut rng = trial_rng(cfg.seed, t.id);
                let (theta, eta) = if cfg.near_counterexample {
                    let (_, eps, lambda) = anchor.iter().find(|a| a.0 == t.alpha).copied().unwrap_or((t.alpha, 0.01, 1.0));
                    near_pair(&mut rng, t.n, eps, lambda)?
                } else {
                    majorized_pair(&mut rng, t.n)?
                };
                let report = sign_profile(&theta, &eta, ShapeParam::new(t.alpha)?, &cfg.profile)?;
                Ok(SweepRow {
                    id: t.id,
                    alpha: t.alpha,
                    n: t.n,
                    theta,
                    eta,
                    classification: report.classification,
                    crossings: report.crossings.iter().map(|c| c.location).collect(),
                    margins: report.crossings.iter().map(|c| c.margin).collect(),
                    seed: cfg.seed,
                })
            };
            run().map_err(|error| TrialError { id: t.id, error })
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => return Ok((rows, Some(e))),
        }
    }
    Ok((rows, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::majorizes;

    #[test]
    fn generated_pairs_are_majorized() {
        for id in 0..50 {
            let mut rng = trial_rng(11, id);
            let (t, e) = majorized_pair(&mut rng, 2 + (id as usize % 4)).unwrap();
            assert!(majorizes(&t, &e).unwrap());
            assert!(!t.is_permutation_of(&e));
        }
    }

    #[test]
    fn streams_are_independent_of_order() {
        let a: f64 = trial_rng(5, 3).random();
        let _: f64 = trial_rng(5, 2).random();
        let b: f64 = trial_rng(5, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, trial_rng(5, 4).random::<f64>());
    }

    #[test]
    fn csv_line_has_every_column() {
        let row = SweepRow {
            id: 0,
            alpha: 1.0,
            n: 2,
            theta: WeightVector::new(vec![1.0, 4.0]).unwrap(),
            eta: WeightVector::new(vec![2.0, 3.0]).unwrap(),
            classification: Classification::SingleCrossingBelow,
            crossings: vec![2.5],
            margins: vec![0.01],
            seed: 7,
        };
        let line = row.csv_line();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert!(line.starts_with("0,0x1p+0,2,0x1p+0;0x1p+2,0x1p+1;0x1.8p+1,SINGLE_CROSSING_BELOW,1,"));
    }
}
