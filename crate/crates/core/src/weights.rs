//! Nonnegative weight vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hexfloat;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A nonnegative weight vector θ = (θ₁, …, θₙ), n ≥ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    entries: Vec<f64>,
}

impl WeightVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("weight vector must be nonempty".into()));
        }
        if let Some(bad) = entries.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::Invalid(format!(
                "weights must be finite and nonnegative, got {bad}"
            )));
        }
        Ok(WeightVector { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Ascending view; stable, so equal weights keep input order.
    pub fn sorted_asc(&self) -> Vec<f64> {
        let mut v = self.entries.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.sorted_asc();
        v.reverse();
        v
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.entries.iter().copied())
    }

    pub fn product(&self) -> f64 {
        self.entries.iter().product()
    }

    /// Σ ln θᵢ; `-inf` if any weight is zero.
    pub fn log_product(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|w| w.ln()))
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn all_positive(&self) -> bool {
        self.entries.iter().all(|w| *w > 0.0)
    }

    /// Drops zero weights; errors if nothing is left.
    pub fn strip_zeros(&self) -> Result<Self> {
        let kept: Vec<f64> = self.entries.iter().copied().filter(|w| *w > 0.0).collect();
        if kept.is_empty() {
            return Err(Error::Invalid("all weights are zero".into()));
        }
        Ok(WeightVector { entries: kept })
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        WeightVector::new(self.entries.iter().map(|w| w * c).collect())
    }

    /// True when `other` is a rearrangement of `self`.
    pub fn is_permutation_of(&self, other: &WeightVector) -> bool {
        self.len() == other.len() && self.sorted_asc() == other.sorted_asc()
    }

    /// Comma-separated hex-float rendering used for bit-exact replay.
    pub fn to_hex_list(&self) -> String {
        self.entries
            .iter()
            .map(|w| hexfloat::to_hex(*w))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.entries
    }
}

impl FromStr for WeightVector {
    type Err = Error;

    /// Comma-separated decimals or `0x`-prefixed hex floats.
    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(hexfloat::parse_float)
            .collect::<Result<Vec<_>>>()?;
        WeightVector::new(entries)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_entries() {
        assert!(WeightVector::new(vec![]).is_err());
        assert!(WeightVector::new(vec![1.0, -0.1]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
        assert!(WeightVector::new(vec![0.0, 0.0]).unwrap().strip_zeros().is_err());
    }

    #[test]
    fn parses_mixed_literals() {
        let w: WeightVector = "1, 0x1.8p+1,10".parse().unwrap();
        assert_eq!(w.entries(), &[1.0, 3.0, 10.0]);
        assert_eq!(w.sorted_desc(), vec![10.0, 3.0, 1.0]);
        assert_eq!(w.sum(), 14.0);
        assert!("1,,2".parse::<WeightVector>().is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1.0, 1e-16, 1e-16, -1.0];
        assert_eq!(compensated_sum(v), 2e-16);
    }
}
