use serde::{Deserialize, Serialize};

use crate::error::{domain, KernelError, Result};

/// Relative cutoff below which a weight counts as zero.
///
/// Every "charges / does not charge" decision in the crate goes through this
/// constant: `w[i]` is in the support iff `w[i] > SUPPORT_EPS * max(w)`.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Tolerance on the total mass of a probability measure.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A nonnegative measure on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscreteMeasure {
    w: Vec<f64>,
    normalized: bool,
}

impl TryFrom<Vec<f64>> for DiscreteMeasure {
    type Error = KernelError;

    fn try_from(w: Vec<f64>) -> Result<Self> {
        DiscreteMeasure::new(w)
    }
}

impl From<DiscreteMeasure> for Vec<f64> {
    fn from(m: DiscreteMeasure) -> Self {
        m.w
    }
}

impl DiscreteMeasure {
    /// Wraps a weight vector; it is flagged normalized if it sums to one.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return domain("measure needs at least one state");
        }
        if let Some((i, v)) = w.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return domain(format!("weight {v} at state {i} is not a finite nonnegative number"));
        }
        let total: f64 = w.iter().sum();
        let normalized = (total - 1.0).abs() <= NORMALIZATION_TOL;
        Ok(Self { w, normalized })
    }

    /// Wraps and rescales to a probability measure.
    pub fn probability(w: Vec<f64>) -> Result<Self> {
        let m = Self::new(w)?;
        m.normalize()
    }

    pub fn counting(n: usize) -> Self {
        Self {
            w: vec![1.0; n],
            normalized: n == 1,
        }
    }

    pub fn dirac(n: usize, state: usize) -> Self {
        let mut w = vec![0.0; n];
        w[state] = 1.0;
        Self { w, normalized: true }
    }

    /// Uniform probability on `states`.
    pub fn uniform_on(n: usize, states: &[usize]) -> Result<Self> {
        let mut w = vec![0.0; n];
        for &s in states {
            w[s] = 1.0;
        }
        Self::probability(w)
    }

    pub fn normalize(&self) -> Result<Self> {
        let total = self.total();
        if total <= 0.0 {
            return domain("cannot normalize the zero measure");
        }
        Ok(Self {
            w: self.w.iter().map(|v| v / total).collect(),
            normalized: true,
        })
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&v| v == 0.0)
    }

    /// Mass of a set of states.
    pub fn mass_of(&self, states: &[usize]) -> f64 {
        states.iter().map(|&s| self.w[s]).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        support_of(&self.w)
    }

    pub fn charges(&self, state: usize) -> bool {
        charged(&self.w, state)
    }

    pub(crate) fn weights_checked(&self, n: usize) -> Result<&[f64]> {
        if self.n() != n {
            return Err(KernelError::Dimension {
                expected: n,
                got: self.n(),
            });
        }
        Ok(&self.w)
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if !self.normalized {
            return domain(format!(
                "measure must be a probability measure (total mass {})",
                self.total()
            ));
        }
        Ok(())
    }
}

/// Indices of `w` above the relative support threshold.
pub fn support_of(w: &[f64]) -> Vec<usize> {
    let cut = threshold(w);
    w.iter()
        .enumerate()
        .filter(|(_, &v)| v > cut)
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn charged(w: &[f64], i: usize) -> bool {
    w[i] > threshold(w)
}

fn threshold(w: &[f64]) -> f64 {
    let max = w.iter().copied().fold(0.0, f64::max);
    SUPPORT_EPS * max
}

/// `max_i |a_i - b_i|`.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
