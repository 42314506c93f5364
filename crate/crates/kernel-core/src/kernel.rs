use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::measure::DiscreteMeasure;

/// Tolerance on kernel row sums.
pub const STOCHASTIC_TOL: f64 = 1e-10;

/// Which Markov kernel a matrix represents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelLabel {
    Semigroup { t: f64 },
    Resolvent { alpha: f64 },
    Skeleton { s: f64, steps: usize },
    Product,
    Other,
}

/// A row-stochastic matrix on a finite state space.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticKernel {
    p: DMatrix<f64>,
    label: KernelLabel,
}

impl StochasticKernel {
    pub fn new(p: DMatrix<f64>, label: KernelLabel) -> Result<Self> {
        let n = p.nrows();
        if p.ncols() != n {
            return Err(KernelError::Dimension {
                expected: n,
                got: p.ncols(),
            });
        }
        for (i, row) in p.row_iter().enumerate() {
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(KernelError::Numerical(format!(
                    "kernel entry {v:e} in row {i} outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(KernelError::Numerical(format!(
                    "kernel row {i} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self { p, label })
    }

    pub fn identity(n: usize, label: KernelLabel) -> Self {
        Self {
            p: DMatrix::identity(n, n),
            label,
        }
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn label(&self) -> &KernelLabel {
        &self.label
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.p[(from, to)]
    }

    pub fn row(&self, from: usize) -> Vec<f64> {
        self.p.row(from).iter().copied().collect()
    }

    /// Kernel composition `self · other` (first `self`, then `other`).
    pub fn compose(&self, other: &StochasticKernel) -> Result<StochasticKernel> {
        if other.n() != self.n() {
            return Err(KernelError::Dimension {
                expected: self.n(),
                got: other.n(),
            });
        }
        Ok(Self {
            p: &self.p * &other.p,
            label: KernelLabel::Product,
        })
    }

    /// The pushed-forward measure `μK`.
    pub fn push(&self, mu: &DiscreteMeasure) -> Result<Vec<f64>> {
        Ok(self.push_weights(mu.weights_checked(self.n())?))
    }

    pub(crate) fn push_weights(&self, w: &[f64]) -> Vec<f64> {
        let row = DVector::from_column_slice(w).transpose() * &self.p;
        row.iter().copied().collect()
    }

    /// `K f`, the expectation of `f` after one step from each state.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (&self.p * DVector::from_column_slice(f)).iter().copied().collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.p.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

#[derive(Serialize)]
struct KernelDoc<'a> {
    label: &'a KernelLabel,
    n: usize,
    p: Vec<Vec<f64>>,
}

impl Serialize for StochasticKernel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KernelDoc {
            label: &self.label,
            n: self.n(),
            p: self.to_rows(),
        }
        .serialize(s)
    }
}
