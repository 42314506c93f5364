//! Invariant probability measures of finite generators.
//!
//! Extreme invariant measures are in one-to-one correspondence with closed
//! communicating classes: each is the normalized left null vector of the
//! generator restricted to its class. The SVD of the full generator supplies
//! the null-space dimension as an independent count.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::classes::closed_classes;
use crate::error::{domain, KernelError, Result};
use crate::kernel::StochasticKernel;
use crate::measure::{sup_distance, DiscreteMeasure};
use crate::rate_matrix::RateMatrix;
use crate::resolvent::{check_alpha, resolvent};
use crate::semigroup::semigroup;

/// Relative singular-value cutoff for null-space extraction.
pub const NULL_SPACE_CUTOFF: f64 = 1e-10;

/// Orthonormal basis of `{μ : μL = 0}` from the SVD of `L`.
pub fn left_null_space(l: &RateMatrix) -> Vec<Vec<f64>> {
    null_space_of_transpose(l.matrix())
}

pub fn null_space_dim(l: &RateMatrix) -> usize {
    left_null_space(l).len()
}

// Right singular vectors of `mᵀ` span the left null space of `m`; the left
// singular vectors of `m` come out far less accurate for zero singular values.
fn null_space_of_transpose(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = m.nrows();
    let svd = m.transpose().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let sigma_max = svd.singular_values.max();
    let cut = NULL_SPACE_CUTOFF * sigma_max;
    (0..n)
        .filter(|&k| sigma_max == 0.0 || svd.singular_values[k] <= cut)
        .map(|k| v_t.row(k).iter().copied().collect())
        .collect()
}

/// Positive normalized left null vector of an irreducible generator block.
fn class_stationary(block: &DMatrix<f64>) -> Result<Vec<f64>> {
    if block.nrows() == 1 {
        return Ok(vec![1.0]);
    }
    let svd = block.transpose().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let (k, _) = svd.singular_values.argmin();
    let v: Vec<f64> = v_t.row(k).iter().copied().collect();
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let w: Vec<f64> = v.iter().map(|x| (sign * x).max(0.0)).collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(KernelError::Numerical(
            "closed class has no positive null vector".into(),
        ));
    }
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// Extreme invariant probability measures, one per closed class, ordered by
/// the smallest state of the class.
pub fn invariant_measures(l: &RateMatrix) -> Result<Vec<DiscreteMeasure>> {
    let n = l.n();
    closed_classes(l)
        .into_iter()
        .map(|class| {
            let block = l.matrix().select_rows(&class).select_columns(&class);
            let local = class_stationary(&block)?;
            let mut w = vec![0.0; n];
            for (&s, p) in class.iter().zip(local) {
                w[s] = p;
            }
            DiscreteMeasure::new(w)
        })
        .collect()
}

/// `‖μL‖_∞`.
pub fn generator_residual(l: &RateMatrix, mu: &[f64]) -> f64 {
    let row = DVector::from_column_slice(mu).transpose() * l.matrix();
    row.amax()
}

/// `‖μK - μ‖_∞`.
pub fn kernel_residual(k: &StochasticKernel, mu: &[f64]) -> f64 {
    sup_distance(&k.push_weights(mu), mu)
}

/// Time grid used for semigroup invariance checks.
pub const DEFAULT_TIME_GRID: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
pub const DEFAULT_INVARIANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceCheck {
    pub alpha: f64,
    pub times: Vec<f64>,
    /// `max_t ‖μP_t - μ‖_∞` over `times`.
    pub semigroup_residual: f64,
    /// `‖μR_α - μ‖_∞`.
    pub resolvent_residual: f64,
    pub tol: f64,
    pub semigroup_invariant: bool,
    pub resolvent_invariant: bool,
    /// Both criteria hold.
    pub invariant: bool,
}

impl InvarianceCheck {
    /// The two criteria agree, as they must for a Markov semigroup.
    pub fn consistent(&self) -> bool {
        self.semigroup_invariant == self.resolvent_invariant
    }
}

pub fn check_invariance_equivalence(
    l: &RateMatrix,
    mu: &DiscreteMeasure,
    alpha: f64,
) -> Result<InvarianceCheck> {
    check_invariance_on_grid(l, mu, alpha, &DEFAULT_TIME_GRID, DEFAULT_INVARIANCE_TOL)
}

pub fn check_invariance_on_grid(
    l: &RateMatrix,
    mu: &DiscreteMeasure,
    alpha: f64,
    times: &[f64],
    tol: f64,
) -> Result<InvarianceCheck> {
    check_alpha(alpha)?;
    mu.require_normalized()?;
    let w = mu.weights_checked(l.n())?;
    let mut semigroup_residual: f64 = 0.0;
    for &t in times {
        let p = semigroup(l, t)?;
        semigroup_residual = semigroup_residual.max(kernel_residual(&p, w));
    }
    let resolvent_residual = kernel_residual(&resolvent(l, alpha)?, w);
    let semigroup_invariant = semigroup_residual <= tol;
    let resolvent_invariant = resolvent_residual <= tol;
    Ok(InvarianceCheck {
        alpha,
        times: times.to_vec(),
        semigroup_residual,
        resolvent_residual,
        tol,
        semigroup_invariant,
        resolvent_invariant,
        invariant: semigroup_invariant && resolvent_invariant,
    })
}

/// Cesàro average of the `s`-skeleton started at `x0`:
/// `(1/n) Σ_{j<n} P_{js}(x0, ·)`.
pub fn skeleton_cesaro(l: &RateMatrix, s: f64, x0: usize, steps: usize) -> Result<DiscreteMeasure> {
    if !s.is_finite() || s <= 0.0 {
        return domain(format!("skeleton step must be positive, got {s}"));
    }
    if steps == 0 {
        return domain("Cesàro average needs at least one term");
    }
    if x0 >= l.n() {
        return domain(format!("start state {x0} out of range for {} states", l.n()));
    }
    let p = semigroup(l, s)?;
    let n = l.n();
    let mut current = vec![0.0; n];
    current[x0] = 1.0;
    let mut sum = vec![0.0; n];
    for j in 0..steps {
        if j > 0 {
            current = p.push_weights(&current);
        }
        for (acc, v) in sum.iter_mut().zip(&current) {
            *acc += v;
        }
    }
    let avg: Vec<f64> = sum.into_iter().map(|v| v / steps as f64).collect();
    DiscreteMeasure::probability(avg)
}

/// `‖ν P_s - ν‖_∞` for a Cesàro average `ν` of the `s`-skeleton.
pub fn cesaro_residual(l: &RateMatrix, s: f64, nu: &DiscreteMeasure) -> Result<f64> {
    let p = semigroup(l, s)?;
    Ok(kernel_residual(&p, nu.weights_checked(l.n())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym2() -> RateMatrix {
        RateMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap()
    }

    #[test]
    fn symmetric_two_state() {
        let ms = invariant_measures(&sym2()).unwrap();
        assert_eq!(ms.len(), 1);
        assert!(sup_distance(ms[0].weights(), &[0.5, 0.5]) < 1e-14);
    }

    #[test]
    fn two_closed_classes() {
        let b = RateMatrix::from_rows(&[vec![-2.0, 2.0], vec![2.0, -2.0]]).unwrap();
        let l = RateMatrix::block_diagonal(&[sym2(), b]).unwrap();
        let ms = invariant_measures(&l).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(sup_distance(ms[0].weights(), &[0.5, 0.5, 0.0, 0.0]) < 1e-14);
        assert!(sup_distance(ms[1].weights(), &[0.0, 0.0, 0.5, 0.5]) < 1e-14);
        assert_eq!(null_space_dim(&l), 2);
    }

    #[test]
    fn zero_generator_every_state_is_closed() {
        let l = RateMatrix::zero(3).unwrap();
        assert_eq!(invariant_measures(&l).unwrap().len(), 3);
        assert_eq!(null_space_dim(&l), 3);
    }

    #[test]
    fn invariance_check_examples() {
        let mu = DiscreteMeasure::new(vec![0.5, 0.5]).unwrap();
        let c = check_invariance_equivalence(&sym2(), &mu, 1.0).unwrap();
        assert!(c.invariant);
        assert!(c.semigroup_residual <= 1e-12 && c.resolvent_residual <= 1e-12);

        let delta = DiscreteMeasure::dirac(2, 0);
        let c = check_invariance_equivalence(&sym2(), &delta, 1.0).unwrap();
        assert!(!c.semigroup_invariant && !c.resolvent_invariant);
        assert!(c.consistent());

        let unnormalized = DiscreteMeasure::counting(2);
        assert!(matches!(
            check_invariance_equivalence(&sym2(), &unnormalized, 1.0),
            Err(KernelError::Domain(_))
        ));
    }

    #[test]
    fn cesaro_examples() {
        let one = skeleton_cesaro(&sym2(), 1.0, 0, 1).unwrap();
        assert_eq!(one.weights(), &[1.0, 0.0]);
        let many = skeleton_cesaro(&sym2(), 1.0, 0, 10_000).unwrap();
        assert!(sup_distance(many.weights(), &[0.5, 0.5]) < 1e-3);
        assert!(skeleton_cesaro(&sym2(), 0.0, 0, 10).is_err());
        assert!(skeleton_cesaro(&sym2(), 1.0, 0, 0).is_err());
    }
}
