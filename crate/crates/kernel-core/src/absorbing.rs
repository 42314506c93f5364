//! Absorbing decomposition of the resolvent kernel from two mutually singular
//! invariant measures.
//!
//! With `C = supp μ⁺`,
//!
//! ```text
//! B⁺ = ⋂_{k≥0} { x : R_α^k(x, C) = 1 },   B⁻ = ⋂_{k≥0} { x : R_α^k(x, Cᶜ) = 1 }.
//! ```
//!
//! On `n` states the intersection is exhausted after `n` factors.

use serde::Serialize;

use crate::error::{domain, KernelError, Result};
use crate::invariant::kernel_residual;
use crate::kernel::StochasticKernel;
use crate::measure::DiscreteMeasure;
use crate::rate_matrix::RateMatrix;
use crate::resolvent::resolvent;

/// Tolerance for "`R(x, B) = 1`" and "`μ(B) = 1`".
pub const ABSORPTION_TOL: f64 = 1e-10;
/// How far from `μR_α = μ` an input may be and still count as invariant.
const INVARIANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbsorbingDecomposition {
    pub b_plus: Vec<usize>,
    pub b_minus: Vec<usize>,
    pub residual: Vec<usize>,
    /// The separating set `C = supp μ⁺`.
    pub separating_set: Vec<usize>,
}

/// `⋂_{k=0}^{iterations} { x : R^k(x, target) ≥ 1 - tol }`.
pub fn absorbing_set(r: &StochasticKernel, target: &[bool], iterations: usize) -> Vec<usize> {
    let mut f: Vec<f64> = target.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let mut keep: Vec<bool> = target.to_vec();
    for _ in 0..iterations {
        f = r.apply(&f);
        for (k, v) in keep.iter_mut().zip(&f) {
            *k &= *v >= 1.0 - ABSORPTION_TOL;
        }
    }
    indices(&keep)
}

fn indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i)
        .collect()
}

pub fn absorbing_decomposition(
    l: &RateMatrix,
    alpha: f64,
    mu_plus: &DiscreteMeasure,
    mu_minus: &DiscreteMeasure,
) -> Result<AbsorbingDecomposition> {
    let n = l.n();
    let r = resolvent(l, alpha)?;
    for (name, mu) in [("μ⁺", mu_plus), ("μ⁻", mu_minus)] {
        mu.require_normalized()?;
        let res = kernel_residual(&r, mu.weights_checked(n)?);
        if res > INVARIANCE_TOL {
            return domain(format!("{name} is not invariant (‖μR_α - μ‖_∞ = {res:e})"));
        }
    }
    if let Some(s) = (0..n).find(|&s| mu_plus.charges(s) && mu_minus.charges(s)) {
        return domain(format!(
            "μ⁺ and μ⁻ are not mutually singular: both charge state {s}"
        ));
    }

    let in_c: Vec<bool> = (0..n).map(|s| mu_plus.charges(s)).collect();
    let not_c: Vec<bool> = in_c.iter().map(|b| !b).collect();
    let b_plus = absorbing_set(&r, &in_c, n);
    let b_minus = absorbing_set(&r, &not_c, n);
    let residual = (0..n)
        .filter(|s| !b_plus.contains(s) && !b_minus.contains(s))
        .collect();
    let d = AbsorbingDecomposition {
        b_plus,
        b_minus,
        residual,
        separating_set: indices(&in_c),
    };
    d.verify(&r, mu_plus, mu_minus)?;
    Ok(d)
}

impl AbsorbingDecomposition {
    /// Checks disjointness, absorption under `r`, and full mass of `μ±` on `B±`.
    pub fn verify(
        &self,
        r: &StochasticKernel,
        mu_plus: &DiscreteMeasure,
        mu_minus: &DiscreteMeasure,
    ) -> Result<()> {
        if let Some(s) = self.b_plus.iter().find(|s| self.b_minus.contains(s)) {
            return Err(KernelError::Numerical(format!("B⁺ and B⁻ share state {s}")));
        }
        for (name, set, mu) in [("B⁺", &self.b_plus, mu_plus), ("B⁻", &self.b_minus, mu_minus)] {
            for &x in set.iter() {
                let mass: f64 = set.iter().map(|&y| r.get(x, y)).sum();
                if mass < 1.0 - ABSORPTION_TOL {
                    return Err(KernelError::Numerical(format!(
                        "{name} not absorbing: R_α({x}, {name}) = {mass}"
                    )));
                }
            }
            let m = mu.mass_of(set);
            if (m - 1.0).abs() > ABSORPTION_TOL {
                return Err(KernelError::Numerical(format!("measure of {name} is {m}, expected 1")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::invariant_measures;

    fn two_blocks_with_transient() -> RateMatrix {
        RateMatrix::from_rows(&[
            vec![-1.0, 1.0, 0.0, 0.0, 0.0],
            vec![1.0, -1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, -2.0, 2.0, 0.0],
            vec![0.0, 0.0, 2.0, -2.0, 0.0],
            vec![0.5, 0.0, 0.25, 0.0, -0.75],
        ])
        .unwrap()
    }

    #[test]
    fn transient_state_is_residual() {
        let l = two_blocks_with_transient();
        let ms = invariant_measures(&l).unwrap();
        let d = absorbing_decomposition(&l, 1.0, &ms[0], &ms[1]).unwrap();
        assert_eq!(d.b_plus, vec![0, 1]);
        assert_eq!(d.b_minus, vec![2, 3]);
        assert_eq!(d.residual, vec![4]);
        assert_eq!(d.separating_set, vec![0, 1]);
    }

    #[test]
    fn overlapping_supports_name_the_state() {
        let l = RateMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let mu = invariant_measures(&l).unwrap().remove(0);
        match absorbing_decomposition(&l, 1.0, &mu, &mu) {
            Err(KernelError::Domain(msg)) => assert!(msg.contains("state 0"), "{msg}"),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn non_invariant_input_rejected() {
        let l = two_blocks_with_transient();
        let ms = invariant_measures(&l).unwrap();
        let bad = DiscreteMeasure::dirac(5, 4);
        assert!(absorbing_decomposition(&l, 1.0, &bad, &ms[1]).is_err());
    }
}
