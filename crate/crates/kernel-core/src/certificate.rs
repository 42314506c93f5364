//! Irreducibility, resolvent domination and the uniqueness verdict.
//!
//! If every row of `R_α` charges every state that a reference measure `ψ`
//! charges, then every invariant measure charges `supp ψ` as well. Two
//! distinct ergodic measures would have to be mutually singular, so at most
//! one of them can exist.

use serde::Serialize;

use crate::classes::reachable_from;
use crate::error::{domain, Result};
use crate::invariant::{invariant_measures, null_space_dim};
use crate::measure::{charged, DiscreteMeasure};
use crate::rate_matrix::RateMatrix;
use crate::resolvent::resolvent;

fn check_reference(l: &RateMatrix, psi: &DiscreteMeasure) -> Result<Vec<usize>> {
    psi.weights_checked(l.n())?;
    if psi.is_zero() {
        return domain("reference measure ψ must be nonzero");
    }
    Ok(psi.support())
}

/// Every state charged by `psi` is reachable from every state.
///
/// For a finite chain, `P_t(x, y) > 0` for some `t > 0` iff `y` is reachable
/// from `x` in the jump graph (`x` itself always is).
pub fn psi_irreducible(l: &RateMatrix, psi: &DiscreteMeasure) -> Result<bool> {
    let targets = check_reference(l, psi)?;
    Ok((0..l.n()).all(|x| {
        let seen = reachable_from(l, x);
        targets.iter().all(|&y| seen[y])
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationCertificate {
    pub alpha: f64,
    /// `supp ψ ⊆ supp R_α(x, ·)` for every `x`.
    pub holds: bool,
    /// First `(x, y)` in lexicographic order with `ψ({y}) > 0` and
    /// `R_α(x, y)` below the support cutoff.
    pub witness: Option<(usize, usize)>,
    /// Smallest entry `R_α(x, y)` over `y ∈ supp ψ`, relative to its row maximum.
    pub min_relative_entry: f64,
    /// Every invariant measure charges `supp ψ`.
    pub invariant_measures_charge_psi: bool,
}

pub fn domination_certificate(
    l: &RateMatrix,
    psi: &DiscreteMeasure,
    alpha: f64,
) -> Result<DominationCertificate> {
    let targets = check_reference(l, psi)?;
    let r = resolvent(l, alpha)?;
    let mut witness = None;
    let mut min_relative_entry = f64::INFINITY;
    for x in 0..l.n() {
        let row = r.row(x);
        let row_max = row.iter().copied().fold(0.0, f64::max);
        for &y in &targets {
            min_relative_entry = min_relative_entry.min(row[y] / row_max);
            if witness.is_none() && !charged(&row, y) {
                witness = Some((x, y));
            }
        }
    }
    let invariant_measures_charge_psi = invariant_measures(l)?
        .iter()
        .all(|mu| targets.iter().all(|&y| mu.charges(y)));
    Ok(DominationCertificate {
        alpha,
        holds: witness.is_none(),
        witness,
        min_relative_entry,
        invariant_measures_charge_psi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Unique,
    Multiple,
    NoInvariantProbability,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub invariant_dim: usize,
    /// SVD nullity of `L`; agrees with `invariant_dim` for well-conditioned input.
    pub null_space_dim: usize,
    pub measures: Vec<DiscreteMeasure>,
    pub irreducible: bool,
    pub domination_holds: bool,
    pub witness: Option<(usize, usize)>,
    pub verdict: Verdict,
}

pub fn uniqueness_verdict(
    l: &RateMatrix,
    psi: &DiscreteMeasure,
    alpha: f64,
) -> Result<UniquenessReport> {
    let measures = invariant_measures(l)?;
    let irreducible = psi_irreducible(l, psi)?;
    let cert = domination_certificate(l, psi, alpha)?;
    let invariant_dim = measures.len();
    let verdict = match invariant_dim {
        0 => Verdict::NoInvariantProbability,
        1 => Verdict::Unique,
        _ => Verdict::Multiple,
    };
    debug_assert!(
        !(irreducible && cert.holds && invariant_dim >= 1) || verdict == Verdict::Unique,
        "ψ-irreducible chain with domination must have a unique invariant measure"
    );
    Ok(UniquenessReport {
        invariant_dim,
        null_space_dim: null_space_dim(l),
        measures,
        irreducible,
        domination_holds: cert.holds,
        witness: cert.witness,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::KernelError;

    fn sym2() -> RateMatrix {
        RateMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap()
    }

    fn two_blocks() -> RateMatrix {
        let b = RateMatrix::from_rows(&[vec![-2.0, 2.0], vec![2.0, -2.0]]).unwrap();
        RateMatrix::block_diagonal(&[sym2(), b]).unwrap()
    }

    #[test]
    fn irreducibility_examples() {
        assert!(psi_irreducible(&sym2(), &DiscreteMeasure::counting(2)).unwrap());
        assert!(!psi_irreducible(&two_blocks(), &DiscreteMeasure::counting(4)).unwrap());
        assert!(matches!(
            psi_irreducible(&sym2(), &DiscreteMeasure::new(vec![0.0, 0.0]).unwrap()),
            Err(KernelError::Domain(_))
        ));
    }

    #[test]
    fn domination_fails_across_blocks() {
        let cert = domination_certificate(&two_blocks(), &DiscreteMeasure::counting(4), 1.0).unwrap();
        assert!(!cert.holds);
        assert_eq!(cert.witness, Some((0, 2)));
        assert!(!cert.invariant_measures_charge_psi);
    }

    #[test]
    fn domination_holds_for_irreducible() {
        let cert = domination_certificate(&sym2(), &DiscreteMeasure::counting(2), 0.5).unwrap();
        assert!(cert.holds);
        assert!(cert.invariant_measures_charge_psi);
        assert!(cert.min_relative_entry > 0.0);
    }

    #[test]
    fn verdicts() {
        let r = uniqueness_verdict(&sym2(), &DiscreteMeasure::counting(2), 1.0).unwrap();
        assert_eq!(r.verdict, Verdict::Unique);
        assert_eq!(r.invariant_dim, 1);
        let r = uniqueness_verdict(&two_blocks(), &DiscreteMeasure::counting(4), 1.0).unwrap();
        assert_eq!(r.verdict, Verdict::Multiple);
        assert_eq!(r.invariant_dim, 2);
        assert!(!r.irreducible);
        assert_eq!(serde_json::to_value(r.verdict).unwrap(), "multiple");
    }
}
