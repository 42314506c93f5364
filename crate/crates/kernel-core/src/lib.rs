//! Exact computations for continuous-time Markov chains on finite state spaces.
//!
//! The central object is a [`RateMatrix`] (generator `L`). From it the crate
//! derives the transition semigroup `P_t = exp(tL)`, the normalized resolvent
//! `R_α = α(αI - L)^{-1}`, the extreme invariant probability measures, and
//! certificates for irreducibility, resolvent domination and uniqueness.
//!
//! All functions are pure; every returned value is immutable and `Send + Sync`.
//! Right-continuity of `t ↦ P_t(x, y)` is automatic here (the map is analytic)
//! and is not checked.

pub mod absorbing;
pub mod certificate;
pub mod classes;
mod error;
pub mod families;
pub mod invariant;
pub mod kernel;
pub mod measure;
pub mod rate_matrix;
pub mod resolvent;
pub mod semigroup;

pub use absorbing::{absorbing_decomposition, AbsorbingDecomposition};
pub use certificate::{
    domination_certificate, psi_irreducible, uniqueness_verdict, DominationCertificate,
    UniquenessReport, Verdict,
};
pub use classes::{closed_classes, communicating_classes, CommunicatingClass};
pub use error::{KernelError, Result};
pub use invariant::{
    cesaro_residual, check_invariance_equivalence, invariant_measures, skeleton_cesaro,
    InvarianceCheck,
};
pub use kernel::{KernelLabel, StochasticKernel};
pub use measure::{DiscreteMeasure, SUPPORT_EPS};
pub use rate_matrix::RateMatrix;
pub use resolvent::resolvent;
pub use semigroup::semigroup;
