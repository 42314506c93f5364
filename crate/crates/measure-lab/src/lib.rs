//! Estimators that turn sample paths into measure-level objects: occupation
//! measures, empirical laws of subsampled chains, invariance residuals,
//! Lyapunov drift checks, invisibility of discontinuity sets, and
//! phase-coexistence diagnostics for Glauber–Ising dynamics.

pub mod binning;
pub mod coexistence;
pub mod drift;
pub mod empirical;
mod error;
pub mod invisibility;

pub use binning::{Axis, Binning};
pub use coexistence::{
    absorbing_diagnostic, coexistence_scan, AbsorbingDiagnostic, CoexistenceConfig,
    CoexistenceReport,
};
pub use drift::{
    lyapunov_drift_check, DriftOptions, DriftReport, GeneratorEstimate, Lyapunov,
    LyapunovFunction, SampleBox,
};
pub use empirical::{
    invariance_residual, occupation_measure, stationary_occupation, tightness_profile,
    tv_distance, EmpiricalMeasure,
};
pub use error::{MeasureError, Result};
pub use invisibility::{invisibility_diagnostic, InvisibilityReport, InvisibilitySource};
