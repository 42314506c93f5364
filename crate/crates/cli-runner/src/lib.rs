//! Config-driven experiment runner.
//!
//! A JSON config names a generator or process, a list of operations and
//! explicit seeds. `validate` resolves it, `run` executes it into an output
//! directory with a digest manifest, and `report` renders the manifest after
//! checking every artifact.

pub mod config;
pub mod ops;
pub mod report;
pub mod run;

pub use config::{validate_path, validate_str, Engine, ExperimentConfig, Operation, ValidationErrors};
pub use ops::OpKind;
pub use report::{report, Format, ReportError};
pub use run::{effective_output_dir, run, RunManifest, Status};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const RUNTIME: i32 = 2;
}
