//! Seeded Monte Carlo simulation of continuous-time Markov processes.
//!
//! Supported kinds: finite-state chains (exact Gillespie), elliptic diffusions
//! and Langevin dynamics (fixed-step Euler–Maruyama), Glauber dynamics of the
//! 2D Ising model on a torus (exact, event driven), and a discrete-time demo
//! chain on `[0, 1]` whose kernel factors through a discontinuous map.
//!
//! Runs are independent given `(spec, seed)`; a single path is generated
//! sequentially.

pub mod ctmc;
pub mod diffusion;
mod error;
pub mod glauber;
pub mod path;
pub mod quasi_feller;
pub mod rng;
mod simulate;
pub mod spec;
pub mod subsample;

pub use error::{Result, SimError};
pub use path::{PathStates, SamplePath, Snapshot};
pub use simulate::{simulate, simulate_replica};
pub use spec::{Drift, ExpSubsampleSpec, Potential, ProcessSpec, SpinInit};
pub use subsample::{exp_subsample, exp_subsample_replica, exp_subsample_replicas, SubsampleSource};

/// One step of the quasi-Feller demo chain from `state`.
pub fn quasi_feller_demo_step(state: f64, rng: &mut rng::SimRng) -> Result<f64> {
    quasi_feller::step(0.5, state, rng)
}
