//! Observation of a path at the partial sums `S_k = T_1 + .. + T_k` of i.i.d.
//! Exp(α) clocks. The clocks come from a stream independent of the path noise,
//! so `Y_k = X_{S_k}` is a Markov chain with kernel `R_α`.

use rand_distr::{Distribution, Exp};

use crate::error::{Result, SimError};
use crate::path::{SamplePath, Snapshot};
use crate::rng::{clock_rng, SimRng};
use crate::simulate::simulate_replica;
use crate::spec::{ExpSubsampleSpec, ProcessSpec};

pub enum SubsampleSource<'a> {
    /// A recorded path; its horizon must cover `S_count`.
    Path(&'a SamplePath),
    /// Simulate on demand, long enough to cover `S_count`.
    Spec(&'a ProcessSpec),
}

/// `S_1 < S_2 < .. < S_count`.
pub fn subsample_times(alpha: f64, count: usize, rng: &mut SimRng) -> Vec<f64> {
    let exp = Exp::new(alpha).expect("positive rate");
    let mut s = 0.0;
    (0..count)
        .map(|_| {
            s += exp.sample(rng);
            s
        })
        .collect()
}

/// `(Y_1, .., Y_count)`; clocks from the clock stream of `seed`.
pub fn exp_subsample(
    source: SubsampleSource<'_>,
    sub: &ExpSubsampleSpec,
    seed: u64,
) -> Result<Vec<Snapshot>> {
    exp_subsample_replica(source, sub, seed, 0)
}

/// As [`exp_subsample`], on the stream pair of replica `replica`.
pub fn exp_subsample_replica(
    source: SubsampleSource<'_>,
    sub: &ExpSubsampleSpec,
    seed: u64,
    replica: u64,
) -> Result<Vec<Snapshot>> {
    sub.validate()?;
    let times = subsample_times(sub.alpha, sub.count, &mut clock_rng(seed, replica));
    let last = *times.last().expect("count >= 1");
    match source {
        SubsampleSource::Path(path) => {
            if last > path.horizon {
                return Err(SimError::Range {
                    horizon: path.horizon,
                    needed: last,
                });
            }
            Ok(path.snapshots_at(&times))
        }
        SubsampleSource::Spec(spec) => {
            let path = simulate_replica(spec, last, seed, replica)?;
            Ok(path.snapshots_at(&times))
        }
    }
}

/// Independent replicas of the subsampled chain, one stream pair per replica.
pub fn exp_subsample_replicas(
    spec: &ProcessSpec,
    sub: &ExpSubsampleSpec,
    replicas: usize,
    seed: u64,
) -> Result<Vec<Vec<Snapshot>>> {
    (0..replicas as u64)
        .map(|r| exp_subsample_replica(SubsampleSource::Spec(spec), sub, seed, r))
        .collect()
}
