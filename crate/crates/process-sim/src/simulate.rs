use crate::ctmc::gillespie;
use crate::diffusion::euler_maruyama;
use crate::error::{invalid, Result};
use crate::glauber::glauber;
use crate::path::{PathStates, SamplePath};
use crate::quasi_feller;
use crate::rng::{path_rng, SimRng};
use crate::spec::ProcessSpec;

/// Simulates `spec` on `[0, horizon]` from the path stream of `seed`.
///
/// Identical `(spec, horizon, seed)` give bit-identical paths, and a longer
/// horizon extends a shorter one without changing its prefix.
pub fn simulate(spec: &ProcessSpec, horizon: f64, seed: u64) -> Result<SamplePath> {
    simulate_replica(spec, horizon, seed, 0)
}

/// As [`simulate`], driven by the path stream of replica `replica`.
pub fn simulate_replica(
    spec: &ProcessSpec,
    horizon: f64,
    seed: u64,
    replica: u64,
) -> Result<SamplePath> {
    spec.validate()?;
    if !horizon.is_finite() || horizon <= 0.0 {
        return invalid(format!("horizon must be finite and positive, got {horizon}"));
    }
    let mut rng = path_rng(seed, replica);
    let (times, states) = run(spec, horizon, &mut rng)?;
    Ok(SamplePath {
        spec: spec.clone(),
        seed,
        horizon,
        times,
        states,
    })
}

fn run(spec: &ProcessSpec, horizon: f64, rng: &mut SimRng) -> Result<(Vec<f64>, PathStates)> {
    Ok(match spec {
        ProcessSpec::FiniteCtmc { generator, initial } => {
            let (times, states) = gillespie(generator, *initial, horizon, rng);
            (times, PathStates::Discrete(states))
        }
        ProcessSpec::EllipticDiffusion { .. } | ProcessSpec::Langevin { .. } => {
            let dim = spec.initial_point().map(|p| p.len()).unwrap_or(0);
            let (times, values) = euler_maruyama(spec, horizon, rng)?;
            (times, PathStates::Continuous { dim, values })
        }
        ProcessSpec::GlauberIsing {
            side,
            beta,
            initial,
        } => {
            let run = glauber(*side, *beta, *initial, horizon, rng);
            (
                run.times,
                PathStates::Spins {
                    side: *side,
                    initial: run.initial,
                    flips: run.flips,
                    spin_sum: run.spin_sum,
                },
            )
        }
        ProcessSpec::QuasiFellerDemo {
            discontinuity,
            initial,
        } => {
            let steps = horizon.floor() as usize;
            let mut times = Vec::with_capacity(steps + 1);
            let mut values = Vec::with_capacity(steps + 1);
            let mut x = *initial;
            times.push(0.0);
            values.push(x);
            for k in 1..=steps {
                x = quasi_feller::step(*discontinuity, x, rng)?;
                times.push(k as f64);
                values.push(x);
            }
            (times, PathStates::Continuous { dim: 1, values })
        }
    })
}
