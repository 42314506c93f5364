//! Fixed-step Euler–Maruyama for elliptic and Langevin diffusions.
//!
//! The drift is evaluated at the left endpoint of each step, including at
//! its discontinuities.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SimError};
use crate::rng::SimRng;
use crate::spec::ProcessSpec;

/// One Euler–Maruyama step of a continuous-state spec, in place.
pub fn em_step(spec: &ProcessSpec, state: &mut [f64], h: f64, rng: &mut SimRng) {
    let drift = spec.drift_at(state).expect("continuous spec");
    let diag = spec.diffusion_diag().expect("continuous spec");
    let sqrt_h = h.sqrt();
    for ((x, b), a) in state.iter_mut().zip(&drift).zip(&diag) {
        *x += b * h;
        if *a > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            *x += a.sqrt() * sqrt_h * z;
        }
    }
}

/// Records every step on `[0, horizon]`; returns times and flat states.
pub(crate) fn euler_maruyama(
    spec: &ProcessSpec,
    horizon: f64,
    rng: &mut SimRng,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = spec.step().expect("continuous spec");
    let mut state = spec.initial_point().expect("continuous spec");
    let steps = (horizon / h).floor() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity((steps + 1) * state.len());
    times.push(0.0);
    values.extend_from_slice(&state);
    for k in 1..=steps {
        em_step(spec, &mut state, h, rng);
        let t = k as f64 * h;
        if state.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Blowup { time: t });
        }
        times.push(t);
        values.extend_from_slice(&state);
    }
    Ok((times, values))
}
