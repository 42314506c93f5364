//! A discrete-time chain on `[0, 1]` with a quasi-Feller factorization.
//!
//! One step is `y ~ Q(H(x), ·)` where
//!
//! * `H(x) = x/2` for `x < d` and `H(x) = (1 + x)/2` for `x ≥ d`, discontinuous
//!   only at `d` (default `1/2`);
//! * `Q(w, ·) = ½ Uniform[0, 1] + ½ Triangular(w ± HALF_WIDTH)`, folded back into
//!   `[0, 1]` at the boundaries.
//!
//! `Q` has a density jointly continuous in `(w, y)`, so it is Feller and charges
//! no single point; the kernel density is bounded below by `½` everywhere.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::rng::SimRng;

pub const HALF_WIDTH: f64 = 0.2;
/// Upper bound on the transition density `p(x, y)` over all `x, y`.
pub const DENSITY_BOUND: f64 = 0.5 + 0.5 * 2.0 / HALF_WIDTH;
/// Lower bound on the transition density.
pub const DENSITY_FLOOR: f64 = 0.5;

pub fn h_map(discontinuity: f64, x: f64) -> f64 {
    if x < discontinuity {
        x / 2.0
    } else {
        (1.0 + x) / 2.0
    }
}

fn fold(y: f64) -> f64 {
    if y < 0.0 {
        -y
    } else if y > 1.0 {
        2.0 - y
    } else {
        y
    }
}

/// Draw from `Q(w, ·)`.
pub fn sample_q(w: f64, rng: &mut SimRng) -> f64 {
    if rng.random_bool(0.5) {
        rng.random::<f64>()
    } else {
        let tri = w + HALF_WIDTH * (rng.random::<f64>() + rng.random::<f64>() - 1.0);
        fold(tri)
    }
}

pub fn step(discontinuity: f64, x: f64, rng: &mut SimRng) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("demo state {x} outside [0, 1]"));
    }
    Ok(sample_q(h_map(discontinuity, x), rng))
}

fn triangle(u: f64) -> f64 {
    ((HALF_WIDTH - u.abs()) / (HALF_WIDTH * HALF_WIDTH)).max(0.0)
}

/// Density of `Q(w, ·)` at `y ∈ [0, 1]`.
pub fn q_density(w: f64, y: f64) -> f64 {
    0.5 + 0.5 * (triangle(y - w) + triangle(-y - w) + triangle(2.0 - y - w))
}

/// Density of one demo step from `x` at `y`.
pub fn transition_density(discontinuity: f64, x: f64, y: f64) -> f64 {
    q_density(h_map(discontinuity, x), y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_density_integrates_to_one() {
        for &w in &[0.0, 0.1, 0.25, 0.5, 0.75, 0.95, 1.0] {
            let m = 20_000;
            let total: f64 = (0..m)
                .map(|k| q_density(w, (k as f64 + 0.5) / m as f64) / m as f64)
                .sum();
            assert!((total - 1.0).abs() < 1e-6, "w={w}: {total}");
        }
    }

    #[test]
    fn density_bounds_hold() {
        for i in 0..=200 {
            for j in 0..=200 {
                let (x, y) = (i as f64 / 200.0, j as f64 / 200.0);
                let p = transition_density(0.5, x, y);
                assert!((DENSITY_FLOOR..=DENSITY_BOUND).contains(&p));
            }
        }
    }

    #[test]
    fn h_is_discontinuous_only_at_d() {
        assert_eq!(h_map(0.5, 0.4999999), 0.24999995);
        assert_eq!(h_map(0.5, 0.5), 0.75);
        assert_eq!(h_map(0.5, 1.0), 1.0);
    }
}
