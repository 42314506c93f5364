//! Random generator families used by property tests, the acceptance suite
//! and experiment configs.
//!
//! Rates are drawn uniformly from `[RATE_MIN, RATE_MAX)`. Irreducible
//! generators overlay a random Hamiltonian cycle on a Bernoulli(`density`)
//! edge set, so every state reaches every other.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::rate_matrix::RateMatrix;

pub const RATE_MIN: f64 = 0.1;
pub const RATE_MAX: f64 = 2.0;
pub const DEFAULT_DENSITY: f64 = 0.5;

fn rate<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(RATE_MIN..RATE_MAX)
}

/// Off-diagonal Bernoulli(`density`) rates, possibly reducible.
pub fn random_generator<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> RateMatrix {
    let mut off = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                off[(i, j)] = rate(rng);
            }
        }
    }
    RateMatrix::from_off_diagonal(&off).expect("nonnegative rates form a generator")
}

fn irreducible_block<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> DMatrix<f64> {
    let mut off = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                off[(i, j)] = rate(rng);
            }
        }
    }
    if n > 1 {
        let mut cycle: Vec<usize> = (0..n).collect();
        cycle.shuffle(rng);
        for k in 0..n {
            let (a, b) = (cycle[k], cycle[(k + 1) % n]);
            if off[(a, b)] == 0.0 {
                off[(a, b)] = rate(rng);
            }
        }
    }
    off
}

pub fn random_irreducible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RateMatrix {
    let off = irreducible_block(n, DEFAULT_DENSITY, rng);
    RateMatrix::from_off_diagonal(&off).expect("nonnegative rates form a generator")
}

/// A generator with known class structure.
#[derive(Debug, Clone)]
pub struct Layout {
    pub generator: RateMatrix,
    /// Closed classes, each sorted, ordered by smallest state.
    pub closed: Vec<Vec<usize>>,
    /// Transient states, sorted.
    pub transient: Vec<usize>,
}

/// `class_sizes.len()` closed irreducible classes plus `transient` states
/// that each leak into every closed class. States are randomly relabeled.
pub fn random_multi_class<R: Rng + ?Sized>(
    class_sizes: &[usize],
    transient: usize,
    rng: &mut R,
) -> Layout {
    let closed_total: usize = class_sizes.iter().sum();
    let n = closed_total + transient;
    let mut off = DMatrix::zeros(n, n);
    let mut blocks = Vec::new();
    let mut offset = 0;
    for &k in class_sizes {
        let b = irreducible_block(k, DEFAULT_DENSITY, rng);
        off.view_mut((offset, offset), (k, k)).copy_from(&b);
        blocks.push((offset..offset + k).collect::<Vec<_>>());
        offset += k;
    }
    for t in closed_total..n {
        for block in &blocks {
            let target = block[rng.random_range(0..block.len())];
            off[(t, target)] = rate(rng);
        }
        for u in closed_total..n {
            if u != t && rng.random_bool(DEFAULT_DENSITY) {
                off[(t, u)] = rate(rng);
            }
        }
    }

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let inv = inverse(&perm);
    let relabeled = DMatrix::from_fn(n, n, |i, j| off[(inv[i], inv[j])]);
    let map = |states: &[usize]| {
        let mut v: Vec<usize> = states.iter().map(|&s| perm[s]).collect();
        v.sort_unstable();
        v
    };
    let mut closed: Vec<Vec<usize>> = blocks.iter().map(|b| map(b)).collect();
    closed.sort_by_key(|c| c[0]);
    let transient = map(&(closed_total..n).collect::<Vec<_>>());
    Layout {
        generator: RateMatrix::from_off_diagonal(&relabeled).expect("valid rates"),
        closed,
        transient,
    }
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}
