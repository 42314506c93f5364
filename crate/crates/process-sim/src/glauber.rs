//! Continuous-time heat-bath Glauber dynamics for the Ising model on a
//! periodic square lattice.
//!
//! Site `i` flips at rate `c(i, σ) = 1 / (1 + exp(2β σ_i h_i))` with
//! `h_i = Σ_{j~i} σ_j`. Since every rate is at most 1, the dynamics is
//! realized exactly by thinning: proposals arrive at total rate `N = side²`,
//! pick a uniform site, and are accepted with probability `c(i, σ)`.
//! Only accepted flips are recorded.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::rng::SimRng;
use crate::spec::SpinInit;

#[derive(Debug, Clone)]
pub struct Lattice {
    side: usize,
    neighbors: Vec<[u32; 4]>,
}

impl Lattice {
    pub fn new(side: usize) -> Self {
        let idx = |r: usize, c: usize| (r % side * side + c % side) as u32;
        let neighbors = (0..side * side)
            .map(|i| {
                let (r, c) = (i / side, i % side);
                [
                    idx(r, c + 1),
                    idx(r, c + side - 1),
                    idx(r + 1, c),
                    idx(r + side - 1, c),
                ]
            })
            .collect();
        Self { side, neighbors }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn sites(&self) -> usize {
        self.side * self.side
    }

    pub fn local_field(&self, spins: &[i8], i: usize) -> i32 {
        self.neighbors[i]
            .iter()
            .map(|&j| i32::from(spins[j as usize]))
            .sum()
    }

    /// `-Σ_i σ_i (σ_right(i) + σ_down(i))`; each bond counted once.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        (0..self.sites())
            .map(|i| {
                let [right, _, down, _] = self.neighbors[i];
                -f64::from(spins[i]) * f64::from(spins[right as usize] + spins[down as usize])
            })
            .sum()
    }
}

/// Heat-bath flip probability for a spin `s` with local field `h`.
pub fn flip_rate(beta: f64, s: i8, h: i32) -> f64 {
    1.0 / (1.0 + (2.0 * beta * f64::from(s) * f64::from(h)).exp())
}

pub(crate) fn initial_spins(n: usize, init: SpinInit, rng: &mut SimRng) -> Vec<i8> {
    match init {
        SpinInit::AllPlus => vec![1; n],
        SpinInit::AllMinus => vec![-1; n],
        SpinInit::Random => (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect(),
    }
}

pub(crate) struct GlauberRun {
    pub initial: Vec<i8>,
    pub times: Vec<f64>,
    pub flips: Vec<u32>,
    pub spin_sum: Vec<i64>,
}

pub(crate) fn glauber(
    side: usize,
    beta: f64,
    init: SpinInit,
    horizon: f64,
    rng: &mut SimRng,
) -> GlauberRun {
    let lattice = Lattice::new(side);
    let n = lattice.sites();
    let mut spins = initial_spins(n, init, rng);
    let initial = spins.clone();
    // rates indexed by (s+1)/2 and (h+4)/2
    let mut table = [[0.0; 5]; 2];
    for (si, s) in [-1i8, 1].into_iter().enumerate() {
        for (hi, h) in [-4, -2, 0, 2, 4].into_iter().enumerate() {
            table[si][hi] = flip_rate(beta, s, h);
        }
    }
    let clock = Exp::new(n as f64).expect("positive rate");
    let mut sum: i64 = spins.iter().map(|&s| i64::from(s)).sum();
    let mut run = GlauberRun {
        initial,
        times: vec![0.0],
        flips: Vec::new(),
        spin_sum: vec![sum],
    };
    let mut t = 0.0;
    loop {
        t += clock.sample(rng);
        if t > horizon {
            break;
        }
        let i = rng.random_range(0..n);
        let s = spins[i];
        let h = lattice.local_field(&spins, i);
        let c = table[usize::from(s > 0)][((h + 4) / 2) as usize];
        if rng.random::<f64>() < c {
            spins[i] = -s;
            sum -= 2 * i64::from(s);
            run.times.push(t);
            run.flips.push(i as u32);
            run.spin_sum.push(sum);
        }
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_neighbors_wrap() {
        let l = Lattice::new(3);
        let mut spins = vec![1i8; 9];
        spins[2] = -1; // left neighbor of site 0 through the boundary
        assert_eq!(l.local_field(&spins, 0), 2);
        assert_eq!(l.energy(&[1; 9]), -18.0);
    }

    #[test]
    fn heat_bath_rates() {
        assert_eq!(flip_rate(0.0, 1, 4), 0.5);
        assert!((flip_rate(1.0, 1, 4) - 1.0 / (1.0 + 8f64.exp())).abs() < 1e-15);
        assert!(flip_rate(1.0, -1, 4) > 0.99);
    }
}
