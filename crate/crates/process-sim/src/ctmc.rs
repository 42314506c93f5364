//! Exact simulation of finite-state chains (Gillespie direct method).

use kernel_core::RateMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::rng::SimRng;

/// Jump targets and cumulative rates for each state.
pub(crate) struct JumpTable {
    targets: Vec<Vec<usize>>,
    cumulative: Vec<Vec<f64>>,
}

impl JumpTable {
    pub(crate) fn new(l: &RateMatrix) -> Self {
        let n = l.n();
        let mut targets = Vec::with_capacity(n);
        let mut cumulative = Vec::with_capacity(n);
        for x in 0..n {
            let mut t = Vec::new();
            let mut c = Vec::new();
            let mut acc = 0.0;
            for y in 0..n {
                if l.has_edge(x, y) {
                    acc += l.rate(x, y);
                    t.push(y);
                    c.push(acc);
                }
            }
            targets.push(t);
            cumulative.push(c);
        }
        Self { targets, cumulative }
    }

    fn exit_rate(&self, x: usize) -> f64 {
        self.cumulative[x].last().copied().unwrap_or(0.0)
    }

    fn next_state(&self, x: usize, rng: &mut SimRng) -> usize {
        let u = rng.random::<f64>() * self.exit_rate(x);
        let k = self.cumulative[x].partition_point(|&c| c <= u);
        self.targets[x][k.min(self.targets[x].len() - 1)]
    }
}

/// Returns jump times (starting with 0) and the states entered.
pub(crate) fn gillespie(
    l: &RateMatrix,
    initial: usize,
    horizon: f64,
    rng: &mut SimRng,
) -> (Vec<f64>, Vec<usize>) {
    let table = JumpTable::new(l);
    let mut times = vec![0.0];
    let mut states = vec![initial];
    let mut t = 0.0;
    let mut x = initial;
    loop {
        let q = table.exit_rate(x);
        if q <= 0.0 {
            break;
        }
        t += Exp::new(q).expect("positive rate").sample(rng);
        if t > horizon {
            break;
        }
        x = table.next_state(x, rng);
        times.push(t);
        states.push(x);
    }
    (times, states)
}
