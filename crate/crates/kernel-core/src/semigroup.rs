//! Transition semigroup `P_t = exp(tL)` by uniformization.
//!
//! With `Λ = max_x -L(x,x)` and the jump chain `P = I + L/Λ`,
//!
//! ```text
//! exp(tL) = Σ_k e^{-Λt} (Λt)^k / k! · P^k
//! ```
//!
//! Every term is a nonnegative matrix, so the truncated sum stays entrywise
//! nonnegative. The series is cut once the remaining Poisson tail mass drops
//! below [`POISSON_TAIL`]. Large `Λt` is split into `2^k` equal sub-steps whose
//! kernels are composed by repeated squaring.

use nalgebra::DMatrix;

use crate::error::{domain, KernelError, Result};
use crate::kernel::{KernelLabel, StochasticKernel};
use crate::rate_matrix::RateMatrix;

pub const POISSON_TAIL: f64 = 1e-14;
/// Hard cap on the number of uniformization terms for a single request.
pub const MAX_TERMS: usize = 1_000_000;
/// Sub-step Poisson mean above which the step is halved.
const SUBSTEP_MEAN: f64 = 32.0;

/// Terms needed for the Poisson(`mean`) tail to drop below [`POISSON_TAIL`].
pub fn required_terms(mean: f64) -> usize {
    if mean <= SUBSTEP_MEAN {
        poisson_cutoff(mean).0
    } else {
        // normal approximation with a skew allowance; z(1e-14) ≈ 7.65
        (mean + 8.5 * mean.sqrt() + 10.0).ceil() as usize
    }
}

/// Smallest `K` with `P(Poisson(mean) > K) < POISSON_TAIL`, plus the
/// weights `w_0..=w_K`.
fn poisson_cutoff(mean: f64) -> (usize, Vec<f64>) {
    let mut w = vec![(-mean).exp()];
    let mut cum = w[0];
    let mut k = 0usize;
    while 1.0 - cum >= POISSON_TAIL && k < MAX_TERMS {
        k += 1;
        let next = w[k - 1] * mean / k as f64;
        cum += next;
        w.push(next);
        if next == 0.0 && (k as f64) > mean {
            break;
        }
    }
    (k, w)
}

pub fn semigroup(l: &RateMatrix, t: f64) -> Result<StochasticKernel> {
    if !t.is_finite() || t < 0.0 {
        return domain(format!("time must be finite and nonnegative, got {t}"));
    }
    let n = l.n();
    let lambda = l.max_exit_rate();
    let label = KernelLabel::Semigroup { t };
    if t == 0.0 || lambda == 0.0 {
        return Ok(StochasticKernel::identity(n, label));
    }
    let mean = lambda * t;
    let needed = required_terms(mean);
    if needed > MAX_TERMS {
        return Err(KernelError::Numerical(format!(
            "uniformization needs about {needed} terms for Λt = {mean:e} \
             (Λ = {lambda:e}, t = {t:e}); hard cap is {MAX_TERMS}"
        )));
    }

    let mut halvings = 0u32;
    let mut sub_mean = mean;
    while sub_mean > SUBSTEP_MEAN {
        sub_mean /= 2.0;
        halvings += 1;
    }

    let jump = jump_chain(l, lambda);
    let mut p = uniformized(&jump, sub_mean);
    for _ in 0..halvings {
        p = &p * &p;
    }
    StochasticKernel::new(clean_rows(p), label)
}

/// `P = I + L/Λ`.
fn jump_chain(l: &RateMatrix, lambda: f64) -> DMatrix<f64> {
    let n = l.n();
    let mut p = l.matrix() / lambda;
    for i in 0..n {
        // exact zero for the state(s) attaining Λ
        p[(i, i)] = (1.0 - l.exit_rate(i) / lambda).max(0.0);
    }
    p
}

fn uniformized(jump: &DMatrix<f64>, mean: f64) -> DMatrix<f64> {
    let n = jump.nrows();
    let (_, weights) = poisson_cutoff(mean);
    let total: f64 = weights.iter().sum();
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut acc = &power * weights[0];
    for &w in &weights[1..] {
        power = &power * jump;
        acc += &power * w;
    }
    acc / total
}

/// Removes rounding residue: clamps tiny negatives and renormalizes rows.
pub(crate) fn clean_rows(mut p: DMatrix<f64>) -> DMatrix<f64> {
    for mut row in p.row_iter_mut() {
        for v in row.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = row.iter().sum();
        if sum > 0.0 {
            row /= sum;
        }
    }
    p
}
