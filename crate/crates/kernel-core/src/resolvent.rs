use nalgebra::DMatrix;

use crate::error::{domain, KernelError, Result};
use crate::kernel::{KernelLabel, StochasticKernel};
use crate::rate_matrix::RateMatrix;
use crate::semigroup::clean_rows;

/// Normalized resolvent `R_α = α(αI - L)^{-1}`, the law of the chain observed
/// at an independent Exp(α) time.
pub fn resolvent(l: &RateMatrix, alpha: f64) -> Result<StochasticKernel> {
    check_alpha(alpha)?;
    let n = l.n();
    let a = DMatrix::<f64>::identity(n, n) * alpha - l.matrix();
    let inv = a.lu().try_inverse().ok_or_else(|| {
        KernelError::Numerical(format!("αI - L is numerically singular for α = {alpha}"))
    })?;
    let r = clean_rows(inv * alpha);
    StochasticKernel::new(r, KernelLabel::Resolvent { alpha })
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return domain(format!("resolvent rate α must be finite and positive, got {alpha}"));
    }
    Ok(())
}
