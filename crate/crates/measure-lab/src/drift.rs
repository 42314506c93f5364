//! Numerical check of the drift condition `LV ≤ −cV + C` for diffusions.
//!
//! `LV(x) = b(x)·∇V(x) + ½ Σ a_ii ∂_ii V(x)` for the diagonal diffusion
//! matrices used by the simulators. Derivatives of `V` are analytic for
//! [`LyapunovFunction`] and central finite differences for closures; the
//! generator can instead be estimated by short Euler–Maruyama steps.
//!
//! Fitting rule: the asymptotic rate `ρ` is the smallest `−LV/V` over the
//! outer shell of the sample box (the outer 10% towards every face), and
//! `c = ρ/2`, leaving the other half of the decay to absorb the constant.
//! `C` is the smallest constant violated by at most the outlier budget among
//! points outside the compact radius.

use process_sim::rng::path_rng;
use process_sim::{Potential, ProcessSpec};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

const SHELL_FRACTION: f64 = 0.9;

pub trait Lyapunov {
    fn value(&self, x: &[f64]) -> f64;

    /// Gradient and diagonal of the Hessian.
    fn derivatives(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let v0 = self.value(x);
        let mut y = x.to_vec();
        let mut grad = vec![0.0; x.len()];
        let mut hess = vec![0.0; x.len()];
        for i in 0..x.len() {
            let eta = 1e-3 * x[i].abs().max(1.0);
            y[i] = x[i] + eta;
            let up = self.value(&y);
            y[i] = x[i] - eta;
            let down = self.value(&y);
            y[i] = x[i];
            grad[i] = (up - down) / (2.0 * eta);
            hess[i] = (up - 2.0 * v0 + down) / (eta * eta);
        }
        (grad, hess)
    }
}

impl<F: Fn(&[f64]) -> f64> Lyapunov for F {
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Closed-form Lyapunov candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum LyapunovFunction {
    /// `1 + |x|²`.
    Quadratic,
    /// `1 + U(x) + |v|²/2 + ε x·v` on the Langevin state `(x, v)`; `ε = 0`
    /// is the shifted Hamiltonian.
    Energy { potential: Potential, cross: f64 },
}

impl Lyapunov for LyapunovFunction {
    fn value(&self, z: &[f64]) -> f64 {
        match self {
            LyapunovFunction::Quadratic => 1.0 + z.iter().map(|v| v * v).sum::<f64>(),
            LyapunovFunction::Energy { potential, cross } => {
                let (x, v) = z.split_at(z.len() / 2);
                let kinetic: f64 = v.iter().map(|a| a * a).sum::<f64>() / 2.0;
                let xv: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
                1.0 + potential.value(x) + kinetic + cross * xv
            }
        }
    }

    fn derivatives(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match self {
            LyapunovFunction::Quadratic => (z.iter().map(|v| 2.0 * v).collect(), vec![2.0; z.len()]),
            LyapunovFunction::Energy { potential, cross } => {
                let d = z.len() / 2;
                let (x, v) = z.split_at(d);
                let mut grad_u = vec![0.0; d];
                potential.gradient(x, &mut grad_u);
                let r2: f64 = x.iter().map(|a| a * a).sum();
                let mut grad = Vec::with_capacity(2 * d);
                grad.extend((0..d).map(|i| grad_u[i] + cross * v[i]));
                grad.extend((0..d).map(|i| v[i] + cross * x[i]));
                let mut hess: Vec<f64> = x
                    .iter()
                    .map(|xi| match *potential {
                        Potential::Quadratic { k } => k,
                        Potential::Quartic { a, b } => a * (r2 + 2.0 * xi * xi) - b,
                    })
                    .collect();
                hess.extend(std::iter::repeat_n(1.0, d));
                (grad, hess)
            }
        }
    }
}

impl LyapunovFunction {
    /// Energy function for a Langevin spec.
    pub fn energy_for(spec: &ProcessSpec, cross: f64) -> Result<Self> {
        match spec {
            ProcessSpec::Langevin { potential, .. } => Ok(LyapunovFunction::Energy {
                potential: potential.clone(),
                cross,
            }),
            _ => domain("energy Lyapunov functions apply to Langevin dynamics"),
        }
    }
}

/// Tensor grid of sample points; `points_per_axis` includes both endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points_per_axis: usize,
}

impl SampleBox {
    pub fn cube(dim: usize, half_width: f64, points_per_axis: usize) -> Self {
        Self {
            lo: vec![-half_width; dim],
            hi: vec![half_width; dim],
            points_per_axis,
        }
    }

    /// Largest normalized distance from the box centre over the axes: 0 at
    /// the centre, 1 on a face.
    fn depth(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| (2.0 * x - l - h).abs() / (h - l))
            .fold(0.0, f64::max)
    }

    pub fn points(&self) -> Result<Vec<Vec<f64>>> {
        let dim = self.lo.len();
        if dim == 0 || self.hi.len() != dim || self.points_per_axis < 2 {
            return domain("sample box needs matching nonempty bounds and at least 2 points per axis");
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| !(l < h)) {
            return domain("sample box needs lo < hi on every axis");
        }
        let m = self.points_per_axis;
        let total = m.checked_pow(dim as u32).filter(|&t| t <= 10_000_000);
        let Some(total) = total else {
            return domain("sample box has too many points");
        };
        Ok((0..total)
            .map(|mut idx| {
                let mut p = vec![0.0; dim];
                for k in (0..dim).rev() {
                    let j = idx % m;
                    idx /= m;
                    p[k] = self.lo[k] + (self.hi[k] - self.lo[k]) * j as f64 / (m - 1) as f64;
                }
                p
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GeneratorEstimate {
    /// From the drift, the diffusion matrix and the derivatives of `V`.
    Analytic,
    /// `(E_x V(X_h) − V(x)) / h` over one Euler–Maruyama step, with
    /// antithetic noise pairs.
    MonteCarlo { h: f64, replicas: usize, seed: u64 },
}

impl GeneratorEstimate {
    pub fn monte_carlo_default(seed: u64) -> Self {
        GeneratorEstimate::MonteCarlo {
            h: 1e-3,
            replicas: 1000,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftOptions {
    pub compact_radius: f64,
    /// Largest tolerated fraction of sample points violating the bound.
    pub outlier_budget: f64,
    pub generator: GeneratorEstimate,
}

impl Default for DriftOptions {
    fn default() -> Self {
        Self {
            compact_radius: 0.0,
            outlier_budget: 0.0,
            generator: GeneratorEstimate::Analytic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub compact_radius: f64,
    pub violations: usize,
    /// Sample points outside the compact radius.
    pub samples: usize,
    pub outlier_budget: f64,
    pub passing: bool,
}

/// `LV(x)` for a diffusion spec.
pub fn generator_value(
    spec: &ProcessSpec,
    v: &dyn Lyapunov,
    x: &[f64],
    how: &GeneratorEstimate,
) -> Result<f64> {
    let (Some(b), Some(a)) = (spec.drift_at(x), spec.diffusion_diag()) else {
        return domain(format!("drift checks need a diffusion, got {}", spec.kind()));
    };
    if b.len() != x.len() {
        return domain(format!("point has dimension {}, process has {}", x.len(), b.len()));
    }
    Ok(match *how {
        GeneratorEstimate::Analytic => {
            let (grad, hess) = v.derivatives(x);
            (0..x.len()).map(|i| b[i] * grad[i] + 0.5 * a[i] * hess[i]).sum()
        }
        GeneratorEstimate::MonteCarlo { h, replicas, seed } => {
            if !(h > 0.0) || replicas < 2 {
                return domain("Monte Carlo generator needs h > 0 and at least 2 replicas");
            }
            let mut rng = path_rng(seed, 0);
            let pairs = replicas / 2;
            let mean: Vec<f64> = (0..x.len()).map(|i| x[i] + b[i] * h).collect();
            let mut up = mean.clone();
            let mut down = mean.clone();
            let mut acc = 0.0;
            for _ in 0..pairs {
                for i in 0..x.len() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let s = (a[i] * h).sqrt() * z;
                    up[i] = mean[i] + s;
                    down[i] = mean[i] - s;
                }
                acc += 0.5 * (v.value(&up) + v.value(&down));
            }
            (acc / pairs as f64 - v.value(x)) / h
        }
    })
}

pub fn lyapunov_drift_check(
    spec: &ProcessSpec,
    v: &dyn Lyapunov,
    sample_box: &SampleBox,
    options: &DriftOptions,
) -> Result<DriftReport> {
    spec.validate()?;
    if !(0.0..1.0).contains(&options.outlier_budget) {
        return domain("outlier budget must lie in [0, 1)");
    }
    if !(options.compact_radius >= 0.0) {
        return domain("compact radius must be nonnegative");
    }
    let points = sample_box.points()?;
    let mut evals = Vec::with_capacity(points.len());
    for p in &points {
        let val = v.value(p);
        if !(val >= 1.0) {
            return domain(format!("V = {val} < 1 at {p:?}"));
        }
        let lv = generator_value(spec, v, p, &options.generator)?;
        let norm = p.iter().map(|a| a * a).sum::<f64>().sqrt();
        evals.push((norm, val, lv, sample_box.depth(p) >= SHELL_FRACTION));
    }
    let rho = evals
        .iter()
        .filter(|e| e.3)
        .map(|&(_, val, lv, _)| -lv / val)
        .fold(f64::INFINITY, f64::min);
    let c = rho / 2.0;

    let mut slack: Vec<f64> = evals
        .iter()
        .filter(|e| e.0 >= options.compact_radius)
        .map(|&(_, val, lv, _)| lv + c * val)
        .collect();
    if slack.is_empty() {
        return domain("no sample points outside the compact radius");
    }
    slack.sort_by(|a, b| b.total_cmp(a));
    let allowed = (options.outlier_budget * slack.len() as f64).floor() as usize;
    let big_c = slack[allowed.min(slack.len() - 1)];
    let violations = slack.iter().filter(|&&s| s > big_c).count();
    Ok(DriftReport {
        c,
        big_c,
        compact_radius: options.compact_radius,
        violations,
        samples: slack.len(),
        outlier_budget: options.outlier_budget,
        passing: c > 0.0 && violations as f64 <= options.outlier_budget * slack.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_points_cover_corners() {
        let pts = SampleBox::cube(2, 1.0, 3).points().unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![-1.0, -1.0]);
        assert_eq!(pts[5], vec![0.0, 1.0]);
        assert!(SampleBox::cube(1, 1.0, 1).points().is_err());
    }

    #[test]
    fn finite_differences_match_closed_form() {
        let e = LyapunovFunction::Energy {
            potential: Potential::Quartic { a: 1.0, b: 2.0 },
            cross: 0.3,
        };
        let z = [0.7, -1.2, 0.4, 2.0];
        let closure = |p: &[f64]| e.value(p);
        let (g1, h1) = e.derivatives(&z);
        let (g2, h2) = Lyapunov::derivatives(&closure, &z);
        for i in 0..4 {
            assert!((g1[i] - g2[i]).abs() < 1e-5);
            assert!((h1[i] - h2[i]).abs() < 1e-4);
        }
    }
}
