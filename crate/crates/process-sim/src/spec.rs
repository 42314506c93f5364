//! Process descriptions, as read from experiment files.

use kernel_core::RateMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Drift fields for elliptic diffusions, applied componentwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Drift {
    /// `b(x) = 0`.
    Zero,
    /// Ornstein–Uhlenbeck restoring force `b(x) = -θx`.
    Linear { theta: f64 },
    /// `b(x) = -k·sign(x)`, discontinuous at the origin (`sign(0) = 0`).
    Sign { strength: f64 },
}

impl Drift {
    pub fn component(&self, x: f64) -> f64 {
        match *self {
            Drift::Zero => 0.0,
            Drift::Linear { theta } => -theta * x,
            Drift::Sign { strength } => {
                if x > 0.0 {
                    -strength
                } else if x < 0.0 {
                    strength
                } else {
                    0.0
                }
            }
        }
    }
}

/// Coercive potentials for Langevin dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Potential {
    /// `U(x) = k|x|²/2`.
    Quadratic { k: f64 },
    /// Double well `U(x) = a|x|⁴/4 - b|x|²/2`.
    Quartic { a: f64, b: f64 },
}

impl Potential {
    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match *self {
            Potential::Quadratic { k } => 0.5 * k * r2,
            Potential::Quartic { a, b } => 0.25 * a * r2 * r2 - 0.5 * b * r2,
        }
    }

    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let factor = match *self {
            Potential::Quadratic { k } => k,
            Potential::Quartic { a, b } => a * r2 - b,
        };
        for (o, v) in out.iter_mut().zip(x) {
            *o = factor * v;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinInit {
    AllPlus,
    AllMinus,
    /// Independent fair coin per site, drawn from the path stream.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProcessSpec {
    FiniteCtmc {
        generator: RateMatrix,
        initial: usize,
    },
    /// `dX = b(X)dt + σ dW` with diagonal constant `σ`, Euler–Maruyama step `step`.
    EllipticDiffusion {
        drift: Drift,
        sigma: Vec<f64>,
        /// Declared lower bound on the eigenvalues of `σσᵀ`.
        ellipticity: f64,
        step: f64,
        initial: Vec<f64>,
    },
    /// `dX = V dt`, `dV = -∇U(X)dt - γV dt + σ dW`; state is `(x, v)` flattened.
    Langevin {
        potential: Potential,
        gamma: f64,
        sigma: f64,
        step: f64,
        initial_x: Vec<f64>,
        initial_v: Vec<f64>,
    },
    /// Heat-bath Glauber dynamics on a `side × side` periodic square lattice.
    GlauberIsing {
        side: usize,
        beta: f64,
        initial: SpinInit,
    },
    /// Discrete-time chain on `[0, 1]` whose kernel factors through a map
    /// discontinuous at `discontinuity`; one step per unit of time.
    QuasiFellerDemo {
        #[serde(default = "half")]
        discontinuity: f64,
        initial: f64,
    },
}

fn half() -> f64 {
    0.5
}

impl ProcessSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ProcessSpec::FiniteCtmc { .. } => "finite-ctmc",
            ProcessSpec::EllipticDiffusion { .. } => "elliptic-diffusion",
            ProcessSpec::Langevin { .. } => "langevin",
            ProcessSpec::GlauberIsing { .. } => "glauber-ising",
            ProcessSpec::QuasiFellerDemo { .. } => "quasi-feller-demo",
        }
    }

    /// Canonical identifier: the compact JSON form of the spec.
    pub fn process_id(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::FiniteCtmc { generator, initial } => {
                if *initial >= generator.n() {
                    return invalid(format!(
                        "initial state {initial} out of range for {} states",
                        generator.n()
                    ));
                }
            }
            ProcessSpec::EllipticDiffusion {
                drift,
                sigma,
                ellipticity,
                step,
                initial,
            } => {
                positive("step", *step)?;
                positive("ellipticity", *ellipticity)?;
                if sigma.is_empty() || sigma.len() != initial.len() {
                    return invalid(format!(
                        "sigma has {} components, initial state has {}",
                        sigma.len(),
                        initial.len()
                    ));
                }
                let lambda_min = sigma.iter().map(|s| s * s).fold(f64::INFINITY, f64::min);
                if !(lambda_min >= *ellipticity) {
                    return invalid(format!(
                        "diffusion is not uniformly elliptic with bound {ellipticity}: min σ² = {lambda_min}"
                    ));
                }
                match drift {
                    Drift::Linear { theta: p } | Drift::Sign { strength: p } if !p.is_finite() => {
                        return invalid("drift parameter must be finite");
                    }
                    _ => {}
                }
                finite_vec("initial", initial)?;
            }
            ProcessSpec::Langevin {
                potential,
                gamma,
                sigma,
                step,
                initial_x,
                initial_v,
            } => {
                positive("gamma", *gamma)?;
                positive("step", *step)?;
                if !sigma.is_finite() || *sigma == 0.0 {
                    return invalid(format!("sigma must be finite and nonzero, got {sigma}"));
                }
                if initial_x.is_empty() || initial_x.len() != initial_v.len() {
                    return invalid("initial position and velocity must have equal, nonzero dimension");
                }
                match *potential {
                    Potential::Quadratic { k } => positive("k", k)?,
                    Potential::Quartic { a, b } => {
                        positive("a", a)?;
                        if !b.is_finite() {
                            return invalid("b must be finite");
                        }
                    }
                }
                finite_vec("initial_x", initial_x)?;
                finite_vec("initial_v", initial_v)?;
            }
            ProcessSpec::GlauberIsing { side, beta, .. } => {
                if *side < 2 {
                    return invalid(format!("lattice side must be at least 2, got {side}"));
                }
                if !beta.is_finite() || *beta < 0.0 {
                    return invalid(format!("beta must be finite and nonnegative, got {beta}"));
                }
            }
            ProcessSpec::QuasiFellerDemo {
                discontinuity,
                initial,
            } => {
                if !(*discontinuity > 0.0 && *discontinuity < 1.0) {
                    return invalid(format!("discontinuity must lie in (0, 1), got {discontinuity}"));
                }
                if !(0.0..=1.0).contains(initial) {
                    return invalid(format!("initial point {initial} outside [0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Drift vector of a continuous-state spec at `state`.
    pub fn drift_at(&self, state: &[f64]) -> Option<Vec<f64>> {
        match self {
            ProcessSpec::EllipticDiffusion { drift, .. } => {
                Some(state.iter().map(|&x| drift.component(x)).collect())
            }
            ProcessSpec::Langevin {
                potential, gamma, ..
            } => {
                let d = state.len() / 2;
                let (x, v) = state.split_at(d);
                let mut grad = vec![0.0; d];
                potential.gradient(x, &mut grad);
                let mut out = v.to_vec();
                out.extend(grad.iter().zip(v).map(|(g, vi)| -g - gamma * vi));
                Some(out)
            }
            _ => None,
        }
    }

    /// Diagonal of `σσᵀ` for continuous-state specs.
    pub fn diffusion_diag(&self) -> Option<Vec<f64>> {
        match self {
            ProcessSpec::EllipticDiffusion { sigma, .. } => {
                Some(sigma.iter().map(|s| s * s).collect())
            }
            ProcessSpec::Langevin {
                sigma, initial_x, ..
            } => {
                let d = initial_x.len();
                let mut a = vec![0.0; d];
                a.extend(std::iter::repeat_n(sigma * sigma, d));
                Some(a)
            }
            _ => None,
        }
    }

    /// Euler–Maruyama step size for diffusion kinds.
    pub fn step(&self) -> Option<f64> {
        match self {
            ProcessSpec::EllipticDiffusion { step, .. } | ProcessSpec::Langevin { step, .. } => {
                Some(*step)
            }
            _ => None,
        }
    }

    /// Initial condition of a continuous-state spec, flattened.
    pub fn initial_point(&self) -> Option<Vec<f64>> {
        match self {
            ProcessSpec::EllipticDiffusion { initial, .. } => Some(initial.clone()),
            ProcessSpec::Langevin {
                initial_x,
                initial_v,
                ..
            } => Some(initial_x.iter().chain(initial_v).copied().collect()),
            _ => None,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return invalid(format!("{name} must be finite and positive, got {v}"));
    }
    Ok(())
}

fn finite_vec(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return invalid(format!("{name} has non-finite components"));
    }
    Ok(())
}

/// Parameters of exponential-time subsampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSubsampleSpec {
    pub alpha: f64,
    pub count: usize,
}

impl ExpSubsampleSpec {
    pub fn new(alpha: f64, count: usize) -> Result<Self> {
        let s = Self { alpha, count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        positive("alpha", self.alpha)?;
        if self.count == 0 {
            return invalid("subsample count must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_tags() {
        let spec: ProcessSpec = serde_json::from_str(
            r#"{"kind":"langevin","potential":{"type":"quadratic","k":1.0},
                "gamma":1.0,"sigma":1.4142135623730951,"step":0.01,
                "initial_x":[0.0],"initial_v":[0.0]}"#,
        )
        .unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.kind(), "langevin");
        let back: ProcessSpec = serde_json::from_str(&spec.process_id()).unwrap();
        assert_eq!(back, spec);

        let demo: ProcessSpec =
            serde_json::from_str(r#"{"kind":"quasi-feller-demo","initial":0.2}"#).unwrap();
        assert_eq!(
            demo,
            ProcessSpec::QuasiFellerDemo {
                discontinuity: 0.5,
                initial: 0.2
            }
        );
    }

    #[test]
    fn validation_failures() {
        let lang = |gamma: f64, sigma: f64| ProcessSpec::Langevin {
            potential: Potential::Quadratic { k: 1.0 },
            gamma,
            sigma,
            step: 0.01,
            initial_x: vec![0.0],
            initial_v: vec![0.0],
        };
        assert!(lang(1.0, 1.0).validate().is_ok());
        assert!(lang(0.0, 1.0).validate().is_err());
        assert!(lang(1.0, 0.0).validate().is_err());
        let ising = |beta: f64, side: usize| ProcessSpec::GlauberIsing {
            side,
            beta,
            initial: SpinInit::AllPlus,
        };
        assert!(ising(-0.1, 4).validate().is_err());
        assert!(ising(0.5, 1).validate().is_err());
        let diff = ProcessSpec::EllipticDiffusion {
            drift: Drift::Zero,
            sigma: vec![0.1],
            ellipticity: 1.0,
            step: 0.01,
            initial: vec![0.0],
        };
        assert!(diff.validate().is_err());
        let ctmc = ProcessSpec::FiniteCtmc {
            generator: RateMatrix::zero(2).unwrap(),
            initial: 2,
        };
        assert!(ctmc.validate().is_err());
        assert!(ExpSubsampleSpec::new(0.0, 3).is_err());
        assert!(ExpSubsampleSpec::new(1.0, 0).is_err());
    }

    #[test]
    fn langevin_drift_layout() {
        let spec = ProcessSpec::Langevin {
            potential: Potential::Quadratic { k: 2.0 },
            gamma: 0.5,
            sigma: 1.0,
            step: 0.01,
            initial_x: vec![0.0],
            initial_v: vec![0.0],
        };
        assert_eq!(spec.drift_at(&[1.0, 3.0]).unwrap(), vec![3.0, -2.0 - 1.5]);
        assert_eq!(spec.diffusion_diag().unwrap(), vec![0.0, 1.0]);
    }
}
