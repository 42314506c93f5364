//! Occupation measures and empirical laws.

use std::io::Write;

use kernel_core::{DiscreteMeasure, StochasticKernel};
use process_sim::{SamplePath, Snapshot};
use serde::{Deserialize, Serialize};

use crate::binning::{observe, Binning};
use crate::error::{domain, Result};

/// What the raw masses were divided by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Normalizer {
    TotalTime { time: f64 },
    Count { count: usize },
    /// Built from an already normalized measure.
    Exact,
}

/// Binned probability measure. `weights` plus `overflow` sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub binning: Binning,
    pub weights: Vec<f64>,
    /// Mass that fell outside every bin.
    pub overflow: f64,
    pub normalizer: Normalizer,
}

/// Time-weighted histogram of the path over `[0, horizon]`.
pub fn occupation_measure(path: &SamplePath, binning: &Binning) -> Result<EmpiricalMeasure> {
    occupation_between(path, binning, 0.0, path.horizon)
}

/// Occupation measure over the second half of the horizon.
pub fn stationary_occupation(path: &SamplePath, binning: &Binning) -> Result<EmpiricalMeasure> {
    occupation_between(path, binning, path.horizon / 2.0, path.horizon)
}

pub fn occupation_between(
    path: &SamplePath,
    binning: &Binning,
    from: f64,
    to: f64,
) -> Result<EmpiricalMeasure> {
    if path.is_empty() {
        return domain("occupation measure of an empty path");
    }
    if !(from >= 0.0 && from < to && to <= path.horizon) {
        return domain(format!(
            "window [{from}, {to}] is not a nonempty part of [0, {}]",
            path.horizon
        ));
    }
    let mut raw = vec![0.0; binning.len()];
    let mut overflow = 0.0;
    let mut total = 0.0;
    let last = path.index_at(to);
    for i in path.index_at(from)..=last {
        let dt = path.holding_time(i, from, to);
        if dt == 0.0 {
            continue;
        }
        match binning.index_of(observe(path, i))? {
            Some(k) => raw[k] += dt,
            None => overflow += dt,
        }
        total += dt;
    }
    Ok(EmpiricalMeasure {
        binning: binning.clone(),
        weights: raw.iter().map(|w| w / total).collect(),
        overflow: overflow / total,
        normalizer: Normalizer::TotalTime { time: to - from },
    })
}

impl EmpiricalMeasure {
    /// Empirical law of a sample, one unit of mass per snapshot.
    pub fn from_samples(samples: &[Snapshot], binning: &Binning) -> Result<Self> {
        if samples.is_empty() {
            return domain("empirical law of an empty sample");
        }
        let mut counts = vec![0usize; binning.len()];
        let mut overflow = 0usize;
        for s in samples {
            match binning.index_of_snapshot(s)? {
                Some(k) => counts[k] += 1,
                None => overflow += 1,
            }
        }
        let n = samples.len() as f64;
        Ok(Self {
            binning: binning.clone(),
            weights: counts.iter().map(|&c| c as f64 / n).collect(),
            overflow: overflow as f64 / n,
            normalizer: Normalizer::Count { count: samples.len() },
        })
    }

    pub fn from_discrete(mu: &DiscreteMeasure) -> Result<Self> {
        if !mu.is_normalized() {
            return domain("only probability measures can be wrapped");
        }
        Ok(Self {
            binning: Binning::identity(mu.weights().len())?,
            weights: mu.weights().to_vec(),
            overflow: 0.0,
            normalizer: Normalizer::Exact,
        })
    }

    /// Binned masses plus overflow; 1 up to rounding.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.overflow
    }

    pub fn to_discrete(&self) -> Result<DiscreteMeasure> {
        if !matches!(self.binning, Binning::Identity { .. }) || self.overflow > 0.0 {
            return domain("only identity-binned measures without overflow are state measures");
        }
        Ok(DiscreteMeasure::new(self.weights.clone())?)
    }

    /// `bin-center, mass` rows (one centre column per axis).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dim = self.binning.center(0).len();
        let mut header: Vec<String> = match &self.binning {
            Binning::Identity { .. } => vec!["state".into()],
            Binning::Grid { .. } => (0..dim).map(|k| format!("center{k}")).collect(),
        };
        header.push("mass".into());
        w.write_record(&header)?;
        for (i, m) in self.weights.iter().enumerate() {
            let mut row: Vec<String> = self.binning.center(i).iter().map(f64::to_string).collect();
            row.push(m.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `½ Σ |a_i − b_i|`, overflow counted as one more bin.
pub fn tv_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<f64> {
    if a.binning != b.binning {
        return domain("total variation needs identical binnings");
    }
    let s: f64 = a.weights.iter().zip(&b.weights).map(|(x, y)| (x - y).abs()).sum();
    Ok((0.5 * (s + (a.overflow - b.overflow).abs())).min(1.0))
}

/// Mass outside the ball of each radius, using bin centres; overflow always
/// counts as outside.
pub fn tightness_profile(measure: &EmpiricalMeasure, radii: &[f64]) -> Result<Vec<f64>> {
    if !measure.binning.is_grid() {
        return domain("tightness is trivial on a finite state space");
    }
    if radii.iter().any(|r| !(*r >= 0.0)) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return domain("radii must be nonnegative and strictly increasing");
    }
    let norms: Vec<f64> = (0..measure.weights.len())
        .map(|i| measure.binning.center(i).iter().map(|c| c * c).sum::<f64>().sqrt())
        .collect();
    Ok(radii
        .iter()
        .map(|&r| {
            measure.overflow
                + norms
                    .iter()
                    .zip(&measure.weights)
                    .filter(|(n, _)| **n > r)
                    .map(|(_, w)| w)
                    .sum::<f64>()
        })
        .collect())
}

/// `TV(μ̂K, μ̂)` for an identity-binned measure on the kernel's state space.
pub fn invariance_residual(measure: &EmpiricalMeasure, kernel: &StochasticKernel) -> Result<f64> {
    let Binning::Identity { n } = measure.binning else {
        return domain("invariance residual needs identity binning");
    };
    if n != kernel.n() {
        return domain(format!("measure has {n} states, kernel has {}", kernel.n()));
    }
    if measure.overflow > 0.0 {
        return domain("measure puts mass outside the state space");
    }
    let mu = &measure.weights;
    let p = kernel.matrix();
    let s: f64 = (0..n)
        .map(|j| ((0..n).map(|i| mu[i] * p[(i, j)]).sum::<f64>() - mu[j]).abs())
        .sum();
    Ok(0.5 * s)
}
