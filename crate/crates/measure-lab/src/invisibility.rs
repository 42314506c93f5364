//! Cesàro occupation of shrinking neighbourhoods of the discontinuity set of
//! the quasi-Feller demo chain.

use process_sim::{simulate, ProcessSpec, SamplePath};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Batches per path for the batch-means standard error.
pub const BATCHES: usize = 20;

pub enum InvisibilitySource<'a> {
    Spec { spec: &'a ProcessSpec, seed: u64 },
    Paths(&'a [SamplePath]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvisibilityReport {
    pub dh: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Fraction of the first `cesaro_n` states within `δ` of the set, averaged
    /// over paths.
    pub masses: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub cesaro_n: usize,
    pub paths: usize,
}

impl InvisibilityReport {
    /// Masses non-increasing in `δ` up to `k` combined standard errors.
    pub fn monotone_within(&self, k: f64) -> bool {
        (1..self.masses.len()).all(|i| {
            let se = (self.std_errors[i].powi(2) + self.std_errors[i - 1].powi(2)).sqrt();
            self.masses[i] <= self.masses[i - 1] + k * se
        })
    }
}

pub fn invisibility_diagnostic(
    source: InvisibilitySource<'_>,
    dh: &[f64],
    deltas: &[f64],
    cesaro_n: usize,
) -> Result<InvisibilityReport> {
    if deltas.is_empty() {
        return domain("no radii given");
    }
    if deltas.iter().any(|d| !(*d > 0.0)) || deltas.windows(2).any(|w| w[0] <= w[1]) {
        return domain("radii must be positive and strictly decreasing");
    }
    if cesaro_n < BATCHES {
        return domain(format!("Cesàro length must be at least {BATCHES}"));
    }
    let owned;
    let paths: &[SamplePath] = match source {
        InvisibilitySource::Spec { spec, seed } => {
            owned = [simulate(spec, cesaro_n as f64, seed)?];
            &owned
        }
        InvisibilitySource::Paths(p) => p,
    };
    if paths.is_empty() {
        return domain("no paths given");
    }
    for p in paths {
        if !matches!(p.spec, ProcessSpec::QuasiFellerDemo { .. }) {
            return domain(format!("invisibility applies to the quasi-feller demo, got {}", p.spec.kind()));
        }
        if p.len() < cesaro_n {
            return domain(format!("path has {} steps, need {cesaro_n}", p.len()));
        }
    }

    let batch = cesaro_n / BATCHES;
    let mut masses = Vec::with_capacity(deltas.len());
    let mut std_errors = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let near = |x: f64| dh.iter().any(|p| (x - p).abs() < delta);
        let mut batch_means = Vec::with_capacity(BATCHES * paths.len());
        let mut hits_total = 0usize;
        for p in paths {
            let mut hits = 0usize;
            for b in 0..BATCHES {
                let end = if b + 1 == BATCHES { cesaro_n } else { (b + 1) * batch };
                let h = (b * batch..end).filter(|&i| near(p.point(i).unwrap()[0])).count();
                hits += h;
                batch_means.push(h as f64 / (end - b * batch) as f64);
            }
            hits_total += hits;
        }
        let mean = hits_total as f64 / (cesaro_n * paths.len()) as f64;
        let k = batch_means.len() as f64;
        let bm: f64 = batch_means.iter().sum::<f64>() / k;
        let var = batch_means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (k - 1.0);
        masses.push(mean);
        std_errors.push((var / k).sqrt());
    }
    Ok(InvisibilityReport {
        dh: dh.to_vec(),
        deltas: deltas.to_vec(),
        masses,
        std_errors,
        cesaro_n,
        paths: paths.len(),
    })
}
