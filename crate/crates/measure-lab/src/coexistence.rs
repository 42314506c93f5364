//! Phase-coexistence diagnostics for Glauber–Ising dynamics on a finite torus.
//!
//! These are finite-horizon metastability surrogates: a time average above
//! `m*` stands in for the tail event on the magnetization, and a vanishing
//! escape frequency of the subsampled chain stands in for absorption.

use process_sim::{
    exp_subsample_replica, simulate_replica, ExpSubsampleSpec, ProcessSpec, SpinInit,
    SubsampleSource,
};
use serde::{Deserialize, Serialize};

use crate::binning::{Axis, Binning};
use crate::empirical::{stationary_occupation, tv_distance};
use crate::error::{domain, MeasureError, Result};

pub const DEFAULT_M_STAR: f64 = 0.5;
/// Bins of the magnetization histograms on `[-1, 1]`.
pub const MAGNETIZATION_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoexistenceConfig {
    pub side: usize,
    pub betas: Vec<f64>,
    /// In sweeps (one expected flip attempt per site per unit time).
    pub horizon: f64,
    #[serde(default = "default_m_star")]
    pub m_star: f64,
    pub seeds: Vec<u64>,
}

fn default_m_star() -> f64 {
    DEFAULT_M_STAR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoexistenceReport {
    pub beta: f64,
    pub seed: u64,
    pub side: usize,
    pub horizon: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    pub separated: bool,
    pub tv_distance: f64,
    pub m_star: f64,
}

fn check_m_star(m_star: f64) -> Result<()> {
    if !(m_star > 0.0 && m_star < 1.0) {
        return domain(format!("m* must lie in (0, 1), got {m_star}"));
    }
    Ok(())
}

fn glauber(side: usize, beta: f64, initial: SpinInit) -> ProcessSpec {
    ProcessSpec::GlauberIsing {
        side,
        beta,
        initial,
    }
}

pub fn magnetization_binning() -> Binning {
    Binning::Grid {
        axes: vec![Axis {
            coord: 0,
            lo: -1.0,
            hi: 1.0,
            bins: MAGNETIZATION_BINS,
        }],
    }
}

/// One report per `(β, seed)`, in that order. The all-plus run uses replica
/// 0 of the seed and the all-minus run replica 1.
pub fn coexistence_scan(config: &CoexistenceConfig) -> Result<Vec<CoexistenceReport>> {
    check_m_star(config.m_star)?;
    if config.betas.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return domain("betas must be finite and nonnegative");
    }
    if config.seeds.is_empty() {
        return domain("at least one seed is required");
    }
    if !(config.horizon >= 2.0) {
        return domain(format!(
            "horizon {} leaves less than one sweep after discarding the first half",
            config.horizon
        ));
    }
    let jobs: Vec<(f64, u64)> = config
        .betas
        .iter()
        .flat_map(|&b| config.seeds.iter().map(move |&s| (b, s)))
        .collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(beta, seed)| scope.spawn(move || scan_one(config, beta, seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect()
    })
}

fn scan_one(config: &CoexistenceConfig, beta: f64, seed: u64) -> Result<CoexistenceReport> {
    let bins = magnetization_binning();
    let mut mean = [0.0; 2];
    let mut hist = Vec::with_capacity(2);
    for (r, init) in [SpinInit::AllPlus, SpinInit::AllMinus].into_iter().enumerate() {
        let spec = glauber(config.side, beta, init);
        let path = simulate_replica(&spec, config.horizon, seed, r as u64)?;
        let from = config.horizon / 2.0;
        let mut acc = 0.0;
        for i in path.index_at(from)..path.len() {
            acc += path.magnetization(i).expect("spins") * path.holding_time(i, from, path.horizon);
        }
        mean[r] = acc / (path.horizon - from);
        hist.push(stationary_occupation(&path, &bins)?);
    }
    Ok(CoexistenceReport {
        beta,
        seed,
        side: config.side,
        horizon: config.horizon,
        m_plus: mean[0],
        m_minus: mean[1],
        separated: mean[0] >= config.m_star && mean[1] <= -config.m_star,
        tv_distance: tv_distance(&hist[0], &hist[1])?,
        m_star: config.m_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeRow {
    pub seed: u64,
    pub start: Phase,
    /// Fraction of `Y_1..Y_n` in the opposite set `{±m ≤ −m*}`.
    pub opposite_fraction: f64,
    /// First subsample index (1-based) in the opposite set.
    pub first_exit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingDiagnostic {
    pub beta: f64,
    pub side: usize,
    pub alpha: f64,
    pub m_star: f64,
    pub n_subsamples: usize,
    pub rows: Vec<EscapeRow>,
    /// Mean of `opposite_fraction` over all rows.
    pub escape_frequency: f64,
    /// Fraction of rows that reached the opposite set at all.
    pub escaped_runs: f64,
}

/// Subsamples Glauber dynamics at Exp(α) times from the all-plus and
/// all-minus configurations (replicas 0 and 1 of each seed) and records how
/// often the chain is seen in the opposite phase.
pub fn absorbing_diagnostic(
    spec: &ProcessSpec,
    alpha: f64,
    m_star: f64,
    n_subsamples: usize,
    seeds: &[u64],
) -> Result<AbsorbingDiagnostic> {
    let ProcessSpec::GlauberIsing { side, beta, .. } = *spec else {
        return domain(format!("absorbing diagnostic applies to glauber-ising, got {}", spec.kind()));
    };
    check_m_star(m_star)?;
    if seeds.is_empty() {
        return domain("at least one seed is required");
    }
    let sub = ExpSubsampleSpec::new(alpha, n_subsamples).map_err(MeasureError::from)?;
    let mut rows = Vec::with_capacity(2 * seeds.len());
    for &seed in seeds {
        for (r, (init, phase, sign)) in [
            (SpinInit::AllPlus, Phase::Plus, 1.0),
            (SpinInit::AllMinus, Phase::Minus, -1.0),
        ]
        .into_iter()
        .enumerate()
        {
            let start = glauber(side, beta, init);
            let ys = exp_subsample_replica(SubsampleSource::Spec(&start), &sub, seed, r as u64)?;
            let opposite: Vec<bool> = ys
                .iter()
                .map(|y| sign * y.magnetization().expect("spins") <= -m_star)
                .collect();
            rows.push(EscapeRow {
                seed,
                start: phase,
                opposite_fraction: opposite.iter().filter(|&&o| o).count() as f64 / ys.len() as f64,
                first_exit: opposite.iter().position(|&o| o).map(|k| k + 1),
            });
        }
    }
    let n = rows.len() as f64;
    Ok(AbsorbingDiagnostic {
        beta,
        side,
        alpha,
        m_star,
        n_subsamples,
        escape_frequency: rows.iter().map(|r| r.opposite_fraction).sum::<f64>() / n,
        escaped_runs: rows.iter().filter(|r| r.first_exit.is_some()).count() as f64 / n,
        rows,
    })
}
