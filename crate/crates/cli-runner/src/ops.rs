//! Operation catalogue and dispatch to the engines.

use kernel_core::invariant::{check_invariance_on_grid, null_space_dim, DEFAULT_INVARIANCE_TOL, DEFAULT_TIME_GRID};
use kernel_core::{
    absorbing_decomposition, cesaro_residual, communicating_classes, domination_certificate,
    invariant_measures, resolvent, semigroup, skeleton_cesaro, uniqueness_verdict, DiscreteMeasure,
    RateMatrix,
};
use measure_lab::binning::DEFAULT_BINS;
use measure_lab::{
    absorbing_diagnostic, coexistence_scan, invariance_residual, invisibility_diagnostic,
    lyapunov_drift_check, occupation_measure, stationary_occupation, Binning, CoexistenceConfig,
    DriftOptions, EmpiricalMeasure, GeneratorEstimate, InvisibilitySource, LyapunovFunction,
    SampleBox,
};
use process_sim::{exp_subsample, simulate, ExpSubsampleSpec, ProcessSpec, SubsampleSource};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{requirement_problems, ExperimentConfig};

fn one() -> f64 {
    1.0
}

fn default_times() -> Vec<f64> {
    DEFAULT_TIME_GRID.to_vec()
}

fn default_tol() -> f64 {
    DEFAULT_INVARIANCE_TOL
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_m_star() -> f64 {
    measure_lab::coexistence::DEFAULT_M_STAR
}

fn default_dh() -> Vec<f64> {
    vec![0.5]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LyapunovChoice {
    Quadratic,
    /// Energy of the configured Langevin process plus `cross · x·v`.
    Energy {
        #[serde(default)]
        cross: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "op",
    rename_all = "snake_case",
    rename_all_fields = "camelCase",
    deny_unknown_fields
)]
pub enum OpKind {
    Semigroup {
        t: f64,
    },
    Resolvent {
        alpha: f64,
    },
    CommunicatingClasses,
    InvariantMeasures,
    InvarianceCheck {
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default = "default_times")]
        times: Vec<f64>,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    DominationCertificate {
        #[serde(default = "one")]
        alpha: f64,
        /// Reference weights; the counting measure when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<Vec<f64>>,
    },
    UniquenessVerdict {
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<Vec<f64>>,
    },
    AbsorbingDecomposition {
        #[serde(default = "one")]
        alpha: f64,
    },
    SkeletonCesaro {
        s: f64,
        steps: usize,
        #[serde(default)]
        initial: usize,
    },
    Simulate {
        horizon: f64,
    },
    ExpSubsample {
        alpha: f64,
        count: usize,
    },
    OccupationMeasure {
        horizon: f64,
        #[serde(default)]
        burn_in: bool,
        /// Bins per axis for grid binning.
        #[serde(default = "default_bins")]
        bins: usize,
    },
    InvarianceResidual {
        horizon: f64,
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default)]
        burn_in: bool,
    },
    LyapunovDriftCheck {
        lyapunov: LyapunovChoice,
        sample_box: SampleBox,
        #[serde(default)]
        compact_radius: f64,
        #[serde(default)]
        outlier_budget: f64,
        #[serde(default = "analytic")]
        generator: GeneratorEstimate,
    },
    InvisibilityDiagnostic {
        #[serde(default = "default_dh")]
        dh: Vec<f64>,
        deltas: Vec<f64>,
        cesaro_n: usize,
    },
    CoexistenceScan {
        side: usize,
        betas: Vec<f64>,
        horizon: f64,
        #[serde(default = "default_m_star")]
        m_star: f64,
    },
    AbsorbingDiagnostic {
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default = "default_m_star")]
        m_star: f64,
        n_subsamples: usize,
    },
}

fn analytic() -> GeneratorEstimate {
    GeneratorEstimate::Analytic
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Requirement {
    Generator,
    Process { seeds: bool },
    /// Self-contained Monte Carlo operation.
    Standalone { seeds: bool },
    /// Generator and finite-ctmc process.
    Both,
    /// Diffusion process, no seeds.
    Box,
}

/// A file produced by an operation, named relative to the output directory.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn json_artifact(name: String, value: &impl Serialize) -> Artifact {
    let mut bytes = serde_json::to_vec_pretty(value).expect("reports serialize");
    bytes.push(b'\n');
    Artifact { name, bytes }
}

pub type OpResult = Result<Vec<Artifact>, String>;

impl OpKind {
    pub fn name(&self) -> &'static str {
        match self {
            OpKind::Semigroup { .. } => "semigroup",
            OpKind::Resolvent { .. } => "resolvent",
            OpKind::CommunicatingClasses => "communicating_classes",
            OpKind::InvariantMeasures => "invariant_measures",
            OpKind::InvarianceCheck { .. } => "invariance_check",
            OpKind::DominationCertificate { .. } => "domination_certificate",
            OpKind::UniquenessVerdict { .. } => "uniqueness_verdict",
            OpKind::AbsorbingDecomposition { .. } => "absorbing_decomposition",
            OpKind::SkeletonCesaro { .. } => "skeleton_cesaro",
            OpKind::Simulate { .. } => "simulate",
            OpKind::ExpSubsample { .. } => "exp_subsample",
            OpKind::OccupationMeasure { .. } => "occupation_measure",
            OpKind::InvarianceResidual { .. } => "invariance_residual",
            OpKind::LyapunovDriftCheck { .. } => "lyapunov_drift_check",
            OpKind::InvisibilityDiagnostic { .. } => "invisibility_diagnostic",
            OpKind::CoexistenceScan { .. } => "coexistence_scan",
            OpKind::AbsorbingDiagnostic { .. } => "absorbing_diagnostic",
        }
    }

    pub(crate) fn requirement(&self) -> Requirement {
        use OpKind::*;
        match self {
            Semigroup { .. }
            | Resolvent { .. }
            | CommunicatingClasses
            | InvariantMeasures
            | InvarianceCheck { .. }
            | DominationCertificate { .. }
            | UniquenessVerdict { .. }
            | AbsorbingDecomposition { .. }
            | SkeletonCesaro { .. } => Requirement::Generator,
            Simulate { .. }
            | ExpSubsample { .. }
            | OccupationMeasure { .. }
            | InvisibilityDiagnostic { .. }
            | AbsorbingDiagnostic { .. } => Requirement::Process { seeds: true },
            CoexistenceScan { .. } => Requirement::Standalone { seeds: true },
            InvarianceResidual { .. } => Requirement::Both,
            LyapunovDriftCheck { .. } => Requirement::Box,
        }
    }

    /// Problems that can be found without running anything.
    pub fn check(&self, cfg: &ExperimentConfig) -> Vec<String> {
        let mut out = requirement_problems(self.requirement(), cfg);
        let positive = |name: &str, v: f64, out: &mut Vec<String>| {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{name} must be finite and positive, got {v}"));
            }
        };
        let n = cfg.exact_generator().map(RateMatrix::n);
        match self {
            OpKind::Semigroup { t } => {
                if !(t.is_finite() && *t >= 0.0) {
                    out.push(format!("t must be finite and nonnegative, got {t}"));
                }
            }
            OpKind::Resolvent { alpha }
            | OpKind::AbsorbingDecomposition { alpha }
            | OpKind::InvarianceCheck { alpha, .. } => positive("alpha", *alpha, &mut out),
            OpKind::DominationCertificate { alpha, psi } | OpKind::UniquenessVerdict { alpha, psi } => {
                positive("alpha", *alpha, &mut out);
                if let (Some(w), Some(n)) = (psi, n) {
                    if w.len() != n {
                        out.push(format!("psi has {} weights for {n} states", w.len()));
                    }
                }
            }
            OpKind::SkeletonCesaro { s, steps, initial } => {
                positive("s", *s, &mut out);
                if *steps == 0 {
                    out.push("steps must be at least 1".into());
                }
                if n.is_some_and(|n| *initial >= n) {
                    out.push(format!("initial state {initial} out of range"));
                }
            }
            OpKind::Simulate { horizon } | OpKind::OccupationMeasure { horizon, .. } => {
                positive("horizon", *horizon, &mut out)
            }
            OpKind::InvarianceResidual { horizon, alpha, .. } => {
                positive("horizon", *horizon, &mut out);
                positive("alpha", *alpha, &mut out);
                if !matches!(cfg.process, Some(ProcessSpec::FiniteCtmc { .. })) {
                    out.push("needs a finite-ctmc process".into());
                }
            }
            OpKind::ExpSubsample { alpha, count } => {
                if let Err(e) = ExpSubsampleSpec::new(*alpha, *count) {
                    out.push(e.to_string());
                }
            }
            OpKind::LyapunovDriftCheck { lyapunov, .. } => {
                if let Some(p) = &cfg.process {
                    if p.step().is_none() {
                        out.push(format!("drift checks need a diffusion process, got {}", p.kind()));
                    }
                    if matches!(lyapunov, LyapunovChoice::Energy { .. })
                        && !matches!(p, ProcessSpec::Langevin { .. })
                    {
                        out.push("energy Lyapunov functions need a langevin process".into());
                    }
                }
            }
            OpKind::InvisibilityDiagnostic { .. } => {
                if cfg.process.as_ref().is_some_and(|p| !matches!(p, ProcessSpec::QuasiFellerDemo { .. })) {
                    out.push("needs a quasi-feller-demo process".into());
                }
            }
            OpKind::CoexistenceScan { m_star, .. } | OpKind::AbsorbingDiagnostic { m_star, .. } => {
                if !(*m_star > 0.0 && *m_star < 1.0) {
                    out.push(format!("mStar must lie in (0, 1), got {m_star}"));
                }
                if matches!(self, OpKind::AbsorbingDiagnostic { .. })
                    && cfg.process.as_ref().is_some_and(|p| !matches!(p, ProcessSpec::GlauberIsing { .. }))
                {
                    out.push("needs a glauber-ising process".into());
                }
            }
            OpKind::CommunicatingClasses | OpKind::InvariantMeasures => {}
        }
        out
    }

    /// Runs the operation; artifact names are prefixed with `id`.
    pub fn execute(&self, id: &str, cfg: &ExperimentConfig) -> OpResult {
        let err = |e: &dyn std::fmt::Display| e.to_string();
        let generator = || cfg.exact_generator().ok_or_else(|| "no generator".to_string());
        let process = || cfg.process.as_ref().ok_or_else(|| "no process".to_string());
        let report = |v: &dyn erased::Report| Ok(vec![v.artifact(format!("{id}.json"))]);
        let psi_of = |l: &RateMatrix, psi: &Option<Vec<f64>>| match psi {
            Some(w) => DiscreteMeasure::new(w.clone()).map_err(|e| err(&e)),
            None => Ok(DiscreteMeasure::counting(l.n())),
        };
        match self {
            OpKind::Semigroup { t } => report(&semigroup(generator()?, *t).map_err(|e| err(&e))?),
            OpKind::Resolvent { alpha } => report(&resolvent(generator()?, *alpha).map_err(|e| err(&e))?),
            OpKind::CommunicatingClasses => report(&communicating_classes(generator()?)),
            OpKind::InvariantMeasures => {
                let l = generator()?;
                let ms = invariant_measures(l).map_err(|e| err(&e))?;
                report(&json!({ "measures": ms, "null_space_dim": null_space_dim(l) }))
            }
            OpKind::InvarianceCheck { alpha, times, tol } => {
                let l = generator()?;
                let checks = invariant_measures(l)
                    .map_err(|e| err(&e))?
                    .iter()
                    .map(|mu| check_invariance_on_grid(l, mu, *alpha, times, *tol))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| err(&e))?;
                let consistent = checks.iter().all(|c| c.consistent());
                report(&json!({ "checks": checks, "consistent": consistent }))
            }
            OpKind::DominationCertificate { alpha, psi } => {
                let l = generator()?;
                report(&domination_certificate(l, &psi_of(l, psi)?, *alpha).map_err(|e| err(&e))?)
            }
            OpKind::UniquenessVerdict { alpha, psi } => {
                let l = generator()?;
                report(&uniqueness_verdict(l, &psi_of(l, psi)?, *alpha).map_err(|e| err(&e))?)
            }
            OpKind::AbsorbingDecomposition { alpha } => {
                let l = generator()?;
                let ms = invariant_measures(l).map_err(|e| err(&e))?;
                if ms.len() < 2 {
                    return Err(format!("needs two extreme invariant measures, found {}", ms.len()));
                }
                report(&absorbing_decomposition(l, *alpha, &ms[0], &ms[1]).map_err(|e| err(&e))?)
            }
            OpKind::SkeletonCesaro { s, steps, initial } => {
                let l = generator()?;
                let nu = skeleton_cesaro(l, *s, *initial, *steps).map_err(|e| err(&e))?;
                let residual = cesaro_residual(l, *s, &nu).map_err(|e| err(&e))?;
                report(&json!({
                    "measure": nu,
                    "residual": residual,
                    "bound": 2.0 / *steps as f64,
                    "within_bound": residual <= 2.0 / *steps as f64,
                }))
            }
            OpKind::Simulate { horizon } => {
                let spec = process()?;
                let mut out = Vec::new();
                let mut sidecars = Vec::new();
                for &seed in &cfg.seeds {
                    let path = simulate(spec, *horizon, seed).map_err(|e| err(&e))?;
                    let mut csv = Vec::new();
                    path.write_csv(&mut csv).map_err(|e| err(&e))?;
                    let name = format!("{id}-seed{seed}.csv");
                    let mut side = path.sidecar();
                    side["file"] = json!(name);
                    sidecars.push(side);
                    out.push(Artifact { name, bytes: csv });
                }
                out.insert(0, json_artifact(format!("{id}.json"), &json!({ "paths": sidecars })));
                Ok(out)
            }
            OpKind::ExpSubsample { alpha, count } => {
                let spec = process()?;
                let sub = ExpSubsampleSpec::new(*alpha, *count).map_err(|e| err(&e))?;
                let mut runs = Vec::new();
                for &seed in &cfg.seeds {
                    let ys = exp_subsample(SubsampleSource::Spec(spec), &sub, seed).map_err(|e| err(&e))?;
                    let mut run = json!({ "seed": seed, "samples": ys });
                    if let ProcessSpec::FiniteCtmc { generator, .. } = spec {
                        run["transition_frequencies"] = json!(transition_frequencies(generator.n(), &ys));
                    }
                    runs.push(run);
                }
                report(&json!({ "alpha": alpha, "count": count, "runs": runs }))
            }
            OpKind::OccupationMeasure { horizon, burn_in, bins } => {
                let spec = process()?;
                let mut out = Vec::new();
                let mut measures = Vec::new();
                for &seed in &cfg.seeds {
                    let path = simulate(spec, *horizon, seed).map_err(|e| err(&e))?;
                    let binning = match spec {
                        ProcessSpec::FiniteCtmc { generator, .. } => Binning::identity(generator.n()),
                        _ => Binning::fit(&path, *bins, measure_lab::binning::DEFAULT_PADDING),
                    }
                    .map_err(|e| err(&e))?;
                    let m = occupation(&path, &binning, *burn_in)?;
                    let mut csv = Vec::new();
                    m.write_csv(&mut csv).map_err(|e| err(&e))?;
                    out.push(Artifact { name: format!("{id}-seed{seed}.csv"), bytes: csv });
                    measures.push(json!({ "seed": seed, "measure": m }));
                }
                out.insert(0, json_artifact(format!("{id}.json"), &json!({ "measures": measures })));
                Ok(out)
            }
            OpKind::InvarianceResidual { horizon, alpha, burn_in } => {
                let l = generator()?;
                let spec = process()?;
                let r = resolvent(l, *alpha).map_err(|e| err(&e))?;
                let binning = Binning::identity(l.n()).map_err(|e| err(&e))?;
                let mut rows = Vec::new();
                for &seed in &cfg.seeds {
                    let path = simulate(spec, *horizon, seed).map_err(|e| err(&e))?;
                    let m = occupation(&path, &binning, *burn_in)?;
                    let residual = invariance_residual(&m, &r).map_err(|e| err(&e))?;
                    rows.push(json!({ "seed": seed, "residual": residual }));
                }
                report(&json!({ "alpha": alpha, "horizon": horizon, "residuals": rows }))
            }
            OpKind::LyapunovDriftCheck {
                lyapunov,
                sample_box,
                compact_radius,
                outlier_budget,
                generator,
            } => {
                let spec = process()?;
                let v = match lyapunov {
                    LyapunovChoice::Quadratic => LyapunovFunction::Quadratic,
                    LyapunovChoice::Energy { cross } => {
                        LyapunovFunction::energy_for(spec, *cross).map_err(|e| err(&e))?
                    }
                };
                let options = DriftOptions {
                    compact_radius: *compact_radius,
                    outlier_budget: *outlier_budget,
                    generator: generator.clone(),
                };
                report(&lyapunov_drift_check(spec, &v, sample_box, &options).map_err(|e| err(&e))?)
            }
            OpKind::InvisibilityDiagnostic { dh, deltas, cesaro_n } => {
                let spec = process()?;
                let paths = cfg
                    .seeds
                    .iter()
                    .map(|&s| simulate(spec, *cesaro_n as f64, s))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| err(&e))?;
                report(
                    &invisibility_diagnostic(InvisibilitySource::Paths(&paths), dh, deltas, *cesaro_n)
                        .map_err(|e| err(&e))?,
                )
            }
            OpKind::CoexistenceScan { side, betas, horizon, m_star } => {
                let rows = coexistence_scan(&CoexistenceConfig {
                    side: *side,
                    betas: betas.clone(),
                    horizon: *horizon,
                    m_star: *m_star,
                    seeds: cfg.seeds.clone(),
                })
                .map_err(|e| err(&e))?;
                let mut csv = String::from("beta,seed,m_plus,m_minus,separated,tv_distance\n");
                for r in &rows {
                    csv += &format!(
                        "{},{},{},{},{},{}\n",
                        r.beta, r.seed, r.m_plus, r.m_minus, r.separated, r.tv_distance
                    );
                }
                Ok(vec![
                    json_artifact(format!("{id}.json"), &json!({ "reports": rows })),
                    Artifact { name: format!("{id}.csv"), bytes: csv.into_bytes() },
                ])
            }
            OpKind::AbsorbingDiagnostic { alpha, m_star, n_subsamples } => {
                let spec = process()?;
                report(
                    &absorbing_diagnostic(spec, *alpha, *m_star, *n_subsamples, &cfg.seeds)
                        .map_err(|e| err(&e))?,
                )
            }
        }
    }
}

fn occupation(
    path: &process_sim::SamplePath,
    binning: &Binning,
    burn_in: bool,
) -> Result<EmpiricalMeasure, String> {
    if burn_in {
        stationary_occupation(path, binning)
    } else {
        occupation_measure(path, binning)
    }
    .map_err(|e| e.to_string())
}

/// Row-normalized one-step transition counts of a subsampled finite chain.
fn transition_frequencies(n: usize, ys: &[process_sim::Snapshot]) -> Vec<Vec<f64>> {
    let mut counts = vec![vec![0.0; n]; n];
    for w in ys.windows(2) {
        if let (Some(a), Some(b)) = (w[0].as_discrete(), w[1].as_discrete()) {
            counts[a][b] += 1.0;
        }
    }
    for row in &mut counts {
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            row.iter_mut().for_each(|v| *v /= total);
        }
    }
    counts
}

mod erased {
    use super::{json_artifact, Artifact};

    pub trait Report {
        fn artifact(&self, name: String) -> Artifact;
    }

    impl<T: serde::Serialize> Report for T {
        fn artifact(&self, name: String) -> Artifact {
            json_artifact(name, self)
        }
    }
}
