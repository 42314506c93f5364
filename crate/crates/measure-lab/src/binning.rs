//! Bin layouts for empirical measures.
//!
//! Finite-state paths use one bin per state. Everything else is binned on a
//! uniform grid over a box; points outside the box go to a separate overflow
//! mass. Spin paths are observed through their per-site magnetization, which
//! is coordinate 0.

use process_sim::{PathStates, SamplePath, Snapshot};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const DEFAULT_BINS: usize = 64;
/// Relative padding added on each side when a grid is fitted to a path.
pub const DEFAULT_PADDING: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    /// Index of the observed coordinate.
    pub coord: usize,
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl Axis {
    pub fn new(coord: usize, lo: f64, hi: f64, bins: usize) -> Result<Self> {
        let axis = Self { coord, lo, hi, bins };
        axis.validate()?;
        Ok(axis)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) || self.bins == 0 {
            return domain(format!(
                "axis {} needs finite lo < hi and at least one bin, got [{}, {}] with {} bins",
                self.coord, self.lo, self.hi, self.bins
            ));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    /// Bin containing `x`; the upper edge belongs to the last bin.
    pub fn index(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        Some((((x - self.lo) / self.width()) as usize).min(self.bins - 1))
    }

    pub fn center(&self, k: usize) -> f64 {
        self.lo + (k as f64 + 0.5) * self.width()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Binning {
    Identity { n: usize },
    /// Row-major over `axes` (the first axis varies slowest).
    Grid { axes: Vec<Axis> },
}

/// What an estimator sees of one record.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Observation<'a> {
    State(usize),
    Point(&'a [f64]),
    Magnetization(f64),
}

impl Binning {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("identity binning needs at least one state");
        }
        Ok(Binning::Identity { n })
    }

    pub fn grid(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return domain("grid binning needs at least one axis");
        }
        for a in &axes {
            a.validate()?;
        }
        Ok(Binning::Grid { axes })
    }

    /// Identity bins for finite chains, otherwise a [`DEFAULT_BINS`]-per-axis
    /// grid fitted to the observed range.
    pub fn auto(path: &SamplePath) -> Result<Self> {
        match &path.spec {
            process_sim::ProcessSpec::FiniteCtmc { generator, .. } => Binning::identity(generator.n()),
            _ => Binning::fit(path, DEFAULT_BINS, DEFAULT_PADDING),
        }
    }

    /// Grid over the range of every observed coordinate, widened by
    /// `padding` times the range on each side.
    pub fn fit(path: &SamplePath, bins: usize, padding: f64) -> Result<Self> {
        if path.is_empty() {
            return domain("cannot fit a grid to an empty path");
        }
        let dim = observed_dim(path);
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for i in 0..path.len() {
            let obs = observe(path, i);
            for k in 0..dim {
                let v = obs.coord(k).expect("dimension checked");
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let axes = (0..dim)
            .map(|k| {
                let range = hi[k] - lo[k];
                let pad = if range > 0.0 { padding * range } else { 0.5 };
                Axis::new(k, lo[k] - pad, hi[k] + pad, bins)
            })
            .collect::<Result<Vec<_>>>()?;
        Binning::grid(axes)
    }

    pub fn len(&self) -> usize {
        match self {
            Binning::Identity { n } => *n,
            Binning::Grid { axes } => axes.iter().map(|a| a.bins).product(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Binning::Grid { .. })
    }

    /// Bin index for a point, or `None` for overflow.
    pub fn index_of_point(&self, x: &[f64]) -> Option<usize> {
        match self {
            Binning::Identity { n } => {
                let &[v] = x else { return None };
                (v >= 0.0 && v.fract() == 0.0 && (v as usize) < *n).then_some(v as usize)
            }
            Binning::Grid { axes } => {
                let mut idx = 0;
                for a in axes {
                    idx = idx * a.bins + a.index(*x.get(a.coord)?)?;
                }
                Some(idx)
            }
        }
    }

    /// Bin centre, one entry per axis (the state itself for identity bins).
    pub fn center(&self, mut idx: usize) -> Vec<f64> {
        match self {
            Binning::Identity { .. } => vec![idx as f64],
            Binning::Grid { axes } => {
                let mut c = vec![0.0; axes.len()];
                for (k, a) in axes.iter().enumerate().rev() {
                    c[k] = a.center(idx % a.bins);
                    idx /= a.bins;
                }
                c
            }
        }
    }

    pub(crate) fn index_of(&self, obs: Observation<'_>) -> Result<Option<usize>> {
        Ok(match (self, obs) {
            (Binning::Identity { n }, Observation::State(s)) => (s < *n).then_some(s),
            (Binning::Identity { .. }, _) => {
                return domain("identity binning applies to finite-state paths only")
            }
            (Binning::Grid { .. }, Observation::State(s)) => self.index_of_point(&[s as f64]),
            (Binning::Grid { .. }, Observation::Point(p)) => self.index_of_point(p),
            (Binning::Grid { .. }, Observation::Magnetization(m)) => self.index_of_point(&[m]),
        })
    }

    pub(crate) fn index_of_snapshot(&self, s: &Snapshot) -> Result<Option<usize>> {
        match s {
            Snapshot::Discrete(x) => self.index_of(Observation::State(*x)),
            Snapshot::Point(p) => self.index_of(Observation::Point(p)),
            Snapshot::Spins(_) => self.index_of(Observation::Magnetization(
                s.magnetization().expect("spin snapshot"),
            )),
        }
    }
}

impl Observation<'_> {
    fn coord(&self, k: usize) -> Option<f64> {
        match *self {
            Observation::State(s) => (k == 0).then_some(s as f64),
            Observation::Point(p) => p.get(k).copied(),
            Observation::Magnetization(m) => (k == 0).then_some(m),
        }
    }
}

pub(crate) fn observe(path: &SamplePath, i: usize) -> Observation<'_> {
    match &path.states {
        PathStates::Discrete(s) => Observation::State(s[i]),
        PathStates::Continuous { .. } => Observation::Point(path.point(i).expect("continuous")),
        PathStates::Spins { .. } => Observation::Magnetization(path.magnetization(i).expect("spins")),
    }
}

fn observed_dim(path: &SamplePath) -> usize {
    match &path.states {
        PathStates::Continuous { dim, .. } => *dim,
        _ => 1,
    }
}
