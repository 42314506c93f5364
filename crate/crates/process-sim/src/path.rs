//! Recorded trajectories.
//!
//! Records are taken at jump times (event-driven kinds) or at every step
//! (diffusions). Between records the path holds its previous value, so the
//! state at time `t` is the last record with timestamp `≤ t`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spec::ProcessSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum PathStates {
    Discrete(Vec<usize>),
    /// Flat row-major storage, `dim` values per record.
    Continuous { dim: usize, values: Vec<f64> },
    /// Spin configurations stored as the initial lattice plus one flipped site
    /// per later record; `spin_sum[i]` is `Σσ` after record `i`.
    Spins {
        side: usize,
        initial: Vec<i8>,
        flips: Vec<u32>,
        spin_sum: Vec<i64>,
    },
}

/// One state of a path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Snapshot {
    Discrete(usize),
    Point(Vec<f64>),
    Spins(Vec<i8>),
}

impl Snapshot {
    pub fn as_discrete(&self) -> Option<usize> {
        match self {
            Snapshot::Discrete(s) => Some(*s),
            _ => None,
        }
    }

    pub fn as_point(&self) -> Option<&[f64]> {
        match self {
            Snapshot::Point(p) => Some(p),
            _ => None,
        }
    }

    /// Per-site magnetization of a spin snapshot.
    pub fn magnetization(&self) -> Option<f64> {
        match self {
            Snapshot::Spins(s) => {
                Some(s.iter().map(|&v| f64::from(v)).sum::<f64>() / s.len() as f64)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub spec: ProcessSpec,
    pub seed: u64,
    /// The path is defined on `[0, horizon]`.
    pub horizon: f64,
    pub times: Vec<f64>,
    pub states: PathStates,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn process_id(&self) -> String {
        self.spec.process_id()
    }

    /// Index of the record in force at time `t` (càdlàg convention).
    pub fn index_at(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t).saturating_sub(1)
    }

    /// Time during which record `i` is in force, clipped to `[from, to]`.
    pub fn holding_time(&self, i: usize, from: f64, to: f64) -> f64 {
        let start = self.times[i].max(from);
        let end = self.times.get(i + 1).copied().unwrap_or(self.horizon).min(to);
        (end - start).max(0.0)
    }

    pub fn discrete(&self, i: usize) -> Option<usize> {
        match &self.states {
            PathStates::Discrete(s) => Some(s[i]),
            _ => None,
        }
    }

    pub fn point(&self, i: usize) -> Option<&[f64]> {
        match &self.states {
            PathStates::Continuous { dim, values } => Some(&values[i * dim..(i + 1) * dim]),
            _ => None,
        }
    }

    pub fn magnetization(&self, i: usize) -> Option<f64> {
        match &self.states {
            PathStates::Spins {
                initial, spin_sum, ..
            } => Some(spin_sum[i] as f64 / initial.len() as f64),
            _ => None,
        }
    }

    /// Full spin configuration after record `i`, replayed from the initial lattice.
    pub fn spins(&self, i: usize) -> Option<Vec<i8>> {
        match &self.states {
            PathStates::Spins { initial, flips, .. } => {
                let mut s = initial.clone();
                for &site in &flips[..i] {
                    s[site as usize] = -s[site as usize];
                }
                Some(s)
            }
            _ => None,
        }
    }

    pub fn snapshot(&self, i: usize) -> Snapshot {
        match &self.states {
            PathStates::Discrete(s) => Snapshot::Discrete(s[i]),
            PathStates::Continuous { .. } => Snapshot::Point(self.point(i).unwrap().to_vec()),
            PathStates::Spins { .. } => Snapshot::Spins(self.spins(i).unwrap()),
        }
    }

    /// Snapshots at sorted times, replaying spin flips only once.
    pub fn snapshots_at(&self, sorted_times: &[f64]) -> Vec<Snapshot> {
        let idx: Vec<usize> = sorted_times.iter().map(|&t| self.index_at(t)).collect();
        match &self.states {
            PathStates::Spins { initial, flips, .. } => {
                let mut s = initial.clone();
                let mut applied = 0;
                idx.iter()
                    .map(|&i| {
                        for &site in &flips[applied..i] {
                            s[site as usize] = -s[site as usize];
                        }
                        applied = applied.max(i);
                        Snapshot::Spins(s.clone())
                    })
                    .collect()
            }
            _ => idx.iter().map(|&i| self.snapshot(i)).collect(),
        }
    }

    /// Copy of the path with every timestamp and the horizon shifted by `dt`.
    pub fn shifted(&self, dt: f64) -> SamplePath {
        SamplePath {
            horizon: self.horizon + dt,
            times: self.times.iter().map(|t| t + dt).collect(),
            ..self.clone()
        }
    }

    /// Writes `t, state...` rows. Spin paths emit `t, magnetization, flipped_site`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match &self.states {
            PathStates::Discrete(s) => {
                w.write_record(["t", "state"])?;
                for (t, x) in self.times.iter().zip(s) {
                    w.write_record([t.to_string(), x.to_string()])?;
                }
            }
            PathStates::Continuous { dim, .. } => {
                let mut header = vec!["t".to_string()];
                header.extend((0..*dim).map(|k| format!("x{k}")));
                w.write_record(&header)?;
                for (i, t) in self.times.iter().enumerate() {
                    let mut row = vec![t.to_string()];
                    row.extend(self.point(i).unwrap().iter().map(f64::to_string));
                    w.write_record(&row)?;
                }
            }
            PathStates::Spins { flips, .. } => {
                w.write_record(["t", "magnetization", "flipped_site"])?;
                for (i, t) in self.times.iter().enumerate() {
                    let site = if i == 0 { String::new() } else { flips[i - 1].to_string() };
                    w.write_record([t.to_string(), self.magnetization(i).unwrap().to_string(), site])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Everything needed to regenerate the path bit-for-bit.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec,
            "seed": self.seed,
            "horizon": self.horizon,
            "records": self.len(),
        })
    }
}
