//! Finite-state generators.
//!
//! A [`RateMatrix`] is the generator of a continuous-time Markov chain on
//! `{0, .., n-1}`: off-diagonal entries are jump rates, each row sums to zero.
//! Two on-disk formats are supported, a JSON document `{"n": .., "rates": [[..]]}`
//! and a whitespace-separated dense text file (first line `n`, then `n` rows).

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, KernelError, Result};

/// Relative tolerance on generator row sums.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRates", into = "RawRates")]
pub struct RateMatrix {
    rates: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawRates {
    n: usize,
    rates: Vec<Vec<f64>>,
}

impl TryFrom<RawRates> for RateMatrix {
    type Error = KernelError;

    fn try_from(raw: RawRates) -> Result<Self> {
        if raw.rates.len() != raw.n {
            return Err(KernelError::Dimension {
                expected: raw.n,
                got: raw.rates.len(),
            });
        }
        RateMatrix::from_rows(&raw.rates)
    }
}

impl From<RateMatrix> for RawRates {
    fn from(l: RateMatrix) -> Self {
        RawRates {
            n: l.n(),
            rates: l.to_rows(),
        }
    }
}

impl RateMatrix {
    /// Validates and wraps a square generator matrix.
    pub fn new(rates: DMatrix<f64>) -> Result<Self> {
        let n = rates.nrows();
        if n == 0 {
            return domain("rate matrix must have at least one state");
        }
        if rates.ncols() != n {
            return Err(KernelError::Dimension {
                expected: n,
                got: rates.ncols(),
            });
        }
        if rates.iter().any(|r| !r.is_finite()) {
            return domain("rate matrix contains non-finite entries");
        }
        let scale = rates.amax();
        for i in 0..n {
            for j in 0..n {
                if i != j && rates[(i, j)] < 0.0 {
                    return domain(format!(
                        "negative off-diagonal rate {} at ({i}, {j})",
                        rates[(i, j)]
                    ));
                }
            }
            let sum: f64 = rates.row(i).iter().sum();
            if sum.abs() > ROW_SUM_TOL * scale {
                return domain(format!("row {i} sums to {sum:e}, expected 0"));
            }
        }
        Ok(Self { rates })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return domain(format!("row {i} has {} entries, expected {n}", r.len()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Builds a generator from off-diagonal rates; the diagonal is filled in
    /// so that every row sums to zero. Diagonal entries of `off` are ignored.
    pub fn from_off_diagonal(off: &DMatrix<f64>) -> Result<Self> {
        let n = off.nrows();
        let mut rates = off.clone();
        for i in 0..n {
            rates[(i, i)] = 0.0;
            let out: f64 = rates.row(i).iter().sum();
            rates[(i, i)] = -out;
        }
        Self::new(rates)
    }

    /// The zero generator (frozen process).
    pub fn zero(n: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(n, n))
    }

    /// Block-diagonal generator with no communication between blocks.
    pub fn block_diagonal(blocks: &[RateMatrix]) -> Result<Self> {
        let n: usize = blocks.iter().map(RateMatrix::n).sum();
        let mut rates = DMatrix::zeros(n, n);
        let mut offset = 0;
        for b in blocks {
            let k = b.n();
            rates.view_mut((offset, offset), (k, k)).copy_from(&b.rates);
            offset += k;
        }
        Self::new(rates)
    }

    pub fn n(&self) -> usize {
        self.rates.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rates
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rates[(from, to)]
    }

    /// Total jump rate out of `state`.
    pub fn exit_rate(&self, state: usize) -> f64 {
        -self.rates[(state, state)]
    }

    /// Largest exit rate; the uniformization constant.
    pub fn max_exit_rate(&self) -> f64 {
        (0..self.n()).map(|i| self.exit_rate(i)).fold(0.0, f64::max)
    }

    /// Whether a direct jump `from -> to` has positive rate.
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        from != to && self.rates[(from, to)] > 0.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rates
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("rate matrix serializes")
    }

    /// Parses the dense text format: first token `n`, then `n*n` numbers.
    pub fn from_text(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| KernelError::Parse("empty rate file".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| KernelError::Parse(format!("bad state count {header:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        KernelError::Parse(format!("row {i}: bad number {tok:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(KernelError::Parse(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        Self::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for row in self.rates.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        out
    }

    /// Loads either format, choosing by extension (`.json` vs anything else).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)
        } else {
            Self::from_text(&text)
        }
    }
}
