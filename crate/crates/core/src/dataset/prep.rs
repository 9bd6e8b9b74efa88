use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DataTable, DiscreteTable};
use crate::error::{Error, Result};

/// Column-wise z-score scaler with sample (n-1) standard deviation.
///
/// Columns constant on the fitting data map to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScore {
    means: Vec<f64>,
    // 0.0 marks a constant column
    stds: Vec<f64>,
}

impl ZScore {
    pub fn fit(table: &DataTable) -> Result<Self> {
        let n = table.n_objects();
        if n < 2 {
            return Err(Error::TooFewObjects {
                needed: 2,
                found: n,
            });
        }
        let d = table.n_attributes();
        let mut means = vec![0.0; d];
        let mut stds = vec![0.0; d];
        for j in 0..d {
            let col = table.column(j);
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                means[j] = first;
                continue;
            }
            let mean = col.iter().sum::<f64>() / n as f64;
            let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
            means[j] = mean;
            stds[j] = (ss / (n - 1) as f64).sqrt();
        }
        Ok(ZScore { means, stds })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn apply(&self, table: &DataTable) -> Result<DataTable> {
        if table.n_attributes() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                found: table.n_attributes(),
            });
        }
        let values = table.rows().flat_map(|r| self.apply_row(r)).collect();
        table.map_values(values, table.attr_names().to_vec())
    }
}

/// Z-scores every column (sample standard deviation); constant columns
/// become all zeros.
pub fn zscore_normalize(table: &DataTable) -> Result<DataTable> {
    ZScore::fit(table)?.apply(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[serde(rename = "eqwidth")]
    EqualWidth,
    #[default]
    #[serde(rename = "eqfreq")]
    EqualFrequency,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::EqualWidth => "eqwidth",
            Strategy::EqualFrequency => "eqfreq",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eqwidth" | "equal-width" => Ok(Strategy::EqualWidth),
            "eqfreq" | "equal-frequency" => Ok(Strategy::EqualFrequency),
            _ => Err(Error::invalid(format!(
                "unknown strategy {s:?} (expected eqwidth or eqfreq)"
            ))),
        }
    }
}

/// Per-column cut points. A value's code is the number of cut points at or
/// below it, so bins are half-open `[low, high)` and the top bin is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretizer {
    cuts: Vec<Vec<f64>>,
    attr_names: Vec<String>,
}

impl Discretizer {
    pub fn fit(table: &DataTable, strategy: Strategy, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::invalid(format!(
                "bins must be at least 2, got {bins}"
            )));
        }
        let cuts = (0..table.n_attributes())
            .map(|j| {
                let mut col = table.column(j);
                col.sort_by(f64::total_cmp);
                column_cuts(&col, strategy, bins)
            })
            .collect();
        Ok(Discretizer {
            cuts,
            attr_names: table.attr_names().to_vec(),
        })
    }

    pub fn cuts(&self, column: usize) -> &[f64] {
        &self.cuts[column]
    }

    pub fn code(&self, column: usize, value: f64) -> u32 {
        self.cuts[column].partition_point(|&c| c <= value) as u32
    }

    pub fn apply(&self, table: &DataTable) -> Result<DiscreteTable> {
        let d = self.cuts.len();
        if table.n_attributes() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: table.n_attributes(),
            });
        }
        let columns = (0..d)
            .map(|j| table.rows().map(|r| self.code(j, r[j])).collect())
            .collect();
        let bins = self.cuts.iter().map(|c| c.len() as u32 + 1).collect();
        DiscreteTable::from_columns(
            self.attr_names.clone(),
            columns,
            bins,
            table.labels().map(<[String]>::to_vec),
        )
    }
}

fn column_cuts(sorted: &[f64], strategy: Strategy, bins: usize) -> Vec<f64> {
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    if lo == hi {
        return Vec::new();
    }
    let mut cuts: Vec<f64> = match strategy {
        Strategy::EqualWidth => {
            let width = hi - lo;
            (1..bins)
                .map(|k| lo + width * k as f64 / bins as f64)
                .collect()
        }
        Strategy::EqualFrequency => {
            let n = sorted.len();
            (1..bins).map(|k| sorted[k * n / bins]).collect()
        }
    };
    // a cut at the minimum would leave bin 0 empty; move it to the next
    // distinct value instead. Ties can also collapse neighbouring quantiles.
    let above_lo = sorted[sorted.partition_point(|&v| v <= lo)];
    for c in &mut cuts {
        if *c <= lo {
            *c = above_lo;
        }
    }
    cuts.dedup();
    cuts
}

/// Discretizes every column with cut points fitted on `table` itself.
pub fn discretize(table: &DataTable, strategy: Strategy, bins: usize) -> Result<DiscreteTable> {
    Discretizer::fit(table, strategy, bins)?.apply(table)
}
