//! Tabular datasets: numeric tables, discretized tables and attribute subsets.
//!
//! [`DataTable`] stores values row-major since classifiers consume rows.
//! [`DiscreteTable`] stores codes column-major since every rough-set
//! operation walks whole attributes.

mod io;
mod prep;
mod registry;

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

pub use io::{
    load, load_arff, load_csv, parse_arff, parse_csv, write_csv, LabelColumn, LoadOptions,
    MissingPolicy,
};
pub use prep::{discretize, zscore_normalize, Discretizer, Strategy, ZScore};
pub use registry::{Registry, RegistryEntry, DATA_DIR_ENV};

/// A rectangular numeric dataset with optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    name: String,
    attr_names: Vec<String>,
    values: Vec<f64>,
    n_objects: usize,
    labels: Option<Vec<String>>,
}

impl DataTable {
    pub fn new(
        name: impl Into<String>,
        attr_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let d = attr_names.len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::RaggedRow {
                    name: "table".into(),
                    row: i,
                    expected: d,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_row_major(name, attr_names, values, labels)
    }

    pub fn from_row_major(
        name: impl Into<String>,
        attr_names: Vec<String>,
        values: Vec<f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let d = attr_names.len();
        if d == 0 {
            return Err(Error::invalid("table needs at least one attribute"));
        }
        if !values.len().is_multiple_of(d) {
            return Err(Error::invalid(
                "value count is not a multiple of the attribute count",
            ));
        }
        let n = values.len() / d;
        if n == 0 {
            return Err(Error::TooFewObjects {
                needed: 1,
                found: 0,
            });
        }
        check_unique(&attr_names)?;
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / d,
                column: pos % d,
            });
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: l.len(),
                });
            }
        }
        Ok(DataTable {
            name: name.into(),
            attr_names,
            values,
            n_objects: n,
            labels,
        })
    }

    /// Builds a table with generated attribute names `a1..ad`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let names = (1..=d).map(|j| format!("a{j}")).collect();
        Self::new("table", names, rows, None)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_attributes(&self) -> usize {
        self.attr_names.len()
    }

    pub fn attr_names(&self) -> &[String] {
        &self.attr_names
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_attributes() + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_attributes();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_attributes())
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_labels(mut self, labels: Option<Vec<String>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.n_objects {
                return Err(Error::DimensionMismatch {
                    expected: self.n_objects,
                    found: l.len(),
                });
            }
        }
        self.labels = labels;
        Ok(self)
    }

    /// Rows at `indices`, in that order. Labels follow their rows.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let d = self.n_attributes();
        let mut values = Vec::with_capacity(indices.len() * d);
        for &i in indices {
            if i >= self.n_objects {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.n_objects,
                });
            }
            values.extend_from_slice(self.row(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        Self::from_row_major(self.name.clone(), self.attr_names.clone(), values, labels)
    }

    pub(crate) fn map_values(&self, values: Vec<f64>, attr_names: Vec<String>) -> Result<Self> {
        Self::from_row_major(self.name.clone(), attr_names, values, self.labels.clone())
    }
}

/// A table of small non-negative integer codes, one domain per attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteTable {
    attr_names: Vec<String>,
    // column-major: columns[j][i]
    columns: Vec<Vec<u32>>,
    bins_per_attr: Vec<u32>,
    n_objects: usize,
    labels: Option<Vec<String>>,
}

impl DiscreteTable {
    pub fn from_columns(
        attr_names: Vec<String>,
        columns: Vec<Vec<u32>>,
        bins_per_attr: Vec<u32>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let d = attr_names.len();
        if d == 0 {
            return Err(Error::invalid("table needs at least one attribute"));
        }
        if columns.len() != d || bins_per_attr.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: columns.len().min(bins_per_attr.len()),
            });
        }
        check_unique(&attr_names)?;
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::TooFewObjects {
                needed: 1,
                found: 0,
            });
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::RaggedRow {
                    name: "discrete table".into(),
                    row: j,
                    expected: n,
                    found: col.len(),
                });
            }
            if bins_per_attr[j] == 0 {
                return Err(Error::invalid(format!("attribute {j} has zero bins")));
            }
            if let Some(i) = col.iter().position(|&c| c >= bins_per_attr[j]) {
                return Err(Error::invalid(format!(
                    "code {} at row {i}, column {j} exceeds {} bins",
                    col[i], bins_per_attr[j]
                )));
            }
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: l.len(),
                });
            }
        }
        Ok(DiscreteTable {
            attr_names,
            columns,
            bins_per_attr,
            n_objects: n,
            labels,
        })
    }

    /// Builds a table from rows of codes; each domain is `0..=max code`.
    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); d];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::RaggedRow {
                    name: "discrete table".into(),
                    row: i,
                    expected: d,
                    found: row.len(),
                });
            }
            for (j, &c) in row.iter().enumerate() {
                columns[j].push(c);
            }
        }
        let bins = columns
            .iter()
            .map(|c| c.iter().copied().max().unwrap_or(0) + 1)
            .collect();
        let names = (1..=d).map(|j| format!("a{j}")).collect();
        Self::from_columns(names, columns, bins, None)
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_attributes(&self) -> usize {
        self.attr_names.len()
    }

    pub fn attr_names(&self) -> &[String] {
        &self.attr_names
    }

    pub fn bins_per_attr(&self) -> &[u32] {
        &self.bins_per_attr
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn code(&self, row: usize, col: usize) -> u32 {
        self.columns[col][row]
    }

    pub fn row(&self, i: usize) -> Vec<u32> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Option<Vec<String>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != self.n_objects {
                return Err(Error::DimensionMismatch {
                    expected: self.n_objects,
                    found: l.len(),
                });
            }
        }
        self.labels = labels;
        Ok(self)
    }

    /// Columns of `subset`, in subset order.
    pub fn project(&self, subset: &FeatureSubset) -> Result<Self> {
        subset.check_bounds(self.n_attributes())?;
        let idx = subset.indices();
        Self::from_columns(
            idx.iter().map(|&j| self.attr_names[j].clone()).collect(),
            idx.iter().map(|&j| self.columns[j].clone()).collect(),
            idx.iter().map(|&j| self.bins_per_attr[j]).collect(),
            self.labels.clone(),
        )
    }
}

/// An ordered set of distinct attribute indices (0-based).
///
/// Order is selection order; greedy selectors report attributes in the
/// order they were picked. User-facing text uses 1-based indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSubset(Vec<usize>);

impl FeatureSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(indices.len());
        for &i in &indices {
            if !seen.insert(i) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        Ok(FeatureSubset(indices))
    }

    pub fn empty() -> Self {
        FeatureSubset(Vec::new())
    }

    /// `0..d` in natural order.
    pub fn all(d: usize) -> Self {
        FeatureSubset((0..d).collect())
    }

    pub fn from_one_based(indices: &[usize]) -> Result<Self> {
        let zero = indices
            .iter()
            .map(|&i| {
                i.checked_sub(1)
                    .ok_or_else(|| Error::invalid("feature indices are 1-based; got 0"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero)
    }

    /// Parses a 1-based comma list such as `2,7,8`.
    pub fn parse_one_based(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::empty());
        }
        let idx = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad feature index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&idx)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    /// A copy with `index` appended. Panics in debug builds on duplicates.
    pub fn with(&self, index: usize) -> Self {
        debug_assert!(!self.contains(index));
        let mut v = self.0.clone();
        v.push(index);
        FeatureSubset(v)
    }

    /// Indices in ascending order, for set comparisons.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }

    pub fn check_bounds(&self, d: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= d) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len: d }),
            None => Ok(()),
        }
    }

    /// Maps indices that are relative to a projected table back to the
    /// parent table: `self` indexes into `parent`.
    pub fn compose(&self, relative: &FeatureSubset) -> Result<Self> {
        relative.check_bounds(self.len())?;
        Self::new(relative.0.iter().map(|&r| self.0[r]).collect())
    }
}

/// Formats as a 1-based comma list (`2,7,8`).
impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// Columns of `subset`, in subset order; labels carried through.
pub fn project(table: &DataTable, subset: &FeatureSubset) -> Result<DataTable> {
    subset.check_bounds(table.n_attributes())?;
    let idx = subset.indices();
    if idx.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut values = Vec::with_capacity(table.n_objects() * idx.len());
    for row in table.rows() {
        values.extend(idx.iter().map(|&j| row[j]));
    }
    let names = idx.iter().map(|&j| table.attr_names[j].clone()).collect();
    table.map_values(values, names)
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::DuplicateAttribute(n.clone()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t2x3() -> DataTable {
        DataTable::new(
            "t",
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
            Some(vec!["x".into(), "y".into()]),
        )
        .unwrap()
    }

    #[test]
    fn project_single_column() {
        let p = project(&t2x3(), &FeatureSubset::new(vec![2]).unwrap()).unwrap();
        assert_eq!(p.n_attributes(), 1);
        assert_eq!(p.column(0), vec![3.0, 6.0]);
        assert_eq!(p.labels().unwrap(), ["x", "y"]);
    }

    #[test]
    fn project_identity() {
        let t = t2x3();
        assert_eq!(project(&t, &FeatureSubset::all(3)).unwrap(), t);
    }

    #[test]
    fn project_rejects_out_of_range() {
        let err = project(&t2x3(), &FeatureSubset::new(vec![0, 3]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 3, len: 3 }));
    }

    #[test]
    fn subset_display_is_one_based() {
        let s = FeatureSubset::parse_one_based("2, 7,8").unwrap();
        assert_eq!(s.indices(), &[1, 6, 7]);
        assert_eq!(s.to_string(), "2,7,8");
        assert!(FeatureSubset::parse_one_based("0").is_err());
        assert!(matches!(
            FeatureSubset::new(vec![1, 1]),
            Err(Error::DuplicateIndex(1))
        ));
    }

    #[test]
    fn rejects_non_finite_and_duplicate_names() {
        assert!(matches!(
            DataTable::from_rows(vec![vec![f64::NAN]]),
            Err(Error::NonFinite { .. })
        ));
        let dup = DataTable::new(
            "t",
            vec!["a".into(), "a".into()],
            vec![vec![1.0, 2.0]],
            None,
        );
        assert!(matches!(dup, Err(Error::DuplicateAttribute(_))));
    }

    #[test]
    fn discrete_table_checks_domains() {
        let bad = DiscreteTable::from_columns(vec!["a".into()], vec![vec![0, 3]], vec![2], None);
        assert!(bad.is_err());
        let t = DiscreteTable::from_rows(&[vec![0, 1], vec![2, 0]]).unwrap();
        assert_eq!(t.bins_per_attr(), &[3, 2]);
        assert_eq!(t.row(1), vec![2, 0]);
    }
}
