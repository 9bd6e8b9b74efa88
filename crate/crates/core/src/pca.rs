//! Principal component analysis over mean-centred data.
//!
//! Two routes produce the same model: a one-sided Jacobi SVD of the centred
//! data matrix, and an eigendecomposition of the (n-1)-denominator
//! covariance matrix. Loading columns are sign-canonical: the entry of
//! largest magnitude in each column is non-negative.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::DataTable;
use crate::error::{Error, Result};
use crate::selectors::RankedFeatures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PcaMethod {
    #[default]
    Svd,
    CovarianceEigen,
}

/// How many principal components to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "value", rename_all = "kebab-case")]
pub enum RetainPolicy {
    /// Smallest k whose cumulative explained ratio reaches the fraction.
    VarianceFraction(f64),
    /// Components whose eigenvalue exceeds the mean eigenvalue.
    Kaiser,
    Fixed(usize),
}

impl Default for RetainPolicy {
    fn default() -> Self {
        RetainPolicy::VarianceFraction(0.90)
    }
}

impl fmt::Display for RetainPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RetainPolicy::VarianceFraction(v) => write!(f, "var:{v:.2}"),
            RetainPolicy::Kaiser => f.write_str("kaiser"),
            RetainPolicy::Fixed(k) => write!(f, "fixed:{k}"),
        }
    }
}

impl FromStr for RetainPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::invalid(format!(
                "bad PC policy {s:?} (expected var:F, kaiser or fixed:K)"
            ))
        };
        if s == "kaiser" {
            return Ok(RetainPolicy::Kaiser);
        }
        if let Some(v) = s.strip_prefix("var:") {
            let f: f64 = v.parse().map_err(|_| bad())?;
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid(format!(
                    "variance fraction must be in (0, 1], got {f}"
                )));
            }
            return Ok(RetainPolicy::VarianceFraction(f));
        }
        if let Some(v) = s.strip_prefix("fixed:") {
            let k: usize = v.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(Error::invalid("fixed PC count must be at least 1"));
            }
            return Ok(RetainPolicy::Fixed(k));
        }
        Err(bad())
    }
}

/// A fitted PCA model. `loadings` is d × m, row-major: `loadings[j][c]` is
/// the weight of attribute j in component c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcModel {
    pub mean: Vec<f64>,
    pub loadings: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub explained_ratio: Vec<f64>,
    pub n_samples: usize,
}

impl PcModel {
    pub fn n_attributes(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.singular_values.len()
    }

    /// Covariance eigenvalues, σ² / (n - 1).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let denom = (self.n_samples - 1) as f64;
        self.singular_values.iter().map(|s| s * s / denom).collect()
    }

    pub fn loading_column(&self, c: usize) -> Vec<f64> {
        self.loadings.iter().map(|row| row[c]).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Thin SVD `X = U · diag(s) · Vᵀ` with r = min(n, d) components, singular
/// values non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(x: &DMatrix<f64>) -> Svd {
    let (n, d) = x.shape();
    if n >= d {
        let (b, w) = jacobi_orthogonalize(x.clone());
        // X W = B: columns of B are u_j σ_j, W = V
        let (s, u) = split_norms(&b);
        let mut svd = Svd {
            u,
            singular_values: s,
            v: w,
        };
        sort_and_complete(&mut svd, true);
        svd
    } else {
        let (b, w) = jacobi_orthogonalize(x.transpose());
        // Xᵀ W = B: columns of B are v_j σ_j, W = U
        let (s, v) = split_norms(&b);
        let mut svd = Svd {
            u: w,
            singular_values: s,
            v,
        };
        sort_and_complete(&mut svd, false);
        svd
    }
}

// Rotates column pairs of `a` until mutually orthogonal; returns the
// rotated matrix and the accumulated orthogonal rotation.
fn jacobi_orthogonalize(mut a: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let k = a.ncols();
    let mut w = DMatrix::<f64>::identity(k, k);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dot(&a.column(j));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, i, j, c, s);
                rotate(&mut w, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    (a, w)
}

fn rotate(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let (p, q) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = c * p - s * q;
        m[(r, j)] = s * p + c * q;
    }
}

fn split_norms(b: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let mut dirs = b.clone();
    let mut s = Vec::with_capacity(b.ncols());
    for j in 0..b.ncols() {
        let norm = b.column(j).norm();
        s.push(norm);
        if norm > 0.0 {
            dirs.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    (s, dirs)
}

fn sort_and_complete(svd: &mut Svd, v_is_rotation: bool) {
    let r = svd.singular_values.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });
    let s: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| svd.u.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    let v = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| svd.v.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    let tol = s.first().copied().unwrap_or(0.0) * 1e-12;
    let null: Vec<bool> = s.iter().map(|&x| x <= tol).collect();
    svd.singular_values = s;
    // the factor built from B has arbitrary directions where σ vanishes
    if v_is_rotation {
        svd.u = complete_orthonormal(u, &null);
        svd.v = v;
    } else {
        svd.u = u;
        svd.v = complete_orthonormal(v, &null);
    }
    canonicalize_signs(svd);
}

// Replaces flagged columns with unit vectors orthogonal to all others,
// built by Gram-Schmidt over standard basis vectors.
fn complete_orthonormal(mut m: DMatrix<f64>, null: &[bool]) -> DMatrix<f64> {
    let rows = m.nrows();
    let mut kept: Vec<usize> = (0..m.ncols()).filter(|&j| !null[j]).collect();
    let mut candidate = 0;
    for j in (0..m.ncols()).filter(|&j| null[j]) {
        loop {
            if candidate >= rows {
                m.column_mut(j).fill(0.0);
                break;
            }
            let mut e = nalgebra::DVector::<f64>::zeros(rows);
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &k in &kept {
                    let proj = m.column(k).dot(&e);
                    e -= m.column(k) * proj;
                }
            }
            let norm = e.norm();
            if norm > 1e-8 {
                m.set_column(j, &(e / norm));
                kept.push(j);
                break;
            }
        }
    }
    m
}

fn canonicalize_signs(svd: &mut Svd) {
    for c in 0..svd.v.ncols() {
        let col = svd.v.column(c);
        let mut best = 0;
        for r in 1..col.len() {
            if col[r].abs() > col[best].abs() {
                best = r;
            }
        }
        if col[best] < 0.0 {
            svd.v.column_mut(c).neg_mut();
            svd.u.column_mut(c).neg_mut();
        }
    }
}

pub(crate) fn centered_matrix(table: &DataTable) -> (DMatrix<f64>, Vec<f64>) {
    let (n, d) = (table.n_objects(), table.n_attributes());
    let mean: Vec<f64> = (0..d)
        .map(|j| table.column(j).iter().sum::<f64>() / n as f64)
        .collect();
    let x = DMatrix::from_fn(n, d, |i, j| table.value(i, j) - mean[j]);
    (x, mean)
}

/// Fits PCA on the mean-centred table.
pub fn fit_pca(table: &DataTable, method: PcaMethod) -> Result<PcModel> {
    let n = table.n_objects();
    if n < 2 {
        return Err(Error::TooFewObjects {
            needed: 2,
            found: n,
        });
    }
    if let Some(pos) = table.values().iter().position(|v| !v.is_finite()) {
        let d = table.n_attributes();
        return Err(Error::NonFinite {
            row: pos / d,
            column: pos % d,
        });
    }
    let (x, mean) = centered_matrix(table);
    let m = n.min(table.n_attributes());
    let (singular_values, v) = match method {
        PcaMethod::Svd => {
            let s = svd(&x);
            (s.singular_values, s.v)
        }
        PcaMethod::CovarianceEigen => covariance_eigen(&x, m),
    };
    let total: f64 = singular_values.iter().map(|s| s * s).sum();
    let explained_ratio = singular_values
        .iter()
        .map(|s| if total > 0.0 { s * s / total } else { 0.0 })
        .collect();
    let loadings = (0..v.nrows())
        .map(|j| (0..m).map(|c| v[(j, c)]).collect())
        .collect();
    Ok(PcModel {
        mean,
        loadings,
        singular_values,
        explained_ratio,
        n_samples: n,
    })
}

fn covariance_eigen(x: &DMatrix<f64>, m: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = x.nrows();
    let cov = (x.transpose() * x) / (n - 1) as f64;
    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    order.truncate(m);
    let s: Vec<f64> = order
        .iter()
        .map(|&i| (eig.eigenvalues[i].max(0.0) * (n - 1) as f64).sqrt())
        .collect();
    let v = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    let mut out = Svd {
        u: DMatrix::zeros(0, m),
        singular_values: s,
        v,
    };
    canonicalize_signs(&mut out);
    (out.singular_values, out.v)
}

/// Number of components to keep under `policy`; always at least 1.
pub fn retain_count(model: &PcModel, policy: RetainPolicy) -> Result<usize> {
    let m = model.n_components();
    let k = match policy {
        RetainPolicy::VarianceFraction(f) => {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid(format!(
                    "variance fraction must be in (0, 1], got {f}"
                )));
            }
            let mut cum = 0.0;
            let mut k = m;
            for (i, r) in model.explained_ratio.iter().enumerate() {
                cum += r;
                // cumulative sums of ratios drift by a few ulps
                if cum >= f - 1e-12 {
                    k = i + 1;
                    break;
                }
            }
            k
        }
        RetainPolicy::Kaiser => {
            let ev = model.eigenvalues();
            let mean = ev.iter().sum::<f64>() / ev.len() as f64;
            ev.iter().filter(|&&e| e > mean).count()
        }
        RetainPolicy::Fixed(k) => k.min(m),
    };
    Ok(k.max(1))
}

/// PC scores `(t - mean) · loadings[:, ..k]`, named `PC1..PCk`.
pub fn transform(model: &PcModel, table: &DataTable, k: usize) -> Result<DataTable> {
    let d = model.n_attributes();
    if table.n_attributes() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: table.n_attributes(),
        });
    }
    check_k(model, k)?;
    let mut values = Vec::with_capacity(table.n_objects() * k);
    for row in table.rows() {
        for c in 0..k {
            values.push(
                row.iter()
                    .zip(&model.mean)
                    .zip(&model.loadings)
                    .map(|((x, m), l)| (x - m) * l[c])
                    .sum(),
            );
        }
    }
    let names = (1..=k).map(|c| format!("PC{c}")).collect();
    DataTable::from_row_major(
        table.name(),
        names,
        values,
        table.labels().map(<[String]>::to_vec),
    )
}

fn check_k(model: &PcModel, k: usize) -> Result<()> {
    if k == 0 || k > model.n_components() {
        return Err(Error::invalid(format!(
            "component count {k} outside 1..={}",
            model.n_components()
        )));
    }
    Ok(())
}

/// Scores each original attribute by its largest absolute loading over the
/// first `k` components; ranked descending, ties to the lower index.
///
/// Scores are rounded to 12 decimals so that loadings equal up to rounding
/// noise (common after z-scoring) count as ties.
pub fn loading_scores(model: &PcModel, k: usize) -> Result<RankedFeatures> {
    check_k(model, k)?;
    let entries = model
        .loadings
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let s = row[..k].iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
            (j, (s * 1e12).round() / 1e12)
        })
        .collect();
    Ok(RankedFeatures::descending(entries))
}
