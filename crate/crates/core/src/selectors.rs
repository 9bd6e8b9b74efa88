//! The four unsupervised selectors: PCA loadings, Rough-PCA, EDR and USQR.
//!
//! Every tie anywhere is broken towards the lowest attribute index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{
    discretize, project, zscore_normalize, DataTable, DiscreteTable, FeatureSubset, Strategy,
};
use crate::error::{Error, Result};
use crate::pca::{fit_pca, loading_scores, retain_count, PcaMethod, RetainPolicy};
use crate::roughset::{block_ids, mean_dependency_from_ids, refine_ids};

/// Per-attribute scores in ranking order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeatures {
    entries: Vec<(usize, f64)>,
}

impl RankedFeatures {
    /// Sorts by ascending score, lower index first on ties.
    pub fn ascending(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        RankedFeatures { entries }
    }

    /// Sorts by descending score, lower index first on ties.
    pub fn descending(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        RankedFeatures { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The first `k` attributes. Errors unless `1 <= k <= len`.
    pub fn top(&self, k: usize) -> Result<FeatureSubset> {
        if k == 0 || k > self.entries.len() {
            return Err(Error::invalid(format!(
                "k must be in 1..={}, got {k}",
                self.entries.len()
            )));
        }
        FeatureSubset::new(self.entries[..k].iter().map(|e| e.0).collect())
    }
}

/// Renders `index:score` pairs, 1-based, in ranking order.
impl fmt::Display for RankedFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (i, s)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}:{s:.6}", i + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub pc_policy: RetainPolicy,
    pub strategy: Strategy,
    pub bins: usize,
    pub edr_k: Option<usize>,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            pc_policy: RetainPolicy::default(),
            strategy: Strategy::EqualFrequency,
            bins: 3,
            edr_k: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pca,
    #[serde(rename = "roughpca")]
    RoughPca,
    Edr,
    Usqr,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pca, Method::RoughPca, Method::Edr, Method::Usqr];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::RoughPca => "roughpca",
            Method::Edr => "edr",
            Method::Usqr => "usqr",
        }
    }

    /// Column heading used in accuracy tables.
    pub fn title(self) -> &'static str {
        match self {
            Method::Pca => "PCA",
            Method::RoughPca => "Rough PCA",
            Method::Edr => "EDR",
            Method::Usqr => "USQR",
        }
    }

    pub fn needs_k(self) -> bool {
        matches!(self, Method::Pca | Method::Edr)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pca" => Ok(Method::Pca),
            "roughpca" | "rough-pca" => Ok(Method::RoughPca),
            "edr" => Ok(Method::Edr),
            "usqr" => Ok(Method::Usqr),
            _ => Err(Error::invalid(format!(
                "unknown method {s:?} (valid methods: pca, roughpca, edr, usqr)"
            ))),
        }
    }
}

/// A selector's output: the subset plus, for ranking methods, the full
/// ranking it was cut from.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub subset: FeatureSubset,
    pub ranking: Option<RankedFeatures>,
}

/// Runs `method` on `table`. `k` is required by `pca` and `edr` (for EDR it
/// falls back to `cfg.edr_k`) and ignored otherwise.
pub fn select(
    method: Method,
    table: &DataTable,
    cfg: &SelectorConfig,
    k: Option<usize>,
) -> Result<Selection> {
    let need =
        |k: Option<usize>| k.ok_or_else(|| Error::invalid(format!("method {method} needs --k")));
    match method {
        Method::Pca => {
            let ranking = pca_ranking(table, cfg)?;
            Ok(Selection {
                subset: ranking.top(need(k)?)?,
                ranking: Some(ranking),
            })
        }
        Method::Edr => {
            let ranking = edr_scores(table);
            Ok(Selection {
                subset: ranking.top(need(k.or(cfg.edr_k))?)?,
                ranking: Some(ranking),
            })
        }
        Method::RoughPca => Ok(Selection {
            subset: rough_pca_select(table, cfg)?,
            ranking: None,
        }),
        Method::Usqr => {
            let coded = discretize(table, cfg.strategy, cfg.bins)?;
            Ok(Selection {
                subset: usqr(&coded),
                ranking: None,
            })
        }
    }
}

// z-score -> PCA -> retained components -> loading ranking
fn pca_ranking(table: &DataTable, cfg: &SelectorConfig) -> Result<RankedFeatures> {
    let z = zscore_normalize(table)?;
    let model = fit_pca(&z, PcaMethod::Svd)?;
    let retained = retain_count(&model, cfg.pc_policy)?;
    loading_scores(&model, retained)
}

/// Top-`k` attributes by max |loading| over the retained components.
pub fn pca_select(table: &DataTable, cfg: &SelectorConfig, k: usize) -> Result<FeatureSubset> {
    if k > table.n_attributes() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the {} attributes",
            table.n_attributes()
        )));
    }
    pca_ranking(table, cfg)?.top(k)
}

/// Preselects as many top-loading attributes as there are retained
/// components, discretizes them and reduces them with [`usqr`]. The result
/// is in original attribute indices.
pub fn rough_pca_select(table: &DataTable, cfg: &SelectorConfig) -> Result<FeatureSubset> {
    if table.n_attributes() < 2 {
        return Err(Error::invalid("rough PCA needs at least two attributes"));
    }
    let z = zscore_normalize(table)?;
    let model = fit_pca(&z, PcaMethod::Svd)?;
    let retained = retain_count(&model, cfg.pc_policy)?;
    let pre = loading_scores(&model, retained)?.top(retained)?;
    if pre.len() == 1 {
        return Ok(pre);
    }
    let coded = discretize(&project(&z, &pre)?, cfg.strategy, cfg.bins)?;
    pre.compose(&usqr(&coded))
}

/// Empirical distribution at the column mean, `|{i : x_ij <= mean_j}| / n`,
/// ranked ascending.
pub fn edr_scores(table: &DataTable) -> RankedFeatures {
    let n = table.n_objects();
    let entries = (0..table.n_attributes())
        .map(|j| {
            let col = table.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let below = col.iter().filter(|&&x| x <= mean).count();
            (j, below as f64 / n as f64)
        })
        .collect();
    RankedFeatures::ascending(entries)
}

pub fn edr_select(table: &DataTable, k: usize) -> Result<FeatureSubset> {
    edr_scores(table).top(k)
}

/// Unsupervised quick reduct: greedy forward selection on mean dependency,
/// stopping once the full set's mean dependency is matched exactly.
/// Attributes are returned in the order they were added.
pub fn usqr(table: &DiscreteTable) -> FeatureSubset {
    let d = table.n_attributes();
    let all: Vec<usize> = (0..d).collect();
    let target = mean_dependency_from_ids(table, &block_ids(table, &all));
    let mut chosen = Vec::new();
    let mut ids = vec![0usize; table.n_objects()];
    loop {
        let mut best: Option<(usize, Vec<usize>, _)> = None;
        for x in (0..d).filter(|x| !chosen.contains(x)) {
            let cand = refine_ids(&ids, table.column(x));
            let score = mean_dependency_from_ids(table, &cand);
            if best.as_ref().is_none_or(|b| score > b.2) {
                best = Some((x, cand, score));
            }
        }
        // the loop ends at R = C at the latest, where the target holds
        let (x, cand, score) = best.expect("unselected attribute remains while below target");
        chosen.push(x);
        ids = cand;
        if score == target {
            break;
        }
    }
    FeatureSubset::new(chosen).expect("greedy picks are distinct")
}
