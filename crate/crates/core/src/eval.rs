//! Classifiers, stratified cross-validation and the benchmark runner.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{
    project, DataTable, DiscreteTable, Discretizer, FeatureSubset, Registry, Strategy, ZScore,
};
use crate::error::{Error, Result};
use crate::selectors::{select, Method, SelectorConfig};

pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Assignment of every object to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub seed: u64,
    pub k: usize,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Shuffles each class (classes in sorted label order) with a ChaCha8
    /// stream seeded by `seed`, then deals objects round-robin into folds
    /// with one counter shared across classes.
    pub fn stratified(labels: &[String], k: usize, seed: u64) -> Result<Self> {
        let n = labels.len();
        if k < 2 || k > n {
            return Err(Error::invalid(format!(
                "fold count must be in 2..={n}, got {k}"
            )));
        }
        let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            by_class.entry(l.as_str()).or_default().push(i);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut assignments = vec![0; n];
        let mut next = 0;
        for members in by_class.values_mut() {
            members.shuffle(&mut rng);
            for &i in members.iter() {
                assignments[i] = next % k;
                next += 1;
            }
        }
        Ok(FoldPlan {
            seed,
            k,
            assignments,
        })
    }

    pub fn from_assignments(assignments: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = assignments.iter().find(|&&f| f >= k) {
            return Err(Error::invalid(format!("fold id {bad} outside 0..{k}")));
        }
        Ok(FoldPlan {
            seed: 0,
            k,
            assignments,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.assignments.len()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

// Most frequent label; ties go to the lexicographically first.
fn majority<'a>(labels: impl IntoIterator<Item = &'a str>) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut best: Option<(&str, usize)> = None;
    for (l, c) in counts {
        if best.is_none_or(|b| c > b.1) {
            best = Some((l, c));
        }
    }
    best.map(|b| b.0.to_string())
}

/// Gaussian naive Bayes with per-class MLE variances.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    classes: Vec<String>,
    log_prior: Vec<f64>,
    means: Vec<Vec<f64>>,
    vars: Vec<Vec<f64>>,
}

impl GaussianNb {
    pub fn fit(train: &DataTable) -> Result<Self> {
        let labels = train.labels().ok_or(Error::Unlabeled)?;
        let d = train.n_attributes();
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            groups.entry(l.as_str()).or_default().push(i);
        }
        let n = train.n_objects() as f64;
        let mut model = GaussianNb {
            classes: Vec::new(),
            log_prior: Vec::new(),
            means: Vec::new(),
            vars: Vec::new(),
        };
        for (class, rows) in groups {
            let m = rows.len() as f64;
            let mut mean = vec![0.0; d];
            for &i in &rows {
                for (acc, v) in mean.iter_mut().zip(train.row(i)) {
                    *acc += v;
                }
            }
            mean.iter_mut().for_each(|v| *v /= m);
            let mut var = vec![0.0; d];
            for &i in &rows {
                for ((acc, v), mu) in var.iter_mut().zip(train.row(i)).zip(&mean) {
                    *acc += (v - mu) * (v - mu);
                }
            }
            var.iter_mut()
                .for_each(|v| *v = (*v / m).max(VARIANCE_FLOOR));
            model.classes.push(class.to_string());
            model.log_prior.push((m / n).ln());
            model.means.push(mean);
            model.vars.push(var);
        }
        Ok(model)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Log prior plus summed log densities, one entry per class.
    pub fn log_scores(&self, row: &[f64]) -> Vec<f64> {
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        (0..self.classes.len())
            .map(|c| {
                let ll: f64 = row
                    .iter()
                    .zip(&self.means[c])
                    .zip(&self.vars[c])
                    .map(|((x, mu), var)| -0.5 * (ln_2pi + var.ln() + (x - mu) * (x - mu) / var))
                    .sum();
                self.log_prior[c] + ll
            })
            .collect()
    }

    pub fn predict(&self, row: &[f64]) -> &str {
        let scores = self.log_scores(row);
        let mut best = 0;
        for c in 1..scores.len() {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        &self.classes[best]
    }
}

/// k-nearest neighbours in z-scored Euclidean space; the scaler comes from
/// the training rows unless supplied.
#[derive(Debug, Clone)]
pub struct Knn {
    k: usize,
    scaler: Option<ZScore>,
    rows: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl Knn {
    pub fn fit(train: &DataTable, k: usize) -> Result<Self> {
        let scaler = if train.n_objects() >= 2 {
            Some(ZScore::fit(train)?)
        } else {
            None
        };
        Self::with_scaler(train, k, scaler)
    }

    pub fn with_scaler(train: &DataTable, k: usize, scaler: Option<ZScore>) -> Result<Self> {
        let labels = train.labels().ok_or(Error::Unlabeled)?.to_vec();
        if k == 0 || k > train.n_objects() {
            return Err(Error::invalid(format!(
                "k-NN needs 1 <= k <= {} training rows, got {k}",
                train.n_objects()
            )));
        }
        let rows = train.rows().map(|r| scale(scaler.as_ref(), r)).collect();
        Ok(Knn {
            k,
            scaler,
            rows,
            labels,
        })
    }

    pub fn predict(&self, row: &[f64]) -> &str {
        let q = scale(self.scaler.as_ref(), row);
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        // (votes, rank of first appearance) per label
        let mut votes: HashMap<&str, (usize, usize)> = HashMap::new();
        for (rank, &(_, i)) in dist[..self.k].iter().enumerate() {
            votes.entry(self.labels[i].as_str()).or_insert((0, rank)).0 += 1;
        }
        let (label, _) = votes
            .into_iter()
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
            .expect("k >= 1");
        label
    }
}

fn scale(scaler: Option<&ZScore>, row: &[f64]) -> Vec<f64> {
    match scaler {
        Some(s) => s.apply_row(row),
        None => row.to_vec(),
    }
}

/// Classifies `row` against `train` with a freshly fitted k-NN.
pub fn knn_predict(train: &DataTable, row: &[f64], k: usize) -> Result<String> {
    Ok(Knn::fit(train, k)?.predict(row).to_string())
}

/// Exact-match lookup on discretized tuples with a global-majority fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTable {
    lookup: HashMap<Vec<u32>, String>,
    fallback: String,
}

impl DecisionTable {
    pub fn fit(train: &DiscreteTable) -> Result<Self> {
        let labels = train.labels().ok_or(Error::Unlabeled)?;
        let mut groups: HashMap<Vec<u32>, Vec<&str>> = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            groups.entry(train.row(i)).or_default().push(l);
        }
        let lookup = groups
            .into_iter()
            .map(|(k, ls)| (k, majority(ls).expect("group is non-empty")))
            .collect();
        let fallback = majority(labels.iter().map(String::as_str)).ok_or(Error::Unlabeled)?;
        Ok(DecisionTable { lookup, fallback })
    }

    pub fn predict(&self, codes: &[u32]) -> &str {
        self.lookup.get(codes).unwrap_or(&self.fallback)
    }

    pub fn fallback(&self) -> &str {
        &self.fallback
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    #[serde(rename = "nb")]
    NaiveBayes,
    Knn(usize),
    #[serde(rename = "dtable")]
    DecisionTable,
}

impl ClassifierKind {
    pub const DEFAULT_K: usize = 3;
    pub const ALL: [ClassifierKind; 3] = [
        ClassifierKind::NaiveBayes,
        ClassifierKind::Knn(Self::DEFAULT_K),
        ClassifierKind::DecisionTable,
    ];

    pub fn title(self) -> String {
        match self {
            ClassifierKind::NaiveBayes => "Naive Bayes".into(),
            ClassifierKind::Knn(k) => format!("k-NN (k={k})"),
            ClassifierKind::DecisionTable => "Decision Table".into(),
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierKind::NaiveBayes => f.write_str("nb"),
            ClassifierKind::Knn(k) if *k == Self::DEFAULT_K => f.write_str("knn"),
            ClassifierKind::Knn(k) => write!(f, "knn:{k}"),
            ClassifierKind::DecisionTable => f.write_str("dtable"),
        }
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(ClassifierKind::NaiveBayes),
            "knn" => Ok(ClassifierKind::Knn(Self::DEFAULT_K)),
            "dtable" => Ok(ClassifierKind::DecisionTable),
            _ => match s.strip_prefix("knn:").map(str::parse::<usize>) {
                Some(Ok(k)) if k % 2 == 1 => Ok(ClassifierKind::Knn(k)),
                Some(Ok(k)) => Err(Error::invalid(format!("k-NN needs an odd k, got {k}"))),
                _ => Err(Error::invalid(format!(
                    "unknown classifier {s:?} (valid classifiers: nb, knn, knn:K, dtable)"
                ))),
            },
        }
    }
}

/// Preprocessing knobs shared by all folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    pub strategy: Strategy,
    pub bins: usize,
    /// Fit scalers and cut points on the whole table instead of the
    /// training folds. Leaks test-fold statistics; kept for comparison.
    pub global_prep: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            strategy: Strategy::EqualFrequency,
            bins: 3,
            global_prep: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub fold_accuracies: Vec<f64>,
    pub fold_sizes: Vec<usize>,
}

/// Accuracy (percent) of `classifier` on `subset`, trained out-of-fold and
/// tested in-fold for every fold of `plan`.
pub fn cross_validate(
    table: &DataTable,
    subset: &FeatureSubset,
    classifier: ClassifierKind,
    plan: &FoldPlan,
    opts: &CvOptions,
) -> Result<CvResult> {
    let labels = table.labels().ok_or(Error::Unlabeled)?;
    if plan.n_objects() != table.n_objects() {
        return Err(Error::DimensionMismatch {
            expected: table.n_objects(),
            found: plan.n_objects(),
        });
    }
    let data = project(table, subset)?;
    let global_scaler = match (opts.global_prep, classifier) {
        (true, ClassifierKind::Knn(_)) => Some(ZScore::fit(&data)?),
        _ => None,
    };
    let global_cuts = match (opts.global_prep, classifier) {
        (true, ClassifierKind::DecisionTable) => {
            Some(Discretizer::fit(&data, opts.strategy, opts.bins)?)
        }
        _ => None,
    };
    let (mut correct, mut total) = (0, 0);
    let mut fold_accuracies = Vec::with_capacity(plan.k);
    let mut fold_sizes = Vec::with_capacity(plan.k);
    for fold in 0..plan.k {
        let test = plan.test_indices(fold);
        let train_idx = plan.train_indices(fold);
        if train_idx.is_empty() {
            return Err(Error::EmptyTrainingFold(fold));
        }
        let train = data.select_rows(&train_idx)?;
        let predictions: Vec<String> = match classifier {
            ClassifierKind::NaiveBayes => {
                let m = GaussianNb::fit(&train)?;
                test.iter()
                    .map(|&i| m.predict(data.row(i)).to_string())
                    .collect()
            }
            ClassifierKind::Knn(k) => {
                let m = match &global_scaler {
                    Some(s) => Knn::with_scaler(&train, k.min(train.n_objects()), Some(s.clone()))?,
                    None => Knn::fit(&train, k.min(train.n_objects()))?,
                };
                test.iter()
                    .map(|&i| m.predict(data.row(i)).to_string())
                    .collect()
            }
            ClassifierKind::DecisionTable => {
                let cuts = match &global_cuts {
                    Some(c) => c.clone(),
                    None => Discretizer::fit(&train, opts.strategy, opts.bins)?,
                };
                let m = DecisionTable::fit(&cuts.apply(&train)?)?;
                test.iter()
                    .map(|&i| {
                        let codes: Vec<u32> = data
                            .row(i)
                            .iter()
                            .enumerate()
                            .map(|(j, &x)| cuts.code(j, x))
                            .collect();
                        m.predict(&codes).to_string()
                    })
                    .collect()
            }
        };
        let hits = test
            .iter()
            .zip(&predictions)
            .filter(|(&i, p)| labels[i] == **p)
            .count();
        correct += hits;
        total += test.len();
        fold_sizes.push(test.len());
        fold_accuracies.push(if test.is_empty() {
            0.0
        } else {
            100.0 * hits as f64 / test.len() as f64
        });
    }
    Ok(CvResult {
        accuracy: 100.0 * correct as f64 / total as f64,
        correct,
        total,
        fold_accuracies,
        fold_sizes,
    })
}

/// Hex SHA-256 of the JSON serialization of `value`, truncated to 16 digits.
pub fn fingerprint<T: Serialize>(value: &T) -> Result<String> {
    let json = serde_json::to_vec(value)?;
    let digest = Sha256::digest(&json);
    Ok(digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

/// Everything that determines a benchmark's numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub selector: SelectorConfig,
    pub cv: CvOptions,
    pub folds: usize,
    pub seed: u64,
    /// Feature count for PCA and EDR when the registry entry pins none.
    pub k: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            selector: SelectorConfig::default(),
            cv: CvOptions::default(),
            folds: 10,
            seed: 1,
            k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset: String,
    pub method: Method,
    pub classifier: ClassifierKind,
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    pub fold_sizes: Vec<usize>,
    /// 1-based attribute indices in selection order.
    pub subset: Vec<usize>,
    pub fingerprint: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportError {
    pub dataset: String,
    pub method: Option<Method>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fingerprint: String,
    pub seed: u64,
    pub folds: usize,
    pub rows: Vec<ReportRow>,
    pub errors: Vec<ReportError>,
}

impl EvalReport {
    pub fn new(fingerprint: String, seed: u64, folds: usize) -> Self {
        EvalReport {
            fingerprint,
            seed,
            folds,
            rows: Vec::new(),
            errors: Vec::new(),
        }
    }

    /// Orders rows by (dataset, method, classifier) so assembly order never
    /// shows in the output.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.dataset.as_str(), a.method, a.classifier).cmp(&(
                b.dataset.as_str(),
                b.method,
                b.classifier,
            ))
        });
    }

    pub fn find(
        &self,
        dataset: &str,
        method: Method,
        classifier: ClassifierKind,
    ) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset && r.method == method && r.classifier == classifier)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn datasets(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.rows.iter().map(|r| r.dataset.as_str()).collect();
        names.dedup();
        names
    }

    fn grid(&self, dataset: &str) -> (Vec<Method>, Vec<ClassifierKind>) {
        let rows = self.rows.iter().filter(|r| r.dataset == dataset);
        let mut methods: Vec<Method> = rows.clone().map(|r| r.method).collect();
        let mut classifiers: Vec<ClassifierKind> = rows.map(|r| r.classifier).collect();
        methods.sort_by_key(|m| Method::ALL.iter().position(|x| x == m));
        methods.dedup();
        classifiers.sort();
        classifiers.dedup();
        (methods, classifiers)
    }

    /// One block per dataset: classifiers down, methods across, 4-decimal
    /// percentages, followed by the subsets each method selected.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for ds in self.datasets() {
            let (methods, classifiers) = self.grid(ds);
            let _ = writeln!(
                out,
                "CLASSIFICATION ACCURACY FOR {}",
                ds.to_uppercase().replace('_', " ")
            );
            let _ = write!(out, "{:<18}", "Classifier");
            for m in &methods {
                let _ = write!(out, "{:>12}", m.title());
            }
            out.push('\n');
            for c in &classifiers {
                let _ = write!(out, "{:<18}", c.title());
                for &m in &methods {
                    match self.find(ds, m, *c) {
                        Some(r) => {
                            let _ = write!(out, "{:>12.4}", r.accuracy);
                        }
                        None => {
                            let _ = write!(out, "{:>12}", "-");
                        }
                    }
                }
                out.push('\n');
            }
            for &m in &methods {
                if let Some(r) = self.rows.iter().find(|r| r.dataset == ds && r.method == m) {
                    let list: Vec<String> = r.subset.iter().map(usize::to_string).collect();
                    let _ = writeln!(out, "  {:<10} {}", m.title(), list.join(","));
                }
            }
            out.push('\n');
        }
        for e in &self.errors {
            let what = e.method.map_or_else(String::new, |m| format!(" [{m}]"));
            let _ = writeln!(out, "FAILED {}{what}: {}", e.dataset, e.message);
        }
        let _ = writeln!(
            out,
            "seed {}  folds {}  config {}",
            self.seed, self.folds, self.fingerprint
        );
        out
    }

    /// `dataset,classifier,<method>...` rows with 4-decimal percentages.
    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        let methods: Vec<Method> = Method::ALL
            .into_iter()
            .filter(|m| self.rows.iter().any(|r| r.method == *m))
            .collect();
        out.push_str("dataset,classifier");
        for m in &methods {
            let _ = write!(out, ",{m}");
        }
        out.push('\n');
        for ds in self.datasets() {
            let (_, classifiers) = self.grid(ds);
            for c in classifiers {
                let _ = write!(out, "{ds},{c}");
                for &m in &methods {
                    match self.find(ds, m, c) {
                        Some(r) => {
                            let _ = write!(out, ",{:.4}", r.accuracy);
                        }
                        None => out.push(','),
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Evaluates every selected dataset × method × classifier with one shared
/// fold plan per dataset. Failures are recorded in the report and the run
/// carries on. An empty `datasets` means every registry entry.
pub fn run_benchmark(
    registry: &Registry,
    datasets: &[String],
    methods: &[Method],
    classifiers: &[ClassifierKind],
    cfg: &BenchConfig,
) -> Result<EvalReport> {
    let mut report = EvalReport::new(fingerprint(cfg)?, cfg.seed, cfg.folds);
    let names: Vec<String> = if datasets.is_empty() {
        registry.names().into_iter().map(String::from).collect()
    } else {
        datasets.to_vec()
    };
    for name in &names {
        let fail = |method: Option<Method>, e: &dyn fmt::Display| ReportError {
            dataset: name.clone(),
            method,
            message: e.to_string(),
        };
        let Some(entry) = registry.get(name) else {
            report.errors.push(fail(
                None,
                &format!("not in registry (known: {})", registry.names().join(", ")),
            ));
            continue;
        };
        let prepared = entry.load().and_then(|t| {
            let labels = t.labels().ok_or(Error::Unlabeled)?;
            let plan = FoldPlan::stratified(labels, cfg.folds, cfg.seed)?;
            Ok((t, plan))
        });
        let (table, plan) = match prepared {
            Ok(p) => p,
            Err(e) => {
                report.errors.push(fail(None, &e));
                continue;
            }
        };
        let selector = SelectorConfig {
            edr_k: entry.edr_k.or(cfg.k),
            ..cfg.selector
        };
        for &method in methods {
            let k = match method {
                Method::Pca => entry.pca_k.or(cfg.k),
                Method::Edr => selector.edr_k,
                _ => None,
            };
            let subset = match select(method, &table, &selector, k) {
                Ok(s) => s.subset,
                Err(e) => {
                    report.errors.push(fail(Some(method), &e));
                    continue;
                }
            };
            for &classifier in classifiers {
                match cross_validate(&table, &subset, classifier, &plan, &cfg.cv) {
                    Ok(cv) => report.rows.push(ReportRow {
                        dataset: name.clone(),
                        method,
                        classifier,
                        accuracy: cv.accuracy,
                        fold_accuracies: cv.fold_accuracies,
                        fold_sizes: cv.fold_sizes,
                        subset: subset.to_one_based(),
                        fingerprint: report.fingerprint.clone(),
                        seed: cfg.seed,
                    }),
                    Err(e) => report.errors.push(fail(Some(method), &e)),
                }
            }
        }
    }
    report.sort();
    Ok(report)
}
