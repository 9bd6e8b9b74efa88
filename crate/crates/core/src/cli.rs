//! The `unselect` command line.
//!
//! Results go to stdout (or `--out`), diagnostics to stderr. Exit codes:
//! 0 success, 1 internal error, 2 bad configuration, 3 bad data, 4 some
//! benchmark dataset failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dataset::zscore_normalize;
use crate::dataset::{
    load, DataTable, FeatureSubset, LabelColumn, LoadOptions, MissingPolicy, Registry, Strategy,
    DATA_DIR_ENV,
};
use crate::error::Error;
use crate::eval::{
    cross_validate, fingerprint, run_benchmark, BenchConfig, ClassifierKind, CvOptions, EvalReport,
    FoldPlan, ReportRow,
};
use crate::pca::{fit_pca, PcaMethod, RetainPolicy};
use crate::selectors::{select, Method, SelectorConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_BENCH_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "unselect",
    version,
    about = "Unsupervised feature selection and evaluation"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select features from one dataset.
    Select(SelectArgs),
    /// Cross-validate classifiers on one dataset's selected features.
    Evaluate(EvaluateArgs),
    /// Run the method × classifier grid over registry datasets.
    Bench(BenchArgs),
    /// Re-render a saved JSON benchmark report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset file (CSV or ARFF) or registry name.
    #[arg(long)]
    pub data: String,

    /// Label column: `none`, `last`, 1-based index or column name. Ignored
    /// for registry names. [default: none for select, last for evaluate]
    #[arg(long)]
    pub label: Option<String>,

    /// File has no header row.
    #[arg(long, default_value_t = false)]
    pub no_header: bool,

    /// Missing cells (`?`, `NA`, empty): reject the file or impute column means.
    #[arg(long, value_parser = ["reject", "impute"], default_value = "reject")]
    pub missing: String,

    /// Registry consulted when `--data` is not a file.
    /// [default: $UNSELECT_DATA_DIR/registry.txt, else data/registry.txt]
    #[arg(long)]
    pub registry: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelectorArgs {
    /// Number of features kept by pca and edr.
    #[arg(long)]
    pub k: Option<usize>,

    /// Bins per attribute for discretization.
    #[arg(long, default_value_t = 3)]
    pub bins: usize,

    /// Discretization strategy: eqwidth or eqfreq.
    #[arg(long, default_value = "eqfreq")]
    pub strategy: String,

    /// Principal components retained: var:F, kaiser or fixed:K.
    #[arg(long, default_value = "var:0.90")]
    pub pc_policy: String,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write results here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// TOML file of flag defaults; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Selection method: pca, roughpca, edr or usqr.
    #[arg(long)]
    pub method: String,

    #[command(flatten)]
    pub selector: SelectorArgs,

    /// Also write the fitted PCA model (z-scored data) as JSON.
    #[arg(long)]
    pub dump_model: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CvArgs {
    /// Comma-separated classifiers: nb, knn, knn:K, dtable.
    #[arg(long, value_delimiter = ',', default_value = "nb,knn,dtable")]
    pub classifiers: Vec<String>,

    /// Cross-validation folds.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    /// Seed for fold assignment.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Fit scalers and cut points on the whole dataset instead of per fold.
    #[arg(long, default_value_t = false)]
    pub global_prep: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Selection method: pca, roughpca, edr or usqr. Omit with --subset.
    #[arg(long)]
    pub method: Option<String>,

    /// Evaluate this 1-based subset (e.g. `2,7,8`) instead of selecting.
    #[arg(long, conflicts_with = "method")]
    pub subset: Option<String>,

    #[command(flatten)]
    pub selector: SelectorArgs,

    #[command(flatten)]
    pub cv: CvArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Dataset registry file.
    /// [default: $UNSELECT_DATA_DIR/registry.txt, else data/registry.txt]
    #[arg(long)]
    pub registry: Option<PathBuf>,

    /// Comma-separated registry names. [default: every entry]
    #[arg(long, value_delimiter = ',')]
    pub datasets: Vec<String>,

    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "pca,roughpca,edr,usqr")]
    pub methods: Vec<String>,

    #[command(flatten)]
    pub selector: SelectorArgs,

    #[command(flatten)]
    pub cv: CvArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// JSON report written by `bench`.
    #[arg(long)]
    pub input: PathBuf,

    #[command(flatten)]
    pub output: OutputArgs,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_)
            | Error::IndexOutOfRange { .. }
            | Error::DuplicateIndex(_) => EXIT_CONFIG,
            ref e if e.is_data_error() => EXIT_DATA,
            _ => EXIT_INTERNAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return e.code;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

// Splices `--key value` pairs from a `--config` TOML file in front of the
// explicit arguments; with args_override_self the explicit ones win.
fn merge_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let path = match pos {
        Some(p) => args
            .get(p + 1)
            .ok_or_else(|| CliError::config("--config needs a file"))?
            .clone(),
        None => match args
            .iter()
            .find_map(|a| a.to_str()?.strip_prefix("--config=").map(OsString::from))
        {
            Some(p) => p,
            None => return Ok(args),
        },
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::config(format!("{}: {e}", Path::new(&path).display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::config(format!("{}: {e}", Path::new(&path).display())))?;
    let mut injected = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => injected.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => injected.extend([flag.into(), s.into()]),
            toml::Value::Integer(i) => injected.extend([flag.into(), i.to_string().into()]),
            toml::Value::Float(f) => injected.extend([flag.into(), f.to_string().into()]),
            toml::Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                injected.extend([flag.into(), parts.join(",").into()]);
            }
            other => {
                return Err(CliError::config(format!(
                    "config key {key:?}: unsupported value {other}"
                )))
            }
        }
    }
    // right after the subcommand name
    let at = args.len().min(2);
    let mut out = args[..at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn execute(command: Command) -> CliResult<i32> {
    match command {
        Command::Select(a) => cmd_select(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

fn default_registry() -> PathBuf {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join("registry.txt"),
        None => PathBuf::from("data").join("registry.txt"),
    }
}

#[derive(Debug, Clone, Serialize)]
struct DataSource {
    data: String,
    label: String,
    header: bool,
    missing: String,
}

struct Loaded {
    table: DataTable,
    source: DataSource,
    pca_k: Option<usize>,
    edr_k: Option<usize>,
}

fn load_data(a: &DataArgs, default_label: &str) -> CliResult<Loaded> {
    let label_text = a.label.clone().unwrap_or_else(|| default_label.to_string());
    let source = DataSource {
        data: a.data.clone(),
        label: label_text.clone(),
        header: !a.no_header,
        missing: a.missing.clone(),
    };
    if Path::new(&a.data).is_file() {
        let opts = LoadOptions {
            has_header: !a.no_header,
            label: LabelColumn::parse(&label_text)?,
            missing: if a.missing == "impute" {
                MissingPolicy::MeanImpute
            } else {
                MissingPolicy::Reject
            },
        };
        return Ok(Loaded {
            table: load(&a.data, &opts)?,
            source,
            pca_k: None,
            edr_k: None,
        });
    }
    let registry_path = a.registry.clone().unwrap_or_else(default_registry);
    let registry = if registry_path.is_file() {
        Some(Registry::load(&registry_path)?)
    } else {
        None
    };
    match registry.as_ref().and_then(|r| r.get(&a.data)) {
        Some(entry) => Ok(Loaded {
            table: entry.load()?,
            source,
            pca_k: entry.pca_k,
            edr_k: entry.edr_k,
        }),
        None => Err(CliError {
            code: EXIT_DATA,
            message: format!(
                "{}: no such file, and not a dataset in {}",
                a.data,
                registry_path.display()
            ),
        }),
    }
}

fn selector_config(a: &SelectorArgs) -> CliResult<SelectorConfig> {
    Ok(SelectorConfig {
        pc_policy: a.pc_policy.parse::<RetainPolicy>()?,
        strategy: a.strategy.parse::<Strategy>()?,
        bins: match a.bins {
            b if b >= 2 => b,
            b => {
                return Err(CliError::config(format!(
                    "--bins must be at least 2, got {b}"
                )))
            }
        },
        edr_k: a.k,
    })
}

fn parse_classifiers(names: &[String]) -> CliResult<Vec<ClassifierKind>> {
    names
        .iter()
        .map(|s| s.trim().parse::<ClassifierKind>().map_err(CliError::from))
        .collect()
}

fn parse_method(name: &str) -> CliResult<Method> {
    Ok(name.parse::<Method>()?)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e).into()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError {
                    code: EXIT_INTERNAL,
                    message: format!("stdout: {e}"),
                })
        }
    }
}

#[derive(Serialize)]
struct SelectParams<'a> {
    command: &'static str,
    source: &'a DataSource,
    method: Method,
    k: Option<usize>,
    selector: &'a SelectorConfig,
}

#[derive(Serialize)]
struct SelectOutput<'a> {
    dataset: &'a str,
    method: Method,
    subset: Vec<usize>,
    names: Vec<&'a str>,
    ranking: Option<Vec<(usize, f64)>>,
    fingerprint: String,
}

fn cmd_select(a: &SelectArgs) -> CliResult<i32> {
    let method = parse_method(&a.method)?;
    let mut cfg = selector_config(&a.selector)?;
    let loaded = load_data(&a.data, "none")?;
    let k = match method {
        Method::Pca => a.selector.k.or(loaded.pca_k),
        Method::Edr => a.selector.k.or(loaded.edr_k),
        _ => a.selector.k,
    };
    cfg.edr_k = if method == Method::Edr { k } else { None };
    if method.needs_k() && k.is_none() {
        return Err(CliError::config(format!("method {method} needs --k")));
    }
    let table = &loaded.table;
    let fp = fingerprint(&SelectParams {
        command: "select",
        source: &loaded.source,
        method,
        k,
        selector: &cfg,
    })?;
    let selection = select(method, table, &cfg, k)?;
    if let Some(path) = &a.dump_model {
        let model = fit_pca(&zscore_normalize(table)?, PcaMethod::Svd)?;
        fs::write(path, model.to_json()? + "\n").map_err(|e| Error::io(path, e))?;
    }
    let subset = &selection.subset;
    let names: Vec<&str> = subset
        .indices()
        .iter()
        .map(|&j| table.attr_names()[j].as_str())
        .collect();
    let text = match a.output.format {
        Format::Table => {
            let mut s = format!("subset {subset}\n");
            s += &format!("names {}\n", names.join(","));
            if let Some(r) = &selection.ranking {
                s += &format!("ranking {r}\n");
            }
            s + &format!("config {fp}\n")
        }
        Format::Csv => {
            let mut s = String::from("rank,attribute,name\n");
            for (rank, (&j, name)) in subset.indices().iter().zip(&names).enumerate() {
                s += &format!("{},{},{name}\n", rank + 1, j + 1);
            }
            s
        }
        Format::Json => {
            let out = SelectOutput {
                dataset: table.name(),
                method,
                subset: subset.to_one_based(),
                names,
                ranking: selection
                    .ranking
                    .as_ref()
                    .map(|r| r.entries().iter().map(|&(j, s)| (j + 1, s)).collect()),
                fingerprint: fp,
            };
            serde_json::to_string_pretty(&out).map_err(Error::from)? + "\n"
        }
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EvaluateParams<'a> {
    command: &'static str,
    source: &'a DataSource,
    method: Option<Method>,
    subset: Option<&'a str>,
    k: Option<usize>,
    selector: &'a SelectorConfig,
    classifiers: &'a [ClassifierKind],
    folds: usize,
    seed: u64,
    global_prep: bool,
}

fn cmd_evaluate(a: &EvaluateArgs) -> CliResult<i32> {
    let method = a.method.as_deref().map(parse_method).transpose()?;
    if method.is_none() && a.subset.is_none() {
        return Err(CliError::config("evaluate needs --method or --subset"));
    }
    let cfg = selector_config(&a.selector)?;
    let classifiers = parse_classifiers(&a.cv.classifiers)?;
    let loaded = load_data(&a.data, "last")?;
    let table = &loaded.table;
    let labels = table.labels().ok_or(Error::Unlabeled)?;
    let fp = fingerprint(&EvaluateParams {
        command: "evaluate",
        source: &loaded.source,
        method,
        subset: a.subset.as_deref(),
        k: a.selector.k,
        selector: &cfg,
        classifiers: &classifiers,
        folds: a.cv.folds,
        seed: a.cv.seed,
        global_prep: a.cv.global_prep,
    })?;
    let (method, subset) = match (method, &a.subset) {
        (Some(m), _) => {
            let k = match m {
                Method::Pca => a.selector.k.or(loaded.pca_k),
                Method::Edr => a.selector.k.or(loaded.edr_k),
                _ => None,
            };
            if m.needs_k() && k.is_none() {
                return Err(CliError::config(format!("method {m} needs --k")));
            }
            let cfg = SelectorConfig { edr_k: k, ..cfg };
            (m, select(m, table, &cfg, k)?.subset)
        }
        (None, Some(s)) => {
            let s = FeatureSubset::parse_one_based(s)?;
            s.check_bounds(table.n_attributes())?;
            if s.is_empty() {
                return Err(CliError::config("--subset is empty"));
            }
            // reported under the EDR column only for lack of a better slot
            (Method::Edr, s)
        }
        (None, None) => unreachable!(),
    };
    let plan = FoldPlan::stratified(labels, a.cv.folds, a.cv.seed)?;
    let opts = CvOptions {
        strategy: cfg.strategy,
        bins: cfg.bins,
        global_prep: a.cv.global_prep,
    };
    let mut report = EvalReport::new(fp.clone(), a.cv.seed, a.cv.folds);
    for &c in &classifiers {
        let cv = cross_validate(table, &subset, c, &plan, &opts)?;
        report.rows.push(ReportRow {
            dataset: table.name().to_string(),
            method,
            classifier: c,
            accuracy: cv.accuracy,
            fold_accuracies: cv.fold_accuracies,
            fold_sizes: cv.fold_sizes,
            subset: subset.to_one_based(),
            fingerprint: fp.clone(),
            seed: a.cv.seed,
        });
    }
    report.sort();
    emit(a.output.out.as_deref(), &render(&report, a.output.format)?)?;
    Ok(EXIT_OK)
}

fn render(report: &EvalReport, format: Format) -> CliResult<String> {
    Ok(match format {
        Format::Table => report.render_table(),
        Format::Csv => report.render_csv(),
        Format::Json => report.to_json()?,
    })
}

fn cmd_bench(a: &BenchArgs) -> CliResult<i32> {
    let methods = a
        .methods
        .iter()
        .map(|m| parse_method(m.trim()))
        .collect::<CliResult<Vec<_>>>()?;
    let classifiers = parse_classifiers(&a.cv.classifiers)?;
    let selector = selector_config(&a.selector)?;
    let cfg = BenchConfig {
        selector: SelectorConfig {
            edr_k: None,
            ..selector
        },
        cv: CvOptions {
            strategy: selector.strategy,
            bins: selector.bins,
            global_prep: a.cv.global_prep,
        },
        folds: a.cv.folds,
        seed: a.cv.seed,
        k: a.selector.k,
    };
    if cfg.folds < 2 {
        return Err(CliError::config("--folds must be at least 2"));
    }
    let registry_path = a.registry.clone().unwrap_or_else(default_registry);
    let registry = Registry::load(&registry_path)?;
    let report = run_benchmark(&registry, &a.datasets, &methods, &classifiers, &cfg)?;
    let text = render(&report, a.output.format)?;
    emit(a.output.out.as_deref(), &text)?;
    // a machine-readable copy next to a rendered table
    if let (Some(out), Format::Table | Format::Csv) = (&a.output.out, a.output.format) {
        let json_path = out.with_extension("json");
        if json_path != *out {
            fs::write(&json_path, report.to_json()?).map_err(|e| Error::io(&json_path, e))?;
        }
    }
    for e in &report.errors {
        let what = e.method.map_or_else(String::new, |m| format!(" [{m}]"));
        eprintln!("dataset {}{what} failed: {}", e.dataset, e.message);
    }
    Ok(if report.errors.is_empty() {
        EXIT_OK
    } else {
        EXIT_BENCH_FAILED
    })
}

fn cmd_report(a: &ReportArgs) -> CliResult<i32> {
    let text = fs::read_to_string(&a.input).map_err(|e| Error::io(&a.input, e))?;
    let report = EvalReport::from_json(&text)?;
    emit(a.output.out.as_deref(), &render(&report, a.output.format)?)?;
    Ok(EXIT_OK)
}
