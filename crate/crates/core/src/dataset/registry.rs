//! Plain-text dataset registry.
//!
//! One entry per line: `name, path, label[, key=value ...]`. Blank lines and
//! lines starting with `#` are ignored. `label` is `none`, `last`, a 1-based
//! column index, or a column name. Recognized keys:
//!
//! - `header=yes|no` (default `yes`)
//! - `missing=reject|impute` (default `reject`)
//! - `pca_k=N`, `edr_k=N`: feature counts pinned for the benchmark
//!
//! Relative paths resolve against the registry root: the `UNSELECT_DATA_DIR`
//! environment variable when set, otherwise the registry file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use super::{load, DataTable, LabelColumn, LoadOptions, MissingPolicy};
use crate::error::{Error, Result};

pub const DATA_DIR_ENV: &str = "UNSELECT_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub name: String,
    pub path: PathBuf,
    pub options: LoadOptions,
    pub pca_k: Option<usize>,
    pub edr_k: Option<usize>,
}

impl RegistryEntry {
    pub fn load(&self) -> Result<DataTable> {
        Ok(load(&self.path, &self.options)?.with_name(self.name.clone()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    entries: Vec<RegistryEntry>,
}

impl Registry {
    pub fn parse(text: &str, root: &Path) -> Result<Self> {
        let mut entries: Vec<RegistryEntry> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| Error::Registry {
                line: line_no,
                reason,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 3 {
                return Err(err("expected `name, path, label`".into()));
            }
            let name = fields[0].to_string();
            if name.is_empty() {
                return Err(err("empty dataset name".into()));
            }
            if entries.iter().any(|e| e.name == name) {
                return Err(err(format!("duplicate dataset {name:?}")));
            }
            let path = Path::new(fields[1]);
            let path = if path.is_absolute() {
                path.to_path_buf()
            } else {
                root.join(path)
            };
            let mut entry = RegistryEntry {
                name,
                path,
                options: LoadOptions {
                    label: LabelColumn::parse(fields[2]).map_err(|e| err(e.to_string()))?,
                    ..LoadOptions::default()
                },
                pca_k: None,
                edr_k: None,
            };
            for kv in &fields[3..] {
                let (key, value) = kv
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected key=value, got {kv:?}")))?;
                let count = || {
                    value
                        .trim()
                        .parse::<usize>()
                        .ok()
                        .filter(|&v| v > 0)
                        .ok_or_else(|| err(format!("{key} must be a positive integer")))
                };
                match (key.trim(), value.trim()) {
                    ("header", "yes") => entry.options.has_header = true,
                    ("header", "no") => entry.options.has_header = false,
                    ("missing", "reject") => entry.options.missing = MissingPolicy::Reject,
                    ("missing", "impute") => entry.options.missing = MissingPolicy::MeanImpute,
                    ("pca_k", _) => entry.pca_k = Some(count()?),
                    ("edr_k", _) => entry.edr_k = Some(count()?),
                    _ => return Err(err(format!("unknown setting {kv:?}"))),
                }
            }
            entries.push(entry);
        }
        Ok(Registry { entries })
    }

    /// Reads a registry file, resolving paths as described in the module docs.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let root = match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => PathBuf::from(dir),
            None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        Self::parse(&text, &root)
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&RegistryEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_and_settings() {
        let text = "# comment\n\ndiabetes, diabetes.arff, class, pca_k=3, edr_k=4\n\
                    lung, /abs/lung.data, 1, header=no, missing=impute\n";
        let r = Registry::parse(text, Path::new("/data")).unwrap();
        assert_eq!(r.names(), ["diabetes", "lung"]);
        let d = r.get("diabetes").unwrap();
        assert_eq!(d.path, Path::new("/data/diabetes.arff"));
        assert_eq!(d.options.label, LabelColumn::Name("class".into()));
        assert_eq!((d.pca_k, d.edr_k), (Some(3), Some(4)));
        let l = r.get("lung").unwrap();
        assert_eq!(l.path, Path::new("/abs/lung.data"));
        assert_eq!(l.options.label, LabelColumn::Index(0));
        assert!(!l.options.has_header);
        assert_eq!(l.options.missing, MissingPolicy::MeanImpute);
    }

    #[test]
    fn reports_bad_lines() {
        for bad in [
            "x, y",
            "x, y, last, pca_k=0",
            "x, y, last, colour=red",
            "a,p,last\na,q,last",
        ] {
            assert!(
                matches!(
                    Registry::parse(bad, Path::new(".")),
                    Err(Error::Registry { .. })
                ),
                "{bad}"
            );
        }
    }
}
