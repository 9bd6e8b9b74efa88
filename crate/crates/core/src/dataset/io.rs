use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::DataTable;
use crate::error::{Error, Result};

/// Which column holds class labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    None,
    /// 0-based column position in the file.
    Index(usize),
    /// Matched against the header (CSV) or attribute name (ARFF).
    Name(String),
    Last,
}

impl LabelColumn {
    /// Parses the user-facing form: `none`, `last`, a 1-based index, or a
    /// column name.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t {
            "" | "none" => Ok(LabelColumn::None),
            "last" => Ok(LabelColumn::Last),
            _ => match t.parse::<usize>() {
                Ok(0) => Err(Error::invalid("label column index is 1-based; got 0")),
                Ok(i) => Ok(LabelColumn::Index(i - 1)),
                Err(_) => Ok(LabelColumn::Name(t.to_string())),
            },
        }
    }

    fn resolve(&self, header: Option<&[String]>, width: usize) -> Result<Option<usize>> {
        match self {
            LabelColumn::None => Ok(None),
            LabelColumn::Last => Ok(width.checked_sub(1)),
            LabelColumn::Index(i) if *i < width => Ok(Some(*i)),
            LabelColumn::Index(i) => Err(Error::UnknownLabelColumn((i + 1).to_string())),
            LabelColumn::Name(n) => header
                .and_then(|h| h.iter().position(|c| c == n))
                .map(Some)
                .ok_or_else(|| Error::UnknownLabelColumn(n.clone())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Reject,
    /// Replace each missing cell by its column's mean over present cells.
    MeanImpute,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    pub has_header: bool,
    pub label: LabelColumn,
    pub missing: MissingPolicy,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            has_header: true,
            label: LabelColumn::None,
            missing: MissingPolicy::Reject,
        }
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "?" | "NA" | "NaN" | "nan")
}

/// Loads CSV or ARFF, chosen by file extension.
pub fn load(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<DataTable> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("arff") => load_arff(path, opts),
        _ => load_csv(path, opts),
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<DataTable> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, &stem(path), opts)
}

pub fn load_arff(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<DataTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_arff(&text, &stem(path), opts)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".into())
}

/// Parses comma-separated text. Row numbers in errors are 1-based file
/// lines; columns are 1-based.
pub fn parse_csv(reader: impl Read, name: &str, opts: &LoadOptions) -> Result<DataTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut header: Option<Vec<String>> = None;
    let mut raw: Vec<(usize, csv::StringRecord)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Malformed {
            name: name.into(),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if opts.has_header && header.is_none() {
            header = Some(rec.iter().map(str::to_string).collect());
            continue;
        }
        raw.push((line, rec));
    }
    if raw.is_empty() {
        return Err(Error::EmptyFile(name.into()));
    }

    let width = header.as_ref().map_or(raw[0].1.len(), Vec::len);
    let label_col = opts.label.resolve(header.as_deref(), width)?;
    let mut cells = Vec::with_capacity(raw.len());
    let mut labels = label_col.map(|_| Vec::with_capacity(raw.len()));
    for (line, rec) in &raw {
        if rec.len() != width {
            return Err(Error::RaggedRow {
                name: name.into(),
                row: *line,
                expected: width,
                found: rec.len(),
            });
        }
        let mut row = Vec::with_capacity(width);
        for (j, cell) in rec.iter().enumerate() {
            if Some(j) == label_col {
                labels.as_mut().unwrap().push(cell.to_string());
                continue;
            }
            row.push(parse_cell(cell, name, *line, j + 1)?);
        }
        cells.push((*line, row));
    }

    let attr_names: Vec<String> = match &header {
        Some(h) => h
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != label_col)
            .map(|(_, s)| s.clone())
            .collect(),
        None => (1..=width - usize::from(label_col.is_some()))
            .map(|j| format!("a{j}"))
            .collect(),
    };
    finish(name, attr_names, cells, labels, opts.missing)
}

fn parse_cell(cell: &str, name: &str, line: usize, column: usize) -> Result<Option<f64>> {
    if is_missing(cell) {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::NonNumeric {
            name: name.into(),
            row: line,
            column,
            value: cell.into(),
        }),
    }
}

fn finish(
    name: &str,
    attr_names: Vec<String>,
    cells: Vec<(usize, Vec<Option<f64>>)>,
    labels: Option<Vec<String>>,
    missing: MissingPolicy,
) -> Result<DataTable> {
    let d = attr_names.len();
    if d == 0 {
        return Err(Error::Malformed {
            name: name.into(),
            reason: "no attribute columns besides the label".into(),
        });
    }
    let mut sums = vec![0.0; d];
    let mut counts = vec![0usize; d];
    for (line, row) in &cells {
        for (j, c) in row.iter().enumerate() {
            match c {
                Some(v) => {
                    sums[j] += v;
                    counts[j] += 1;
                }
                None if missing == MissingPolicy::Reject => {
                    return Err(Error::MissingValue {
                        name: name.into(),
                        row: *line,
                        column: j + 1,
                    })
                }
                None => {}
            }
        }
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let values = cells
        .into_iter()
        .flat_map(|(_, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, c)| c.unwrap_or(means[j]))
                .collect::<Vec<_>>()
        })
        .collect();
    DataTable::from_row_major(name, attr_names, values, labels)
}

/// Parses the numeric subset of ARFF: `@attribute` lines of type
/// numeric/real/integer plus nominal attributes, of which only the label
/// column may be nominal. Sparse rows are not supported.
pub fn parse_arff(text: &str, name: &str, opts: &LoadOptions) -> Result<DataTable> {
    let malformed = |reason: String| Error::Malformed {
        name: name.into(),
        reason,
    };
    let mut attrs: Vec<(String, bool)> = Vec::new(); // (name, is_numeric)
    let mut in_data = false;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (k, raw_line) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(malformed(format!(
                    "line {line_no}: sparse ARFF rows are not supported"
                )));
            }
            rows.push((line_no, split_arff_row(line)));
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            continue;
        } else if lower.starts_with("@attribute") {
            let rest = line["@attribute".len()..].trim();
            let (attr_name, ty) = split_attr_decl(rest)
                .ok_or_else(|| malformed(format!("line {line_no}: bad @attribute")))?;
            let ty_l = ty.to_ascii_lowercase();
            let numeric = matches!(ty_l.as_str(), "numeric" | "real" | "integer");
            if !numeric && !ty.starts_with('{') {
                return Err(malformed(format!(
                    "line {line_no}: unsupported attribute type {ty:?}"
                )));
            }
            attrs.push((attr_name, numeric));
        } else if lower.starts_with("@data") {
            in_data = true;
        } else {
            return Err(malformed(format!("line {line_no}: unexpected header line")));
        }
    }
    if attrs.is_empty() {
        return Err(malformed("no @attribute declarations".into()));
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile(name.into()));
    }

    let names: Vec<String> = attrs.iter().map(|(n, _)| n.clone()).collect();
    let label_col = opts.label.resolve(Some(&names), names.len())?;
    if let Some((j, _)) = attrs
        .iter()
        .enumerate()
        .find(|(j, (_, numeric))| !numeric && Some(*j) != label_col)
    {
        return Err(malformed(format!(
            "nominal attribute {:?} is not the label column",
            attrs[j].0
        )));
    }

    let mut labels = label_col.map(|_| Vec::with_capacity(rows.len()));
    let mut cells = Vec::with_capacity(rows.len());
    for (line_no, row) in rows {
        if row.len() != attrs.len() {
            return Err(Error::RaggedRow {
                name: name.into(),
                row: line_no,
                expected: attrs.len(),
                found: row.len(),
            });
        }
        let mut out = Vec::with_capacity(attrs.len());
        for (j, cell) in row.iter().enumerate() {
            if Some(j) == label_col {
                labels.as_mut().unwrap().push(cell.clone());
            } else {
                out.push(parse_cell(cell, name, line_no, j + 1)?);
            }
        }
        cells.push((line_no, out));
    }
    let attr_names = names
        .into_iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != label_col)
        .map(|(_, n)| n)
        .collect();
    finish(name, attr_names, cells, labels, opts.missing)
}

fn unquote(s: &str) -> String {
    let s = s.trim();
    if s.len() >= 2
        && ((s.starts_with('\'') && s.ends_with('\'')) || (s.starts_with('"') && s.ends_with('"')))
    {
        s[1..s.len() - 1].to_string()
    } else {
        s.to_string()
    }
}

fn split_attr_decl(rest: &str) -> Option<(String, &str)> {
    let rest = rest.trim();
    let first = rest.chars().next()?;
    if first == '\'' || first == '"' {
        let end = rest[1..].find(first)? + 1;
        Some((rest[1..end].to_string(), rest[end + 1..].trim()))
    } else {
        let end = rest.find(char::is_whitespace)?;
        Some((rest[..end].to_string(), rest[end..].trim()))
    }
}

fn split_arff_row(line: &str) -> Vec<String> {
    line.split(',').map(unquote).collect()
}

/// Writes a header row, then one row per object; labels, when present, go
/// in a trailing `class` column. Values use the shortest round-trip form.
pub fn write_csv(table: &DataTable, mut out: impl Write) -> Result<()> {
    let io_err = |e| Error::io(table.name(), e);
    let mut header = table.attr_names().join(",");
    if table.labels().is_some() {
        header.push_str(",class");
    }
    writeln!(out, "{header}").map_err(io_err)?;
    for (i, row) in table.rows().enumerate() {
        let mut line = row
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if let Some(l) = table.labels() {
            line.push(',');
            line.push_str(&l[i]);
        }
        writeln!(out, "{line}").map_err(io_err)?;
    }
    Ok(())
}
