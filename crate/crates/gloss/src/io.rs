//! CSV ingestion and the plain-text outputs.
//!
//! Input files are comma separated, UTF-8, with `#` comment lines. The first
//! row is a header iff one of its feature cells is not a number. Classes are
//! numbered in order of first appearance.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use gloss_core::{GlossError, LabeledDataset, Matrix};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("cannot open {path}")]
    Open {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}")]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{path}: no data rows")]
    Empty { path: PathBuf },

    #[error("{path}: no feature columns")]
    NoFeatures { path: PathBuf },

    #[error("{path}: line {line} has {found} columns, expected {expected}")]
    Ragged {
        path: PathBuf,
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("{path}: line {line}, column {column} ({name}): {value:?} is not a finite number")]
    NonNumeric {
        path: PathBuf,
        line: u64,
        column: usize,
        name: String,
        value: String,
    },

    #[error("{path}: line {line}: empty label")]
    EmptyLabel { path: PathBuf, line: u64 },

    #[error("{path}: label column {label:?} not found")]
    LabelNotFound { path: PathBuf, label: String },

    #[error("{path}: selecting the label column by name needs a header row")]
    LabelNeedsHeader { path: PathBuf },

    #[error("{path}: only one class ({class:?}) present, at least two are required")]
    SingleClass { path: PathBuf, class: String },

    #[error("{path}: expected {expected} feature columns, found {found}")]
    FeatureCount {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("{path}: line {line}: unknown class {class:?}")]
    UnknownClass {
        path: PathBuf,
        line: u64,
        class: String,
    },

    #[error("{path}")]
    Core {
        path: PathBuf,
        #[source]
        source: GlossError,
    },
}

/// How the label column is named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl LabelColumn {
    /// A non-negative integer selects by position, anything else by name.
    pub fn parse(s: &str) -> Self {
        match s.trim().parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.trim().to_string()),
        }
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(s) => f.write_str(s),
        }
    }
}

/// Raw cells of a file, comments removed.
#[derive(Debug, Clone)]
pub struct Table {
    pub path: PathBuf,
    pub rows: Vec<Vec<String>>,
    /// File line of each row, for messages.
    pub lines: Vec<u64>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table, DataError> {
        let file = File::open(path).map_err(|source| DataError::Open {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(file);
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|source| DataError::Csv {
                path: path.to_path_buf(),
                source,
            })?;
            if rec.iter().all(|c| c.is_empty()) {
                continue;
            }
            lines.push(rec.position().map(|p| p.line()).unwrap_or(0));
            rows.push(rec.iter().map(str::to_string).collect());
        }
        if rows.is_empty() {
            return Err(DataError::Empty {
                path: path.to_path_buf(),
            });
        }
        Ok(Table {
            path: path.to_path_buf(),
            rows,
            lines,
        })
    }

    fn width(&self) -> usize {
        self.rows[0].len()
    }

    fn resolve(&self, label: &LabelColumn) -> Result<usize, DataError> {
        let idx = match label {
            LabelColumn::Index(i) => *i,
            LabelColumn::Name(name) => self.rows[0]
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| DataError::LabelNotFound {
                    path: self.path.clone(),
                    label: name.clone(),
                })?,
        };
        if idx >= self.width() {
            return Err(DataError::LabelNotFound {
                path: self.path.clone(),
                label: label.to_string(),
            });
        }
        Ok(idx)
    }

    fn has_header(&self, skip: Option<usize>) -> bool {
        self.rows[0]
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != skip)
            .any(|(_, c)| parse_number(c).is_none())
    }

    /// Splits into features and (optionally) the raw label strings.
    pub fn split(&self, label: Option<&LabelColumn>) -> Result<Features, DataError> {
        let label_idx = label.map(|l| self.resolve(l)).transpose()?;
        let width = self.width();
        let feature_cols: Vec<usize> = (0..width).filter(|j| Some(*j) != label_idx).collect();
        if feature_cols.is_empty() {
            return Err(DataError::NoFeatures {
                path: self.path.clone(),
            });
        }
        let header = self.has_header(label_idx);
        if matches!(label, Some(LabelColumn::Name(_))) && !header {
            return Err(DataError::LabelNeedsHeader {
                path: self.path.clone(),
            });
        }
        let names: Vec<String> = if header {
            feature_cols.iter().map(|&j| self.rows[0][j].clone()).collect()
        } else {
            feature_cols.iter().map(|&j| format!("x{}", j + 1)).collect()
        };
        let start = usize::from(header);
        if self.rows.len() <= start {
            return Err(DataError::Empty {
                path: self.path.clone(),
            });
        }
        let n = self.rows.len() - start;
        let mut values = Vec::with_capacity(n * feature_cols.len());
        let mut labels = Vec::with_capacity(n);
        let mut lines = Vec::with_capacity(n);
        for (row, &line) in self.rows[start..].iter().zip(&self.lines[start..]) {
            if row.len() != width {
                return Err(DataError::Ragged {
                    path: self.path.clone(),
                    line,
                    expected: width,
                    found: row.len(),
                });
            }
            for (pos, &j) in feature_cols.iter().enumerate() {
                let v = parse_number(&row[j]).ok_or_else(|| DataError::NonNumeric {
                    path: self.path.clone(),
                    line,
                    column: j,
                    name: names[pos].clone(),
                    value: row[j].clone(),
                })?;
                values.push(v);
            }
            if let Some(l) = label_idx {
                if row[l].is_empty() {
                    return Err(DataError::EmptyLabel {
                        path: self.path.clone(),
                        line,
                    });
                }
                labels.push(row[l].clone());
            }
            lines.push(line);
        }
        let x = Matrix::from_vec(n, feature_cols.len(), values).map_err(|source| DataError::Core {
            path: self.path.clone(),
            source,
        })?;
        Ok(Features {
            x,
            feature_names: names,
            labels: label_idx.map(|_| labels),
            lines,
            header,
        })
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Feature matrix of a file with the label strings kept aside.
#[derive(Debug, Clone)]
pub struct Features {
    pub x: Matrix,
    pub feature_names: Vec<String>,
    pub labels: Option<Vec<String>>,
    pub lines: Vec<u64>,
    pub header: bool,
}

/// A training file after class encoding.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: LabeledDataset,
    pub label_column: LabelColumn,
    pub header: bool,
}

/// Reads a training file: labels become classes `0..K` in first-appearance order.
pub fn load_csv(path: &Path, label: &LabelColumn, standardize: bool) -> Result<LoadedData, DataError> {
    let table = Table::read(path)?;
    let f = table.split(Some(label))?;
    let raw_labels = f.labels.expect("label column requested");
    let mut classes: Vec<String> = Vec::new();
    let codes: Vec<usize> = raw_labels
        .iter()
        .map(|l| match classes.iter().position(|c| c == l) {
            Some(k) => k,
            None => {
                classes.push(l.clone());
                classes.len() - 1
            }
        })
        .collect();
    if classes.len() < 2 {
        return Err(DataError::SingleClass {
            path: path.to_path_buf(),
            class: classes.pop().unwrap_or_default(),
        });
    }
    let core = |source| DataError::Core {
        path: path.to_path_buf(),
        source,
    };
    let dataset = LabeledDataset::from_raw(f.x, codes, classes.len(), standardize)
        .and_then(|d| d.with_class_names(classes))
        .and_then(|d| d.with_feature_names(f.feature_names))
        .map_err(core)?;
    Ok(LoadedData {
        dataset,
        label_column: label.clone(),
        header: f.header,
    })
}

/// Maps label strings onto known class names.
pub fn encode_known(
    path: &Path,
    labels: &[String],
    lines: &[u64],
    classes: &[String],
) -> Result<Vec<usize>, DataError> {
    labels
        .iter()
        .zip(lines)
        .map(|(l, &line)| {
            classes
                .iter()
                .position(|c| c == l)
                .ok_or_else(|| DataError::UnknownClass {
                    path: path.to_path_buf(),
                    line,
                    class: l.clone(),
                })
        })
        .collect()
}

/// Leading comment line of every CSV output.
pub fn stamp_line() -> String {
    let ts = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# gloss {} {}\n", env!("CARGO_PKG_VERSION"), ts)
}

/// Opens `path` for a CSV output, writing the stamp line first when asked.
pub fn csv_writer(path: &Path, stamp: bool) -> anyhow::Result<csv::Writer<BufWriter<File>>> {
    use anyhow::Context;
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    if stamp {
        out.write_all(stamp_line().as_bytes())?;
    }
    Ok(csv::Writer::from_writer(out))
}

/// Writes a labeled matrix with header `x1..xp,label`.
pub fn write_dataset(path: &Path, x: &Matrix, labels: &[String], stamp: bool) -> anyhow::Result<()> {
    let mut w = csv_writer(path, stamp)?;
    let mut header: Vec<String> = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
    header.push("label".to_string());
    w.write_record(&header)?;
    for (row, label) in x.rows_iter().zip(labels) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(label.clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
