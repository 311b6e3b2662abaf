//! Dataset ingestion and result export.

mod curve;
mod trajectory;

pub use curve::{curve_data, write_curve_csv, ArgOrder, CurvePoint};
pub use trajectory::{export_trajectory, read_trajectory, TrajectoryFormat, TrajectoryRecord};

use ndarray::Array2;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::matrix::{FactorPair, NonNegMatrix};
use crate::nmf::{seeded_rng, uniform_matrix};
use crate::{Error, Result, DEFAULT_EPS_FLOOR};

/// Number of feature columns in a UCI sonar record.
pub const SONAR_FEATURES: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub source: Option<PathBuf>,
    /// Source entries that were raised to the floor.
    pub floor_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub matrix: NonNegMatrix,
    pub row_labels: Option<Vec<String>>,
    pub col_labels: Option<Vec<String>>,
    pub provenance: Provenance,
    /// Non-fatal issues found while loading.
    pub warnings: Vec<String>,
}

impl Dataset {
    /// Swaps rows and columns, labels included.
    pub fn transpose(self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            row_labels: self.col_labels,
            col_labels: self.row_labels,
            provenance: self.provenance,
            warnings: self.warnings,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub floor: f64,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            has_header: false,
            floor: DEFAULT_EPS_FLOOR,
        }
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

/// Loads a numeric rectangle from a delimited file.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let mut ds = read_csv(open(path)?, options)?;
    ds.provenance.source = Some(path.to_path_buf());
    Ok(ds)
}

/// As [`load_csv`] from any reader.
pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut col_labels = None;
    let mut values = Vec::new();
    let mut ncols = None;
    let mut nrows = 0usize;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if options.has_header && col_labels.is_none() {
            col_labels = Some(record.iter().map(str::to_owned).collect::<Vec<_>>());
            ncols = Some(record.len());
            continue;
        }
        let expected = *ncols.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Ragged {
                row: line,
                expected,
                found: record.len(),
            });
        }
        for (col, field) in record.iter().enumerate() {
            values.push(parse_cell(field, line, col + 1)?);
        }
        nrows += 1;
    }
    let ncols = ncols.unwrap_or(0);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no numeric rows".into(),
        });
    }
    let data =
        Array2::from_shape_vec((nrows, ncols), values).map_err(|e| Error::Domain(e.to_string()))?;
    let (matrix, floor_count) = NonNegMatrix::with_floor(data, options.floor)?;
    Ok(Dataset {
        matrix,
        row_labels: None,
        col_labels,
        provenance: Provenance {
            source: None,
            floor_count,
        },
        warnings: Vec::new(),
    })
}

fn parse_cell(field: &str, line: u64, column: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("non-numeric cell {field:?}"),
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Parse {
            line,
            column,
            message: format!("cell {field:?} is not a finite nonnegative number"),
        });
    }
    Ok(v)
}

/// Maps a sonar class token to its numeric label: rock `R` → `2`, mine
/// `M` → `3`. Already-numeric labels pass through.
fn sonar_label(token: &str) -> Option<&'static str> {
    match token {
        "R" | "r" | "2" => Some("2"),
        "M" | "m" | "3" => Some("3"),
        _ => None,
    }
}

/// Loads a UCI sonar file: 60 energy features plus a trailing class label
/// per row. Patterns become rows.
pub fn load_sonar(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut ds = read_sonar(open(path)?)?;
    ds.provenance.source = Some(path.to_path_buf());
    Ok(ds)
}

/// As [`load_sonar`] from any reader.
pub fn read_sonar<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut warnings = Vec::new();
    let mut floor_count = 0;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != SONAR_FEATURES + 1 {
            return Err(Error::ColumnCount {
                row: line,
                expected: SONAR_FEATURES + 1,
                found: record.len(),
            });
        }
        let token = &record[SONAR_FEATURES];
        let label = sonar_label(token).ok_or_else(|| Error::UnknownLabel {
            row: line,
            label: token.to_owned(),
        })?;
        labels.push(label.to_owned());
        for (col, field) in record.iter().take(SONAR_FEATURES).enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column: col + 1,
                message: format!("non-numeric cell {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    column: col + 1,
                    message: format!("non-finite feature {field:?}"),
                });
            }
            if !(0.0..=1.0).contains(&v) {
                let msg = format!(
                    "line {line}, column {}: feature {v} outside [0, 1]",
                    col + 1
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
            if v < DEFAULT_EPS_FLOOR {
                floor_count += 1;
            }
            values.push(v.max(DEFAULT_EPS_FLOOR));
        }
    }
    if labels.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no sonar records".into(),
        });
    }
    let data = Array2::from_shape_vec((labels.len(), SONAR_FEATURES), values)
        .map_err(|e| Error::Domain(e.to_string()))?;
    Ok(Dataset {
        matrix: NonNegMatrix::from_floored(data),
        row_labels: Some(labels),
        col_labels: None,
        provenance: Provenance {
            source: None,
            floor_count,
        },
        warnings,
    })
}

/// Draws `W*` (F×K) and `H*` (K×N) uniform on `(0, 1]` and returns
/// `V = W* H*`. With `noise = Some(s)` each entry of `V` is multiplied by
/// `exp(s·u)`, `u` uniform on `[-1, 1)`.
pub fn gen_synthetic(
    rows: usize,
    cols: usize,
    rank: usize,
    seed: u64,
    noise: Option<f64>,
) -> Result<(Dataset, FactorPair)> {
    if rows == 0 || cols == 0 {
        return Err(Error::Domain(format!("invalid shape {rows}x{cols}")));
    }
    let max = rows.min(cols);
    if rank == 0 || rank > max {
        return Err(Error::InvalidRank { rank, max });
    }
    if let Some(s) = noise {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise level must be >= 0, got {s}"
            )));
        }
    }
    let mut rng = seeded_rng(seed);
    let w = uniform_matrix(rows, rank, &mut rng);
    let h = uniform_matrix(rank, cols, &mut rng);
    let mut v = w.dot(&h);
    if let Some(s) = noise {
        use rand::Rng;
        v.mapv_inplace(|x| x * (s * (2.0 * rng.gen::<f64>() - 1.0)).exp());
    }
    let (matrix, floor_count) = NonNegMatrix::with_floor(v, DEFAULT_EPS_FLOOR)?;
    let truth = FactorPair::new(NonNegMatrix::new(w)?, NonNegMatrix::new(h)?)?;
    let ds = Dataset {
        matrix,
        row_labels: None,
        col_labels: None,
        provenance: Provenance {
            source: None,
            floor_count,
        },
        warnings: Vec::new(),
    };
    Ok((ds, truth))
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Renders a matrix as delimited text, one row per line.
pub fn matrix_to_csv(m: &Array2<f64>, delimiter: u8) -> String {
    let sep = (delimiter as char).to_string();
    let mut out = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        out.push_str(&line.join(&sep));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(m: &NonNegMatrix, path: impl AsRef<Path>, delimiter: u8) -> Result<()> {
    write_atomic(path, matrix_to_csv(m.as_array(), delimiter).as_bytes())
}

/// Writes `<path>.partial` and renames it into place once complete.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    fs::write(&partial, bytes).map_err(|e| Error::io(&partial, e))?;
    fs::rename(&partial, path).map_err(|e| Error::io(path, e))
}
