use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use super::{format_f64, write_atomic};
use crate::{Error, Result};

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["run", "algorithm", "beta", "seed", "iter", "objective"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TrajectoryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TrajectoryFormat::Csv),
            "json" => Ok(TrajectoryFormat::Json),
            other => Err(Error::InvalidConfig(format!(
                "unknown trajectory format {other:?}"
            ))),
        }
    }
}

/// Objective trace of one solver run. `iter` and `objective` are parallel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub run: String,
    pub algorithm: String,
    /// Divergence label, e.g. `standard:2.0` or `C@flipped:0.5`.
    pub beta: String,
    pub seed: u64,
    pub iter: Vec<usize>,
    pub objective: Vec<f64>,
}

impl TrajectoryRecord {
    pub fn new(
        run: impl Into<String>,
        algorithm: impl Into<String>,
        beta: impl Into<String>,
        seed: u64,
        points: &[(usize, f64)],
    ) -> Self {
        Self {
            run: run.into(),
            algorithm: algorithm.into(),
            beta: beta.into(),
            seed,
            iter: points.iter().map(|p| p.0).collect(),
            objective: points.iter().map(|p| p.1).collect(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.iter
            .iter()
            .copied()
            .zip(self.objective.iter().copied())
    }

    /// Iterations must start at 0 and strictly increase.
    pub fn validate(&self) -> Result<()> {
        if self.iter.len() != self.objective.len() {
            return Err(Error::InvalidConfig(format!(
                "run {:?}: {} iterations but {} objectives",
                self.run,
                self.iter.len(),
                self.objective.len()
            )));
        }
        if self.iter.first() != Some(&0) {
            return Err(Error::InvalidConfig(format!(
                "run {:?}: iterations must start at 0",
                self.run
            )));
        }
        if self.iter.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(format!(
                "run {:?}: iterations must strictly increase",
                self.run
            )));
        }
        Ok(())
    }
}

pub fn trajectory_to_csv(records: &[TrajectoryRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRAJECTORY_COLUMNS)?;
    for r in records {
        let seed = r.seed.to_string();
        for (iter, obj) in r.points() {
            w.write_record([
                r.run.as_str(),
                r.algorithm.as_str(),
                r.beta.as_str(),
                seed.as_str(),
                iter.to_string().as_str(),
                format_f64(obj).as_str(),
            ])?;
        }
    }
    w.into_inner().map_err(|e| Error::Domain(e.to_string()))
}

/// Writes the records as CSV (one row per point) or as a JSON array.
pub fn export_trajectory(
    records: &[TrajectoryRecord],
    path: impl AsRef<Path>,
    format: TrajectoryFormat,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::NothingToExport);
    }
    for r in records {
        r.validate()?;
    }
    let bytes = match format {
        TrajectoryFormat::Csv => trajectory_to_csv(records)?,
        TrajectoryFormat::Json => {
            let mut b = serde_json::to_vec_pretty(records)?;
            b.push(b'\n');
            b
        }
    };
    write_atomic(path, &bytes)
}

pub fn read_trajectory(
    path: impl AsRef<Path>,
    format: TrajectoryFormat,
) -> Result<Vec<TrajectoryRecord>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        TrajectoryFormat::Json => Ok(serde_json::from_slice(&bytes)?),
        TrajectoryFormat::Csv => parse_csv(&bytes),
    }
}

fn parse_csv(bytes: &[u8]) -> Result<Vec<TrajectoryRecord>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let header = rdr.headers()?.clone();
    if header.iter().ne(TRAJECTORY_COLUMNS) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out: Vec<TrajectoryRecord> = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |col: usize, what: &str| Error::Parse {
            line,
            column: col + 1,
            message: format!("invalid {what} {:?}", &row[col]),
        };
        let seed: u64 = row[3].parse().map_err(|_| bad(3, "seed"))?;
        let iter: usize = row[4].parse().map_err(|_| bad(4, "iter"))?;
        let obj: f64 = row[5].parse().map_err(|_| bad(5, "objective"))?;
        let same = out.last().is_some_and(|r| {
            r.run == row[0]
                && r.algorithm == row[1]
                && r.beta == row[2]
                && r.seed == seed
                && iter != 0
        });
        if same {
            let r = out.last_mut().expect("checked above");
            r.iter.push(iter);
            r.objective.push(obj);
        } else {
            out.push(TrajectoryRecord::new(
                &row[0],
                &row[1],
                &row[2],
                seed,
                &[(iter, obj)],
            ));
        }
    }
    Ok(out)
}
