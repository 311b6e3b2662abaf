use std::path::Path;

use super::{format_f64, write_atomic};
use crate::divergence::{beta_kernel, check_positive, BetaParam};
use crate::{Error, Result};

/// Which argument of `d_β(·|·)` the sampled point fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArgOrder {
    /// `d_β(point | reference)`: the point is the data argument.
    #[default]
    PointFirst,
    /// `d_β(reference | point)`: the point is the model argument.
    ReferenceFirst,
}

impl ArgOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            ArgOrder::PointFirst => "point-first",
            ArgOrder::ReferenceFirst => "reference-first",
        }
    }
}

impl std::str::FromStr for ArgOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "point-first" => Ok(ArgOrder::PointFirst),
            "reference-first" => Ok(ArgOrder::ReferenceFirst),
            other => Err(Error::InvalidConfig(format!(
                "unknown argument order {other:?} (expected point-first|reference-first)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub beta: BetaParam,
    pub point: f64,
    pub value: f64,
}

/// `samples` points evenly spaced on `[lo, hi]`. When the reference lies in
/// the range, the nearest grid point is replaced by the reference itself so
/// every curve is sampled exactly at its minimum.
fn sample_grid(lo: f64, hi: f64, samples: usize, reference: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = if samples == 1 {
        vec![lo]
    } else {
        let step = (hi - lo) / (samples - 1) as f64;
        (0..samples)
            .map(|i| {
                if i + 1 == samples {
                    hi
                } else {
                    lo + step * i as f64
                }
            })
            .collect()
    };
    if (lo..=hi).contains(&reference) {
        let nearest = grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - reference).abs().total_cmp(&(b.1 - reference).abs()))
            .map(|(i, _)| i)
            .expect("grid is non-empty");
        grid[nearest] = reference;
    }
    grid
}

/// Samples `d_β` against a fixed reference for each β on a positive range.
pub fn curve_data(
    betas: &[BetaParam],
    range: (f64, f64),
    samples: usize,
    reference: f64,
    order: ArgOrder,
) -> Result<Vec<CurvePoint>> {
    let (lo, hi) = range;
    check_positive("range lower bound", lo)?;
    check_positive("range upper bound", hi)?;
    check_positive("reference", reference)?;
    if hi < lo {
        return Err(Error::Domain(format!("empty range {lo}:{hi}")));
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be >= 1".into()));
    }
    let grid = sample_grid(lo, hi, samples, reference);
    let mut out = Vec::with_capacity(betas.len() * grid.len());
    for &beta in betas {
        let b = beta.standard_value();
        for &point in &grid {
            let value = match order {
                ArgOrder::PointFirst => beta_kernel(point, reference, b),
                ArgOrder::ReferenceFirst => beta_kernel(reference, point, b),
            };
            out.push(CurvePoint { beta, point, value });
        }
    }
    Ok(out)
}

/// Columns `convention,order,beta,point,value`.
pub fn write_curve_csv(
    points: &[CurvePoint],
    order: ArgOrder,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["convention", "order", "beta", "point", "value"])?;
    for p in points {
        w.write_record([
            p.beta.convention().as_str(),
            order.as_str(),
            format_f64(p.beta.value()).as_str(),
            format_f64(p.point).as_str(),
            format_f64(p.value).as_str(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
    write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std(b: f64) -> BetaParam {
        BetaParam::standard(b).unwrap()
    }

    #[test]
    fn squared_euclidean_values() {
        let pts = curve_data(&[std(2.0)], (0.5, 2.0), 3, 1.0, ArgOrder::PointFirst).unwrap();
        // Grid {0.5, 1.25, 2} with 1.25 snapped to the reference.
        let values: Vec<_> = pts.iter().map(|p| (p.point, p.value)).collect();
        assert_eq!(values, vec![(0.5, 0.125), (1.0, 0.0), (2.0, 0.5)]);
    }

    #[test]
    fn is_value_uses_documented_order() {
        let pts = curve_data(&[std(0.0)], (2.0, 2.0), 1, 1.0, ArgOrder::PointFirst).unwrap();
        assert!((pts[0].value - 0.306_852_819_440_054_7).abs() < 1e-15);
        let pts = curve_data(&[std(0.0)], (2.0, 2.0), 1, 1.0, ArgOrder::ReferenceFirst).unwrap();
        // d_0(1|2) = 1/2 - ln(1/2) - 1
        assert!((pts[0].value - (0.5 + std::f64::consts::LN_2 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn each_curve_has_unique_minimum_at_reference() {
        let betas: Vec<_> = [-1.0, 0.0, 0.5, 1.0, 2.0, 3.0].map(std).to_vec();
        for order in [ArgOrder::PointFirst, ArgOrder::ReferenceFirst] {
            let pts = curve_data(&betas, (0.1, 3.0), 100, 1.0, order).unwrap();
            assert_eq!(pts.len(), 600);
            for curve in pts.chunks(100) {
                let min = curve
                    .iter()
                    .min_by(|a, b| a.value.total_cmp(&b.value))
                    .unwrap();
                assert_eq!(min.point, 1.0);
                assert_eq!(min.value, 0.0);
                assert!(curve
                    .iter()
                    .filter(|p| p.point != 1.0)
                    .all(|p| p.value > 0.0));
            }
        }
    }

    #[test]
    fn rejects_non_positive_range() {
        assert!(curve_data(&[std(2.0)], (-1.0, 2.0), 10, 1.0, ArgOrder::PointFirst).is_err());
        assert!(curve_data(&[std(2.0)], (0.0, 2.0), 10, 1.0, ArgOrder::PointFirst).is_err());
        assert!(curve_data(&[std(2.0)], (3.0, 2.0), 10, 1.0, ArgOrder::PointFirst).is_err());
    }
}
