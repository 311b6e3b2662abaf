//! Floored nonnegative matrices and factor pairs.

use ndarray::{Array2, ArrayView2, Axis};

use crate::{Error, Result, DEFAULT_EPS_FLOOR};

/// Dense matrix whose entries all lie in `[eps_floor, ∞)`.
///
/// Source entries below the floor (including exact zeros) are raised to it
/// on construction; negative or non-finite entries are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegMatrix {
    data: Array2<f64>,
}

impl NonNegMatrix {
    /// Builds with [`DEFAULT_EPS_FLOOR`].
    pub fn new(data: Array2<f64>) -> Result<Self> {
        Ok(Self::with_floor(data, DEFAULT_EPS_FLOOR)?.0)
    }

    /// Builds and returns how many entries were raised to `floor`.
    pub fn with_floor(mut data: Array2<f64>, floor: f64) -> Result<(Self, usize)> {
        if !(floor.is_finite() && floor > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "floor must be > 0, got {floor}"
            )));
        }
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::Domain(format!(
                "matrix must be at least 1x1, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let mut floored = 0;
        for ((i, j), v) in data.indexed_iter_mut() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::Domain(format!(
                    "entry ({i}, {j}) = {v} is not a finite nonnegative number"
                )));
            }
            if *v < floor {
                *v = floor;
                floored += 1;
            }
        }
        Ok((Self { data }, floored))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
            return Err(Error::Ragged {
                row: i as u64 + 1,
                expected: ncols,
                found: r.len(),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let data = Array2::from_shape_vec((rows.len(), ncols), flat)
            .map_err(|e| Error::Domain(e.to_string()))?;
        Self::new(data)
    }

    /// Wraps an array the caller has already floored.
    pub(crate) fn from_floored(data: Array2<f64>) -> Self {
        debug_assert!(data.iter().all(|v| *v > 0.0));
        Self { data }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.data.nrows(), self.data.ncols())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[[row, col]]
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub(crate) fn as_array_mut(&mut self) -> &mut Array2<f64> {
        &mut self.data
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.data
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.t().as_standard_layout().into_owned(),
        }
    }
}

/// `W` (F×K) and `H` (K×N) with `V ≈ W H`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub(crate) w: NonNegMatrix,
    pub(crate) h: NonNegMatrix,
}

impl FactorPair {
    pub fn new(w: NonNegMatrix, h: NonNegMatrix) -> Result<Self> {
        if w.cols() != h.rows() {
            return Err(Error::ShapeMismatch {
                expected: (w.cols(), h.cols()),
                found: h.shape(),
            });
        }
        let rank = w.cols();
        let max = w.rows().min(h.cols());
        if rank == 0 || rank > max {
            return Err(Error::InvalidRank { rank, max });
        }
        Ok(Self { w, h })
    }

    pub fn w(&self) -> &NonNegMatrix {
        &self.w
    }

    pub fn h(&self) -> &NonNegMatrix {
        &self.h
    }

    pub fn rank(&self) -> usize {
        self.w.cols()
    }

    /// Shape of `W H`.
    pub fn product_shape(&self) -> (usize, usize) {
        (self.w.rows(), self.h.cols())
    }

    /// `W H`, unfloored.
    pub fn product(&self) -> Array2<f64> {
        self.w.data.dot(&self.h.data)
    }

    pub fn into_parts(self) -> (NonNegMatrix, NonNegMatrix) {
        (self.w, self.h)
    }

    /// Rescales each column of `W` to unit max and multiplies the matching
    /// row of `H` by the old max, leaving `W H` unchanged up to rounding.
    pub fn normalize_columns(&mut self, eps_floor: f64) {
        for k in 0..self.rank() {
            let scale = self.w.data.column(k).iter().copied().fold(0.0f64, f64::max);
            if scale > 0.0 && scale.is_finite() {
                self.w
                    .data
                    .column_mut(k)
                    .mapv_inplace(|v| (v / scale).max(eps_floor));
                self.h
                    .data
                    .index_axis_mut(Axis(0), k)
                    .mapv_inplace(|v| (v * scale).max(eps_floor));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn floors_zeros_and_counts_them() {
        let (m, n) = NonNegMatrix::with_floor(array![[0.0, 1.0], [2.0, 1e-15]], 1e-12).unwrap();
        assert_eq!(n, 2);
        assert_eq!(m.get(0, 0), 1e-12);
        assert_eq!(m.get(1, 1), 1e-12);
        assert_eq!(m.get(1, 0), 2.0);
    }

    #[test]
    fn rejects_negative_nan_and_empty() {
        assert!(NonNegMatrix::new(array![[-1.0]]).is_err());
        assert!(NonNegMatrix::new(array![[f64::NAN]]).is_err());
        assert!(NonNegMatrix::new(Array2::zeros((0, 3))).is_err());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = NonNegMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::Ragged { row: 2, .. }));
    }

    #[test]
    fn factor_pair_checks_rank() {
        let w = NonNegMatrix::new(Array2::ones((2, 3))).unwrap();
        let h = NonNegMatrix::new(Array2::ones((3, 4))).unwrap();
        assert!(matches!(
            FactorPair::new(w, h),
            Err(Error::InvalidRank { rank: 3, max: 2 })
        ));
        let w = NonNegMatrix::new(Array2::ones((2, 1))).unwrap();
        let h = NonNegMatrix::new(Array2::ones((2, 4))).unwrap();
        assert!(matches!(
            FactorPair::new(w, h),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn normalization_preserves_product() {
        let w = NonNegMatrix::new(array![[2.0, 0.5], [4.0, 0.25], [1.0, 1.0]]).unwrap();
        let h = NonNegMatrix::new(array![[1.0, 3.0], [2.0, 0.5]]).unwrap();
        let mut f = FactorPair::new(w, h).unwrap();
        let before = f.product();
        f.normalize_columns(1e-12);
        let after = f.product();
        assert!((before - after).iter().all(|d| d.abs() < 1e-14));
        assert_eq!(f.w().get(1, 0), 1.0);
        assert_eq!(f.w().get(2, 1), 1.0);
    }
}
