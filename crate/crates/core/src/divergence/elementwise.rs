use ndarray::{ArrayView2, Zip};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::{beta_kernel, BetaParam, Convention, GeneratorFamily};
use crate::matrix::NonNegMatrix;
use crate::{Error, Result};

/// Scalar divergence applied entry by entry: either the β-divergence itself
/// or the Bregman divergence of a generator family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Divergence {
    Beta(BetaParam),
    Bregman(GeneratorFamily),
}

impl Divergence {
    /// `d(x|y)` without domain checks.
    pub(crate) fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Divergence::Beta(b) => beta_kernel(x, y, b.standard_value()),
            Divergence::Bregman(g) => g.bregman_unchecked(x, y),
        }
    }

    /// Curvature `φ''(y)` of the inducing generator. For a plain β this is
    /// `y^(β-2)`.
    pub(crate) fn curvature(&self, y: f64) -> f64 {
        match self {
            Divergence::Beta(b) => y.powf(b.standard_value() - 2.0),
            Divergence::Bregman(g) => g.curvature(y),
        }
    }

    /// The β this divergence is indexed by.
    pub fn beta(&self) -> BetaParam {
        match self {
            Divergence::Beta(b) => *b,
            Divergence::Bregman(g) => g.beta(),
        }
    }

    pub fn convention(&self) -> Convention {
        self.beta().convention()
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Beta(b) => write!(f, "{b}"),
            Divergence::Bregman(g) => write!(f, "{g}"),
        }
    }
}

/// `Σ_{f,n} d(x_fn | y_fn)` over two matrices of equal shape.
pub fn elementwise_divergence(x: &NonNegMatrix, y: &NonNegMatrix, d: &Divergence) -> Result<f64> {
    if x.shape() != y.shape() {
        return Err(Error::ShapeMismatch {
            expected: x.shape(),
            found: y.shape(),
        });
    }
    Ok(sum_divergence(x.view(), y.view(), d))
}

/// Row-major, fixed-order sum; inputs must already lie in the domain.
pub(crate) fn sum_divergence(x: ArrayView2<f64>, y: ArrayView2<f64>, d: &Divergence) -> f64 {
    let mut total = 0.0;
    Zip::from(&x)
        .and(&y)
        .for_each(|&a, &b| total += d.eval(a, b));
    total
}
