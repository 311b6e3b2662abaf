//! Scalar β-divergence and its Bregman generators.
//!
//! In the standard indexing the β-divergence between a data value `x` and a
//! model value `y` is
//!
//! ```text
//! d_β(x|y) = (x^β + (β-1) y^β - β x y^(β-1)) / (β(β-1))   β ∉ {0, 1}
//! d_1(x|y) = x (log x - log y) + (y - x)                   Kullback-Leibler
//! d_0(x|y) = x/y - log(x/y) - 1                            Itakura-Saito
//! ```
//!
//! with β = 2 giving half the squared Euclidean distance. The flipped
//! indexing used by generator family C relates to it by `β_std = 1 - β_flip`.

pub(crate) mod elementwise;
mod finite_diff;
mod generator;

pub use elementwise::{elementwise_divergence, Divergence};
pub use finite_diff::{finite_diff_oracle, DerivativeOrder};
pub use generator::{bregman_divergence, family_c_scale, generator_eval, Family, GeneratorFamily};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::{Error, Result};

/// Distance from β = 0 or β = 1 (standard indexing) inside which the exact
/// limit branch replaces the generic closed form.
pub const LIMIT_BRANCH_WIDTH: f64 = 1e-6;

/// Indexing convention of a β value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// β = 2 squared Euclidean, β = 1 KL, β = 0 IS.
    Standard,
    /// β_flipped = 1 - β_standard: β = 1 IS, β = 0 KL.
    Flipped,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Standard => "standard",
            Convention::Flipped => "flipped",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "std" => Ok(Convention::Standard),
            "flipped" | "flip" => Ok(Convention::Flipped),
            other => Err(Error::InvalidConfig(format!(
                "unknown convention {other:?} (expected standard|flipped)"
            ))),
        }
    }
}

/// A finite β together with the convention it is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParam {
    value: f64,
    convention: Convention,
}

impl BetaParam {
    pub fn new(value: f64, convention: Convention) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("β must be finite, got {value}")));
        }
        Ok(Self { value, convention })
    }

    pub fn standard(value: f64) -> Result<Self> {
        Self::new(value, Convention::Standard)
    }

    pub fn flipped(value: f64) -> Result<Self> {
        Self::new(value, Convention::Flipped)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// β in the standard indexing.
    pub fn standard_value(&self) -> f64 {
        match self.convention {
            Convention::Standard => self.value,
            Convention::Flipped => 1.0 - self.value,
        }
    }

    /// β in the flipped indexing.
    pub fn flipped_value(&self) -> f64 {
        match self.convention {
            Convention::Standard => 1.0 - self.value,
            Convention::Flipped => self.value,
        }
    }

    /// The same divergence re-expressed in `convention`.
    pub fn to_convention(self, convention: Convention) -> Self {
        let value = match convention {
            Convention::Standard => self.standard_value(),
            Convention::Flipped => self.flipped_value(),
        };
        Self { value, convention }
    }
}

impl fmt::Display for BetaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.convention, self.value)
    }
}

/// A (data, model) pair inside the divergence domain `x > 0, y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarPair {
    x: f64,
    y: f64,
}

impl ScalarPair {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        check_positive("x", x)?;
        check_positive("y", y)?;
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

/// `d_β(x|y)` for the given pair.
pub fn beta_divergence(p: ScalarPair, beta: BetaParam) -> Result<f64> {
    Ok(beta_kernel(p.x, p.y, beta.standard_value()))
}

/// First derivative of `d_β(x|·)` at `y`: `y^(β-2) (y - x)`.
pub fn beta_divergence_dy(p: ScalarPair, beta: BetaParam) -> Result<f64> {
    let b = beta.standard_value();
    Ok(p.y.powf(b - 2.0) * (p.y - p.x))
}

/// Second derivative of `d_β(x|·)` at `y`: `y^(β-3) ((β-1) y - (β-2) x)`.
pub fn beta_divergence_d2y(p: ScalarPair, beta: BetaParam) -> Result<f64> {
    let b = beta.standard_value();
    Ok(p.y.powf(b - 3.0) * ((b - 1.0) * p.y - (b - 2.0) * p.x))
}

/// Degree λ with `d(c x | c y) = c^λ d(x | y)`; equal to β in standard
/// indexing. Degree 0 is the scale-invariant Itakura-Saito member.
pub fn homogeneity_degree(beta: BetaParam) -> f64 {
    beta.standard_value()
}

/// Unchecked β-divergence kernel, standard indexing. Inputs must be positive.
pub(crate) fn beta_kernel(x: f64, y: f64, b: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    let d = if b.abs() < LIMIT_BRANCH_WIDTH {
        itakura_saito(x, y)
    } else if (b - 1.0).abs() < LIMIT_BRANCH_WIDTH {
        kullback_leibler(x, y)
    } else {
        beta_generic(x, y, b)
    };
    // inf - inf from overflowing powers surfaces as NaN; report it as +inf.
    if d.is_nan() {
        f64::INFINITY
    } else {
        d.max(0.0)
    }
}

/// Generic closed form, valid for β ∉ {0, 1}; no limit-branch switching.
pub fn beta_generic(x: f64, y: f64, b: f64) -> f64 {
    (x.powf(b) + (b - 1.0) * y.powf(b) - b * x * y.powf(b - 1.0)) / (b * (b - 1.0))
}

pub(crate) fn kullback_leibler(x: f64, y: f64) -> f64 {
    x * (x.ln() - y.ln()) + (y - x)
}

pub(crate) fn itakura_saito(x: f64, y: f64) -> f64 {
    let r = x / y;
    r - r.ln() - 1.0
}
