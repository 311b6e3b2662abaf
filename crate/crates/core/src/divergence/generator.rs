use serde::{Deserialize, Serialize};
use std::fmt;

use super::{check_positive, BetaParam, Convention, ScalarPair, LIMIT_BRANCH_WIDTH};
use crate::{Error, Result};

/// The three scalar generator families that induce the β-divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `y^β / (β(β-1))`, with `y log y` at β = 1 and `-log y` at β = 0.
    A,
    /// `(y^β - βy + β - 1) / (β(β-1))`, with `y log y - y + 1` at β = 1 and
    /// `-log y + y - 1` at β = 0.
    B,
    /// Flipped indexing: `y^(1-β) + (β-1)y + β` outside [0, 1],
    /// `(1-β)y - y^(1-β) - β` on (0, 1), `y - log y - 1` at β = 1 and
    /// `y log y - y + 1` at β = 0.
    C,
}

impl Family {
    pub fn convention(self) -> Convention {
        match self {
            Family::A | Family::B => Convention::Standard,
            Family::C => Convention::Flipped,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            other => Err(Error::InvalidConfig(format!(
                "unknown generator family {other:?} (expected a|b|c)"
            ))),
        }
    }
}

/// A strictly convex scalar generator `φ` from one of the three families.
///
/// The stored β is always in the family's native convention: standard for
/// A and B, flipped for C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFamily {
    family: Family,
    beta: BetaParam,
}

impl GeneratorFamily {
    pub fn new(family: Family, beta: BetaParam) -> Self {
        Self {
            family,
            beta: beta.to_convention(family.convention()),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn beta(&self) -> BetaParam {
        self.beta
    }

    /// `(φ(y), φ'(y), φ''(y))`. `y` must be positive.
    pub(crate) fn eval_unchecked(&self, y: f64) -> (f64, f64, f64) {
        let b = self.beta.value();
        match self.family {
            Family::A => {
                if b.abs() < LIMIT_BRANCH_WIDTH {
                    (-y.ln(), -1.0 / y, 1.0 / (y * y))
                } else if (b - 1.0).abs() < LIMIT_BRANCH_WIDTH {
                    (y * y.ln(), y.ln() + 1.0, 1.0 / y)
                } else {
                    let s = b * (b - 1.0);
                    (y.powf(b) / s, y.powf(b - 1.0) / (b - 1.0), y.powf(b - 2.0))
                }
            }
            Family::B => {
                if b.abs() < LIMIT_BRANCH_WIDTH {
                    (-y.ln() + y - 1.0, 1.0 - 1.0 / y, 1.0 / (y * y))
                } else if (b - 1.0).abs() < LIMIT_BRANCH_WIDTH {
                    (y * y.ln() - y + 1.0, y.ln(), 1.0 / y)
                } else {
                    let s = b * (b - 1.0);
                    (
                        (y.powf(b) - b * y + b - 1.0) / s,
                        (y.powf(b - 1.0) - 1.0) / (b - 1.0),
                        y.powf(b - 2.0),
                    )
                }
            }
            Family::C => {
                if b == 1.0 {
                    (y - y.ln() - 1.0, 1.0 - 1.0 / y, 1.0 / (y * y))
                } else if b == 0.0 {
                    (y * y.ln() - y + 1.0, y.ln(), 1.0 / y)
                } else if b > 0.0 && b < 1.0 {
                    let p = 1.0 - b;
                    (
                        p * y - y.powf(p) - b,
                        p - p * y.powf(-b),
                        b * p * y.powf(-b - 1.0),
                    )
                } else {
                    let p = 1.0 - b;
                    (
                        y.powf(p) + (b - 1.0) * y + b,
                        p * y.powf(-b) + (b - 1.0),
                        b * (b - 1.0) * y.powf(-b - 1.0),
                    )
                }
            }
        }
    }

    /// `φ''(y)` alone; the curvature weight used by the NMF updates.
    pub(crate) fn curvature(&self, y: f64) -> f64 {
        self.eval_unchecked(y).2
    }

    pub(crate) fn bregman_unchecked(&self, x: f64, y: f64) -> f64 {
        if x == y {
            return 0.0;
        }
        let (phi_x, _, _) = self.eval_unchecked(x);
        let (phi_y, dphi_y, _) = self.eval_unchecked(y);
        let d = phi_x - phi_y - dphi_y * (x - y);
        if d.is_nan() {
            f64::INFINITY
        } else {
            d.max(0.0)
        }
    }
}

impl fmt::Display for GeneratorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.family, self.beta)
    }
}

/// `(φ(y), φ'(y), φ''(y))` for the generator.
pub fn generator_eval(g: &GeneratorFamily, y: f64) -> Result<(f64, f64, f64)> {
    check_positive("y", y)?;
    Ok(g.eval_unchecked(y))
}

/// Bregman divergence `φ(x) - φ(y) - φ'(y)(x - y)` induced by the generator.
pub fn bregman_divergence(g: &GeneratorFamily, p: ScalarPair) -> Result<f64> {
    Ok(g.bregman_unchecked(p.x(), p.y()))
}

/// Ratio between the family-C Bregman divergence at flipped β and the
/// standard β-divergence at `1 - β`: `|β(β-1)|`, or 1 on the log branches
/// β ∈ {0, 1}.
pub fn family_c_scale(beta_flipped: f64) -> f64 {
    if beta_flipped == 0.0 || beta_flipped == 1.0 {
        1.0
    } else {
        (beta_flipped * (beta_flipped - 1.0)).abs()
    }
}
