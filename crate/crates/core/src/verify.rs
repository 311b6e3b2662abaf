//! Numeric certificate that the generator families reproduce the
//! β-divergence, plus the derivative, homogeneity and continuity properties
//! of the divergence itself.
//!
//! Errors are relative, `|actual - expected| / |expected|`, and absolute
//! where the expected value is exactly zero.

use std::fmt;

use crate::divergence::{
    beta_generic, beta_kernel, family_c_scale, finite_diff_oracle, itakura_saito, kullback_leibler,
    BetaParam, DerivativeOrder, Family, GeneratorFamily,
};

pub const STANDARD_BETAS: [f64; 9] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0];
pub const FLIPPED_BETAS: [f64; 8] = [-1.0, 0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.0];
pub const POINT_GRID: [f64; 7] = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0];
pub const SCALES: [f64; 3] = [0.5, 2.0, 10.0];

pub const GENERATOR_TOL: f64 = 1e-10;
pub const FAMILY_C_TOL: f64 = 1e-10;
pub const FIRST_DERIVATIVE_TOL: f64 = 1e-6;
pub const SECOND_DERIVATIVE_TOL: f64 = 1e-5;
pub const CONVEXITY_SLACK: f64 = 1e-12;
pub const HOMOGENEITY_TOL: f64 = 1e-10;
pub const SCALE_INVARIANCE_TOL: f64 = 1e-12;
pub const CONTINUITY_STEP: f64 = 1e-5;
pub const CONTINUITY_TOL: f64 = 1e-3;
pub const CURVATURE_FD_TOL: f64 = 1e-6;

/// Deliberate faults for negative-control runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Doubles the family-C proportionality constant.
    WrongFamilyCScale,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Standard-convention β values for the A/B, derivative and homogeneity
    /// checks.
    pub standard_betas: Vec<f64>,
    /// Flipped-convention β values for the family-C check.
    pub flipped_betas: Vec<f64>,
    pub points: Vec<f64>,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            standard_betas: STANDARD_BETAS.to_vec(),
            flipped_betas: FLIPPED_BETAS.to_vec(),
            points: POINT_GRID.to_vec(),
            fault: None,
        }
    }
}

impl VerifyConfig {
    /// Grid built from a user list of β in the given convention; family C is
    /// checked at the flipped image of every value.
    pub fn from_betas(betas: &[BetaParam]) -> Self {
        Self {
            standard_betas: betas.iter().map(BetaParam::standard_value).collect(),
            flipped_betas: betas.iter().map(BetaParam::flipped_value).collect(),
            ..Self::default()
        }
    }
}

/// Location of the worst observed error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub beta: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub tolerance: f64,
    pub max_error: f64,
    pub worst: Option<Witness>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<28} {:>6} {:>12} {:>12}  worst (beta, x, y)",
            "check", "status", "max error", "tolerance"
        )?;
        for c in &self.checks {
            let worst = c
                .worst
                .map(|w| format!("({}, {}, {})", w.beta, w.x, w.y))
                .unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{:<28} {:>6} {:>12.3e} {:>12.3e}  {}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.max_error,
                c.tolerance,
                worst
            )?;
        }
        Ok(())
    }
}

fn scaled_err(actual: f64, expected: f64) -> f64 {
    let diff = (actual - expected).abs();
    let e = if expected == 0.0 {
        diff
    } else {
        diff / expected.abs()
    };
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

/// Tracks the maximum error and where it happened.
struct Tracker {
    max: f64,
    worst: Option<Witness>,
}

impl Tracker {
    fn new() -> Self {
        Self {
            max: 0.0,
            worst: None,
        }
    }

    fn record(&mut self, err: f64, beta: f64, x: f64, y: f64) {
        if err > self.max || self.worst.is_none() {
            self.max = self.max.max(err);
            self.worst = Some(Witness { beta, x, y });
        }
    }

    fn finish(self, name: &'static str, tolerance: f64) -> CheckResult {
        CheckResult {
            name,
            tolerance,
            passed: self.max <= tolerance,
            max_error: self.max,
            worst: self.worst,
        }
    }
}

fn std_beta(b: f64) -> BetaParam {
    BetaParam::standard(b).expect("grid β is finite")
}

fn generator_equivalence(cfg: &VerifyConfig, family: Family) -> CheckResult {
    let mut t = Tracker::new();
    for &b in &cfg.standard_betas {
        let g = GeneratorFamily::new(family, std_beta(b));
        for &x in &cfg.points {
            for &y in &cfg.points {
                t.record(
                    scaled_err(g.bregman_unchecked(x, y), beta_kernel(x, y, b)),
                    b,
                    x,
                    y,
                );
            }
        }
    }
    let name = match family {
        Family::A => "generator-equivalence-A",
        Family::B => "generator-equivalence-B",
        Family::C => "generator-equivalence-C",
    };
    t.finish(name, GENERATOR_TOL)
}

fn family_c_proportionality(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    for &b in &cfg.flipped_betas {
        let g = GeneratorFamily::new(Family::C, BetaParam::flipped(b).expect("grid β is finite"));
        let mut scale = family_c_scale(b);
        if cfg.fault == Some(Fault::WrongFamilyCScale) {
            scale *= 2.0;
        }
        for &x in &cfg.points {
            for &y in &cfg.points {
                let expected = scale * beta_kernel(x, y, 1.0 - b);
                t.record(scaled_err(g.bregman_unchecked(x, y), expected), b, x, y);
            }
        }
    }
    t.finish("family-C-proportionality", FAMILY_C_TOL)
}

fn first_derivative(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    for &b in &cfg.standard_betas {
        for &x in &cfg.points {
            for &y in &cfg.points {
                let exact = y.powf(b - 2.0) * (y - x);
                let err =
                    match finite_diff_oracle(|s| beta_kernel(x, s, b), y, DerivativeOrder::First) {
                        Ok(fd) => scaled_err(fd, exact),
                        Err(_) => f64::INFINITY,
                    };
                t.record(err, b, x, y);
            }
        }
    }
    t.finish("first-derivative", FIRST_DERIVATIVE_TOL)
}

fn second_derivative(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    for &b in &cfg.standard_betas {
        for &x in &cfg.points {
            for &y in &cfg.points {
                let exact = y.powf(b - 3.0) * ((b - 1.0) * y - (b - 2.0) * x);
                let err = match finite_diff_oracle(
                    |s| beta_kernel(x, s, b),
                    y,
                    DerivativeOrder::Second,
                ) {
                    Ok(fd) => scaled_err(fd, exact),
                    Err(_) => f64::INFINITY,
                };
                t.record(err, b, x, y);
            }
        }
    }
    t.finish("second-derivative", SECOND_DERIVATIVE_TOL)
}

fn convexity(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    for &b in cfg
        .standard_betas
        .iter()
        .filter(|b| (1.0..=2.0).contains(*b))
    {
        for &x in &cfg.points {
            for &y in &cfg.points {
                let d2 = y.powf(b - 3.0) * ((b - 1.0) * y - (b - 2.0) * x);
                t.record((-d2).max(0.0), b, x, y);
            }
        }
    }
    t.finish("convexity-beta-in-[1,2]", CONVEXITY_SLACK)
}

fn homogeneity(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    for &b in &cfg.standard_betas {
        for &x in &cfg.points {
            for &y in &cfg.points {
                for &c in &SCALES {
                    let lhs = beta_kernel(c * x, c * y, b);
                    let rhs = c.powf(b) * beta_kernel(x, y, b);
                    t.record(scaled_err(lhs, rhs), b, x, y);
                }
            }
        }
    }
    t.finish("homogeneity", HOMOGENEITY_TOL)
}

/// IS is exactly scale invariant, and no other grid β is.
fn scale_invariance(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    for &x in &cfg.points {
        for &y in &cfg.points {
            for &c in &SCALES {
                let err = (beta_kernel(c * x, c * y, 0.0) - beta_kernel(x, y, 0.0)).abs();
                t.record(err, 0.0, x, y);
            }
        }
    }
    // A β ≠ 0 for which the identity never fails counts as an infinite error.
    for &b in cfg.standard_betas.iter().filter(|b| **b != 0.0) {
        let breaks = cfg.points.iter().any(|&x| {
            cfg.points.iter().any(|&y| {
                x != y
                    && SCALES.iter().any(|&c| {
                        let d = beta_kernel(x, y, b);
                        (beta_kernel(c * x, c * y, b) - d).abs() > SCALE_INVARIANCE_TOL * d.max(1.0)
                    })
            })
        });
        if !breaks {
            t.record(f64::INFINITY, b, f64::NAN, f64::NAN);
        }
    }
    t.finish("scale-invariance-unique-IS", SCALE_INVARIANCE_TOL)
}

fn continuity(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    for (b0, limit) in [
        (0.0, itakura_saito as fn(f64, f64) -> f64),
        (1.0, kullback_leibler),
    ] {
        for b in [b0 - CONTINUITY_STEP, b0 + CONTINUITY_STEP] {
            for &x in &cfg.points {
                for &y in &cfg.points {
                    t.record(scaled_err(beta_generic(x, y, b), limit(x, y)), b, x, y);
                }
            }
        }
    }
    t.finish("continuity-at-0-and-1", CONTINUITY_TOL)
}

fn generator_convexity(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    let ys: Vec<f64> = (-12..=12).map(|e| 10f64.powf(e as f64 * 0.5)).collect();
    let families = cfg
        .standard_betas
        .iter()
        .flat_map(|&b| [(Family::A, std_beta(b)), (Family::B, std_beta(b))])
        .chain(
            cfg.flipped_betas
                .iter()
                .map(|&b| (Family::C, BetaParam::flipped(b).expect("grid β is finite"))),
        );
    for (family, beta) in families {
        let g = GeneratorFamily::new(family, beta);
        for &y in &ys {
            let d2 = g.curvature(y);
            t.record(if d2 > 0.0 { 0.0 } else { 1.0 }, beta.value(), f64::NAN, y);
        }
    }
    t.finish("generator-strict-convexity", 0.0)
}

fn generator_curvature(cfg: &VerifyConfig) -> CheckResult {
    let mut t = Tracker::new();
    let families = cfg
        .standard_betas
        .iter()
        .flat_map(|&b| [(Family::A, std_beta(b)), (Family::B, std_beta(b))])
        .chain(
            cfg.flipped_betas
                .iter()
                .map(|&b| (Family::C, BetaParam::flipped(b).expect("grid β is finite"))),
        );
    for (family, beta) in families {
        let g = GeneratorFamily::new(family, beta);
        for &y in &cfg.points {
            let exact = g.curvature(y);
            let err = match finite_diff_oracle(|s| g.eval_unchecked(s).1, y, DerivativeOrder::First)
            {
                Ok(fd) => (fd - exact).abs() / exact.abs(),
                Err(_) => f64::INFINITY,
            };
            t.record(err, beta.value(), f64::NAN, y);
        }
    }
    t.finish("generator-curvature-fd", CURVATURE_FD_TOL)
}

/// Runs every check on the configured grid.
pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    VerifyReport {
        checks: vec![
            generator_equivalence(cfg, Family::A),
            generator_equivalence(cfg, Family::B),
            family_c_proportionality(cfg),
            first_derivative(cfg),
            second_derivative(cfg),
            convexity(cfg),
            homogeneity(cfg),
            scale_invariance(cfg),
            continuity(cfg),
            generator_convexity(cfg),
            generator_curvature(cfg),
        ],
    }
}
