//! Nonnegative matrix factorization `V ≈ W H` under an element-wise
//! divergence.

mod mu;
mod sbcd;

pub use mu::{mu_update_h, mu_update_h_beta, mu_update_w, mu_update_w_beta};
pub use sbcd::{sbcd_sweep, SbcdState, SweepStats};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::divergence::elementwise::sum_divergence;
use crate::divergence::Divergence;
use crate::matrix::{FactorPair, NonNegMatrix};
use crate::{Error, Result, DEFAULT_EPS_FLOOR};

pub const DEFAULT_MAX_ITERS: usize = 1000;
pub const DEFAULT_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Curvature-weighted multiplicative updates for any generator.
    MuBregman,
    /// Multiplicative updates with `(WH)^(β-2)` / `(WH)^(β-1)` weights.
    #[default]
    MuBeta,
    /// Scalar block coordinate descent.
    Sbcd,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::MuBregman => "mu-bregman",
            Algorithm::MuBeta => "mu-beta",
            Algorithm::Sbcd => "sbcd",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "mu-bregman" => Ok(Algorithm::MuBregman),
            "mu-beta" | "mu" => Ok(Algorithm::MuBeta),
            "sbcd" => Ok(Algorithm::Sbcd),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm {other:?} (expected mu-beta|mu-bregman|sbcd)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub rank: usize,
    pub algorithm: Algorithm,
    pub divergence: Divergence,
    pub max_iters: usize,
    /// Stop once `|obj_t - obj_{t-1}| / obj_{t-1}` drops below this.
    pub rel_tol: f64,
    pub seed: u64,
    pub eps_floor: f64,
    /// Rescale columns of `W` to unit max after solving (compensated in `H`).
    pub normalize_columns: bool,
}

impl SolverConfig {
    pub fn new(rank: usize, divergence: Divergence) -> Self {
        Self {
            rank,
            algorithm: Algorithm::default(),
            divergence,
            max_iters: DEFAULT_MAX_ITERS,
            rel_tol: DEFAULT_REL_TOL,
            seed: 0,
            eps_floor: DEFAULT_EPS_FLOOR,
            normalize_columns: false,
        }
    }

    pub fn with_algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Checks every field that does not depend on the data shape.
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::InvalidConfig("rank must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if !(self.eps_floor.is_finite() && self.eps_floor > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "eps_floor must be > 0, got {}",
                self.eps_floor
            )));
        }
        Ok(())
    }
}

/// Counters accumulated over a solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Update entries left unchanged because of a zero denominator.
    pub zero_denominators: usize,
    /// Iterations whose objective exceeded the previous one.
    pub objective_increases: usize,
    /// Iterations rolled back because the objective became non-finite.
    pub rejected_steps: usize,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub factors: FactorPair,
    /// `(iteration, objective)`, starting with the initial objective at 0.
    pub trajectory: Vec<(usize, f64)>,
    pub iterations_run: usize,
    pub converged: bool,
    pub diagnostics: Diagnostics,
}

impl SolveReport {
    pub fn initial_objective(&self) -> f64 {
        self.trajectory[0].1
    }

    pub fn final_objective(&self) -> f64 {
        self.trajectory[self.trajectory.len() - 1].1
    }
}

pub(crate) fn check_shapes(v: &NonNegMatrix, w: &NonNegMatrix, h: &NonNegMatrix) -> Result<()> {
    if w.cols() != h.rows() {
        return Err(Error::ShapeMismatch {
            expected: (w.cols(), h.cols()),
            found: h.shape(),
        });
    }
    if v.shape() != (w.rows(), h.cols()) {
        return Err(Error::ShapeMismatch {
            expected: (w.rows(), h.cols()),
            found: v.shape(),
        });
    }
    Ok(())
}

/// `rows × cols` i.i.d. uniform on `(0, 1]`.
pub fn uniform_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || 1.0 - rng.gen::<f64>())
}

/// The seeded generator used for initialization and synthetic data.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `D(V | WH)` with `WH` floored into the domain.
pub fn objective(v: &NonNegMatrix, factors: &FactorPair, d: &Divergence) -> Result<f64> {
    if v.shape() != factors.product_shape() {
        return Err(Error::ShapeMismatch {
            expected: factors.product_shape(),
            found: v.shape(),
        });
    }
    Ok(objective_raw(v.as_array(), factors, d, DEFAULT_EPS_FLOOR))
}

fn objective_raw(v: &Array2<f64>, factors: &FactorPair, d: &Divergence, eps: f64) -> f64 {
    let wh = mu::floored_product(factors.w.as_array(), factors.h.as_array(), eps);
    sum_divergence(v.view(), wh.view(), d)
}

/// Factorizes `v` from a seeded uniform start.
pub fn solve(v: &NonNegMatrix, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let (rows, cols) = v.shape();
    let max_rank = rows.min(cols);
    if config.rank > max_rank {
        return Err(Error::InvalidRank {
            rank: config.rank,
            max: max_rank,
        });
    }
    let mut rng = seeded_rng(config.seed);
    let w = uniform_matrix(rows, config.rank, &mut rng);
    let h = uniform_matrix(config.rank, cols, &mut rng);
    let factors = FactorPair::new(NonNegMatrix::from_floored(w), NonNegMatrix::from_floored(h))?;
    solve_from(v, factors, config)
}

/// Factorizes `v` starting from the given factors.
pub fn solve_from(
    v: &NonNegMatrix,
    mut factors: FactorPair,
    config: &SolverConfig,
) -> Result<SolveReport> {
    config.validate()?;
    check_shapes(v, factors.w(), factors.h())?;
    let eps = config.eps_floor;
    let d = &config.divergence;

    let initial = objective_raw(v.as_array(), &factors, d, eps);
    if !initial.is_finite() {
        return Err(Error::NonFiniteObjective(format!(
            "initial objective is {initial}"
        )));
    }

    let mut trajectory = Vec::with_capacity(config.max_iters + 1);
    trajectory.push((0, initial));
    let mut diagnostics = Diagnostics::default();
    let mut converged = false;
    let mut sbcd_state = match config.algorithm {
        Algorithm::Sbcd => Some(SbcdState::new(v, &factors, d, eps)?),
        _ => None,
    };
    let mut prev = initial;
    let mut iterations_run = 0;

    for iter in 1..=config.max_iters {
        let snapshot = factors.clone();
        match config.algorithm {
            Algorithm::MuBregman | Algorithm::MuBeta => {
                diagnostics.zero_denominators += mu_iteration(v, &mut factors, config);
            }
            Algorithm::Sbcd => {
                let state = sbcd_state.as_mut().expect("sbcd state initialized");
                diagnostics.zero_denominators +=
                    sbcd_sweep(v, &mut factors, d, state, eps)?.zero_denominators;
            }
        }
        iterations_run = iter;
        let current = objective_raw(v.as_array(), &factors, d, eps);
        if !current.is_finite() {
            log::warn!("objective became {current} at iteration {iter}; keeping previous iterate");
            diagnostics.rejected_steps += 1;
            factors = snapshot;
            trajectory.push((iter, prev));
            break;
        }
        if current > prev {
            diagnostics.objective_increases += 1;
        }
        trajectory.push((iter, current));
        let change = (current - prev).abs() / prev.max(1e-300);
        prev = current;
        if change < config.rel_tol {
            converged = true;
            break;
        }
    }

    if config.normalize_columns {
        factors.normalize_columns(eps);
    }

    Ok(SolveReport {
        factors,
        trajectory,
        iterations_run,
        converged,
        diagnostics,
    })
}

/// `H` then `W`, each against the current product.
fn mu_iteration(v: &NonNegMatrix, factors: &mut FactorPair, config: &SolverConfig) -> usize {
    let eps = config.eps_floor;
    let d = &config.divergence;
    let v = v.as_array();
    let weights = |wh: &Array2<f64>| match config.algorithm {
        Algorithm::MuBeta => mu::beta_weights(v, wh, d.beta()),
        _ => mu::bregman_weights(v, wh, d),
    };
    let mut skipped = 0;

    let wh = mu::floored_product(factors.w.as_array(), factors.h.as_array(), eps);
    let (num, den) = weights(&wh);
    skipped += mu::step_h(
        factors.w.as_array(),
        factors.h.as_array_mut(),
        &num,
        &den,
        eps,
    );

    let wh = mu::floored_product(factors.w.as_array(), factors.h.as_array(), eps);
    let (num, den) = weights(&wh);
    skipped += mu::step_w(
        factors.w.as_array_mut(),
        factors.h.as_array(),
        &num,
        &den,
        eps,
    );
    skipped
}
