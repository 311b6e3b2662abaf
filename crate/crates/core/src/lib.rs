//! Beta-divergence kernels, Bregman generator families, and nonnegative
//! matrix factorization.
//!
//! The crate is split into four layers:
//!
//! - [`divergence`]: the scalar β-divergence, its derivatives in the model
//!   argument, three scalar Bregman generator families that induce it, the
//!   element-wise matrix divergence, and a central finite-difference oracle.
//! - [`matrix`]: floored nonnegative matrices and factor pairs.
//! - [`nmf`]: multiplicative updates (general Bregman and β-specialized),
//!   scalar block coordinate descent, and the [`nmf::solve`] driver.
//! - [`io`]: CSV / sonar ingestion, synthetic data, trajectory export and
//!   divergence-curve tables.
//!
//! [`verify`] runs the numeric certificate that the generator families
//! reproduce the β-divergence.
//!
//! ```
//! use bregnmf::divergence::{beta_divergence, BetaParam, ScalarPair};
//!
//! let p = ScalarPair::new(3.0, 1.0).unwrap();
//! let d = beta_divergence(p, BetaParam::standard(2.0).unwrap()).unwrap();
//! assert!((d - 2.0).abs() < 1e-15);
//! ```

pub mod divergence;
pub mod error;
pub mod io;
pub mod matrix;
pub mod nmf;
pub mod verify;

pub use error::{Error, Result};

/// Smallest admissible entry of any matrix handed to a divergence.
pub const DEFAULT_EPS_FLOOR: f64 = 1e-12;
