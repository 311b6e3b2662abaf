//! Scalar block coordinate descent.
//!
//! Each entry of `W` and `H` is a scalar block. With curvature weights
//! `B = φ''(WH)` fixed for the outer pass, the rank-one restored data
//! `V⁽ᵏ⁾ = E + w_k h_k` is refit one scalar at a time:
//!
//! ```text
//! h_jk = [ Σ_i b_ij v⁽ᵏ⁾_ij w_ik / Σ_i b_ij w_ik² ]₊
//! w_ik = [ Σ_j b_ij v⁽ᵏ⁾_ij h_jk / Σ_j b_ij h_jk² ]₊
//! ```
//!
//! after which the residual is `E = V⁽ᵏ⁾ - w_k h_k`. `[·]₊` clamps to the
//! floor rather than to zero.

use ndarray::{Array2, Zip};

use super::mu::floored_product;
use crate::divergence::Divergence;
use crate::matrix::{FactorPair, NonNegMatrix};
use crate::{Error, Result};

/// Working matrices carried across sweeps.
#[derive(Debug, Clone)]
pub struct SbcdState {
    /// Residual `V - WH`; may hold negative entries.
    pub residual: Array2<f64>,
    /// Rank-one restored data of the component last visited.
    pub restored: Array2<f64>,
    /// Curvature weights `φ''(WH)` for the current outer pass.
    pub curvature: Array2<f64>,
}

impl SbcdState {
    pub fn new(v: &NonNegMatrix, factors: &FactorPair, d: &Divergence, eps: f64) -> Result<Self> {
        check(v, factors)?;
        let wh = factors.product();
        let residual = v.as_array() - &wh;
        let curvature = wh.mapv(|y| d.curvature(y.max(eps)));
        Ok(Self {
            restored: Array2::zeros(residual.raw_dim()),
            residual,
            curvature,
        })
    }
}

/// Counters from one sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    /// Scalars left unchanged because their denominator was zero or the
    /// ratio was not finite.
    pub zero_denominators: usize,
}

fn check(v: &NonNegMatrix, factors: &FactorPair) -> Result<()> {
    if v.shape() != factors.product_shape() {
        return Err(Error::ShapeMismatch {
            expected: factors.product_shape(),
            found: v.shape(),
        });
    }
    Ok(())
}

/// One outer pass over all K components.
pub fn sbcd_sweep(
    v: &NonNegMatrix,
    factors: &mut FactorPair,
    d: &Divergence,
    state: &mut SbcdState,
    eps: f64,
) -> Result<SweepStats> {
    check(v, factors)?;
    if state.residual.dim() != v.shape() {
        return Err(Error::ShapeMismatch {
            expected: v.shape(),
            found: state.residual.dim(),
        });
    }
    let mut stats = SweepStats::default();
    let wh = floored_product(factors.w.as_array(), factors.h.as_array(), eps);
    state.curvature = wh.mapv(|y| d.curvature(y));

    let (rows, cols) = v.shape();
    let w = factors.w.as_array_mut();
    let h = factors.h.as_array_mut();
    let b = &state.curvature;

    for k in 0..w.ncols() {
        state.restored.assign(&state.residual);
        Zip::indexed(&mut state.restored).for_each(|(i, j), r| *r += w[[i, k]] * h[[k, j]]);
        let vk = &state.restored;

        for j in 0..cols {
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..rows {
                let bw = b[[i, j]] * w[[i, k]];
                num += bw * vk[[i, j]];
                den += bw * w[[i, k]];
            }
            let ratio = num / den;
            if den > 0.0 && ratio.is_finite() {
                h[[k, j]] = ratio.max(eps);
            } else {
                stats.zero_denominators += 1;
            }
        }

        for i in 0..rows {
            let (mut num, mut den) = (0.0, 0.0);
            for j in 0..cols {
                let bh = b[[i, j]] * h[[k, j]];
                num += bh * vk[[i, j]];
                den += bh * h[[k, j]];
            }
            let ratio = num / den;
            if den > 0.0 && ratio.is_finite() {
                w[[i, k]] = ratio.max(eps);
            } else {
                stats.zero_denominators += 1;
            }
        }

        Zip::indexed(&mut state.residual)
            .and(vk)
            .for_each(|(i, j), e, &r| *e = r - w[[i, k]] * h[[k, j]]);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{BetaParam, Family, GeneratorFamily};
    use ndarray::array;

    fn nn(a: Array2<f64>) -> NonNegMatrix {
        NonNegMatrix::new(a).unwrap()
    }

    #[test]
    fn scalar_case_fits_in_one_step() {
        let v = nn(array![[6.0]]);
        for (family, b) in [(Family::A, 2.0), (Family::B, 0.0), (Family::C, 3.0)] {
            let d = Divergence::Bregman(GeneratorFamily::new(
                family,
                BetaParam::new(b, family.convention()).unwrap(),
            ));
            let mut f = FactorPair::new(nn(array![[2.0]]), nn(array![[1.0]])).unwrap();
            let mut state = SbcdState::new(&v, &f, &d, 1e-12).unwrap();
            sbcd_sweep(&v, &mut f, &d, &mut state, 1e-12).unwrap();
            // h = b·6·2 / (b·2·2) = 3, then w = 6·3 / 3² = 2.
            assert_eq!(f.h().get(0, 0), 3.0);
            assert_eq!(f.w().get(0, 0), 2.0);
            assert_eq!(state.residual[[0, 0]], 0.0);
        }
    }

    #[test]
    fn negative_interim_numerator_is_clamped() {
        // Second component must fit a negative residual: h would go negative.
        let v = nn(array![[1.0, 1.0], [1.0, 1.0]]);
        let w = nn(array![[1.0, 1.0], [1.0, 1.0]]);
        let h = nn(array![[1.0, 1.0], [1.0, 1.0]]);
        let mut f = FactorPair::new(w, h).unwrap();
        let d = Divergence::Beta(BetaParam::standard(2.0).unwrap());
        let mut state = SbcdState::new(&v, &f, &d, 1e-12).unwrap();
        sbcd_sweep(&v, &mut f, &d, &mut state, 1e-12).unwrap();
        assert!(f.w().min_entry() >= 1e-12);
        assert!(f.h().min_entry() >= 1e-12);
        assert!(f.h().as_array().iter().any(|&x| x == 1e-12));
    }

    #[test]
    fn residual_tracks_product() {
        let v = nn(array![[1.0, 2.0, 3.0], [0.5, 0.1, 4.0], [2.0, 2.0, 2.0]]);
        let mut f = FactorPair::new(
            nn(array![[0.3, 0.9], [0.6, 0.1], [0.8, 0.5]]),
            nn(array![[0.2, 0.7, 0.4], [0.9, 0.3, 0.6]]),
        )
        .unwrap();
        let d = Divergence::Beta(BetaParam::standard(1.0).unwrap());
        let mut state = SbcdState::new(&v, &f, &d, 1e-12).unwrap();
        for _ in 0..5 {
            sbcd_sweep(&v, &mut f, &d, &mut state, 1e-12).unwrap();
            let direct = v.as_array() - &f.product();
            let gap = (&state.residual - &direct)
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(gap <= 1e-12);
        }
    }

    #[test]
    fn restored_matches_residual_plus_last_component() {
        let v = nn(array![[1.0, 2.0], [3.0, 4.0]]);
        let mut f = FactorPair::new(nn(array![[0.5], [0.7]]), nn(array![[0.2, 0.9]])).unwrap();
        let d = Divergence::Beta(BetaParam::standard(2.0).unwrap());
        let mut state = SbcdState::new(&v, &f, &d, 1e-12).unwrap();
        sbcd_sweep(&v, &mut f, &d, &mut state, 1e-12).unwrap();
        let recon = &state.residual + &f.product();
        for (a, b) in recon.iter().zip(state.restored.iter()) {
            assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
        }
    }

    #[test]
    fn shape_mismatch() {
        let v = nn(array![[1.0, 2.0]]);
        let mut f = FactorPair::new(nn(array![[1.0]]), nn(array![[1.0]])).unwrap();
        let d = Divergence::Beta(BetaParam::standard(2.0).unwrap());
        assert!(SbcdState::new(&v, &f, &d, 1e-12).is_err());
        let mut state = SbcdState::new(&nn(array![[1.0]]), &f, &d, 1e-12).unwrap();
        assert!(sbcd_sweep(&v, &mut f, &d, &mut state, 1e-12).is_err());
    }
}
