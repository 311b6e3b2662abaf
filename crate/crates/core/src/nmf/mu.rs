//! Multiplicative updates.
//!
//! General Bregman form, with `A = φ''(WH)`:
//!
//! ```text
//! H <- H ⊙ Wᵀ(A ⊙ V) / Wᵀ(A ⊙ WH)
//! W <- W ⊙ (A ⊙ V)Hᵀ / (A ⊙ WH)Hᵀ
//! ```
//!
//! The β-specialized form replaces the weights by powers of `WH`:
//! `Wᵀ((WH)^(β-2) ⊙ V) / Wᵀ((WH)^(β-1))` in standard indexing, which is
//! `(WH)^(-β-1)` and `(WH)^(-β)` in flipped indexing. Family C's curvature
//! differs from `(WH)^(-β-1)` only by a constant that cancels in the ratio.

use ndarray::{Array2, Zip};

use super::check_shapes;
use crate::divergence::{BetaParam, Divergence, GeneratorFamily};
use crate::matrix::NonNegMatrix;
use crate::{Result, DEFAULT_EPS_FLOOR};

/// Weight matrices `(P, Q)` so the update ratio is `Wᵀ P / Wᵀ Q`.
pub(crate) fn bregman_weights(
    v: &Array2<f64>,
    wh: &Array2<f64>,
    d: &Divergence,
) -> (Array2<f64>, Array2<f64>) {
    let curv = wh.mapv(|y| d.curvature(y));
    let num = &curv * v;
    let den = curv * wh;
    (num, den)
}

pub(crate) fn beta_weights(
    v: &Array2<f64>,
    wh: &Array2<f64>,
    beta: BetaParam,
) -> (Array2<f64>, Array2<f64>) {
    let b = beta.standard_value();
    let mut num = wh.mapv(|y| y.powf(b - 2.0));
    num *= v;
    let den = wh.mapv(|y| y.powf(b - 1.0));
    (num, den)
}

pub(crate) fn floored_product(w: &Array2<f64>, h: &Array2<f64>, eps: f64) -> Array2<f64> {
    w.dot(h).mapv(|v| v.max(eps))
}

/// `target <- target ⊙ num / den`, floored; entries with a zero or
/// non-finite ratio keep their previous value. Returns how many did.
fn apply_ratio(target: &mut Array2<f64>, num: &Array2<f64>, den: &Array2<f64>, eps: f64) -> usize {
    let mut skipped = 0;
    Zip::from(target).and(num).and(den).for_each(|t, &n, &d| {
        let updated = *t * (n / d);
        if d > 0.0 && updated.is_finite() {
            *t = updated.max(eps);
        } else {
            skipped += 1;
        }
    });
    skipped
}

pub(crate) fn step_h(
    w: &Array2<f64>,
    h: &mut Array2<f64>,
    num: &Array2<f64>,
    den: &Array2<f64>,
    eps: f64,
) -> usize {
    let wt = w.t();
    apply_ratio(h, &wt.dot(num), &wt.dot(den), eps)
}

pub(crate) fn step_w(
    w: &mut Array2<f64>,
    h: &Array2<f64>,
    num: &Array2<f64>,
    den: &Array2<f64>,
    eps: f64,
) -> usize {
    let ht = h.t();
    apply_ratio(w, &num.dot(&ht), &den.dot(&ht), eps)
}

/// One general-Bregman multiplicative update of `H`.
pub fn mu_update_h(
    v: &NonNegMatrix,
    w: &NonNegMatrix,
    h: &NonNegMatrix,
    g: &GeneratorFamily,
) -> Result<NonNegMatrix> {
    check_shapes(v, w, h)?;
    let eps = DEFAULT_EPS_FLOOR;
    let wh = floored_product(w.as_array(), h.as_array(), eps);
    let (num, den) = bregman_weights(v.as_array(), &wh, &Divergence::Bregman(*g));
    let mut out = h.as_array().clone();
    step_h(w.as_array(), &mut out, &num, &den, eps);
    Ok(NonNegMatrix::from_floored(out))
}

/// One general-Bregman multiplicative update of `W`.
pub fn mu_update_w(
    v: &NonNegMatrix,
    w: &NonNegMatrix,
    h: &NonNegMatrix,
    g: &GeneratorFamily,
) -> Result<NonNegMatrix> {
    check_shapes(v, w, h)?;
    let eps = DEFAULT_EPS_FLOOR;
    let wh = floored_product(w.as_array(), h.as_array(), eps);
    let (num, den) = bregman_weights(v.as_array(), &wh, &Divergence::Bregman(*g));
    let mut out = w.as_array().clone();
    step_w(&mut out, h.as_array(), &num, &den, eps);
    Ok(NonNegMatrix::from_floored(out))
}

/// One β-specialized multiplicative update of `H`.
pub fn mu_update_h_beta(
    v: &NonNegMatrix,
    w: &NonNegMatrix,
    h: &NonNegMatrix,
    beta: BetaParam,
) -> Result<NonNegMatrix> {
    check_shapes(v, w, h)?;
    let eps = DEFAULT_EPS_FLOOR;
    let wh = floored_product(w.as_array(), h.as_array(), eps);
    let (num, den) = beta_weights(v.as_array(), &wh, beta);
    let mut out = h.as_array().clone();
    step_h(w.as_array(), &mut out, &num, &den, eps);
    Ok(NonNegMatrix::from_floored(out))
}

/// One β-specialized multiplicative update of `W`.
pub fn mu_update_w_beta(
    v: &NonNegMatrix,
    w: &NonNegMatrix,
    h: &NonNegMatrix,
    beta: BetaParam,
) -> Result<NonNegMatrix> {
    check_shapes(v, w, h)?;
    let eps = DEFAULT_EPS_FLOOR;
    let wh = floored_product(w.as_array(), h.as_array(), eps);
    let (num, den) = beta_weights(v.as_array(), &wh, beta);
    let mut out = w.as_array().clone();
    step_w(&mut out, h.as_array(), &num, &den, eps);
    Ok(NonNegMatrix::from_floored(out))
}
