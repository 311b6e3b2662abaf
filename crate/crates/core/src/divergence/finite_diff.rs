//! Central finite differences with Richardson extrapolation (Ridders'
//! tableau). Verification only; the solvers never call this.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

const SHRINK: f64 = 1.4;
const TABLEAU: usize = 10;
const SAFE: f64 = 2.0;

/// Central-difference estimate of `f'(y)` or `f''(y)` on the positive axis.
///
/// The first stencil uses `h = 0.1 y`, so every evaluation point stays in
/// `(0, ∞)`.
pub fn finite_diff_oracle<F>(f: F, y: f64, order: DerivativeOrder) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::Domain(format!(
            "finite-difference point must be finite and > 0, got {y}"
        )));
    }
    finite_diff_with_step(f, y, order, 0.1 * y)
}

/// As [`finite_diff_oracle`] with an explicit initial step.
pub fn finite_diff_with_step<F>(f: F, y: f64, order: DerivativeOrder, h0: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(h0.is_finite() && h0 > 0.0) {
        return Err(Error::Domain(format!(
            "step must be finite and > 0, got {h0}"
        )));
    }
    if y - h0 <= 0.0 {
        return Err(Error::Domain(format!(
            "stencil [{}, {}] leaves the positive domain",
            y - h0,
            y + h0
        )));
    }
    let stencil = |h: f64| match order {
        DerivativeOrder::First => (f(y + h) - f(y - h)) / (2.0 * h),
        DerivativeOrder::Second => (f(y + h) - 2.0 * f(y) + f(y - h)) / (h * h),
    };

    let mut table = [[0.0f64; TABLEAU]; TABLEAU];
    let mut h = h0;
    table[0][0] = stencil(h);
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..TABLEAU {
        h /= SHRINK;
        table[0][i] = stencil(h);
        let mut fac = SHRINK * SHRINK;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= SHRINK * SHRINK;
            let e = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{beta_kernel, generator_eval, BetaParam, Family, GeneratorFamily};

    #[test]
    fn derivative_at_minimum_is_zero() {
        let d =
            finite_diff_oracle(|y| beta_kernel(1.0, y, 2.0), 1.0, DerivativeOrder::First).unwrap();
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn matches_is_first_derivative() {
        let d =
            finite_diff_oracle(|y| beta_kernel(4.0, y, 0.0), 2.0, DerivativeOrder::First).unwrap();
        assert!((d + 0.5).abs() < 1e-6);
    }

    #[test]
    fn second_derivative_of_generator() {
        let g = GeneratorFamily::new(Family::B, BetaParam::standard(1.0).unwrap());
        let d = finite_diff_oracle(
            |y| generator_eval(&g, y).unwrap().0,
            1.0,
            DerivativeOrder::Second,
        )
        .unwrap();
        assert!((d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn polynomial_is_exact_enough() {
        let d = finite_diff_oracle(|y| y.powi(3), 2.0, DerivativeOrder::First).unwrap();
        assert!((d - 12.0).abs() < 1e-10);
        let d = finite_diff_oracle(|y| y.powi(3), 2.0, DerivativeOrder::Second).unwrap();
        assert!((d - 12.0).abs() < 1e-8);
    }

    #[test]
    fn stencil_outside_domain_is_rejected() {
        assert!(finite_diff_oracle(|y| y, 0.0, DerivativeOrder::First).is_err());
        assert!(finite_diff_with_step(|y| y, 1.0, DerivativeOrder::First, 1.0).is_err());
    }
}
