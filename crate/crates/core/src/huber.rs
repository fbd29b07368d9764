//! Huber loss and the proximal machinery it reduces to.
//!
//! The Huber function with threshold `t` is quadratic (`x^2 / 2t`) inside
//! `|x| <= t` and linear (`|x| - t/2`) outside, with a continuous first
//! derivative at the knee. Its key property for this crate is the
//! Moreau-Yosida identity
//!
//! ```text
//! huber(x, t) = inf_r { |r| + (x - r)^2 / (2t) }
//! ```
//!
//! whose minimizer is the soft shrinkage of `x` by `t`. That identity is what
//! turns every Huber term of the segmentation energy into a closed-form
//! shrinkage update inside the solver.

use crate::error::{Error, Result};

/// Validated threshold for the Huber loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HuberParams {
    threshold: f64,
}

impl HuberParams {
    /// Fails unless `threshold > 0` and finite.
    pub fn new(threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "huber threshold must be positive, got {threshold}"
            )));
        }
        Ok(Self { threshold })
    }

    pub fn threshold(self) -> f64 {
        self.threshold
    }
}

/// Huber loss with knee at `params.threshold()`.
pub fn huber(x: f64, params: HuberParams) -> f64 {
    let t = params.threshold;
    if x.abs() <= t {
        x * x / (2.0 * t)
    } else {
        x.abs() - t / 2.0
    }
}

/// Soft shrinkage `T(v | weight)`: move `v` toward zero by `weight`,
/// clamping to zero inside `[-weight, weight]`.
#[inline]
pub fn soft_shrink(v: f64, weight: f64) -> f64 {
    debug_assert!(weight >= 0.0, "shrinkage weight must be nonnegative");
    if v > weight {
        v - weight
    } else if v < -weight {
        v + weight
    } else {
        0.0
    }
}

/// Proximal operator of the weighted L1 norm:
/// `argmin_x { (x - v)^2 / 2 + weight * |x| }`.
///
/// This is exactly soft shrinkage; the alias exists because both roles appear
/// in the solver derivation.
#[inline]
pub fn prox_l1(v: f64, weight: f64) -> f64 {
    soft_shrink(v, weight)
}

/// The Moreau-Yosida envelope of `|.|` at `x`: returns the minimizer `r*` of
/// `|r| + (x - r)^2 / (2t)` together with the attained value, which equals
/// `huber(x, t)`.
pub fn moreau_yosida_value(x: f64, params: HuberParams) -> (f64, f64) {
    let t = params.threshold;
    let minimizer = soft_shrink(x, t);
    let value = minimizer.abs() + (x - minimizer) * (x - minimizer) / (2.0 * t);
    (minimizer, value)
}
