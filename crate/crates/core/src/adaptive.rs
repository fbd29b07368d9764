//! Residual-driven trade-off weights.
//!
//! Each label carries a per-pixel weight `lambda` balancing data fidelity
//! against regularization. The weight is recomputed every iteration from the
//! current data cost: a confidence `nu = exp(-cost / beta)` close to 1 where
//! the model fits, then a Lasso step `lambda = shrink(nu, alpha)` that caps
//! the weight at `1 - alpha` so some regularization always survives. Large
//! residual => small `lambda` => the regularizer takes over locally.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::huber::soft_shrink;

/// Validated parameters of the adaptive weighting scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveParams {
    beta: f64,
    alpha: f64,
}

impl AdaptiveParams {
    /// `beta > 0` scales the residual; `alpha` in `(0, 1)` is the sparsity
    /// weight of the Lasso step.
    pub fn new(beta: f64, alpha: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(Self { beta, alpha })
    }

    pub fn beta(self) -> f64 {
        self.beta
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }
}

/// Confidence `nu(x) = exp(-cost(x) / beta)`, in `(0, 1]` for nonnegative
/// costs. Rejects negative cost entries.
pub fn residual_confidence(data_cost: &ScalarField, beta: f64) -> Result<ScalarField> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if data_cost.data().iter().any(|&v| v < 0.0) {
        return Err(Error::Contract(
            "data cost must be nonnegative everywhere".into(),
        ));
    }
    Ok(data_cost.map(|v| (-v / beta).exp()))
}

/// Lasso solution `lambda(x) = shrink(nu(x), alpha)`; for `nu` in `(0, 1]`
/// the result lies in `[0, 1 - alpha]`.
pub fn adaptive_lambda(nu: &ScalarField, alpha: f64) -> ScalarField {
    nu.map(|v| soft_shrink(v, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cost_field(values: &[f64]) -> ScalarField {
        ScalarField::from_vec(values.len(), 1, 1, values.to_vec()).unwrap()
    }

    #[test]
    fn zero_cost_gives_unit_confidence() {
        let nu = residual_confidence(&ScalarField::zeros(4, 4, 1), 10.0).unwrap();
        assert!(nu.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn cost_equal_beta_gives_inverse_e() {
        let nu = residual_confidence(&cost_field(&[10.0]), 10.0).unwrap();
        assert!((nu.at(0, 0, 0) - (-1.0f64).exp()).abs() < 1e-12);
        assert!((nu.at(0, 0, 0) - 0.36788).abs() < 1e-5);
    }

    #[test]
    fn negative_cost_is_rejected() {
        assert!(residual_confidence(&cost_field(&[0.1, -1e-9]), 1.0).is_err());
    }

    #[test]
    fn full_confidence_maps_to_one_minus_alpha() {
        let nu = cost_field(&[1.0]);
        let lam = adaptive_lambda(&nu, 0.01);
        assert!((lam.at(0, 0, 0) - 0.99).abs() < 1e-15);
    }

    #[test]
    fn dead_zone_zeroes_lambda() {
        let nu = cost_field(&[0.009, 0.01]);
        let lam = adaptive_lambda(&nu, 0.01);
        assert_eq!(lam.at(0, 0, 0), 0.0);
        assert_eq!(lam.at(1, 0, 0), 0.0);
    }

    #[test]
    fn lambda_matches_bruteforce_lasso_minimizer() {
        let alpha = 0.01;
        // deterministic pseudo-random nu values in (0, 1]
        let mut s = 0x12345u64;
        for _ in 0..100 {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let nu = (s >> 11) as f64 / (1u64 << 53) as f64;
            let lam = soft_shrink(nu, alpha);
            // independent 1-D grid search for argmin 0.5 (nu - l)^2 + alpha |l|
            let mut best = (0.0, f64::INFINITY);
            let mut l = -0.5;
            while l <= 1.5 {
                let v = 0.5 * (nu - l) * (nu - l) + alpha * l.abs();
                if v < best.1 {
                    best = (l, v);
                }
                l += 1e-5;
            }
            assert!((lam - best.0).abs() < 2e-5, "nu={nu}");
        }
    }

    proptest! {
        #[test]
        fn lambda_range_and_monotonicity(cost_a in 0.0f64..50.0, cost_b in 0.0f64..50.0,
                                         beta in 0.1f64..20.0, alpha in 0.001f64..0.5) {
            let (lo, hi) = if cost_a <= cost_b { (cost_a, cost_b) } else { (cost_b, cost_a) };
            let nu = residual_confidence(&cost_field(&[lo, hi]), beta).unwrap();
            let lam = adaptive_lambda(&nu, alpha);
            // range [0, 1 - alpha]
            for &v in lam.data() {
                prop_assert!(v >= 0.0 && v <= 1.0 - alpha + 1e-15);
            }
            // larger cost => smaller lambda
            prop_assert!(lam.at(0, 0, 0) >= lam.at(1, 0, 0));
        }

        #[test]
        fn zero_cost_recovers_global_tradeoff(alpha in 0.001f64..0.5, beta in 0.1f64..20.0) {
            let nu = residual_confidence(&ScalarField::zeros(3, 3, 1), beta).unwrap();
            let lam = adaptive_lambda(&nu, alpha);
            for &v in lam.data() {
                prop_assert!((v - (1.0 - alpha)).abs() < 1e-15);
            }
        }
    }
}
