//! Deformed phase-space algebra with generalised momenta
//! `P_i = p_i (1 - a|p| + b|p|^2)` and canonical coordinates `X_i = x_i`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GupError {
    #[error("no minimal length: 3b - 2a^2 = {0} is not positive")]
    NoMinimum(f64),
    #[error("deformation parameters must be finite and non-negative (a = {a}, b = {b})")]
    InvalidParams { a: f64, b: f64 },
}

/// Deformation parameters. `a` has units of inverse momentum and `b` of
/// inverse momentum squared; both are Planck-suppressed in physical settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GupParams {
    pub a: f64,
    pub b: f64,
    pub hbar: f64,
}

impl GupParams {
    pub fn new(a: f64, b: f64) -> Result<Self, GupError> {
        Self::with_hbar(a, b, 1.0)
    }

    pub fn with_hbar(a: f64, b: f64, hbar: f64) -> Result<Self, GupError> {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 && hbar.is_finite() && hbar > 0.0) {
            return Err(GupError::InvalidParams { a, b });
        }
        Ok(GupParams { a, b, hbar })
    }

    /// `3b - 2a^2`, the coefficient of `P^2` in the one-dimensional commutator.
    pub fn quadratic_coefficient(&self) -> f64 {
        3.0 * self.b - 2.0 * self.a * self.a
    }
}

/// Coefficients `(c0, c1, c2)` with `[X, P] = iħ (c0 + c1 P + c2 P^2)` in one
/// dimension, valid to linear order in `b` and quadratic order in `a`.
pub fn commutator_poly_1d(params: &GupParams) -> (f64, f64, f64) {
    (1.0, -2.0 * params.a, params.quadratic_coefficient())
}

/// Series inverse `p = P [1 + aP + (2a^2 - b) P^2]` of the one-dimensional
/// generalised momentum. Only meaningful while `|aP| << 1` and `|b P^2| << 1`.
pub fn invert_momentum(params: &GupParams, p_gen: f64) -> f64 {
    let GupParams { a, b, .. } = *params;
    p_gen * (1.0 + a * p_gen + (2.0 * a * a - b) * p_gen * p_gen)
}

/// `P_i = p_i (1 - a|p| + b|p|^2)` with `|p|` the Euclidean norm.
pub fn generalized_momentum(params: &GupParams, p: [f64; 3]) -> [f64; 3] {
    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let factor = 1.0 - params.a * norm + params.b * norm * norm;
    p.map(|x| x * factor)
}

/// Position uncertainty on the saturation curve of the generalised uncertainty
/// relation, `ΔX = (ħ/2) [1/ΔP - 2a + (3b - 2a^2) ΔP]`.
pub fn saturated_delta_x(params: &GupParams, delta_p: f64) -> f64 {
    0.5 * params.hbar * (1.0 / delta_p - 2.0 * params.a + params.quadratic_coefficient() * delta_p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalLength {
    /// `ħ (√(3b - 2a^2) - a)`
    pub length: f64,
    /// Momentum uncertainty at the minimum, `(3b - 2a^2)^(-1/2)`.
    pub delta_p_ext: f64,
}

pub fn minimal_length(params: &GupParams) -> Result<MinimalLength, GupError> {
    let k = params.quadratic_coefficient();
    if k.is_nan() || k <= 0.0 {
        return Err(GupError::NoMinimum(k));
    }
    let root = k.sqrt();
    Ok(MinimalLength {
        length: params.hbar * (root - params.a),
        delta_p_ext: 1.0 / root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(a: f64, b: f64) -> GupParams {
        GupParams::new(a, b).unwrap()
    }

    #[test]
    fn commutator_coefficients() {
        assert_eq!(commutator_poly_1d(&params(0.0, 0.0)), (1.0, 0.0, 0.0));
        let (c0, c1, c2) = commutator_poly_1d(&params(0.1, 0.02));
        assert_eq!(c0, 1.0);
        assert_eq!(c1, -0.2);
        assert!((c2 - 0.04).abs() < 1e-16);
        let a = 0.3;
        let (_, c1, c2) = commutator_poly_1d(&params(a, 2.0 * a * a));
        assert_eq!(c1, -2.0 * a);
        assert!((c2 - 4.0 * a * a).abs() < 1e-15);
    }

    #[test]
    fn inversion_coefficients() {
        assert_eq!(invert_momentum(&params(0.0, 0.0), 3.0), 3.0);
        // p(P) - P = a P^2 + (2a^2 - b) P^3, read back by finite sampling
        let g = params(0.2, 0.05);
        let at = |x: f64| invert_momentum(&g, x) - x;
        let c2 = (at(1.0) + at(-1.0)) / 2.0;
        let c3 = (at(1.0) - at(-1.0)) / 2.0;
        assert!((c2 - 0.2).abs() < 1e-15);
        assert!((c3 - (2.0 * 0.04 - 0.05)).abs() < 1e-15);
    }

    #[test]
    fn round_trip_residual_is_higher_order() {
        for &(a, b) in &[(1e-3, 1e-6), (1e-2, 2e-4), (5e-3, 1e-5)] {
            let g = params(a, b);
            for i in 1..=20 {
                let p = i as f64 * 0.5;
                let pp = generalized_momentum(&g, [0.0, 0.0, p])[2];
                let back = invert_momentum(&g, pp);
                let bound = 10.0 * (a.powi(3) * pp.powi(4)).max(a * b * pp.powi(4)).max(b * b * pp.powi(5));
                assert!((back - p).abs() <= bound, "a={a} b={b} p={p}: {} > {bound}", (back - p).abs());
            }
        }
    }

    #[test]
    fn generalized_momentum_limits() {
        let g = params(0.1, 0.02);
        assert_eq!(generalized_momentum(&g, [0.0; 3]), [0.0; 3]);
        let id = params(0.0, 0.0);
        assert_eq!(generalized_momentum(&id, [1.0, -2.0, 3.0]), [1.0, -2.0, 3.0]);
        let p = 2.0;
        let v = generalized_momentum(&g, [0.0, 0.0, p]);
        assert_eq!(v[0], 0.0);
        assert!((v[2] - p * (1.0 - 0.1 * p + 0.02 * p * p)).abs() < 1e-15);
    }

    #[test]
    fn minimal_length_examples() {
        let m = minimal_length(&params(0.1, 0.02)).unwrap();
        assert!((m.length - 0.1).abs() < 1e-15);
        assert!((m.delta_p_ext - 5.0).abs() < 1e-13);
        let a = 0.25;
        let m = minimal_length(&params(a, 2.0 * a * a)).unwrap();
        assert_eq!(m.length, a);
        assert!(matches!(minimal_length(&params(1.0, 0.5)), Err(GupError::NoMinimum(k)) if k == -0.5));
        let m = minimal_length(&GupParams::with_hbar(0.1, 0.02, 2.0).unwrap()).unwrap();
        assert!((m.length - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_parameters() {
        assert!(GupParams::new(-0.1, 0.0).is_err());
        assert!(GupParams::new(0.0, f64::NAN).is_err());
        assert!(GupParams::with_hbar(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn saturation_minimum_location() {
        let g = params(0.1, 0.04);
        let m = minimal_length(&g).unwrap();
        let x0 = m.delta_p_ext;
        let h = 1e-5;
        let slope = (saturated_delta_x(&g, x0 + h) - saturated_delta_x(&g, x0 - h)) / (2.0 * h);
        assert!(slope.abs() <= 1e-8);
        assert!((saturated_delta_x(&g, x0) - m.length).abs() < 1e-14);
        for i in 1..50 {
            let dp = x0 * (0.5 + i as f64 * 0.02);
            assert!(saturated_delta_x(&g, dp) >= m.length - 1e-15);
        }
    }

    proptest! {
        #[test]
        fn positivity_iff_b_at_least_a_squared(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let g = params(a, b);
            prop_assume!(g.quadratic_coefficient() > 0.0);
            prop_assume!((b - a * a).abs() > 1e-12);
            let m = minimal_length(&g).unwrap();
            prop_assert_eq!(m.length >= 0.0, b >= a * a);
        }
    }
}
