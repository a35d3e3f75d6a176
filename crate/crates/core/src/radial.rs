//! Linear radial potential `V(r) = q r` at zero angular momentum.
//!
//! The unperturbed large component is `Ψ_n = α √(2q/4π) Ai(z) / (z - z_n)` with
//! `z = (2q)^(1/3) r + z_n` and `α = 1 / Ai'(z_n)`. The first-order shift is
//! `E1 = -⟨φ⁻,(E+V)φ⁻⟩ - 4 m a² ⟨φ⁺,(E-V)²φ⁺⟩`. Both brackets are stored as the
//! positive quantities; the minus signs are applied when assembling `E1`.

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{integrate_with_tail, QuadratureError};
use crate::specialfn::{airy, airy_ai_zero, airy_unchecked, SpecialFnError};

const REMOVABLE_RADIUS: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("invalid radial spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialSpec {
    /// Potential slope.
    pub q: f64,
    /// Speed of light.
    pub c: f64,
    /// Deformation parameter of `P_i = p_i (1 - a² p²)`.
    pub a: f64,
    pub m: f64,
}

impl RadialSpec {
    pub fn new(q: f64, c: f64, a: f64) -> Result<Self, RadialError> {
        RadialSpec { q, c, a, m: 1.0 }.validated()
    }

    pub fn validated(self) -> Result<Self, RadialError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.q) {
            return Err(RadialError::InvalidSpec(format!("q must be positive, got {}", self.q)));
        }
        if !positive(self.c) {
            return Err(RadialError::InvalidSpec(format!("c must be positive, got {}", self.c)));
        }
        if !positive(self.m) {
            return Err(RadialError::InvalidSpec(format!("m must be positive, got {}", self.m)));
        }
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(RadialError::InvalidSpec(format!("a must be non-negative, got {}", self.a)));
        }
        Ok(self)
    }

    /// `q^(4/3) / 2^(2/3)`, the common energy-squared scale of both brackets.
    fn bracket_scale(&self) -> f64 {
        self.q.powf(4.0 / 3.0) / 2f64.powf(2.0 / 3.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialLevel {
    pub n: usize,
    pub z_n: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub alpha_norm: f64,
    /// `⟨φ⁺,(E-V)²φ⁺⟩`
    pub bracket_ev2: f64,
    /// `⟨φ⁻,(E+V)φ⁻⟩`
    pub bracket_small: f64,
    #[serde(rename = "E1_rel")]
    pub e1_rel: f64,
    #[serde(rename = "E1_gup")]
    pub e1_gup: f64,
    #[serde(rename = "E1_total")]
    pub e1_total: f64,
}

/// Closed-form level data for level `n`.
pub fn radial_level(spec: &RadialSpec, n: usize) -> Result<RadialLevel, RadialError> {
    let z_n = airy_ai_zero(n)?.z;
    let ai_prime = airy(z_n)?.ai_prime;
    let s = spec.bracket_scale();
    let e0 = -spec.q.powf(2.0 / 3.0) * z_n / 2f64.powf(1.0 / 3.0);
    let bracket_ev2 = s * z_n * z_n / 5.0;
    let bracket_small = -5.0 / 6.0 * s * z_n / (spec.c * spec.c);
    let e1_rel = -bracket_small;
    let e1_gup = -4.0 * spec.m * spec.a * spec.a * bracket_ev2;
    Ok(RadialLevel {
        n,
        z_n,
        e0,
        alpha_norm: 1.0 / ai_prime,
        bracket_ev2,
        bracket_small,
        e1_rel,
        e1_gup,
        e1_total: e1_rel + e1_gup,
    })
}

/// `Ai(z) / (z - z_n)`, continuous through the removable point `z = z_n`.
fn ai_over_shift(z: f64, z_n: f64, ai_prime_zn: f64) -> f64 {
    let t = z - z_n;
    if t.abs() < REMOVABLE_RADIUS {
        // Ai''(z_n) = 0, Ai'''(z_n) = z_n Ai'(z_n), Ai''''(z_n) = 2 Ai'(z_n)
        ai_prime_zn * (1.0 + z_n * t * t / 6.0 + t * t * t / 12.0)
    } else {
        airy_unchecked(z).ai / t
    }
}

/// `Ai'(z) - Ai(z)/(z - z_n)`, i.e. `(z - z_n) d/dz [Ai(z)/(z - z_n)]`.
fn shifted_derivative(z: f64, z_n: f64, ai_prime_zn: f64) -> f64 {
    let t = z - z_n;
    if t.abs() < REMOVABLE_RADIUS {
        ai_prime_zn * (z_n * t * t / 3.0 + t * t * t / 4.0)
    } else {
        let v = airy_unchecked(z);
        v.ai_prime - v.ai / t
    }
}

/// Normalized large component `Ψ_n(r)` (angular factor included).
pub fn radial_wavefunction(spec: &RadialSpec, n: usize, r: f64) -> Result<f64, RadialError> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(RadialError::InvalidSpec(format!("radius must be non-negative, got {r}")));
    }
    let z_n = airy_ai_zero(n)?.z;
    let ai_prime = airy(z_n)?.ai_prime;
    let z = (2.0 * spec.q).cbrt() * r + z_n;
    let prefactor = (2.0 * spec.q / (4.0 * std::f64::consts::PI)).sqrt() / ai_prime;
    if z > 100.0 {
        return Ok(0.0);
    }
    Ok(prefactor * ai_over_shift(z, z_n, ai_prime))
}

/// The three Airy integrals over `[z_n, ∞)` that enter level `n`, each with its
/// closed-form counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AiryIntegrals {
    pub n: usize,
    pub z_n: f64,
    /// `∫ Ai(z)² dz`
    pub norm: f64,
    /// `[Ai'(z_n)]²`
    pub norm_closed: f64,
    /// `∫ z² Ai(z)² dz`
    pub second_moment: f64,
    /// `(1/5) [Ai'(z_n)]² z_n²`
    pub second_moment_closed: f64,
    /// `∫ (z/2 - z_n)(z - z_n)² (d/dz [Ai(z)/(z - z_n)])² dz`
    pub small_component: f64,
    /// `-(5/6) [Ai'(z_n)]² z_n`
    pub small_component_closed: f64,
}

fn airy_tail(z_n: f64) -> impl Fn(f64) -> f64 {
    let k = z_n.abs() + 1.0;
    move |x: f64| {
        if x < 1.0 {
            f64::INFINITY
        } else {
            3.0 * (x + k).powi(4) * (-4.0 / 3.0 * x.powf(1.5)).exp()
        }
    }
}

/// Evaluate the Airy integrals for level `n` by adaptive quadrature to
/// absolute tolerance `tol` each.
pub fn airy_integrals(n: usize, tol: f64) -> Result<AiryIntegrals, RadialError> {
    let z_n = airy_ai_zero(n)?.z;
    let ap = airy(z_n)?.ai_prime;
    let tail = airy_tail(z_n);
    let norm = integrate_with_tail(|z| airy_unchecked(z).ai.powi(2), z_n, &tail, tol)?.value;
    let second_moment = integrate_with_tail(|z| (z * airy_unchecked(z).ai).powi(2), z_n, &tail, tol)?.value;
    let small_component = integrate_with_tail(
        |z| (0.5 * z - z_n) * shifted_derivative(z, z_n, ap).powi(2),
        z_n,
        &tail,
        tol,
    )?
    .value;
    let ap2 = ap * ap;
    Ok(AiryIntegrals {
        n,
        z_n,
        norm,
        norm_closed: ap2,
        second_moment,
        second_moment_closed: ap2 * z_n * z_n / 5.0,
        small_component,
        small_component_closed: -5.0 / 6.0 * ap2 * z_n,
    })
}

/// Brackets `(⟨φ⁺,(E-V)²φ⁺⟩, ⟨φ⁻,(E+V)φ⁻⟩)` evaluated by quadrature of the
/// reduced one-dimensional integrals.
pub fn radial_brackets_quadrature(spec: &RadialSpec, n: usize) -> Result<(f64, f64), RadialError> {
    let integrals = airy_integrals(n, 1e-13)?;
    let alpha2 = 1.0 / integrals.norm_closed;
    let s = spec.bracket_scale();
    Ok((
        alpha2 * s * integrals.second_moment,
        alpha2 * s / (spec.c * spec.c) * integrals.small_component,
    ))
}

/// Per-level pair `(5 z_n / 6, -4 z_n² / 5)`: the reduced small-component and
/// deformation brackets at unit scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Point {
    pub n: usize,
    pub z_n: f64,
    pub small: f64,
    pub gup: f64,
}

pub fn fig1_points(levels: usize) -> Result<Vec<Fig1Point>, RadialError> {
    (1..=levels)
        .map(|n| {
            let z_n = airy_ai_zero(n)?.z;
            Ok(Fig1Point { n, z_n, small: 5.0 * z_n / 6.0, gup: -4.0 * z_n * z_n / 5.0 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use std::f64::consts::PI;

    const Z1: f64 = -2.338_107_410_459_767;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn fig1_first_level() {
        let pts = fig1_points(3).unwrap();
        assert_eq!(pts.len(), 3);
        assert!((pts[0].small + 1.94842).abs() < 1e-5);
        assert!((pts[0].gup + 4.37339).abs() < 1e-5);
        assert!(fig1_points(0).unwrap().is_empty());
    }

    #[test]
    fn ground_energy_at_half_slope() {
        let spec = RadialSpec::new(0.5, 3.0, 0.2).unwrap();
        let l = radial_level(&spec, 1).unwrap();
        assert!((l.e0 - (-Z1 / 2.0)).abs() < 1e-14);
        assert!((l.e0 - 1.1690537).abs() < 1e-7);
    }

    #[test]
    fn undeformed_limit() {
        let spec = RadialSpec::new(1.3, 2.0, 0.0).unwrap();
        for n in 1..=5 {
            let l = radial_level(&spec, n).unwrap();
            assert_eq!(l.e1_gup, 0.0);
            assert_eq!(l.e1_total, l.e1_rel);
            let want = spec.bracket_scale() * 5.0 / (6.0 * 4.0) * l.z_n;
            assert!(rel(l.e1_rel, want) < 1e-14);
            assert!(l.e1_rel < 0.0);
        }
    }

    #[test]
    fn unit_slope_brackets() {
        let c = 1.7;
        let spec = RadialSpec::new(1.0, c, 0.0).unwrap();
        let l = radial_level(&spec, 1).unwrap();
        let ev2 = Z1 * Z1 / (5.0 * 2f64.powf(2.0 / 3.0));
        let small = 5.0 / 6.0 * (-Z1) / (2f64.powf(2.0 / 3.0) * c * c);
        assert!(rel(l.bracket_ev2, ev2) < 1e-14);
        assert!((l.bracket_ev2 - 0.688766).abs() < 1e-6);
        assert!(rel(l.bracket_small, small) < 1e-14);
        assert!((l.bracket_small * c * c - 1.2273).abs() < 2e-4);
        let (q_ev2, _) = radial_brackets_quadrature(&spec, 1).unwrap();
        assert!((q_ev2 - 0.688766).abs() < 5e-6);
        assert!(rel(q_ev2, ev2) < 1e-8);
    }

    #[test]
    fn level_invariants() {
        let spec = RadialSpec { q: 0.8, c: 10.0, a: 0.05, m: 2.0 };
        for n in 1..=20 {
            let l = radial_level(&spec, n).unwrap();
            assert!(l.e0 > 0.0);
            assert!(l.e1_rel < 0.0 && l.e1_gup < 0.0);
            assert_eq!(l.e1_total, l.e1_rel + l.e1_gup);
        }
    }

    #[test]
    fn gup_to_relativistic_ratio() {
        let c = 50.0;
        let spec = RadialSpec::new(2.0, c, 1.0 / c).unwrap();
        let mut prev = 0.0;
        for n in 1..=10 {
            let l = radial_level(&spec, n).unwrap();
            let ratio = (l.e1_gup / l.e1_rel).abs();
            assert!(rel(ratio, 24.0 / 25.0 * l.z_n.abs()) < 1e-12);
            assert!(ratio > prev);
            prev = ratio;
        }
    }

    #[test]
    fn slope_scaling() {
        let base = RadialSpec::new(0.7, 3.0, 0.1).unwrap();
        for &kappa in &[0.3, 2.0, 11.0] {
            let scaled = RadialSpec { q: base.q * kappa, ..base };
            for n in [1, 4, 9] {
                let l0 = radial_level(&base, n).unwrap();
                let l1 = radial_level(&scaled, n).unwrap();
                assert!(rel(l1.e0, kappa.powf(2.0 / 3.0) * l0.e0) < 1e-13);
                assert!(rel(l1.e1_total, kappa.powf(4.0 / 3.0) * l0.e1_total) < 1e-13);
            }
        }
    }

    #[test]
    fn wavefunction_at_origin_and_normalization() {
        for &q in &[0.5, 1.0, 2.0] {
            let spec = RadialSpec::new(q, 1.0, 0.0).unwrap();
            for n in 1..=4 {
                let psi0 = radial_wavefunction(&spec, n, 0.0).unwrap();
                assert!(rel(psi0, (2.0 * q / (4.0 * PI)).sqrt()) < 1e-14);
                let norm = integrate(
                    |r| {
                        let p = radial_wavefunction(&spec, n, r).unwrap();
                        4.0 * PI * r * r * p * p
                    },
                    0.0,
                    40.0 / (2.0 * q).cbrt(),
                    1e-12,
                )
                .unwrap();
                assert!((norm.value - 1.0).abs() < 1e-9, "q={q} n={n}: {}", norm.value);
            }
        }
    }

    #[test]
    fn wavefunction_node_count() {
        let spec = RadialSpec::new(1.0, 1.0, 0.0).unwrap();
        for n in 1..=8 {
            let mut nodes = 0;
            let mut prev = radial_wavefunction(&spec, n, 0.0).unwrap();
            for i in 1..=20_000 {
                let r = i as f64 * 1e-3;
                let v = radial_wavefunction(&spec, n, r).unwrap();
                if v.abs() < 1e-30 {
                    break;
                }
                if v.signum() != prev.signum() {
                    nodes += 1;
                }
                prev = v;
            }
            assert_eq!(nodes, n - 1, "level {n}");
        }
    }

    #[test]
    fn removable_point_is_smooth() {
        let z_n = Z1;
        let ap = airy(z_n).unwrap().ai_prime;
        for &t in &[-2e-4, -9.9e-5, -1e-6, 0.0, 1e-6, 9.9e-5, 1.01e-4, 2e-4] {
            let series = ap * (1.0 + z_n * t * t / 6.0 + t * t * t / 12.0);
            assert!(rel(ai_over_shift(z_n + t, z_n, ap), series) < 1e-11, "t={t}");
        }
        let near = shifted_derivative(z_n + 0.99e-4, z_n, ap);
        let far = shifted_derivative(z_n + 1.01e-4, z_n, ap);
        assert!(rel(near, far) < 0.05);
    }

    #[test]
    fn norm_and_second_moment_identities() {
        for n in 1..=10 {
            let i = airy_integrals(n, 1e-13).unwrap();
            assert!(rel(i.norm, i.norm_closed) < 1e-9, "norm n={n}");
            assert!(rel(i.second_moment, i.second_moment_closed) < 1e-8, "moment n={n}");
        }
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(RadialSpec::new(0.0, 1.0, 0.0).is_err());
        assert!(RadialSpec::new(1.0, -1.0, 0.0).is_err());
        assert!(RadialSpec::new(1.0, 1.0, -0.1).is_err());
        let spec = RadialSpec::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(radial_level(&spec, 0), Err(RadialError::SpecialFn(_))));
        assert!(radial_level(&spec, 51).is_err());
        assert!(radial_wavefunction(&spec, 1, -1.0).is_err());
    }
}
