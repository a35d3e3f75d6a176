//! Triangular well `v(z) = v₀(|z| - 1)` for `|z| < 1`, zero outside, in the
//! dimensionless units `ħ = m = L = 1` where the longitudinal problem reads
//! `-ψ'' + v ψ = ε ψ`.
//!
//! Inside the well `ψ = c_a Ai(ζ) + c_b Bi(ζ)` with `ζ = ζ₀ + v₀^(1/3) |z|`;
//! outside `ψ = c e^(-√(-ε) |z|)`. Parity fixes `c_b / c_a` from the condition
//! at `z = 0`, and matching the logarithmic derivative `-√ζ_L` at `z = 1`
//! fixes `ζ₀`, hence `ε = -v₀ - ζ₀ v₀^(2/3)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{find_root, integrate, integrate_with_tail, Bracket, QuadratureError, RootError};
use crate::specialfn::{airy_unchecked, AiryValues};

const SCAN_POINTS: usize = 200;
const SCAN_MARGIN: f64 = 1e-6;
const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WellError {
    #[error("invalid well spec: {0}")]
    InvalidSpec(String),
    #[error("no {parity} bound state for v0 = {v0}")]
    NoBoundState { v0: f64, parity: Parity },
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl FromStr for Parity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(format!("parity must be 'even' or 'odd', got '{other}'")),
        }
    }
}

/// Prefactors used when turning the dimensionless brackets into the energy
/// shift.
///
/// `Displayed` uses `-(1/4c²)⟨ε+v⟩₋₋ - 2a²⟨(ε-v)²⟩₊₊` (and `-8a²E⊥⟨ε-v⟩₊₊`),
/// the form the reference table uses. `Reduced` carries the factors obtained
/// by substituting `E = ε/2` and `φ⁻ = (σ·p / 2c) φ⁺` directly:
/// `-(1/8c²)⟨ε+v⟩₋₋ - a²⟨(ε-v)²⟩₊₊` and `-4a²E⊥⟨ε-v⟩₊₊`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketConvention {
    #[default]
    Displayed,
    Reduced,
}

impl FromStr for BracketConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "displayed" => Ok(BracketConvention::Displayed),
            "reduced" => Ok(BracketConvention::Reduced),
            other => Err(format!("convention must be 'displayed' or 'reduced', got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellSpec {
    /// Dimensionless depth `2 m L² V₀ / ħ²`.
    pub v0: f64,
    pub parity: Parity,
    pub c: f64,
    pub a: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub l_x: f64,
    pub l_y: f64,
}

impl WellSpec {
    /// Well of depth `v0` with `c = 1`, `a = 0` and no transverse motion.
    pub fn new(v0: f64, parity: Parity) -> Result<Self, WellError> {
        WellSpec { v0, parity, c: 1.0, a: 0.0, p_x: 0.0, p_y: 0.0, l_x: 1.0, l_y: 1.0 }.validated()
    }

    pub fn validated(self) -> Result<Self, WellError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.v0) {
            return Err(WellError::InvalidSpec(format!("v0 must be positive, got {}", self.v0)));
        }
        if !positive(self.c) {
            return Err(WellError::InvalidSpec(format!("c must be positive, got {}", self.c)));
        }
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(WellError::InvalidSpec(format!("a must be non-negative, got {}", self.a)));
        }
        if !(self.p_x.is_finite() && self.p_y.is_finite()) {
            return Err(WellError::InvalidSpec("transverse momenta must be finite".into()));
        }
        if !(positive(self.l_x) && positive(self.l_y)) {
            return Err(WellError::InvalidSpec("box widths must be positive".into()));
        }
        Ok(self)
    }

    /// Transverse box-mode energy `(p_x² + p_y²) / 2`.
    pub fn e_perp(&self) -> f64 {
        0.5 * (self.p_x * self.p_x + self.p_y * self.p_y)
    }

    fn cube_root(&self) -> f64 {
        self.v0.cbrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellState {
    pub zeta0: f64,
    #[serde(rename = "zetaL")]
    pub zeta_l: f64,
    /// Matching slope `-√ζ_L`.
    pub alpha_match: f64,
    pub eps_par: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub c_out: f64,
}

impl WellState {
    /// Decay constant `√(-ε)` of the exterior solution.
    pub fn kappa(&self) -> f64 {
        (-self.eps_par).sqrt()
    }

    /// `c` in the closed form `c_a e^{√|ε|} [Ai(ζ_L) - Bi(ζ_L) R]`, where `R`
    /// is `Ai'(ζ₀)/Bi'(ζ₀)` (even) or `Ai(ζ₀)/Bi(ζ₀)` (odd).
    pub fn c_out_from_ratio(&self, parity: Parity) -> f64 {
        let at0 = airy_unchecked(self.zeta0);
        let at_l = airy_unchecked(self.zeta_l);
        let ratio = match parity {
            Parity::Even => at0.ai_prime / at0.bi_prime,
            Parity::Odd => at0.ai / at0.bi,
        };
        self.c_a * self.eps_par.abs().sqrt().exp() * (at_l.ai - at_l.bi * ratio)
    }
}

/// Expectation integrals over the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketSet {
    /// `∫ (ε - v) ψ²`
    pub emv_pp: f64,
    /// `∫ (ε - v)² ψ²`
    pub emv2_pp: f64,
    /// `∫ (ε + v) (ψ')²`
    pub epv_mm: f64,
}

fn parity_numerator(at0: &AiryValues, parity: Parity) -> (f64, f64) {
    match parity {
        Parity::Even => (at0.ai_prime, at0.bi_prime),
        Parity::Odd => (at0.ai, at0.bi),
    }
}

/// Cleared-denominator matching residual
/// `F(ζ₀) = [Ai'(ζ_L) - αAi(ζ_L)] D(ζ₀) - [Bi'(ζ_L) - αBi(ζ_L)] N(ζ₀)`.
pub fn matching_residual(v0: f64, parity: Parity, zeta0: f64) -> f64 {
    let zeta_l = zeta0 + v0.cbrt();
    let alpha = -zeta_l.sqrt();
    let at_l = airy_unchecked(zeta_l);
    let at0 = airy_unchecked(zeta0);
    let (num, den) = parity_numerator(&at0, parity);
    (at_l.ai_prime - alpha * at_l.ai) * den - (at_l.bi_prime - alpha * at_l.bi) * num
}

// ψ restricted to z >= 0, before normalization: (value, derivative).
fn half_line(spec: &WellSpec, zeta0: f64, kappa: f64, c_a: f64, c_b: f64, z: f64) -> (f64, f64) {
    let cube = spec.cube_root();
    if z <= 1.0 {
        let v = airy_unchecked(zeta0 + cube * z);
        (c_a * v.ai + c_b * v.bi, cube * (c_a * v.ai_prime + c_b * v.bi_prime))
    } else {
        let v = airy_unchecked(zeta0 + cube);
        let edge = c_a * v.ai + c_b * v.bi;
        let value = edge * (-kappa * (z - 1.0)).exp();
        (value, -kappa * value)
    }
}

/// Ground state of the requested parity.
pub fn solve_well(spec: &WellSpec) -> Result<WellState, WellError> {
    let spec = spec.validated()?;
    let cube = spec.cube_root();
    let lo = -cube + SCAN_MARGIN;
    let hi = -SCAN_MARGIN;
    let residual = |z: f64| matching_residual(spec.v0, spec.parity, z);

    // The ground state has the lowest ε, i.e. the root closest to ζ₀ = 0, so
    // scan from the right and stop at the first sign change.
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut right = hi;
    let mut f_right = residual(right);
    let mut found = None;
    for i in (0..SCAN_POINTS - 1).rev() {
        let left = lo + i as f64 * step;
        let f_left = residual(left);
        if f_left == 0.0 || f_left.signum() != f_right.signum() {
            found = Some(Bracket { lo: left, hi: right });
            break;
        }
        right = left;
        f_right = f_left;
    }
    let bracket = found.ok_or(WellError::NoBoundState { v0: spec.v0, parity: spec.parity })?;
    let zeta0 = find_root(residual, bracket, 1e-15)?;
    state_from_root(&spec, zeta0)
}

fn state_from_root(spec: &WellSpec, zeta0: f64) -> Result<WellState, WellError> {
    let cube = spec.cube_root();
    let zeta_l = zeta0 + cube;
    let eps_par = -spec.v0 - zeta0 * cube * cube;
    let kappa = (-eps_par).sqrt();
    let at0 = airy_unchecked(zeta0);
    let (num, den) = parity_numerator(&at0, spec.parity);
    // (c_a, c_b) ∝ (D, -N) satisfies c_a N + c_b D = 0 and never vanishes.
    let (mut u_a, mut u_b) = (den, -num);
    if u_a < 0.0 {
        u_a = -u_a;
        u_b = -u_b;
    }
    let inside = integrate(
        |z| half_line(spec, zeta0, kappa, u_a, u_b, z).0.powi(2),
        0.0,
        1.0,
        QUAD_TOL,
    )?;
    let edge = half_line(spec, zeta0, kappa, u_a, u_b, 1.0).0;
    let outside = exterior_integral(|z| half_line(spec, zeta0, kappa, u_a, u_b, z).0.powi(2), edge * edge, kappa)?;
    let scale = (2.0 * (inside.value + outside)).sqrt().recip();
    let c_a = u_a * scale;
    let c_b = u_b * scale;
    Ok(WellState {
        zeta0,
        zeta_l,
        alpha_match: -zeta_l.sqrt(),
        eps_par,
        c_a,
        c_b,
        c_out: edge * scale * kappa.exp(),
    })
}

// ∫_1^∞ g, where |g(z)| <= bound_at_edge · e^{-2κ(z-1)}.
fn exterior_integral<G: Fn(f64) -> f64>(g: G, bound_at_edge: f64, kappa: f64) -> Result<f64, QuadratureError> {
    let bound = bound_at_edge.abs();
    let tail = move |x: f64| bound * (-2.0 * kappa * (x - 1.0)).exp() / (2.0 * kappa);
    Ok(integrate_with_tail(g, 1.0, tail, QUAD_TOL)?.value)
}

fn half_line_state(state: &WellState, spec: &WellSpec, z: f64) -> (f64, f64) {
    half_line(spec, state.zeta0, state.kappa(), state.c_a, state.c_b, z)
}

/// `ψ(z)` on the whole line.
pub fn well_wavefunction(state: &WellState, spec: &WellSpec, z: f64) -> f64 {
    let (value, _) = half_line_state(state, spec, z.abs());
    match spec.parity {
        Parity::Even => value,
        Parity::Odd if z == 0.0 => 0.0,
        Parity::Odd => value * z.signum(),
    }
}

/// `ψ'(z)` on the whole line.
pub fn well_wavefunction_derivative(state: &WellState, spec: &WellSpec, z: f64) -> f64 {
    let (_, slope) = half_line_state(state, spec, z.abs());
    match spec.parity {
        Parity::Even if z == 0.0 => 0.0,
        Parity::Even => slope * z.signum(),
        Parity::Odd => slope,
    }
}

pub fn well_potential(spec: &WellSpec, z: f64) -> f64 {
    if z.abs() < 1.0 {
        spec.v0 * (z.abs() - 1.0)
    } else {
        0.0
    }
}

/// `2 [∫_0^1 g + ∫_1^∞ g]` for an even integrand `g`; the exterior part is
/// bounded by `weight · e^{-2κ(z-1)}`.
fn symmetric_integral<G: Fn(f64) -> f64>(g: G, weight: f64, kappa: f64) -> Result<f64, QuadratureError> {
    let inside = integrate(&g, 0.0, 1.0, QUAD_TOL)?.value;
    let outside = exterior_integral(&g, weight, kappa)?;
    Ok(2.0 * (inside + outside))
}

pub fn well_brackets(state: &WellState, spec: &WellSpec) -> Result<BracketSet, WellError> {
    let eps = state.eps_par;
    let kappa = state.kappa();
    let edge = half_line_state(state, spec, 1.0).0.powi(2);
    let psi2 = |z: f64| half_line_state(state, spec, z).0.powi(2);
    let dpsi2 = |z: f64| half_line_state(state, spec, z).1.powi(2);
    let v = |z: f64| well_potential(spec, z);
    Ok(BracketSet {
        emv_pp: symmetric_integral(|z| (eps - v(z)) * psi2(z), edge * eps.abs(), kappa)?,
        emv2_pp: symmetric_integral(|z| (eps - v(z)).powi(2) * psi2(z), edge * eps * eps, kappa)?,
        epv_mm: symmetric_integral(|z| (eps + v(z)) * dpsi2(z), edge * eps.abs() * kappa * kappa, kappa)?,
    })
}

/// `∫ v ψ²`.
pub fn mean_potential(state: &WellState, spec: &WellSpec) -> Result<f64, WellError> {
    Ok(symmetric_integral(
        |z| well_potential(spec, z) * half_line_state(state, spec, z).0.powi(2),
        0.0,
        state.kappa(),
    )?)
}

/// `∫ ψ²`, which is 1 for a solved state.
pub fn norm(state: &WellState, spec: &WellSpec) -> Result<f64, WellError> {
    let edge = half_line_state(state, spec, 1.0).0.powi(2);
    Ok(symmetric_integral(|z| half_line_state(state, spec, z).0.powi(2), edge, state.kappa())?)
}

/// `∫ (ψ')²`.
pub fn derivative_norm(state: &WellState, spec: &WellSpec) -> Result<f64, WellError> {
    let kappa = state.kappa();
    let edge = half_line_state(state, spec, 1.0).0.powi(2) * kappa * kappa;
    Ok(symmetric_integral(|z| half_line_state(state, spec, z).1.powi(2), edge, kappa)?)
}

/// Individual contributions to the first-order shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstOrderCorrection {
    pub convention: BracketConvention,
    /// `-⟨φ⁻,(E∥+V)φ⁻⟩`
    pub relativistic: f64,
    /// `-4a²⟨φ⁺,(E∥-V)²φ⁺⟩`
    pub gup: f64,
    #[serde(rename = "E_perp")]
    pub e_perp: f64,
    /// `-8a²E⊥⟨φ⁺,(E∥-V)φ⁺⟩`
    pub perp_gup_cross: f64,
    /// `-E⊥ (1/4c²) ∫(∂_zψ)²`
    pub perp_small_z: f64,
    /// `-E⊥ (1/4c²)(p_x² + p_y²)`
    pub perp_small_transverse: f64,
    /// `-4a²E⊥²`
    pub perp_gup_square: f64,
    pub total: f64,
}

impl FirstOrderCorrection {
    /// The two-term form that applies when `p⊥ = 0`.
    pub fn longitudinal(&self) -> f64 {
        self.relativistic + self.gup
    }
}

pub fn well_first_order(
    state: &WellState,
    spec: &WellSpec,
    convention: BracketConvention,
) -> Result<FirstOrderCorrection, WellError> {
    let b = well_brackets(state, spec)?;
    let c2 = spec.c * spec.c;
    let a2 = spec.a * spec.a;
    let (rel_factor, gup_factor, cross_factor) = match convention {
        BracketConvention::Displayed => (0.25 / c2, 2.0 * a2, 8.0 * a2),
        BracketConvention::Reduced => (0.125 / c2, a2, 4.0 * a2),
    };
    let relativistic = -rel_factor * b.epv_mm;
    let gup = -gup_factor * b.emv2_pp;
    let e_perp = spec.e_perp();
    if e_perp == 0.0 {
        return Ok(FirstOrderCorrection {
            convention,
            relativistic,
            gup,
            e_perp,
            perp_gup_cross: 0.0,
            perp_small_z: 0.0,
            perp_small_transverse: 0.0,
            perp_gup_square: 0.0,
            total: relativistic + gup,
        });
    }
    let perp_gup_cross = -cross_factor * e_perp * b.emv_pp;
    let perp_small_z = -e_perp * derivative_norm(state, spec)? / (4.0 * c2);
    let perp_small_transverse = -e_perp * (spec.p_x * spec.p_x + spec.p_y * spec.p_y) / (4.0 * c2);
    let perp_gup_square = -4.0 * a2 * e_perp * e_perp;
    Ok(FirstOrderCorrection {
        convention,
        relativistic,
        gup,
        e_perp,
        perp_gup_cross,
        perp_small_z,
        perp_small_transverse,
        perp_gup_square,
        total: relativistic + gup + perp_gup_cross + perp_small_z + perp_small_transverse + perp_gup_square,
    })
}

/// One row of the even-parity ground-state table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub v0: f64,
    pub zeta0: f64,
    pub eps: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub c: f64,
    pub emv_pp: f64,
    pub emv2_pp: f64,
    pub epv_mm: f64,
}

impl Table1Row {
    pub const COLUMNS: [&'static str; 9] = ["v0", "zeta0", "eps", "c_a", "c_b", "c", "emv_pp", "emv2_pp", "epv_mm"];

    pub fn values(&self) -> [f64; 9] {
        [self.v0, self.zeta0, self.eps, self.c_a, self.c_b, self.c, self.emv_pp, self.emv2_pp, self.epv_mm]
    }
}

pub fn table1_row(v0: f64) -> Result<Table1Row, WellError> {
    let spec = WellSpec::new(v0, Parity::Even)?;
    let state = solve_well(&spec)?;
    let b = well_brackets(&state, &spec)?;
    Ok(Table1Row {
        v0,
        zeta0: state.zeta0,
        eps: state.eps_par,
        c_a: state.c_a,
        c_b: state.c_b,
        c: state.c_out,
        emv_pp: b.emv_pp,
        emv2_pp: b.emv2_pp,
        epv_mm: b.epv_mm,
    })
}

/// Even-parity ground-state rows in input order; a failing row does not stop
/// the others.
pub fn table1(v0_list: &[f64]) -> Vec<Result<Table1Row, WellError>> {
    v0_list.iter().map(|&v0| table1_row(v0)).collect()
}
