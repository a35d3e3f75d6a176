//! Airy functions on the real line and the negative zeros of `Ai`.
//!
//! Evaluation uses three regimes:
//!
//! * `|x| >= ASYMPTOTIC_FROM`: the standard asymptotic expansions, truncated at
//!   their smallest term (the exponential forms for `x > 0`, the oscillatory
//!   forms for `x < 0`).
//! * `|x| < ASYMPTOTIC_FROM`: a Taylor re-expansion about the nearest node of a
//!   precomputed table. The Taylor coefficients follow exactly from
//!   `y'' = x y`, so each node carries only `(y, y')` for both solutions.
//!
//! The node table is generated once. For `x <= 0` and for `Bi` on `x > 0` it
//! is marched outwards from the Maclaurin values at the origin; `Ai` on
//! `x > 0` is marched inwards from the asymptotic value at `ASYMPTOTIC_FROM`,
//! which is the numerically stable direction for the recessive solution.

use std::f64::consts::PI;
use std::sync::OnceLock;

use thiserror::Error;

/// Ai(0) = 3^(-2/3) / Γ(2/3).
#[allow(clippy::excessive_precision)]
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// Ai'(0) = -3^(-1/3) / Γ(1/3).
pub const AI_PRIME0: f64 = -0.258_819_403_792_806_8;
/// Bi(0) = 3^(-1/6) / Γ(2/3).
pub const BI0: f64 = 0.614_926_627_446_000_7;
/// Bi'(0) = 3^(1/6) / Γ(1/3).
#[allow(clippy::excessive_precision)]
pub const BI_PRIME0: f64 = 0.448_288_357_353_826_36;

/// Beyond this magnitude the asymptotic expansions are used directly.
pub const ASYMPTOTIC_FROM: f64 = 9.0;

/// Largest supported zero index.
pub const MAX_ZERO_INDEX: usize = 50;

const NODE_STEP: f64 = 0.125;
const MARCH_TERMS: usize = 40;
const EVAL_TERMS: usize = 18;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialFnError {
    #[error("argument is not finite: {0}")]
    NonFinite(f64),
    #[error("Bi({0}) overflows f64; a scaled form is required")]
    Overflow(f64),
    #[error("Airy zero index {0} outside supported range 1..={MAX_ZERO_INDEX}")]
    ZeroIndex(usize),
}

/// `Ai`, `Ai'`, `Bi`, `Bi'` at a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues {
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
}

impl AiryValues {
    /// `Ai Bi' - Ai' Bi`, which is `1/π` identically.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bi_prime - self.ai_prime * self.bi
    }
}

/// A negative zero of `Ai`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryZero {
    pub index: usize,
    pub z: f64,
}

/// Evaluate the Airy functions and their derivatives at `x`.
pub fn airy(x: f64) -> Result<AiryValues, SpecialFnError> {
    if !x.is_finite() {
        return Err(SpecialFnError::NonFinite(x));
    }
    let v = airy_unchecked(x);
    if !v.bi.is_finite() || !v.bi_prime.is_finite() {
        return Err(SpecialFnError::Overflow(x));
    }
    Ok(v)
}

/// `airy` for arguments the caller knows to be finite and well below the
/// `Bi` overflow threshold (x < 100). Used inside quadrature kernels.
pub(crate) fn airy_unchecked(x: f64) -> AiryValues {
    if x >= ASYMPTOTIC_FROM {
        asymptotic_positive(x)
    } else if x <= -ASYMPTOTIC_FROM {
        asymptotic_negative(-x)
    } else {
        from_table(x)
    }
}

/// Airy `Ai` only.
pub(crate) fn ai(x: f64) -> f64 {
    airy_unchecked(x).ai
}

// u_k of the asymptotic series, u_0 = 1.
fn next_u(u_prev: f64, k: usize) -> f64 {
    let k = k as f64;
    u_prev * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k)
}

/// Partial sums of Σ s_k u_k / ζ^k and Σ s_k v_k / ζ^k, where the sign pattern
/// is selected by `sign(k)`, split into even-`k` and odd-`k` parts. Truncated
/// at the smallest term.
struct AsymptoticSums {
    u_even: f64,
    u_odd: f64,
    v_even: f64,
    v_odd: f64,
}

fn asymptotic_sums(zeta: f64, sign: impl Fn(usize) -> f64) -> AsymptoticSums {
    let mut s = AsymptoticSums { u_even: 1.0, u_odd: 0.0, v_even: 1.0, v_odd: 0.0 };
    let mut u = 1.0;
    let mut zpow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        u = next_u(u, k);
        zpow *= zeta;
        let kf = k as f64;
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let tu = u / zpow;
        let tv = v / zpow;
        let mag = tu.abs().max(tv.abs());
        if mag > last {
            break;
        }
        last = mag;
        if k % 2 == 0 {
            s.u_even += sign(k) * tu;
            s.v_even += sign(k) * tv;
        } else {
            s.u_odd += sign(k) * tu;
            s.v_odd += sign(k) * tv;
        }
        if mag < 1e-18 {
            break;
        }
    }
    s
}

fn asymptotic_positive(x: f64) -> AiryValues {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let q = x.powf(0.25);
    let sp = PI.sqrt();
    let alt = asymptotic_sums(zeta, |k| if k % 2 == 0 { 1.0 } else { -1.0 });
    let plain = asymptotic_sums(zeta, |_| 1.0);
    let decay = (-zeta).exp();
    let growth = zeta.exp();
    AiryValues {
        ai: decay / (2.0 * sp * q) * (alt.u_even + alt.u_odd),
        ai_prime: -q * decay / (2.0 * sp) * (alt.v_even + alt.v_odd),
        bi: growth / (sp * q) * (plain.u_even + plain.u_odd),
        bi_prime: q * growth / sp * (plain.v_even + plain.v_odd),
    }
}

// Oscillatory forms for Ai(-t), Bi(-t); the even/odd series carry (-1)^(k/2)
// and (-1)^((k-1)/2) respectively.
fn asymptotic_negative(t: f64) -> AiryValues {
    let zeta = 2.0 / 3.0 * t * t.sqrt();
    let q = t.powf(0.25);
    let sp = PI.sqrt();
    let s = asymptotic_sums(zeta, |k| if (k / 2) % 2 == 0 { 1.0 } else { -1.0 });
    let phase = zeta - PI / 4.0;
    let (sn, cs) = phase.sin_cos();
    AiryValues {
        ai: (cs * s.u_even + sn * s.u_odd) / (sp * q),
        ai_prime: q / sp * (sn * s.v_even - cs * s.v_odd),
        bi: (-sn * s.u_even + cs * s.u_odd) / (sp * q),
        bi_prime: q / sp * (cs * s.v_even + sn * s.v_odd),
    }
}

/// Taylor expansion of a solution of `y'' = x y` about `x0`, evaluated at
/// `x0 + dx`. Returns `(y, y')`.
fn taylor(x0: f64, y: f64, yp: f64, dx: f64, terms: usize) -> (f64, f64) {
    if dx == 0.0 {
        return (y, yp);
    }
    // d_n = c_n dx^n with c_n = y^(n)(x0) / n!
    let dx2 = dx * dx;
    let dx3 = dx2 * dx;
    let mut d = [0.0_f64; MARCH_TERMS + 2];
    let terms = terms.clamp(2, MARCH_TERMS + 2);
    d[0] = y;
    d[1] = yp * dx;
    for n in 0..terms - 2 {
        let prev = if n == 0 { 0.0 } else { d[n - 1] };
        d[n + 2] = (x0 * dx2 * d[n] + dx3 * prev) / (((n + 2) * (n + 1)) as f64);
    }
    // smallest terms first
    let mut val = 0.0;
    let mut der = 0.0;
    for n in (1..terms).rev() {
        val += d[n];
        der += n as f64 * d[n];
    }
    let val = d[0] + val;
    (val, der / dx)
}

struct NodeTable {
    // [ai, ai', bi, bi'] at x_k = -ASYMPTOTIC_FROM + k * NODE_STEP
    nodes: Vec<[f64; 4]>,
}

fn node_x(k: usize) -> f64 {
    -ASYMPTOTIC_FROM + k as f64 * NODE_STEP
}

fn node_table() -> &'static NodeTable {
    static TABLE: OnceLock<NodeTable> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

fn build_table() -> NodeTable {
    let half = (ASYMPTOTIC_FROM / NODE_STEP).round() as usize;
    let count = 2 * half + 1;
    let mut nodes = vec![[0.0; 4]; count];
    nodes[half] = [AI0, AI_PRIME0, BI0, BI_PRIME0];

    // x <= 0: march left from the origin, both solutions.
    for k in (0..half).rev() {
        let x0 = node_x(k + 1);
        let [a, ap, b, bp] = nodes[k + 1];
        let (a, ap) = taylor(x0, a, ap, -NODE_STEP, MARCH_TERMS);
        let (b, bp) = taylor(x0, b, bp, -NODE_STEP, MARCH_TERMS);
        nodes[k] = [a, ap, b, bp];
    }
    // x > 0: Bi marched right from the origin.
    for k in half + 1..count {
        let x0 = node_x(k - 1);
        let [_, _, b, bp] = nodes[k - 1];
        let (b, bp) = taylor(x0, b, bp, NODE_STEP, MARCH_TERMS);
        nodes[k][2] = b;
        nodes[k][3] = bp;
    }
    // x > 0: Ai marched left from the asymptotic anchor.
    let anchor = asymptotic_positive(ASYMPTOTIC_FROM);
    nodes[count - 1][0] = anchor.ai;
    nodes[count - 1][1] = anchor.ai_prime;
    for k in (half + 1..count - 1).rev() {
        let x0 = node_x(k + 1);
        let [a, ap, _, _] = nodes[k + 1];
        let (a, ap) = taylor(x0, a, ap, -NODE_STEP, MARCH_TERMS);
        nodes[k][0] = a;
        nodes[k][1] = ap;
    }
    NodeTable { nodes }
}

fn from_table(x: f64) -> AiryValues {
    let table = node_table();
    let k = ((x + ASYMPTOTIC_FROM) / NODE_STEP).round() as usize;
    let k = k.min(table.nodes.len() - 1);
    let x0 = node_x(k);
    let dx = x - x0;
    let [a, ap, b, bp] = table.nodes[k];
    let (ai, ai_prime) = taylor(x0, a, ap, dx, EVAL_TERMS);
    let (bi, bi_prime) = taylor(x0, b, bp, dx, EVAL_TERMS);
    AiryValues { ai, ai_prime, bi, bi_prime }
}

/// Leading-order estimate `-[3π(4n-1)/8]^(2/3)` of the n-th zero of `Ai`.
pub fn airy_ai_zero_estimate(n: usize) -> f64 {
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    -t.powf(2.0 / 3.0)
}

// Higher-order asymptotic estimate, used to seed the bracket.
fn refined_estimate(n: usize) -> f64 {
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    let t2 = t.powi(-2);
    -t.powf(2.0 / 3.0) * (1.0 + t2 * (5.0 / 48.0 - t2 * (5.0 / 36.0 - t2 * 77125.0 / 82944.0)))
}

fn compute_zero(n: usize) -> f64 {
    let guess = refined_estimate(n);
    let mut half_width = 0.05;
    loop {
        let lo = guess - half_width;
        let hi = guess + half_width;
        if ai(lo).signum() != ai(hi).signum() {
            let bracket = crate::numerics::Bracket { lo, hi };
            return crate::numerics::find_root(ai, bracket, 1e-15)
                .expect("Ai changes sign on the bracket");
        }
        half_width *= 1.5;
    }
}

fn zero_table() -> &'static [f64] {
    static ZEROS: OnceLock<Vec<f64>> = OnceLock::new();
    ZEROS.get_or_init(|| (1..=MAX_ZERO_INDEX).map(compute_zero).collect())
}

/// The n-th (negative) zero of `Ai`, `1 <= n <= 50`.
pub fn airy_ai_zero(n: usize) -> Result<AiryZero, SpecialFnError> {
    if n == 0 || n > MAX_ZERO_INDEX {
        return Err(SpecialFnError::ZeroIndex(n));
    }
    Ok(AiryZero { index: n, z: zero_table()[n - 1] })
}
