#![allow(clippy::excessive_precision)]
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

const MAX_SEGMENTS: usize = 20_000;

// 15-point Kronrod abscissae on [-1, 1]; the odd entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a definite integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid integration limits [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
    #[error("quadrature did not reach tolerance: value {} ± {} after {} evaluations",
        .partial.value, .partial.error_estimate, .partial.evaluations)]
    NonConvergence { partial: QuadratureResult },
    #[error("no truncation point found where the tail bound drops below {target}")]
    TailNotBounded { target: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Segment, QuadratureError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite(center));
    }
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadratureError::NonFinite(x1));
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFinite(x2));
        }
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult, QuadratureError> {
    let mut heap = BinaryHeap::new();
    let first = kronrod15(f, lo, hi)?;
    let mut evaluations = 15;
    let mut total_error = first.error;
    heap.push(first);

    let summarize = |heap: &BinaryHeap<Segment>, evaluations| {
        let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        QuadratureResult { value, error_estimate: error, evaluations }
    };

    loop {
        if total_error <= tol {
            let result = summarize(&heap, evaluations);
            if result.error_estimate <= tol {
                return Ok(result);
            }
            total_error = result.error_estimate;
        }
        if heap.len() >= MAX_SEGMENTS {
            return Err(QuadratureError::NonConvergence { partial: summarize(&heap, evaluations) });
        }
        let worst = heap.pop().expect("segment heap is never empty");
        let width = worst.hi - worst.lo;
        if width <= 64.0 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs()) || width < 1e-200 {
            heap.push(worst);
            return Err(QuadratureError::NonConvergence { partial: summarize(&heap, evaluations) });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = kronrod15(f, worst.lo, mid)?;
        let right = kronrod15(f, mid, worst.hi)?;
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

/// Integrate `f` over `[lo, hi]` to absolute tolerance `tol`.
///
/// `hi` may be `f64::INFINITY`, in which case the half line is mapped onto
/// `[0, 1)` by `x = lo + t / (1 - t)`. `lo > hi` yields the negated integral.
pub fn integrate<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidTolerance(tol));
    }
    if !lo.is_finite() || hi.is_nan() || hi == f64::NEG_INFINITY {
        return Err(QuadratureError::InvalidInterval { lo, hi });
    }
    if hi == f64::INFINITY {
        let mapped = |t: f64| {
            let s = 1.0 - t;
            let x = lo + t / s;
            let fx = f(x);
            if fx == 0.0 { 0.0 } else { fx / (s * s) }
        };
        return adaptive(&mapped, 0.0, 1.0, tol);
    }
    if lo == hi {
        return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    if lo > hi {
        let r = adaptive(&f, hi, lo, tol)?;
        return Ok(QuadratureResult { value: -r.value, ..r });
    }
    adaptive(&f, lo, hi, tol)
}

/// Integrate `f` over `[lo, ∞)` by truncation.
///
/// `tail_bound(x)` must bound `∫_x^∞ |f|` from above. The cutoff is the first
/// point `lo + 2^k` at which the bound falls below `tol / 10`; the finite part
/// is integrated adaptively and the tail bound is added to the error estimate.
pub fn integrate_with_tail<F, T>(f: F, lo: f64, tail_bound: T, tol: f64) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidTolerance(tol));
    }
    let target = tol / 10.0;
    let mut step = 0.5;
    let cutoff = loop {
        let x = lo + step;
        let bound = tail_bound(x);
        if bound.is_finite() && bound <= target {
            break (x, bound);
        }
        step *= 2.0;
        if step > 1e8 {
            return Err(QuadratureError::TailNotBounded { target });
        }
    };
    let (x_cut, tail) = cutoff;
    let body = integrate(f, lo, x_cut, tol - tail)?;
    Ok(QuadratureResult {
        error_estimate: body.error_estimate + tail,
        ..body
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polynomial() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        assert!(r.error_estimate <= 1e-12);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn kronrod_exact_through_degree_22() {
        // one panel, no subdivision: ∫_{-1}^{2} x^22 = (2^23 + 1) / 23
        let s = kronrod15(&|x: f64| x.powi(22), -1.0, 2.0).unwrap();
        let exact = (2f64.powi(23) + 1.0) / 23.0;
        assert!((s.value - exact).abs() / exact < 1e-14);
        // and the embedded Gauss rule through degree 13
        let s = kronrod15(&|x: f64| x.powi(13) + x.powi(12), 0.0, 1.0).unwrap();
        assert!(s.error < 1e-14);
    }

    #[test]
    fn exponential_half_line() {
        let r = integrate(|x: f64| (-x).exp(), 0.0, f64::INFINITY, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_with_envelope() {
        let r = integrate_with_tail(|x: f64| (-x).exp(), 0.0, |x: f64| (-x).exp(), 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.error_estimate <= 1e-12);
    }

    #[test]
    fn airy_square_normalization_identity() {
        use crate::specialfn::{airy, airy_ai_zero};
        let z1 = airy_ai_zero(1).unwrap().z;
        let ap = airy(z1).unwrap().ai_prime;
        let r = integrate_with_tail(
            |x| crate::specialfn::ai(x).powi(2),
            z1,
            |x: f64| if x > 1.0 { (-4.0 / 3.0 * x.powf(1.5)).exp() } else { f64::INFINITY },
            1e-13,
        )
        .unwrap();
        assert!((r.value - ap * ap).abs() / (ap * ap) < 1e-10);
        assert!((r.value - 0.701211_f64.powi(2)).abs() < 1e-5);
    }

    #[test]
    fn reversed_limits_negate() {
        let r = integrate(|x| x, 2.0, 0.0, 1e-12).unwrap();
        assert!((r.value + 2.0).abs() < 1e-14);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(integrate(|x| x, 0.0, 1.0, 0.0), Err(QuadratureError::InvalidTolerance(_))));
        assert!(matches!(
            integrate(|x| x, f64::NEG_INFINITY, 1.0, 1e-8),
            Err(QuadratureError::InvalidInterval { .. })
        ));
        assert!(matches!(integrate(|x| 1.0 / x, -1.0, 1.0, 1e-8), Err(QuadratureError::NonFinite(_))
            | Err(QuadratureError::NonConvergence { .. })));
        // 1/sqrt(x) near 0 never meets an absurd tolerance
        let e = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-300).unwrap_err();
        match e {
            QuadratureError::NonConvergence { partial } => {
                assert!((partial.value - 2.0).abs() < 1e-3);
                assert!(partial.error_estimate > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn interval_additivity(a in -3.0f64..0.0, b in 0.0f64..2.0, c in 2.0f64..5.0) {
            let f = |x: f64| (1.3 * x).sin() * (-0.1 * x * x).exp();
            let tol = 1e-12;
            let whole = integrate(f, a, c, tol).unwrap();
            let left = integrate(f, a, b, tol).unwrap();
            let right = integrate(f, b, c, tol).unwrap();
            prop_assert!((whole.value - left.value - right.value).abs() <= 3.0 * tol);
        }

        #[test]
        fn polynomial_exactness(c0 in -2.0f64..2.0, c5 in -2.0f64..2.0, lo in -3.0f64..0.0, hi in 0.5f64..3.0) {
            let f = |x: f64| c0 + c5 * x.powi(5) + x.powi(9);
            let exact = |x: f64| c0 * x + c5 * x.powi(6) / 6.0 + x.powi(10) / 10.0;
            let s = kronrod15(&f, lo, hi).unwrap();
            let want = exact(hi) - exact(lo);
            let scale = exact(hi).abs() + exact(lo).abs();
            prop_assert!((s.value - want).abs() <= 1e-13 * scale.max(1.0));
        }
    }
}
