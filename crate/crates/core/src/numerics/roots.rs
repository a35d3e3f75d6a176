use thiserror::Error;

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root finder did not converge in {iterations} iterations (last estimate {estimate})")]
    NonConvergence { iterations: usize, estimate: f64 },
}

/// A search interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        (lo.is_finite() && hi.is_finite() && lo < hi).then_some(Bracket { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Brent's method on a sign-change bracket.
///
/// Terminates once the enclosing interval is narrower than `tol` (plus a few
/// ulps of the root) or `f` vanishes exactly. The result always lies in
/// `[bracket.lo, bracket.hi]`.
pub fn find_root<F>(mut f: F, bracket: Bracket, tol: f64) -> Result<f64, RootError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(RootError::InvalidBracket { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }

    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b.clamp(bracket.lo, bracket.hi));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(RootError::NonConvergence { iterations: MAX_ITERATIONS, estimate: b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sqrt_two() {
        let r = find_root(|x| x * x - 2.0, Bracket::new(1.0, 2.0).unwrap(), 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn airy_first_zero() {
        let r = find_root(crate::specialfn::ai, Bracket::new(-3.0, -2.0).unwrap(), 1e-14).unwrap();
        assert!((r + 2.33810741).abs() < 1e-8);
    }

    #[test]
    fn rejects_bracket_without_sign_change() {
        let err = find_root(|x| x * x + 1.0, Bracket::new(-1.0, 1.0).unwrap(), 1e-12).unwrap_err();
        assert!(matches!(err, RootError::InvalidBracket { .. }));
    }

    #[test]
    fn exact_endpoint_root() {
        let r = find_root(|x| x - 1.0, Bracket::new(1.0, 3.0).unwrap(), 1e-12).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn bracket_validation() {
        assert!(Bracket::new(1.0, 1.0).is_none());
        assert!(Bracket::new(2.0, 1.0).is_none());
        assert!(Bracket::new(f64::NAN, 1.0).is_none());
    }

    #[test]
    fn discontinuous_sign_change_still_terminates() {
        let r = find_root(|x| if x < 0.3 { -1.0 } else { 1.0 }, Bracket::new(0.0, 1.0).unwrap(), 1e-12)
            .unwrap();
        assert!((r - 0.3).abs() < 1e-11);
    }

    proptest! {
        #[test]
        fn root_stays_inside_bracket(shift in -5.0f64..5.0, lo in -10.0f64..-5.5, hi in 5.5f64..10.0) {
            let f = |x: f64| (x - shift).powi(3) + 0.1 * (x - shift);
            let r = find_root(f, Bracket::new(lo, hi).unwrap(), 1e-12).unwrap();
            prop_assert!(r >= lo && r <= hi);
            prop_assert!((r - shift).abs() < 1e-10);
        }
    }
}
