use crate::error::{FpError, Result};

/// Upper end of the bracket expansion, `2^60`.
pub const BRACKET_CAP: f64 = 1_152_921_504_606_846_976.0;

/// Finds the sign change of a monotone `f` on `[lo, hi]` by bisection.
///
/// If `f(lo)` and `f(hi)` share a sign, the bracket is expanded by doubling
/// `hi` (the old `hi` becomes the new `lo`) until the sign flips or `hi`
/// passes [`BRACKET_CAP`]. Returns the end of the final bracket on the far
/// side of the crossing, so the returned point has the sign opposite to
/// `f(lo)` (or is an exact root). Bisection stops once the bracket is no wider
/// than `tol` or cannot be split further in floating point.
pub fn bisection_root(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi.max(lo));
    let flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    let lo_sign = flo.is_sign_positive();
    let mut fhi = f(hi);
    while fhi != 0.0 && fhi.is_sign_positive() == lo_sign {
        if hi >= BRACKET_CAP || !fhi.is_finite() {
            return Err(FpError::Bracket { lo, hi });
        }
        let next = if hi > 0.0 { hi * 2.0 } else { 1.0 };
        lo = hi;
        hi = next.min(BRACKET_CAP);
        fhi = f(hi);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.is_sign_positive() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let x = bisection_root(|x| x - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((x - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn expands_bracket() {
        let x = bisection_root(|x| 1000.0 - x, 0.0, 1.0, 1e-9).unwrap();
        assert!((x - 1000.0).abs() <= 1e-9);
    }

    #[test]
    fn exact_root_at_lo() {
        assert_eq!(bisection_root(|x| x, 0.0, 1.0, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn no_sign_change_is_bracket_error() {
        assert!(matches!(
            bisection_root(|_| 1.0, 0.0, 1.0, 1e-9),
            Err(FpError::Bracket { .. })
        ));
    }

    #[test]
    fn returned_point_is_on_far_side() {
        // decreasing function: returned point must satisfy f <= 0
        let f = |x: f64| 2.0 / (1.0 + x) - 0.7;
        let x = bisection_root(f, 0.0, 1.0, 1e-6).unwrap();
        assert!(f(x) <= 0.0);
        assert!((x - (2.0 / 0.7 - 1.0)).abs() <= 1e-6);
    }
}
