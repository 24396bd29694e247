//! Scalar and multidimensional quadratic transforms.

use crate::error::{FpError, Result};
use crate::numerics::linalg::{check_hermitian, hpd_solve, quad_form, re_inner, CMat, CVec};

/// Affine reparametrization `y -> t1 * y + t2` of the quadratic transform.
/// The default `(1, 0)` gives the plain transform `2 y sqrt(A) - y^2 B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QtParams {
    t1: f64,
    t2: f64,
}

impl Default for QtParams {
    fn default() -> Self {
        Self { t1: 1.0, t2: 0.0 }
    }
}

impl QtParams {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if t1 == 0.0 || !t1.is_finite() || !t2.is_finite() {
            return Err(FpError::domain("QtParams", format!("t1 must be finite and nonzero, got ({t1}, {t2})")));
        }
        Ok(Self { t1, t2 })
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }
}

fn check_ratio_domain(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0) {
        return Err(FpError::domain("quadratic transform", format!("numerator must be nonnegative, got {a}")));
    }
    if !(b > 0.0) {
        return Err(FpError::domain("quadratic transform", format!("denominator must be positive, got {b}")));
    }
    Ok(())
}

/// `2 (t1 y + t2) sqrt(A) - (t1 y + t2)^2 B`.
pub fn qt_value(a: f64, b: f64, y: f64, params: QtParams) -> Result<f64> {
    check_ratio_domain(a, b)?;
    let z = params.t1 * y + params.t2;
    Ok(2.0 * z * a.sqrt() - z * z * b)
}

/// Maximizer `sqrt(A) / B` of the plain transform; gives `qt_value = A / B`.
pub fn qt_optimal_y(a: f64, b: f64) -> Result<f64> {
    check_ratio_domain(a, b)?;
    Ok(a.sqrt() / b)
}

/// Maximizer of the affine-family transform: `(sqrt(A)/B - t2) / t1`.
pub fn qt_optimal_y_affine(a: f64, b: f64, params: QtParams) -> Result<f64> {
    Ok((qt_optimal_y(a, b)? - params.t2) / params.t1)
}

/// Dinkelbach's parametric objective `A - y B`.
pub fn dinkelbach_value(a: f64, b: f64, y: f64) -> f64 {
    a - y * b
}

fn check_md(a: &CVec, b: &CMat, y: Option<&CVec>) -> Result<()> {
    if b.nrows() != a.len() || b.ncols() != a.len() {
        return Err(FpError::Dimension {
            context: "multidimensional transform (B vs a)",
            expected: a.len(),
            got: b.nrows(),
        });
    }
    if let Some(y) = y {
        if y.len() != a.len() {
            return Err(FpError::Dimension {
                context: "multidimensional transform (y vs a)",
                expected: a.len(),
                got: y.len(),
            });
        }
    }
    check_hermitian(b)
}

/// `2 Re{y^H a} - y^H B y`.
pub fn qt_md_value(a: &CVec, b: &CMat, y: &CVec) -> Result<f64> {
    check_md(a, b, Some(y))?;
    Ok(2.0 * re_inner(y, a) - quad_form(b, y))
}

/// Maximizer `B^{-1} a` of the multidimensional transform.
pub fn qt_md_optimal_y(a: &CVec, b: &CMat) -> Result<CVec> {
    check_md(a, b, None)?;
    hpd_solve(b, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::{random_cvec, random_hpd};
    use crate::numerics::RngStream;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_examples() {
        let d = QtParams::default();
        assert_eq!(qt_value(4.0, 2.0, 1.0, d).unwrap(), 2.0);
        assert_eq!(qt_value(0.0, 1.0, 3.0, d).unwrap(), -9.0);
        assert_eq!(qt_value(1.0, 2.0, 0.5, d).unwrap(), 0.5);
        assert_eq!(qt_optimal_y(4.0, 2.0).unwrap(), 1.0);
        assert_eq!(qt_optimal_y(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(qt_optimal_y(1.0, 2.0).unwrap(), 0.5);
    }

    #[test]
    fn scalar_domain_errors() {
        let d = QtParams::default();
        assert!(matches!(qt_value(-1.0, 1.0, 0.0, d), Err(FpError::Domain { .. })));
        assert!(matches!(qt_value(1.0, 0.0, 0.0, d), Err(FpError::Domain { .. })));
        assert!(qt_optimal_y(1.0, -2.0).is_err());
        assert!(QtParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn md_examples() {
        let i2 = CMat::identity(2, 2);
        let a = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(qt_md_value(&a, &i2, &a).unwrap(), 1.0);
        let z = CVec::zeros(2);
        assert_eq!(qt_md_value(&z, &i2, &z).unwrap(), 0.0);

        let b = CMat::from_diagonal(&CVec::from_vec(vec![c(2.0, 0.0), c(4.0, 0.0)]));
        let a = CVec::from_vec(vec![c(2.0, 0.0), c(0.0, 2.0)]);
        let y = qt_md_optimal_y(&a, &b).unwrap();
        assert!((y[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((y[1] - c(0.0, 0.5)).norm() < 1e-15);
        assert!((qt_md_value(&a, &b, &y).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(qt_md_optimal_y(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]), &i2).unwrap()[0], c(1.0, 0.0));
    }

    #[test]
    fn md_errors() {
        let a = CVec::zeros(2);
        assert!(matches!(
            qt_md_value(&a, &CMat::identity(3, 3), &a),
            Err(FpError::Dimension { .. })
        ));
        let mut b = CMat::identity(2, 2);
        b[(0, 1)] = c(0.0, 1.0);
        assert!(matches!(qt_md_value(&a, &b, &a), Err(FpError::Conditioning(_))));
    }

    #[test]
    fn md_random_residual() {
        let mut rng = RngStream::new(99);
        let b = random_hpd(4, 1e3, &mut rng);
        let a = random_cvec(4, &mut rng);
        let y = qt_md_optimal_y(&a, &b).unwrap();
        assert!((&b * &y - &a).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn second_derivative_is_minus_two_b() {
        let d = QtParams::default();
        let (a, b, y, h) = (3.0, 1.7, 0.4, 1e-3);
        let f = |y: f64| qt_value(a, b, y, d).unwrap();
        let fd = (f(y + h) - 2.0 * f(y) + f(y - h)) / (h * h);
        assert!((fd + 2.0 * b).abs() <= 1e-6 * 2.0 * b);
    }
}
