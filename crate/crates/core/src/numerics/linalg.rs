//! Dense complex linear algebra on small Hermitian systems.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{FpError, Result};
use crate::numerics::rng::RngStream;

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

/// Relative tolerance of the Hermitian symmetry check.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Checks `b == b^H` entrywise to `HERMITIAN_TOL` relative to the largest entry.
pub fn check_hermitian(b: &CMat) -> Result<()> {
    if b.nrows() != b.ncols() {
        return Err(FpError::Dimension {
            context: "hermitian check (square)",
            expected: b.nrows(),
            got: b.ncols(),
        });
    }
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let n = b.nrows();
    for i in 0..n {
        for j in i..n {
            let d = (b[(i, j)] - b[(j, i)].conj()).norm();
            if d > HERMITIAN_TOL * scale {
                return Err(FpError::Conditioning(format!(
                    "matrix is not Hermitian: |b[{i},{j}] - conj(b[{j},{i}])| = {d:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Cholesky factor of a Hermitian positive-definite matrix, kept for repeated solves.
pub struct HpdFactor {
    matrix: CMat,
    chol: Cholesky<Complex64, Dyn>,
}

impl HpdFactor {
    pub fn new(b: &CMat) -> Result<Self> {
        check_hermitian(b)?;
        let pivot_err = || FpError::Conditioning("Cholesky factorization hit a nonpositive pivot".into());
        let chol = Cholesky::new(b.clone()).ok_or_else(pivot_err)?;
        // The complex factorization takes complex square roots, so check the pivots here.
        let l = chol.l_dirty();
        for i in 0..b.nrows() {
            let d = l[(i, i)];
            if !(d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-12 * d.re) {
                return Err(pivot_err());
            }
        }
        Ok(Self {
            matrix: b.clone(),
            chol,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Solves `B x = a` with one step of iterative refinement.
    pub fn solve(&self, a: &CVec) -> Result<CVec> {
        if a.len() != self.dim() {
            return Err(FpError::Dimension {
                context: "hpd_solve rhs",
                expected: self.dim(),
                got: a.len(),
            });
        }
        let mut x = self.chol.solve(a);
        let r = a - &self.matrix * &x;
        x += self.chol.solve(&r);
        Ok(x)
    }

    /// `ln det B`, from the Cholesky diagonal.
    pub fn ln_det(&self) -> f64 {
        let l = self.chol.l_dirty();
        (0..self.dim()).map(|i| l[(i, i)].re.ln()).sum::<f64>() * 2.0
    }
}

/// Solves `B x = a` for Hermitian positive-definite `B`.
pub fn hpd_solve(b: &CMat, a: &CVec) -> Result<CVec> {
    if b.nrows() != a.len() {
        return Err(FpError::Dimension {
            context: "hpd_solve",
            expected: b.nrows(),
            got: a.len(),
        });
    }
    HpdFactor::new(b)?.solve(a)
}

/// Real part of `y^H B y`.
pub fn quad_form(b: &CMat, y: &CVec) -> f64 {
    y.dotc(&(b * y)).re
}

/// `Re{x^H y}`.
pub fn re_inner(x: &CVec, y: &CVec) -> f64 {
    x.dotc(y).re
}

pub fn norm_sqr(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Adds `scale * u u^H` to `acc`.
pub fn add_outer(acc: &mut CMat, u: &CVec, scale: f64) {
    let n = u.len();
    for j in 0..n {
        let uj = u[j].conj() * scale;
        for i in 0..n {
            acc[(i, j)] += u[i] * uj;
        }
    }
}

/// Unit-norm dominant right singular vector of `h`; the first basis vector if `h = 0`.
pub fn dominant_right_singular(h: &CMat) -> CVec {
    let n = h.ncols();
    let gram = h.adjoint() * h;
    let eig = nalgebra::linalg::SymmetricEigen::new(gram);
    let (idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    let v: CVec = eig.eigenvectors.column(idx).into_owned();
    let nv = v.norm();
    if nv > 0.0 && nv.is_finite() {
        v / Complex64::new(nv, 0.0)
    } else {
        let mut e = CVec::zeros(n);
        if n > 0 {
            e[0] = Complex64::new(1.0, 0.0);
        }
        e
    }
}

/// Random Hermitian positive-definite matrix `Q diag(λ) Q^H` with eigenvalues
/// log-spaced over `[1, cond]`.
pub fn random_hpd(dim: usize, cond: f64, rng: &mut RngStream) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| rng.complex_gaussian());
    let q = g.qr().q();
    let lambda: Vec<f64> = (0..dim)
        .map(|k| {
            if dim == 1 {
                1.0
            } else {
                cond.powf(k as f64 / (dim - 1) as f64)
            }
        })
        .collect();
    let d = CMat::from_diagonal(&CVec::from_iterator(
        dim,
        lambda.iter().map(|&l| Complex64::new(l, 0.0)),
    ));
    let b = &q * d * q.adjoint();
    // exact symmetrization
    (&b + b.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn random_cvec(dim: usize, rng: &mut RngStream) -> CVec {
    CVec::from_fn(dim, |_, _| rng.complex_gaussian())
}

/// Packs complex vectors into interleaved `(re, im)` real coordinates.
pub fn pack(vs: &[CVec]) -> Vec<f64> {
    let mut out = Vec::with_capacity(vs.iter().map(|v| 2 * v.len()).sum());
    for v in vs {
        for z in v.iter() {
            out.push(z.re);
            out.push(z.im);
        }
    }
    out
}

/// Inverse of [`pack`] for vectors of the given lengths.
pub fn unpack(x: &[f64], lens: &[usize]) -> Vec<CVec> {
    let mut offset = 0;
    lens.iter()
        .map(|&n| {
            let v = CVec::from_fn(n, |i, _| Complex64::new(x[offset + 2 * i], x[offset + 2 * i + 1]));
            offset += 2 * n;
            v
        })
        .collect()
}

/// Real matrix view as complex, for mixing real gains with complex kernels.
pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}
