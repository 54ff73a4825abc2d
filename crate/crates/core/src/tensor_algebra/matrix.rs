//! Dense complex matrices: Hermitian validation, Cholesky, and spectral
//! functions of Hermitian matrices (square root, exponential).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{GeometryError, Result};

/// Dense square complex matrix.
pub type CMat = DMatrix<Complex64>;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_RTOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Induced infinity norm (max absolute row sum).
pub fn norm_inf(m: &CMat) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `X + X*`, the coefficient matrix of a (1,1)-form plus its conjugate.
pub fn herm_part(m: &CMat) -> CMat {
    m + m.adjoint()
}

/// Re tr(a b), the real pairing of two Hermitian matrices.
pub fn pairing(a: &CMat, b: &CMat) -> f64 {
    (a * b).trace().re
}

/// Hermitian matrix, optionally certified positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMat {
    base: CMat,
    positive_definite: bool,
}

impl HermMat {
    /// Accepts `m` if it equals its adjoint to [`HERMITIAN_RTOL`] relative to
    /// its largest entry, and stores the exactly symmetrized matrix.
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(GeometryError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if !is_finite(&m) {
            return Err(GeometryError::NonFinite("Hermitian matrix entry".into()));
        }
        let asym = max_abs(&(&m - m.adjoint()));
        if asym > HERMITIAN_RTOL * max_abs(&m) {
            return Err(GeometryError::NotHermitian { asymmetry: asym });
        }
        let base = (&m + m.adjoint()).scale(0.5);
        Ok(Self {
            base,
            positive_definite: false,
        })
    }

    /// Hermitian and positive definite; certified by a successful Cholesky factorization.
    pub fn positive_definite(m: CMat) -> Result<Self> {
        let mut h = Self::new(m)?;
        cholesky(&h)?;
        h.positive_definite = true;
        Ok(h)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            base: identity(n),
            positive_definite: true,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            base: CMat::zeros(n, n),
            positive_definite: false,
        }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let m = CMat::from_fn(n, n, |i, j| if i == j { c(d[i], 0.0) } else { c(0.0, 0.0) });
        if d.iter().all(|&x| x > 0.0) {
            Self::positive_definite(m)
        } else {
            Self::new(m)
        }
    }

    pub fn dim(&self) -> usize {
        self.base.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.base
    }

    pub fn into_matrix(self) -> CMat {
        self.base
    }

    pub fn is_positive_definite(&self) -> bool {
        self.positive_definite
    }

    /// Determinant; real for Hermitian matrices.
    pub fn det(&self) -> f64 {
        self.base.determinant().re
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let m = self.base.scale(factor);
        if self.positive_definite && factor > 0.0 {
            Ok(Self {
                base: m,
                positive_definite: true,
            })
        } else {
            Self::new(m)
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.base).0
    }
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// unitary matrix whose columns are the matching eigenvectors.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, u) = hermitian_eigen(m);
    let n = m.nrows();
    let d = CMat::from_fn(n, n, |i, j| if i == j { c(f(values[i]), 0.0) } else { c(0.0, 0.0) });
    let out = &u * d * u.adjoint();
    (&out + out.adjoint()).scale(0.5)
}

pub fn hermitian_exp(m: &CMat) -> CMat {
    hermitian_function(m, f64::exp)
}

pub fn hermitian_sqrt(m: &CMat) -> CMat {
    hermitian_function(m, |x| x.max(0.0).sqrt())
}

/// Lower-triangular `L` with real positive diagonal and `H = L L*`.
pub fn cholesky(h: &HermMat) -> Result<CMat> {
    let a = h.matrix();
    let n = a.nrows();
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(GeometryError::NotPositiveDefinite { row: j, pivot: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = c(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| GeometryError::NumericalFailure("matrix is singular".into()))
}

/// Ratio of extreme singular values; infinite for singular input.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky(&HermMat::identity(4)).unwrap();
        assert!(close(&l, &identity(4), 0.0));
    }

    #[test]
    fn cholesky_diagonal() {
        let h = HermMat::from_real_diagonal(&[4.0, 1.0]).unwrap();
        let l = cholesky(&h).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(close(&l, &expected, 0.0));
    }

    #[test]
    fn cholesky_complex_two_by_two() {
        // [[2, i], [-i, 2]]: by hand L = [[sqrt2, 0], [-i/sqrt2, sqrt(3/2)]].
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let h = HermMat::new(m.clone()).unwrap();
        let l = cholesky(&h).unwrap();
        let s2 = 2f64.sqrt();
        let expected = CMat::from_row_slice(
            2,
            2,
            &[c(s2, 0.0), c(0.0, 0.0), c(0.0, -1.0 / s2), c(1.5f64.sqrt(), 0.0)],
        );
        assert!(close(&l, &expected, 1e-15));
        let rebuilt = &l * l.adjoint();
        assert!(norm_inf(&(&rebuilt - &m)) <= 1e-12 * norm_inf(&m));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let h = HermMat::from_real_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(
            cholesky(&h),
            Err(GeometryError::NotPositiveDefinite { row: 1, .. })
        ));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(HermMat::new(m), Err(GeometryError::NotHermitian { .. })));
    }

    #[test]
    fn exp_of_diagonal() {
        let s = CMat::from_fn(3, 3, |i, j| if i == j && i == 0 { c(2f64.ln(), 0.0) } else { c(0.0, 0.0) });
        let e = hermitian_exp(&s);
        let expected = CMat::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => c(2.0, 0.0),
            (i, j) if i == j => c(1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        assert!(close(&e, &expected, 1e-14));
    }

    #[test]
    fn sqrt_squares_back() {
        let m = CMat::from_row_slice(2, 2, &[c(3.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(2.0, 0.0)]);
        let r = hermitian_sqrt(&m);
        assert!(close(&(&r * &r), &m, 1e-13));
    }
}
