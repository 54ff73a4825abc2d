//! Dense complex 3- and 4-index tensors over a fixed frame.
//!
//! Index convention, used everywhere in this crate:
//!
//! * `CTensor3` is indexed `[up][lo1][lo2]`, so `t[(j, i, k)]` is `X^j_{ik}`.
//!   This holds for the bracket constants `C^j_{ik}`, the mixed constants
//!   `D^j_{ik}`, the Chern connection `Γ^j_{ik}` and the torsion `T^j_{ik}`.
//! * `CTensor4` is indexed `[up][lo1][lo2][dir]`, so `t[(j, i, k, l)]` is
//!   `X^j_{ik,l}`, a derivative of a 3-tensor in direction `e_l` or `ē_l`.
//!
//! All indices are zero-based in code.

use std::ops::{Add, Index, IndexMut, Neg, Sub};

use num_complex::Complex64;

use super::matrix::CMat;

#[derive(Debug, Clone, PartialEq)]
pub struct CTensor3 {
    n: usize,
    data: Vec<Complex64>,
}

impl CTensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(n);
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    t[(j, i, k)] = f(j, i, k);
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Sum of squared moduli over all index triples.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest violation of antisymmetry in the two lower indices.
    pub fn lower_antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    r = r.max((self[(j, i, k)] + self[(j, k, i)]).norm());
                }
            }
        }
        r
    }

    /// Nonzero entries `(up, lo1, lo2, value)` in storage order.
    pub fn nonzero(&self, tol: f64) -> Vec<(usize, usize, usize, Complex64)> {
        let n = self.n;
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    let v = self[(j, i, k)];
                    if v.norm() > tol {
                        out.push((j, i, k, v));
                    }
                }
            }
        }
        out
    }

    /// Components in the frame `ẽ = e·P`, treating `self` as a genuine tensor
    /// (one contravariant, two covariant slots):
    /// `X̃^m_{ac} = Σ (P⁻¹)_{mj} X^j_{bd} P_{ba} P_{dc}`.
    pub fn change_frame(&self, p: &CMat, p_inv: &CMat) -> Self {
        let n = self.n;
        // contract lower indices first, then the upper one
        let mut lower = CTensor3::zeros(n);
        for j in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = Complex64::new(0.0, 0.0);
                    for d in 0..n {
                        s += self[(j, b, d)] * p[(d, c)];
                    }
                    lower[(j, b, c)] = s;
                }
            }
        }
        let mut both = CTensor3::zeros(n);
        for j in 0..n {
            for a in 0..n {
                for c in 0..n {
                    let mut s = Complex64::new(0.0, 0.0);
                    for b in 0..n {
                        s += p[(b, a)] * lower[(j, b, c)];
                    }
                    both[(j, a, c)] = s;
                }
            }
        }
        CTensor3::from_fn(n, |m, a, c| (0..n).map(|j| p_inv[(m, j)] * both[(j, a, c)]).sum())
    }
}

impl Index<(usize, usize, usize)> for CTensor3 {
    type Output = Complex64;
    fn index(&self, (j, i, k): (usize, usize, usize)) -> &Complex64 {
        &self.data[(j * self.n + i) * self.n + k]
    }
}

impl IndexMut<(usize, usize, usize)> for CTensor3 {
    fn index_mut(&mut self, (j, i, k): (usize, usize, usize)) -> &mut Complex64 {
        &mut self.data[(j * self.n + i) * self.n + k]
    }
}

impl Add for &CTensor3 {
    type Output = CTensor3;
    fn add(self, rhs: &CTensor3) -> CTensor3 {
        assert_eq!(self.n, rhs.n);
        CTensor3 {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CTensor3 {
    type Output = CTensor3;
    fn sub(self, rhs: &CTensor3) -> CTensor3 {
        assert_eq!(self.n, rhs.n);
        CTensor3 {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CTensor3 {
    type Output = CTensor3;
    fn neg(self) -> CTensor3 {
        CTensor3 {
            n: self.n,
            data: self.data.iter().map(|z| -z).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CTensor4 {
    n: usize,
    data: Vec<Complex64>,
}

impl CTensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(n);
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t[(j, i, k, l)] = f(j, i, k, l);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &CTensor4) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

impl Index<(usize, usize, usize, usize)> for CTensor4 {
    type Output = Complex64;
    fn index(&self, (j, i, k, l): (usize, usize, usize, usize)) -> &Complex64 {
        &self.data[((j * self.n + i) * self.n + k) * self.n + l]
    }
}

impl IndexMut<(usize, usize, usize, usize)> for CTensor4 {
    fn index_mut(&mut self, (j, i, k, l): (usize, usize, usize, usize)) -> &mut Complex64 {
        &mut self.data[((j * self.n + i) * self.n + k) * self.n + l]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_algebra::matrix::{c, identity, inverse};

    #[test]
    fn index_layout_is_up_lo_lo() {
        let mut t = CTensor3::zeros(3);
        t[(2, 0, 1)] = c(1.0, 0.0);
        assert_eq!(t.nonzero(0.0), vec![(2, 0, 1, c(1.0, 0.0))]);
    }

    #[test]
    fn antisymmetry_residual_detects_violation() {
        let mut t = CTensor3::zeros(3);
        t[(0, 1, 2)] = c(1.0, 0.0);
        assert_eq!(t.lower_antisymmetry_residual(), 1.0);
        t[(0, 2, 1)] = c(-1.0, 0.0);
        assert_eq!(t.lower_antisymmetry_residual(), 0.0);
    }

    #[test]
    fn frame_change_composes() {
        let t = CTensor3::from_fn(2, |j, i, k| c((j + 2 * i) as f64 - k as f64, (i * k) as f64));
        let p1 = CMat::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.2, 0.0), c(0.0, 1.0), c(2.0, 0.0)]);
        let p2 = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(1.0, 1.0)]);
        let p12 = &p1 * &p2;
        let direct = t.change_frame(&p12, &inverse(&p12).unwrap());
        let stepwise = t
            .change_frame(&p1, &inverse(&p1).unwrap())
            .change_frame(&p2, &inverse(&p2).unwrap());
        assert!((&direct - &stepwise).max_abs() < 1e-13);
        let same = t.change_frame(&identity(2), &identity(2));
        assert_eq!(same, t);
    }
}
