//! Real Lie algebras with a complex structure `J`, and their passage to (1,0)-frame data.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::structure::{StructureConstants, VALIDATION_TOL};
use crate::error::{GeometryError, Result};
use crate::tensor_algebra::matrix::{c, inverse};
use crate::tensor_algebra::{CMat, CTensor3};

/// Real Lie algebra of dimension `2n` with basis `x_a`, bracket
/// `[x_a, x_b] = Σ_c f^c_{ab} x_c`, and complex structure `J x_b = Σ_a J[a][b] x_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLieData {
    dim: usize,
    /// `f^c_{ab}` at `(c * dim + a) * dim + b`.
    f: Vec<f64>,
    j: DMatrix<f64>,
}

impl RealLieData {
    /// Validates `J² = −I` (to 1e-12), antisymmetry of `f` and the Jacobi identity (to 1e-10).
    pub fn new(dim: usize, f: Vec<f64>, j: DMatrix<f64>) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(GeometryError::InvalidInput(format!("real dimension {dim} must be even and positive")));
        }
        if f.len() != dim * dim * dim {
            return Err(GeometryError::InvalidInput("structure constant array has wrong length".into()));
        }
        if j.nrows() != dim || j.ncols() != dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                found: j.nrows(),
            });
        }
        if f.iter().chain(j.iter()).any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite("real Lie data".into()));
        }
        let jj = &j * &j + DMatrix::<f64>::identity(dim, dim);
        let jj_res = jj.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        if jj_res > 1e-12 {
            return Err(GeometryError::InvalidInput(format!("J·J + I has residual {jj_res:.3e}")));
        }
        let data = Self { dim, f, j };
        let mut antisym: f64 = 0.0;
        for cc in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    antisym = antisym.max((data.fc(cc, a, b) + data.fc(cc, b, a)).abs());
                }
            }
        }
        if antisym > 0.0 {
            return Err(GeometryError::InvalidInput(format!(
                "bracket constants not antisymmetric (residual {antisym:.3e})"
            )));
        }
        let jac = data.jacobi_residual();
        if jac > VALIDATION_TOL {
            return Err(GeometryError::JacobiViolation { residual: jac });
        }
        Ok(data)
    }

    /// Builds the antisymmetric constants from a list of `[x_a, x_b] = Σ value·x_c`
    /// entries `(c, a, b, value)` with `a < b` (zero-based).
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, f64)], j: DMatrix<f64>) -> Result<Self> {
        let mut f = vec![0.0; dim * dim * dim];
        for &(cc, a, b, v) in brackets {
            if cc >= dim || a >= dim || b >= dim || a == b {
                return Err(GeometryError::InvalidInput(format!("bad bracket entry ({cc}, {a}, {b})")));
            }
            f[(cc * dim + a) * dim + b] += v;
            f[(cc * dim + b) * dim + a] -= v;
        }
        Self::new(dim, f, j)
    }

    /// The complex structure pairing `x_{2k} ↦ x_{2k+1}`.
    pub fn standard_j(dim: usize) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(dim, dim);
        for k in 0..dim / 2 {
            j[(2 * k + 1, 2 * k)] = 1.0;
            j[(2 * k, 2 * k + 1)] = -1.0;
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fc(&self, cc: usize, a: usize, b: usize) -> f64 {
        self.f[(cc * self.dim + a) * self.dim + b]
    }

    pub fn constants(&self) -> &[f64] {
        &self.f
    }

    pub fn complex_structure(&self) -> &DMatrix<f64> {
        &self.j
    }

    fn bracket_vec(&self, u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
        let m = self.dim;
        let mut out = vec![c(0.0, 0.0); m];
        for a in 0..m {
            if u[a] == c(0.0, 0.0) {
                continue;
            }
            for b in 0..m {
                let w = u[a] * v[b];
                if w == c(0.0, 0.0) {
                    continue;
                }
                for (cc, o) in out.iter_mut().enumerate() {
                    *o += w * self.fc(cc, a, b);
                }
            }
        }
        out
    }

    /// Largest entry of the cyclic sum `[[x_a,x_b],x_c] + [[x_b,x_c],x_a] + [[x_c,x_a],x_b]`.
    pub fn jacobi_residual(&self) -> f64 {
        let m = self.dim;
        let mut res: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                for cc in 0..m {
                    for t in 0..m {
                        let mut s = 0.0;
                        for r in 0..m {
                            s += self.fc(r, a, b) * self.fc(t, r, cc)
                                + self.fc(r, b, cc) * self.fc(t, r, a)
                                + self.fc(r, cc, a) * self.fc(t, r, b);
                        }
                        res = res.max(s.abs());
                    }
                }
            }
        }
        res
    }

    /// Same algebra in the basis `x̃ = x·A`, with `J̃ = A⁻¹ J A`.
    pub fn change_basis(&self, a: &DMatrix<f64>) -> Result<Self> {
        let m = self.dim;
        let a_inv = a
            .clone()
            .try_inverse()
            .ok_or(GeometryError::SingularFrame { condition: f64::INFINITY })?;
        let mut f = vec![0.0; m * m * m];
        for p in 0..m {
            for q in 0..m {
                // [x̃_p, x̃_q] in x-coordinates, then in x̃-coordinates
                let mut w = vec![0.0; m];
                for s in 0..m {
                    for t in 0..m {
                        let coef = a[(s, p)] * a[(t, q)];
                        if coef == 0.0 {
                            continue;
                        }
                        for (r, wr) in w.iter_mut().enumerate() {
                            *wr += coef * self.fc(r, s, t);
                        }
                    }
                }
                for r in 0..m {
                    f[(r * m + p) * m + q] = (0..m).map(|s| a_inv[(r, s)] * w[s]).sum();
                }
            }
        }
        // exact antisymmetry
        for r in 0..m {
            for p in 0..m {
                for q in p..m {
                    let v = 0.5 * (f[(r * m + p) * m + q] - f[(r * m + q) * m + p]);
                    f[(r * m + p) * m + q] = v;
                    f[(r * m + q) * m + p] = -v;
                }
            }
        }
        let j = &a_inv * &self.j * a;
        Self::new(m, f, j)
    }
}

/// Passes to (1,0)-frame structure constants.
///
/// The (1,0)-frame is chosen greedily among `v_a = ½(x_a − i J x_a)` in basis
/// order, keeping each vector independent of those already kept; for the
/// standard `J` this gives `e_k = ½(x_{2k} − i x_{2k+1})`.
pub fn complexify(rl: &RealLieData) -> Result<StructureConstants> {
    let m = rl.dim();
    let n = m / 2;
    let jac = rl.jacobi_residual();
    if jac > VALIDATION_TOL {
        return Err(GeometryError::JacobiViolation { residual: jac });
    }
    let candidates: Vec<Vec<Complex64>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let x = if a == b { 1.0 } else { 0.0 };
                    c(0.5 * x, -0.5 * rl.complex_structure()[(b, a)])
                })
                .collect()
        })
        .collect();
    let mut chosen: Vec<Vec<Complex64>> = Vec::new();
    let mut basis: Vec<Vec<Complex64>> = Vec::new(); // orthonormalized copies
    for v in candidates {
        let mut w = v.clone();
        for q in &basis {
            let proj: Complex64 = q.iter().zip(&w).map(|(qi, wi)| qi.conj() * wi).sum();
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= proj * qi;
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 * vnorm.max(1e-300) {
            basis.push(w.iter().map(|z| z / norm).collect());
            chosen.push(v);
        }
        if chosen.len() == n {
            break;
        }
    }
    if chosen.len() != n {
        return Err(GeometryError::NumericalFailure("could not extract a (1,0)-frame".into()));
    }
    // E = [e_1..e_n, ē_1..ē_n] as columns in x-coordinates
    let e = CMat::from_fn(m, m, |row, col| {
        if col < n {
            chosen[col][row]
        } else {
            chosen[col - n][row].conj()
        }
    });
    let e_inv = inverse(&e)?;
    let mut k = CTensor3::zeros(m);
    for p in 0..m {
        let up: Vec<Complex64> = (0..m).map(|r| e[(r, p)]).collect();
        for q in 0..m {
            let vq: Vec<Complex64> = (0..m).map(|r| e[(r, q)]).collect();
            let w = rl.bracket_vec(&up, &vq);
            for r in 0..m {
                k[(r, p, q)] = (0..m).map(|s| e_inv[(r, s)] * w[s]).sum();
            }
        }
    }
    StructureConstants::from_bracket_table(&k)
}

/// Underlying real algebra of (1,0)-frame data, in the basis
/// `x_{2k} = e_k + ē_k`, `x_{2k+1} = i(e_k − ē_k)` with the standard `J`.
pub fn realify(sc: &StructureConstants) -> Result<RealLieData> {
    let n = sc.dim();
    let m = 2 * n;
    let k = sc.bracket_table();
    // columns of M express x_a in the basis (e, ē)
    let mut mm = CMat::zeros(m, m);
    for j in 0..n {
        mm[(j, 2 * j)] = c(1.0, 0.0);
        mm[(n + j, 2 * j)] = c(1.0, 0.0);
        mm[(j, 2 * j + 1)] = c(0.0, 1.0);
        mm[(n + j, 2 * j + 1)] = c(0.0, -1.0);
    }
    let mm_inv = inverse(&mm)?;
    let mut f = vec![0.0; m * m * m];
    let mut imag: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let mut y = vec![c(0.0, 0.0); m];
            for p in 0..m {
                for q in 0..m {
                    let coef = mm[(p, a)] * mm[(q, b)];
                    if coef == c(0.0, 0.0) {
                        continue;
                    }
                    for (r, yr) in y.iter_mut().enumerate() {
                        *yr += coef * k[(r, p, q)];
                    }
                }
            }
            for r in 0..m {
                let z: Complex64 = (0..m).map(|s| mm_inv[(r, s)] * y[s]).sum();
                imag = imag.max(z.im.abs());
                f[(r * m + a) * m + b] = z.re;
            }
        }
    }
    if imag > VALIDATION_TOL {
        return Err(GeometryError::NumericalFailure(format!(
            "realification produced imaginary constants ({imag:.3e})"
        )));
    }
    for r in 0..m {
        for a in 0..m {
            for b in a..m {
                let v = 0.5 * (f[(r * m + a) * m + b] - f[(r * m + b) * m + a]);
                f[(r * m + a) * m + b] = v;
                f[(r * m + b) * m + a] = -v;
            }
        }
    }
    RealLieData::new(m, f, RealLieData::standard_j(m))
}
