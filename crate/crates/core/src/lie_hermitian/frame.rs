//! Frame changes and reduction to a unitary frame.
//!
//! Convention: the new frame is `ẽ = e·P`, i.e. `ẽ_a = Σ_b e_b P_{ba}`, with
//! coframe `φ̃ = P⁻¹ φ`. Brackets give the laws
//!
//! ```text
//! [ẽ_a, ẽ_c] = Σ P_{ba} P_{dc} [e_b, e_d]
//!     ⇒  C̃^m_{ac} = Σ (P⁻¹)_{mj} C^j_{bd} P_{ba} P_{dc}
//! conj(D̃^a_{mc)) = φ̃_m([ẽ_a, conj(ẽ_c)]) = Σ (P⁻¹)_{mj} P_{ba} conj(P_{dc}) conj(D^b_{jd})
//!     ⇒  D̃^a_{mc} = Σ conj(P_{ba}) conj((P⁻¹)_{mj}) P_{dc} D^b_{jd}
//! ```
//!
//! and the metric Gram matrix `H_{ij} = ⟨e_i, ē_j⟩` becomes `Pᵀ H P̄`.

use num_complex::Complex64;

use super::structure::StructureConstants;
use crate::error::{GeometryError, Result};
use crate::tensor_algebra::matrix::{cholesky, condition_number, inverse};
use crate::tensor_algebra::{CMat, CTensor3, HermMat};

/// Frames with a larger condition number are rejected as singular.
pub const MAX_FRAME_CONDITION: f64 = 1e12;

/// Structure constants plus an invariant Hermitian metric, given by its Gram
/// matrix `g_{ij̄} = ⟨e_i, ē_j⟩` in the reference frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianStructure {
    sc: StructureConstants,
    metric: HermMat,
}

impl HermitianStructure {
    pub fn new(sc: StructureConstants, metric: HermMat) -> Result<Self> {
        if metric.dim() != sc.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: sc.dim(),
                found: metric.dim(),
            });
        }
        let metric = if metric.is_positive_definite() {
            metric
        } else {
            HermMat::positive_definite(metric.into_matrix())?
        };
        Ok(Self { sc, metric })
    }

    pub fn with_identity(sc: StructureConstants) -> Self {
        let n = sc.dim();
        Self {
            sc,
            metric: HermMat::identity(n),
        }
    }

    pub fn structure(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn metric(&self) -> &HermMat {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.sc.dim()
    }

    /// Volume of the compact quotient, normalized so that the identity metric has volume 1.
    pub fn volume(&self) -> f64 {
        self.metric.det()
    }

    pub fn with_metric(&self, metric: HermMat) -> Result<Self> {
        Self::new(self.sc.clone(), metric)
    }
}

fn antisymmetrize(t: &CTensor3) -> CTensor3 {
    CTensor3::from_fn(t.dim(), |j, i, k| (t[(j, i, k)] - t[(j, k, i)]) * 0.5)
}

/// Structure constants of the frame `ẽ = e·P`.
pub fn frame_change(sc: &StructureConstants, p: &CMat) -> Result<StructureConstants> {
    let n = sc.dim();
    if p.nrows() != n || p.ncols() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            found: p.nrows(),
        });
    }
    let condition = condition_number(p);
    if !(condition <= MAX_FRAME_CONDITION) {
        return Err(GeometryError::SingularFrame { condition });
    }
    let p_inv = inverse(p)?;
    let c = antisymmetrize(&sc.c().change_frame(p, &p_inv));
    let d = transform_d(sc.d(), p, &p_inv);
    StructureConstants::new(c, d)
}

fn transform_d(d: &CTensor3, p: &CMat, p_inv: &CMat) -> CTensor3 {
    let n = d.dim();
    let zero = Complex64::new(0.0, 0.0);
    // D̃[a][m][c] = Σ_{b,j,d} conj(P_{ba}) conj(P⁻¹_{mj}) P_{dc} D[b][j][d]
    let mut s1 = CTensor3::zeros(n);
    for b in 0..n {
        for j in 0..n {
            for c in 0..n {
                let mut s = zero;
                for dd in 0..n {
                    s += d[(b, j, dd)] * p[(dd, c)];
                }
                s1[(b, j, c)] = s;
            }
        }
    }
    let mut s2 = CTensor3::zeros(n);
    for b in 0..n {
        for m in 0..n {
            for c in 0..n {
                let mut s = zero;
                for j in 0..n {
                    s += p_inv[(m, j)].conj() * s1[(b, j, c)];
                }
                s2[(b, m, c)] = s;
            }
        }
    }
    CTensor3::from_fn(n, |a, m, c| (0..n).map(|b| p[(b, a)].conj() * s2[(b, m, c)]).sum())
}

/// Gram matrix of the frame `e·P`: `Pᵀ H P̄`.
pub fn transform_metric(h: &CMat, p: &CMat) -> CMat {
    p.transpose() * h * p.map(|z| z.conj())
}

/// Reduction to a unitary frame: `P = (Lᵀ)⁻¹` with `H = L L*` the Cholesky
/// factorization, so `Pᵀ H P̄ = I`. Returns `P` and the constants in the new frame.
pub fn unitary_reduction(hs: &HermitianStructure) -> Result<(CMat, StructureConstants)> {
    let l = cholesky(hs.metric())?;
    let p = inverse(&l.transpose())?;
    let sc_u = frame_change(hs.structure(), &p)?;
    Ok((p, sc_u))
}
