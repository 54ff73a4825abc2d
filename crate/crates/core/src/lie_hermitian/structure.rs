//! Structure constants of a Lie algebra with integrable complex structure,
//! written on a (1,0)-coframe `φ`:
//!
//! ```text
//! dφ_j = −½ Σ C^j_{ik} φ_i ∧ φ_k − Σ conj(D^i_{jk}) φ_i ∧ φ̄_k
//! ```
//!
//! Dually `[e_i, e_k] = Σ C^j_{ik} e_j` and `φ_j([e_i, ē_k]) = conj(D^i_{jk})`.
//! Both tensors are stored `[up][lo1][lo2]`, so `d[(j, i, k)]` is `D^j_{ik}`;
//! the structure equation reads `D^i_{jk}` as `d[(i, j, k)]`.

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::tensor_algebra::{CTensor3, InvariantForm};

/// Residual threshold for structural checks.
pub const VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    n: usize,
    c: CTensor3,
    d: CTensor3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    /// Largest `|tr ad(e_i)|`. Informational: compact quotients need it to vanish,
    /// but the pipeline does not.
    pub unimodularity_residual: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn is_unimodular(&self) -> bool {
        self.unimodularity_residual <= VALIDATION_TOL
    }

    pub fn check(&self, name: &str) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl StructureConstants {
    pub fn new(c: CTensor3, d: CTensor3) -> Result<Self> {
        if c.dim() != d.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: c.dim(),
                found: d.dim(),
            });
        }
        if c.dim() == 0 || c.dim() > crate::MAX_DIM {
            return Err(GeometryError::InvalidInput(format!(
                "complex dimension {} outside 1..={}",
                c.dim(),
                crate::MAX_DIM
            )));
        }
        if !c.is_finite() || !d.is_finite() {
            return Err(GeometryError::NonFinite("structure constant".into()));
        }
        Ok(Self { n: c.dim(), c, d })
    }

    pub fn abelian(n: usize) -> Self {
        Self {
            n,
            c: CTensor3::zeros(n),
            d: CTensor3::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `C^j_{ik}` stored `[j][i][k]`.
    pub fn c(&self) -> &CTensor3 {
        &self.c
    }

    /// `D^j_{ik}` stored `[j][i][k]`.
    pub fn d(&self) -> &CTensor3 {
        &self.d
    }

    /// `dψ_g` for every generator: `g < n` is `φ_{g}`, `g ≥ n` is `φ̄_{g−n}`.
    pub fn generator_derivatives(&self) -> Vec<InvariantForm> {
        let n = self.n;
        let mut out = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut f = InvariantForm::zero(n);
            for i in 0..n {
                for k in 0..n {
                    let cjik = self.c[(j, i, k)];
                    if cjik != zero() {
                        f.add_term(&[i, k], -0.5 * cjik);
                    }
                    // D^i_{jk} read with an explicit index permutation
                    let dijk = self.d[(i, j, k)];
                    if dijk != zero() {
                        f.add_term(&[i, n + k], -dijk.conj());
                    }
                }
            }
            out.push(f);
        }
        for j in 0..n {
            let conj = out[j].conjugate();
            out.push(conj);
        }
        out
    }

    /// Exterior derivative of an invariant form: the generator images extended
    /// by the graded Leibniz rule.
    pub fn exterior_d(&self, form: &InvariantForm) -> Result<InvariantForm> {
        if form.dim() != self.n {
            return Err(GeometryError::DimensionMismatch {
                expected: self.n,
                found: form.dim(),
            });
        }
        Ok(form.derive_with(&self.generator_derivatives()))
    }

    /// Structure constants `K^r_{pq}` of the complexified algebra in the basis
    /// `(e_1..e_n, ē_1..ē_n)`: `[E_p, E_q] = Σ_r K^r_{pq} E_r`.
    pub fn bracket_table(&self) -> CTensor3 {
        let n = self.n;
        let mut k = CTensor3::zeros(2 * n);
        for j in 0..n {
            for i in 0..n {
                for l in 0..n {
                    k[(j, i, l)] = self.c[(j, i, l)];
                    k[(n + j, n + i, n + l)] = self.c[(j, i, l)].conj();
                    // [e_i, ē_l] = Σ_j conj(D^i_{jl}) e_j − Σ_j D^l_{ji} ē_j
                    let e_part = self.d[(i, j, l)].conj();
                    let ebar_part = -self.d[(l, j, i)];
                    k[(j, i, n + l)] = e_part;
                    k[(n + j, i, n + l)] = ebar_part;
                    k[(j, n + l, i)] = -e_part;
                    k[(n + j, n + l, i)] = -ebar_part;
                }
            }
        }
        k
    }

    /// Inverse of [`bracket_table`](Self::bracket_table). Fails with
    /// `NotIntegrable` if brackets of (1,0)-vectors leave the (1,0)-space.
    pub fn from_bracket_table(k: &CTensor3) -> Result<Self> {
        let n2 = k.dim();
        if n2 % 2 != 0 {
            return Err(GeometryError::InvalidInput("bracket table has odd dimension".into()));
        }
        let n = n2 / 2;
        let mut leak: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                for l in 0..n {
                    leak = leak.max(k[(n + j, i, l)].norm()).max(k[(j, n + i, n + l)].norm());
                }
            }
        }
        if leak > VALIDATION_TOL {
            return Err(GeometryError::NotIntegrable { residual: leak });
        }
        let raw_c = CTensor3::from_fn(n, |j, i, l| k[(j, i, l)]);
        let c = CTensor3::from_fn(n, |j, i, l| (raw_c[(j, i, l)] - raw_c[(j, l, i)]) * 0.5);
        let d = CTensor3::from_fn(n, |i, j, l| k[(j, i, n + l)].conj());
        Self::new(c, d)
    }

    /// `tr ad(e_i) = −Σ_r C^r_{ri} − Σ_r D^r_{ri}`.
    pub fn ad_traces(&self) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| -(0..n).map(|r| self.c[(r, r, i)] + self.d[(r, r, i)]).sum::<Complex64>())
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.n;
        let antisym = self.c.lower_antisymmetry_residual();
        let images = self.generator_derivatives();
        let dd = |range: std::ops::Range<usize>| {
            range
                .map(|g| images[g].derive_with(&images).max_abs())
                .fold(0.0, f64::max)
        };
        let dd_phi = dd(0..n);
        let dd_phibar = dd(n..2 * n);
        let unimodularity = self.ad_traces().iter().fold(0.0, |m: f64, z| m.max(z.norm()));
        ValidationReport {
            checks: vec![
                ValidationCheck {
                    name: "c_antisymmetry",
                    passed: antisym == 0.0,
                    residual: antisym,
                },
                ValidationCheck {
                    name: "dd_phi",
                    passed: dd_phi <= VALIDATION_TOL,
                    residual: dd_phi,
                },
                ValidationCheck {
                    name: "dd_phibar",
                    passed: dd_phibar <= VALIDATION_TOL,
                    residual: dd_phibar,
                },
            ],
            unimodularity_residual: unimodularity,
        }
    }

    /// Direct sum of two structures (block-diagonal frame).
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.n, other.n);
        let n = a + b;
        let pick = |t1: &CTensor3, t2: &CTensor3, j: usize, i: usize, k: usize| {
            if j < a && i < a && k < a {
                t1[(j, i, k)]
            } else if j >= a && i >= a && k >= a {
                t2[(j - a, i - a, k - a)]
            } else {
                zero()
            }
        };
        let c = CTensor3::from_fn(n, |j, i, k| pick(&self.c, &other.c, j, i, k));
        let d = CTensor3::from_fn(n, |j, i, k| pick(&self.d, &other.d, j, i, k));
        Self::new(c, d)
    }

    /// Human-readable structure equations, one line per generator.
    pub fn render_equations(&self) -> Vec<String> {
        let images = self.generator_derivatives();
        (0..self.n)
            .map(|j| format!("dφ{} = {}", j + 1, images[j]))
            .collect()
    }
}
