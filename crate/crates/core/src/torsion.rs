//! Chern connection, Chern torsion and the tensors derived from it, computed
//! from structure constants in a unitary frame.
//!
//! Matrices of (1,1)-type objects are stored so that entry `(i, j)` is the
//! coefficient of `√−1 φ_i ∧ φ̄_j`: `A[(i,j)] = A_{ij̄}`, `phi[(i,j)] = φ_i^j`,
//! `xi[(i,j)] = ξ_i^j`.

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::lie_hermitian::{unitary_reduction, HermitianStructure, StructureConstants};
use crate::tensor_algebra::matrix::is_finite;
use crate::tensor_algebra::{CMat, CTensor3, CTensor4, InvariantForm};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Everything computed by [`analyze`]. Tensors refer to the unitary frame `e·P`.
#[derive(Debug, Clone)]
pub struct TorsionPackage {
    pub n: usize,
    /// Frame change from the reference frame to the unitary frame.
    pub frame: CMat,
    pub sc_unitary: StructureConstants,
    pub gamma: CTensor3,
    pub t: CTensor3,
    /// `T^j_{ik,ℓ̄}` at `[j][i][k][ℓ]`.
    pub dt: CTensor4,
    pub eta: Vec<Complex64>,
    pub a: CMat,
    pub b: CMat,
    pub phi: CMat,
    pub xi: CMat,
    pub chi: f64,
    /// Imaginary part of `tr ξ`; zero up to roundoff on valid input.
    pub chi_imag: f64,
    pub norm_t2: f64,
    pub norm_eta2: f64,
    /// Lee form `θ = −(η + η̄)` on the real coframe dual to
    /// `x_{2k} = e_k + ē_k`, `x_{2k+1} = i(e_k − ē_k)`.
    pub lee: Vec<f64>,
}

/// `Γ^j_{ik} = D^j_{ik}`, with `∇_{e_k} e_i = Σ_j Γ^j_{ik} e_j`.
pub fn chern_connection(sc_u: &StructureConstants) -> CTensor3 {
    sc_u.d().clone()
}

/// `T^j_{ik} = −C^j_{ik} − D^j_{ik} + D^j_{ki}`.
pub fn chern_torsion(sc_u: &StructureConstants) -> CTensor3 {
    let (c, d) = (sc_u.c(), sc_u.d());
    CTensor3::from_fn(sc_u.dim(), |j, i, k| -c[(j, i, k)] - d[(j, i, k)] + d[(j, k, i)])
}

/// `η_i = Σ_r T^r_{ri}`.
pub fn torsion_one_form(t: &CTensor3) -> Vec<Complex64> {
    let n = t.dim();
    (0..n).map(|i| (0..n).map(|r| t[(r, r, i)]).sum()).collect()
}

/// `η_i = Σ_s D^s_{is}`; agrees with [`torsion_one_form`] when the algebra is unimodular.
pub fn torsion_one_form_from_d(sc_u: &StructureConstants) -> Vec<Complex64> {
    let n = sc_u.dim();
    let d = sc_u.d();
    (0..n).map(|i| (0..n).map(|s| d[(s, i, s)]).sum()).collect()
}

/// `A_{ij̄} = Σ T^r_{is} conj(T^r_{js})` and `B_{ij̄} = Σ T^j_{rs} conj(T^i_{rs})`.
pub fn ab_tensors(t: &CTensor3) -> (CMat, CMat) {
    let n = t.dim();
    let mut a = CMat::zeros(n, n);
    let mut b = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut sa = zero();
            let mut sb = zero();
            for r in 0..n {
                for s in 0..n {
                    sa += t[(r, i, s)] * t[(r, j, s)].conj();
                    sb += t[(j, r, s)] * t[(i, r, s)].conj();
                }
            }
            a[(i, j)] = sa;
            b[(i, j)] = sb;
        }
    }
    (a, b)
}

/// `T^j_{ik,ℓ̄} = Σ_r (T^j_{rk} conj(Γ^i_{rℓ}) + T^j_{ir} conj(Γ^k_{rℓ}) − T^r_{ik} conj(Γ^r_{jℓ}))`,
/// the covariant derivative in the direction `ē_ℓ` of an invariant torsion.
pub fn covariant_derivative_t(t: &CTensor3, gamma: &CTensor3) -> CTensor4 {
    let n = t.dim();
    CTensor4::from_fn(n, |j, i, k, l| {
        let mut s = zero();
        for r in 0..n {
            s += t[(j, r, k)] * gamma[(i, r, l)].conj() + t[(j, i, r)] * gamma[(k, r, l)].conj()
                - t[(r, i, k)] * gamma[(r, j, l)].conj();
        }
        s
    })
}

/// `T^j_{ik,ℓ} = Σ_r (T^r_{ik} Γ^j_{rℓ} − Γ^r_{iℓ} T^j_{rk} − Γ^r_{kℓ} T^j_{ir})`,
/// the covariant derivative in the direction `e_ℓ`.
pub fn covariant_derivative_t_holomorphic(t: &CTensor3, gamma: &CTensor3) -> CTensor4 {
    let n = t.dim();
    CTensor4::from_fn(n, |j, i, k, l| {
        let mut s = zero();
        for r in 0..n {
            s += t[(r, i, k)] * gamma[(j, r, l)] - gamma[(r, i, l)] * t[(j, r, k)] - gamma[(r, k, l)] * t[(j, i, r)];
        }
        s
    })
}

/// `φ_i^j = Σ_r T^j_{ir} conj(η_r)`, `ξ_i^j = Σ_r T^j_{ir,r̄}` and `χ = tr ξ` (complex).
pub fn phi_xi_tensors(t: &CTensor3, dt: &CTensor4, eta: &[Complex64]) -> (CMat, CMat, Complex64) {
    let n = t.dim();
    let phi = CMat::from_fn(n, n, |i, j| (0..n).map(|r| t[(j, i, r)] * eta[r].conj()).sum());
    let xi = CMat::from_fn(n, n, |i, j| (0..n).map(|r| dt[(j, i, r, r)]).sum());
    let chi = xi.trace();
    (phi, xi, chi)
}

/// Closed form `ξ_i^j = Σ_{r,s} (T^j_{rs} conj(D^i_{rs}) − T^r_{is} conj(D^r_{js})) + φ_i^j`,
/// valid on unimodular algebras.
pub fn xi_closed_form(t: &CTensor3, d: &CTensor3, phi: &CMat) -> CMat {
    let n = t.dim();
    CMat::from_fn(n, n, |i, j| {
        let mut s = phi[(i, j)];
        for r in 0..n {
            for q in 0..n {
                s += t[(j, r, q)] * d[(i, r, q)].conj() - t[(r, i, q)] * d[(r, j, q)].conj();
            }
        }
        s
    })
}

/// `∂ω = √−1 Σ_{i<k} Σ_j T^j_{ik} φ_i∧φ_k∧φ̄_j`, which is the (2,1)-part of `dω`
/// for the unitary-frame Kähler form `ω = √−1 Σ φ_i∧φ̄_i`.
pub fn del_omega(t: &CTensor3) -> InvariantForm {
    let n = t.dim();
    let mut out = InvariantForm::zero(n);
    let i_unit = Complex64::new(0.0, 1.0);
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                let v = t[(j, i, k)];
                if v != zero() {
                    out.add_term(&[i, k, n + j], i_unit * v);
                }
            }
        }
    }
    out
}

/// Coefficients of `−(η + η̄)` on the real coframe `θ_{2k}, θ_{2k+1}` with
/// `φ_k = θ_{2k} + i θ_{2k+1}`.
pub fn lee_form(eta: &[Complex64]) -> Vec<f64> {
    eta.iter().flat_map(|e| [-2.0 * e.re, 2.0 * e.im]).collect()
}

/// Full pipeline: unitary reduction, then every tensor above.
pub fn analyze(hs: &HermitianStructure) -> Result<TorsionPackage> {
    let (frame, sc_unitary) = unitary_reduction(hs)?;
    let n = hs.dim();
    let gamma = chern_connection(&sc_unitary);
    let t = chern_torsion(&sc_unitary);
    let eta = torsion_one_form(&t);
    let (a, b) = ab_tensors(&t);
    let dt = covariant_derivative_t(&t, &gamma);
    let (phi, xi, chi) = phi_xi_tensors(&t, &dt, &eta);
    let norm_t2 = t.norm_sqr();
    let norm_eta2 = eta.iter().map(|z| z.norm_sqr()).sum();
    let pkg = TorsionPackage {
        n,
        frame,
        sc_unitary,
        gamma,
        lee: lee_form(&eta),
        dt,
        eta,
        a,
        b,
        phi,
        xi,
        chi: chi.re,
        chi_imag: chi.im,
        norm_t2,
        norm_eta2,
        t,
    };
    if !pkg.is_finite() {
        return Err(GeometryError::NumericalFailure("torsion package has non-finite entries".into()));
    }
    Ok(pkg)
}

impl TorsionPackage {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.dt.is_finite()
            && [&self.a, &self.b, &self.phi, &self.xi].iter().all(|m| is_finite(m))
            && self.norm_t2.is_finite()
            && self.chi.is_finite()
    }

    pub fn max_abs_t(&self) -> f64 {
        self.t.max_abs()
    }

    pub fn max_abs_eta(&self) -> f64 {
        self.eta.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn dt_holomorphic(&self) -> CTensor4 {
        covariant_derivative_t_holomorphic(&self.t, &self.gamma)
    }
}
