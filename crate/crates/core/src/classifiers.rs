//! Special-metric predicates on a [`TorsionPackage`].

use num_complex::Complex64;

use crate::error::Result;
use crate::lie_hermitian::{HermitianStructure, StructureConstants};
use crate::tensor_algebra::matrix::max_abs;
use crate::tensor_algebra::{CMat, CTensor3, CTensor4, InvariantForm};
use crate::torsion::TorsionPackage;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flag {
    pub holds: bool,
    pub residual: f64,
}

impl Flag {
    fn new(residual: f64, tol: f64) -> Self {
        Self {
            holds: residual <= tol,
            residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StpReport {
    /// `max |∇^s T|` over both directions.
    pub flag: Flag,
    /// Residuals of the identities every STP metric satisfies, by name.
    pub identities: Vec<(&'static str, f64)>,
    pub identity_tol: f64,
}

impl StpReport {
    /// False only when the flag holds and some identity fails.
    pub fn consistent(&self) -> bool {
        !self.flag.holds || self.identities.iter().all(|(_, r)| *r <= self.identity_tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentReport {
    pub holds: bool,
    /// `witness[a]` is the original index of the `a`-th frame vector after reordering.
    pub witness: Option<Vec<usize>>,
}

/// Scope note carried by every nilpotent-J result.
pub const NILPOTENT_SCOPE: &str = "in the given frame family: reorderings of the reference frame";

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub tol: f64,
    pub kahler: Flag,
    pub balanced: Flag,
    pub gauduchon: Flag,
    pub pluriclosed: Flag,
    pub lck_shape: Flag,
    pub stp: StpReport,
    pub nilpotent_j: NilpotentReport,
}

pub fn classify(pkg: &TorsionPackage, hs: &HermitianStructure, tol: f64) -> Result<ClassificationReport> {
    Ok(ClassificationReport {
        tol,
        kahler: Flag::new(pkg.max_abs_t(), tol),
        balanced: Flag::new(pkg.max_abs_eta(), tol),
        gauduchon: Flag::new((pkg.norm_eta2 - pkg.chi).abs(), tol),
        pluriclosed: Flag::new(pluriclosed_residual(&pkg.sc_unitary)?, tol),
        lck_shape: lck_check(pkg, tol),
        stp: stp_check(pkg, tol),
        nilpotent_j: nilpotent_j_check(hs.structure(), tol),
    })
}

/// Norm of `∂∂̄ω`, the (2,2)-part of `d` applied to the (1,2)-part of `dω`, in a unitary frame.
pub fn pluriclosed_residual(sc_u: &StructureConstants) -> Result<f64> {
    let n = sc_u.dim();
    let d_omega = sc_u.exterior_d(&InvariantForm::kahler_form(n))?;
    let dbar_omega = d_omega.bidegree_part(1, 2);
    Ok(sc_u.exterior_d(&dbar_omega)?.bidegree_part(2, 2).norm_sqr().sqrt() + 0.0)
}

/// `T^j_{ik} = (δ_{ij} η_k − δ_{kj} η_i)/(n−1)`.
pub fn lck_torsion(eta: &[Complex64]) -> CTensor3 {
    let n = eta.len();
    let s = 1.0 / (n as f64 - 1.0);
    let zero = Complex64::new(0.0, 0.0);
    CTensor3::from_fn(n, |j, i, k| {
        let mut v = zero;
        if i == j {
            v += eta[k];
        }
        if k == j {
            v -= eta[i];
        }
        v * s
    })
}

/// Closed forms for the LCK shape: `A_{ij̄} = (δ_{ij}|η|² + (n−2) η_i η̄_j)/(n−1)²`
/// and `|T|² = 2|η|²/(n−1)`.
pub fn lck_closed_forms(eta: &[Complex64]) -> (CMat, f64) {
    let n = eta.len();
    let e2: f64 = eta.iter().map(|z| z.norm_sqr()).sum();
    let s2 = (n as f64 - 1.0).powi(2);
    let a = CMat::from_fn(n, n, |i, j| {
        let delta = if i == j { e2 } else { 0.0 };
        (Complex64::new(delta, 0.0) + eta[i] * eta[j].conj() * (n as f64 - 2.0)) / s2
    });
    (a, 2.0 * e2 / (n as f64 - 1.0))
}

/// Largest deviation of `T` from the LCK shape built from its own `η`.
pub fn lck_check(pkg: &TorsionPackage, tol: f64) -> Flag {
    if pkg.n < 2 {
        return Flag::new(pkg.max_abs_t(), tol);
    }
    Flag::new((&pkg.t - &lck_torsion(&pkg.eta)).max_abs(), tol)
}

/// Both components of `∇^s T`, where `(∇^s − ∇) e_i = Σ_j Σ_r (T^j_{ir} φ_r − conj(T^i_{jr}) φ̄_r) e_j`.
/// Returns the `e_ℓ` and `ē_ℓ` derivatives, indexed `[j][i][k][ℓ]`.
pub fn strominger_derivative(pkg: &TorsionPackage) -> (CTensor4, CTensor4) {
    let n = pkg.n;
    let t = &pkg.t;
    let dt_hol = pkg.dt_holomorphic();
    let holo = CTensor4::from_fn(n, |j, i, k, l| {
        let mut s = dt_hol[(j, i, k, l)];
        for r in 0..n {
            s += t[(r, i, k)] * t[(j, r, l)] - t[(r, i, l)] * t[(j, r, k)] - t[(r, k, l)] * t[(j, i, r)];
        }
        s
    });
    let anti = CTensor4::from_fn(n, |j, i, k, l| {
        let mut s = pkg.dt[(j, i, k, l)];
        for r in 0..n {
            s += -t[(r, i, k)] * t[(r, j, l)].conj() + t[(j, r, k)] * t[(i, r, l)].conj() + t[(j, i, r)] * t[(k, r, l)].conj();
        }
        s
    });
    (holo, anti)
}

pub fn stp_check(pkg: &TorsionPackage, tol: f64) -> StpReport {
    let n = pkg.n;
    let t = &pkg.t;
    let (holo, anti) = strominger_derivative(pkg);
    let flag = Flag::new(holo.max_abs().max(anti.max_abs()), tol);

    let dt_hol = pkg.dt_holomorphic();
    let quad = CTensor4::from_fn(n, |j, i, k, l| {
        (0..n)
            .map(|r| t[(j, r, k)] * t[(r, i, l)] + t[(j, i, r)] * t[(r, k, l)] - t[(r, i, k)] * t[(j, r, l)])
            .sum()
    });
    let quad_bar = CTensor4::from_fn(n, |j, i, k, l| {
        (0..n)
            .map(|r| -t[(j, r, k)] * t[(i, r, l)].conj() - t[(j, i, r)] * t[(k, r, l)].conj() + t[(r, i, k)] * t[(r, j, l)].conj())
            .sum()
    });
    let eq9 = dt_hol.max_abs_diff(&quad);
    let eq10 = pkg.dt.max_abs_diff(&quad_bar);
    let eq11 = quad.max_abs();
    let mut eta_t: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let s: Complex64 = (0..n).map(|r| pkg.eta[r] * t[(r, i, k)]).sum();
            eta_t = eta_t.max(s.norm());
        }
    }
    let phi_xi = max_abs(&(&pkg.phi - &pkg.xi - (&pkg.b - &pkg.a)));
    StpReport {
        flag,
        identities: vec![
            ("holomorphic_derivative", eq9),
            ("antiholomorphic_derivative", eq10),
            ("quadratic_cyclic", eq11),
            ("eta_contraction", eta_t),
            ("phi_minus_xi", phi_xi),
        ],
        identity_tol: tol * (1.0 + pkg.norm_t2),
    }
}

/// Looks for a reordering of the frame under which `C^j_{ik} = D^i_{jk} = 0`
/// unless `j > i, k` (entries with modulus ≤ `tol` count as zero).
///
/// With `D^i_{jk}` stored at `[i][j][k]` the pattern reads: `dφ_j` involves only
/// `φ_i, φ̄_k` with `i, k` earlier than `j`. A valid order is a topological order
/// of the graph with edges `i → j`, `k → j`; the smallest available index is
/// taken first, so an already triangular frame returns the identity.
pub fn nilpotent_j_check(sc: &StructureConstants, tol: f64) -> NilpotentReport {
    let n = sc.dim();
    let mut before = vec![vec![false; n]; n];
    for (j, i, k, _) in sc.c().nonzero(tol) {
        before[i][j] = true;
        before[k][j] = true;
    }
    for (i, j, k, _) in sc.d().nonzero(tol) {
        before[i][j] = true;
        before[k][j] = true;
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n).find(|&j| !placed[j] && (0..n).all(|i| !before[i][j] || placed[i]) && !before[j][j]);
        match next {
            Some(j) => {
                placed[j] = true;
                order.push(j);
            }
            None => {
                return NilpotentReport {
                    holds: false,
                    witness: None,
                }
            }
        }
    }
    NilpotentReport {
        holds: true,
        witness: Some(order),
    }
}
