//! Named example structures. Every entry comes with the identity metric, so
//! its invariant volume is 1.

use num_complex::Complex64;

use super::frame::HermitianStructure;
use super::real::{complexify, RealLieData};
use super::structure::StructureConstants;
use crate::error::{GeometryError, Result};
use crate::tensor_algebra::CTensor3;

/// Largest `K` accepted for `sokc-K`.
pub const MAX_SOKC: usize = 5;

/// Catalog families with a one-line description, in listing order.
pub fn names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("abelian-N", "abelian algebra of complex dimension N (Kähler), e.g. abelian-3"),
        ("so3c", "SO(3,C): dφ1 = φ2∧φ3, dφ2 = φ3∧φ1, dφ3 = φ1∧φ2"),
        ("sokc-K", "SO(K,C) for 3 ≤ K ≤ 5 in the basis E_ab − E_ba (a < b)"),
        ("iwasawa", "complex Heisenberg group: dφ3 = −φ1∧φ2"),
        ("kodaira-thurston", "Heisenberg × R with [x1, x2] = 2·x3 and standard J"),
    ]
}

pub fn entry(name: &str) -> Result<HermitianStructure> {
    Ok(HermitianStructure::with_identity(structure(name)?))
}

pub fn structure(name: &str) -> Result<StructureConstants> {
    let unknown = || GeometryError::UnknownCatalogEntry(name.to_string());
    if let Some(rest) = name.strip_prefix("abelian-") {
        let n: usize = rest.parse().map_err(|_| unknown())?;
        if n == 0 || n > crate::MAX_DIM {
            return Err(unknown());
        }
        return Ok(StructureConstants::abelian(n));
    }
    if let Some(rest) = name.strip_prefix("sokc-") {
        let k: usize = rest.parse().map_err(|_| unknown())?;
        if !(3..=MAX_SOKC).contains(&k) {
            return Err(unknown());
        }
        return so_k(k);
    }
    match name {
        "so3c" => so3c(),
        "iwasawa" => iwasawa(),
        "kodaira-thurston" => complexify(&kodaira_thurston_real()?),
        _ => Err(unknown()),
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `dφ_j = φ_{j+1} ∧ φ_{j+2}` cyclically, i.e. `C^j_{j+1,j+2} = −1`.
fn so3c() -> Result<StructureConstants> {
    let mut c = CTensor3::zeros(3);
    for j in 0..3 {
        let (a, b) = ((j + 1) % 3, (j + 2) % 3);
        c[(j, a, b)] = re(-1.0);
        c[(j, b, a)] = re(1.0);
    }
    StructureConstants::new(c, CTensor3::zeros(3))
}

/// `dφ_3 = −φ_1 ∧ φ_2`, i.e. `C^3_{12} = 1`.
fn iwasawa() -> Result<StructureConstants> {
    let mut c = CTensor3::zeros(3);
    c[(2, 0, 1)] = re(1.0);
    c[(2, 1, 0)] = re(-1.0);
    StructureConstants::new(c, CTensor3::zeros(3))
}

/// Real form: `[x_0, x_1] = 2 x_2`, `x_3` central, standard `J`.
pub fn kodaira_thurston_real() -> Result<RealLieData> {
    RealLieData::from_brackets(4, &[(2, 0, 1, 2.0)], RealLieData::standard_j(4))
}

/// `so(k, C)` with basis `X_{ab} = E_{ab} − E_{ba}` (`a < b`, lexicographic):
/// the bracket is the matrix commutator, expanded back in the basis.
fn so_k(k: usize) -> Result<StructureConstants> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| ((a + 1)..k).map(move |b| (a, b))).collect();
    let n = pairs.len();
    let basis = |idx: usize| {
        let (a, b) = pairs[idx];
        let mut m = vec![0.0; k * k];
        m[a * k + b] = 1.0;
        m[b * k + a] = -1.0;
        m
    };
    let mul = |x: &[f64], y: &[f64]| {
        let mut out = vec![0.0; k * k];
        for r in 0..k {
            for s in 0..k {
                out[r * k + s] = (0..k).map(|t| x[r * k + t] * y[t * k + s]).sum();
            }
        }
        out
    };
    let mut c = CTensor3::zeros(n);
    for i in 0..n {
        for l in 0..n {
            let (x, y) = (basis(i), basis(l));
            let xy = mul(&x, &y);
            let yx = mul(&y, &x);
            for (j, &(a, b)) in pairs.iter().enumerate() {
                // coefficient of X_{ab} is the (a, b) entry of the commutator
                c[(j, i, l)] = re(xy[a * k + b] - yx[a * k + b]);
            }
        }
    }
    StructureConstants::new(c, CTensor3::zeros(n))
}
