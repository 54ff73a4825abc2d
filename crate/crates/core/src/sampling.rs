//! Seeded random generators for metrics, frames and structures.
//!
//! All generators take any `rand::Rng`; the CLI and the test suites use
//! `rand_chacha::ChaCha8Rng::seed_from_u64` so that draws are reproducible
//! across platforms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::lie_hermitian::real::{realify, RealLieData};
use crate::lie_hermitian::{catalog, frame_change, StructureConstants};
use crate::tensor_algebra::matrix::{c, frobenius, hermitian_eigen, identity};
use crate::tensor_algebra::{CMat, CTensor3, HermMat};

fn unit(rng: &mut impl Rng) -> f64 {
    rng.gen_range(-1.0..1.0)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    c(unit(rng), unit(rng))
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| random_complex(rng))
}

/// Hermitian matrix with entries uniform in the unit square.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermMat {
    let x = random_matrix(rng, n);
    HermMat::new((&x + x.adjoint()).scale(0.5)).expect("symmetrized matrix is Hermitian")
}

/// Random Hermitian matrix rescaled to the given Frobenius norm.
pub fn random_hermitian_with_norm(rng: &mut impl Rng, n: usize, norm: f64) -> HermMat {
    let h = random_hermitian(rng, n);
    let f = frobenius(h.matrix());
    if f == 0.0 {
        return HermMat::zeros(n);
    }
    HermMat::new(h.matrix().scale(norm / f)).expect("scaled Hermitian matrix")
}

/// `X X*/n + I/2` for a random `X`; eigenvalues stay within a modest range.
pub fn random_positive_definite(rng: &mut impl Rng, n: usize) -> HermMat {
    let x = random_matrix(rng, n);
    let m = (&x * x.adjoint()).scale(1.0 / n as f64) + identity(n).scale(0.5);
    HermMat::positive_definite((&m + m.adjoint()).scale(0.5)).expect("shifted Gram matrix is positive definite")
}

/// `exp(iS)` for a random Hermitian `S`.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    let s = random_hermitian(rng, n);
    let (values, v) = hermitian_eigen(s.matrix());
    let d = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, 3.0 * values[i])
        } else {
            c(0.0, 0.0)
        }
    });
    &v * d * v.adjoint()
}

/// `I + X/2` with `X` random; condition numbers stay small.
pub fn random_invertible(rng: &mut impl Rng, n: usize) -> CMat {
    identity(n) + random_matrix(rng, n).scale(0.5)
}

/// Two-step nilpotent structure: `dφ_j = 0` for `j < m`, and for `j ≥ m`,
/// `dφ_j` is a random combination of `φ_i∧φ_k` and `φ_i∧φ̄_k` with `i, k < m`.
pub fn random_two_step_nilpotent(rng: &mut impl Rng, n: usize, m: usize) -> StructureConstants {
    assert!(m >= 1 && m < n, "split index must satisfy 1 <= m < n");
    let mut cc = CTensor3::zeros(n);
    let mut d = CTensor3::zeros(n);
    for j in m..n {
        for i in 0..m {
            for k in 0..m {
                d[(i, j, k)] = random_complex(rng);
                if i < k {
                    let v = random_complex(rng);
                    cc[(j, i, k)] = v;
                    cc[(j, k, i)] = -v;
                }
            }
        }
    }
    StructureConstants::new(cc, d).expect("finite random constants")
}

/// `dφ_1 = 0`, `dφ_2 = b φ_1∧φ_2 + c φ_1∧φ̄_1` with random `b, c`, in a random frame.
pub fn random_surface_structure(rng: &mut impl Rng) -> StructureConstants {
    let b = random_complex(rng);
    let cv = random_complex(rng);
    let mut cc = CTensor3::zeros(2);
    cc[(1, 0, 1)] = -b;
    cc[(1, 1, 0)] = b;
    let mut d = CTensor3::zeros(2);
    d[(0, 1, 0)] = -cv.conj();
    let sc = StructureConstants::new(cc, d).expect("finite random constants");
    frame_change(&sc, &random_invertible(rng, 2)).expect("well-conditioned frame")
}

/// Complex Lie algebra (`D = 0`) whose torsion in the identity metric has
/// the locally conformally Kähler shape `T^j_{ik} = (δ_{ij} η_k − δ_{kj} η_i)/(n−1)`.
/// The bracket is `[X, Y] = α(X) Y − α(Y) X` with `α = η/(n−1)`; it is not unimodular.
pub fn lck_structure(eta: &[Complex64]) -> StructureConstants {
    let n = eta.len();
    assert!(n >= 2, "LCK shape needs n >= 2");
    let s = 1.0 / (n as f64 - 1.0);
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let cc = CTensor3::from_fn(n, |j, i, k| -(eta[k] * delta(i, j) - eta[i] * delta(k, j)) * s);
    StructureConstants::new(cc, CTensor3::zeros(n)).expect("finite constants")
}

pub fn random_lck_structure(rng: &mut impl Rng, n: usize) -> StructureConstants {
    let eta: Vec<Complex64> = (0..n).map(|_| random_complex(rng)).collect();
    lck_structure(&eta)
}

/// Random unimodular structure of dimension `n` (1 ≤ n ≤ 4) in a random frame,
/// drawn from abelian, two-step nilpotent, and catalog-based families.
pub fn random_unimodular_structure(rng: &mut impl Rng, n: usize) -> StructureConstants {
    assert!((1..=4).contains(&n), "supported dimensions are 1..=4");
    let base = match (n, rng.gen_range(0..3)) {
        (1, _) => StructureConstants::abelian(1),
        (2, 0) => catalog::structure("kodaira-thurston").unwrap(),
        (3, 0) => catalog::structure("so3c").unwrap(),
        (3, 1) => catalog::structure("iwasawa").unwrap(),
        (4, 0) => catalog::structure("so3c")
            .unwrap()
            .direct_sum(&StructureConstants::abelian(1))
            .unwrap(),
        (4, 1) => catalog::structure("kodaira-thurston")
            .unwrap()
            .direct_sum(&catalog::structure("kodaira-thurston").unwrap())
            .unwrap(),
        (n, _) => {
            let m = rng.gen_range(1..n);
            random_two_step_nilpotent(rng, n, m)
        }
    };
    frame_change(&base, &random_invertible(rng, n)).expect("well-conditioned frame")
}

/// Random structure of dimension `n` (1 ≤ n ≤ 4): unimodular families plus
/// LCK-shaped non-unimodular ones, in a random frame.
pub fn random_structure(rng: &mut impl Rng, n: usize) -> StructureConstants {
    if n >= 2 && rng.gen_range(0..4) == 0 {
        let sc = random_lck_structure(rng, n);
        return frame_change(&sc, &random_invertible(rng, n)).expect("well-conditioned frame");
    }
    random_unimodular_structure(rng, n)
}

/// Real algebra with integrable complex structure: the realification of a
/// random structure, written in a random real basis.
pub fn random_real_algebra(rng: &mut impl Rng, n: usize) -> RealLieData {
    let sc = random_structure(rng, n);
    let rl = realify(&sc).expect("realification of a validated structure");
    let m = 2 * n;
    let a = DMatrix::<f64>::from_fn(m, m, |i, j| if i == j { 1.0 } else { 0.0 } + 0.3 * unit(rng));
    rl.change_basis(&a).expect("well-conditioned real basis change")
}
