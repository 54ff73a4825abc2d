//! The torsion functional `F`, the Gauduchon functional `G`, their
//! Euler–Lagrange residuals and first variations, for invariant metrics.
//!
//! On a compact quotient every integral of an invariant quantity is that
//! quantity times the volume `V = det H`, so `F = V^{1/n} |T|²` and
//! `G = V^{1/n} |η|²`, with `b = |T|²` and `a = |η|²/n`.

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::lie_hermitian::{transform_metric, HermitianStructure};
use crate::tensor_algebra::matrix::{frobenius, herm_part, identity, inverse, is_finite, pairing};
use crate::tensor_algebra::{CMat, CTensor3, HermMat, InvariantForm};
use crate::torsion::{analyze, TorsionPackage};

/// Step used by the finite-difference checks of the first variation.
pub const FD_STEP: f64 = 1e-4;

/// Functional values and Euler–Lagrange residuals at one metric.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub f_value: f64,
    pub g_value: f64,
    pub b: f64,
    pub a: f64,
    pub q_f: CMat,
    pub q_g: CMat,
    pub trace_residual: f64,
    pub norm_q_f: f64,
    pub norm_q_g: f64,
}

/// `V^{1/n}` with `V = det H`.
pub fn volume_factor(hs: &HermitianStructure) -> f64 {
    hs.volume().powf(1.0 / hs.dim() as f64)
}

pub fn torsion_functional(hs: &HermitianStructure) -> Result<f64> {
    let pkg = analyze(hs)?;
    Ok(volume_factor(hs) * pkg.norm_t2)
}

pub fn gauduchon_functional(hs: &HermitianStructure) -> Result<f64> {
    let pkg = analyze(hs)?;
    Ok(volume_factor(hs) * pkg.norm_eta2)
}

/// `Q_F = 2A − B + 2 herm(φ) − 2 herm(ξ) − (|T|² − (n−1)/n · b) I` with `b = |T|²`.
pub fn torsion_residual_matrix(pkg: &TorsionPackage) -> CMat {
    let n = pkg.n;
    let b = pkg.norm_t2;
    let shift = pkg.norm_t2 - (n as f64 - 1.0) / n as f64 * b;
    let q = pkg.a.scale(2.0) - &pkg.b + herm_part(&pkg.phi).scale(2.0) - herm_part(&pkg.xi).scale(2.0)
        - identity(n).scale(shift);
    (&q + q.adjoint()).scale(0.5)
}

/// Coefficient matrix of `√−1(∂η̄ − ∂̄η − η∧η̄) − a ω` with `a = |η|²/n`.
pub fn gauduchon_residual_matrix(pkg: &TorsionPackage) -> Result<CMat> {
    let n = pkg.n;
    let eta = InvariantForm::one_form(&pkg.eta);
    let dbar_eta = pkg.sc_unitary.exterior_d(&eta)?.bidegree_part(1, 1);
    let del_etabar = dbar_eta.conjugate();
    let eta_etabar = eta.wedge(&eta.conjugate())?;
    let x = del_etabar
        .sub(&dbar_eta)?
        .sub(&eta_etabar)?
        .scale(Complex64::new(0.0, 1.0));
    let a = pkg.norm_eta2 / n as f64;
    let q = x.coefficient_matrix_11() - identity(n).scale(a);
    Ok((&q + q.adjoint()).scale(0.5))
}

pub fn torsion_critical_residual(hs: &HermitianStructure) -> Result<(CMat, f64)> {
    let q = torsion_residual_matrix(&analyze(hs)?);
    let norm = frobenius(&q);
    Ok((q, norm))
}

pub fn gauduchon_critical_residual(hs: &HermitianStructure) -> Result<(CMat, f64)> {
    let q = gauduchon_residual_matrix(&analyze(hs)?)?;
    let norm = frobenius(&q);
    Ok((q, norm))
}

/// `4(|η|² − χ)`.
pub fn conformal_trace_residual(hs: &HermitianStructure) -> Result<f64> {
    let pkg = analyze(hs)?;
    Ok(4.0 * (pkg.norm_eta2 - pkg.chi))
}

pub fn residual_report(hs: &HermitianStructure, pkg: &TorsionPackage) -> Result<ResidualReport> {
    let vf = volume_factor(hs);
    let q_f = torsion_residual_matrix(pkg);
    let q_g = gauduchon_residual_matrix(pkg)?;
    if !is_finite(&q_f) || !is_finite(&q_g) {
        return Err(GeometryError::NumericalFailure("non-finite residual".into()));
    }
    Ok(ResidualReport {
        f_value: vf * pkg.norm_t2,
        g_value: vf * pkg.norm_eta2,
        b: pkg.norm_t2,
        a: pkg.norm_eta2 / pkg.n as f64,
        trace_residual: 4.0 * (pkg.norm_eta2 - pkg.chi),
        norm_q_f: frobenius(&q_f),
        norm_q_g: frobenius(&q_g),
        q_f,
        q_g,
    })
}

/// Chern torsion components in the reference frame of `hs`.
pub fn torsion_in_reference_frame(hs: &HermitianStructure) -> Result<CTensor3> {
    let pkg = analyze(hs)?;
    let p_inv = inverse(&pkg.frame)?;
    Ok(pkg.t.change_frame(&p_inv, &pkg.frame))
}

/// Derivative of the reference-frame torsion along `H + t h`:
/// `Ṫ^j_{ik} = (h_{kℓ̄,i} − h_{iℓ̄,k}) g^{ℓ̄j}`, evaluated in the unitary frame
/// with Chern covariant derivatives and mapped back.
pub fn torsion_variation(hs: &HermitianStructure, h: &HermMat) -> Result<CTensor3> {
    check_dim(hs, h)?;
    let pkg = analyze(hs)?;
    let n = pkg.n;
    let hu = transform_metric(h.matrix(), &pkg.frame);
    let g = &pkg.gamma;
    // h_{kℓ̄,i} = −Σ_m Γ^m_{ki} h_{mℓ̄} + Σ_m Γ^ℓ_{mi} h_{km̄}
    let dh = |k: usize, l: usize, i: usize| -> Complex64 {
        (0..n).map(|m| -g[(m, k, i)] * hu[(m, l)] + g[(l, m, i)] * hu[(k, m)]).sum()
    };
    let tdot = CTensor3::from_fn(n, |j, i, k| dh(k, j, i) - dh(i, j, k));
    let p_inv = inverse(&pkg.frame)?;
    Ok(tdot.change_frame(&p_inv, &pkg.frame))
}

fn check_dim(hs: &HermitianStructure, h: &HermMat) -> Result<()> {
    if h.dim() != hs.dim() {
        return Err(GeometryError::DimensionMismatch {
            expected: hs.dim(),
            found: h.dim(),
        });
    }
    Ok(())
}

/// `d/dt F(H + t h)` at `t = 0`, equal to `−V^{1/n} tr(h̃ Q_F)` where `h̃ = Pᵀ h P̄`
/// is `h` in the unitary frame. The identity needs a compact quotient, so the
/// algebra must be unimodular.
pub fn first_variation(hs: &HermitianStructure, h: &HermMat) -> Result<f64> {
    check_dim(hs, h)?;
    let pkg = analyze(hs)?;
    Ok(first_variation_from(hs, &pkg, &torsion_residual_matrix(&pkg), h))
}

/// `−V^{1/n} tr(h̃ Q_G)`, the same pairing against the Gauduchon residual;
/// it reproduces `d/dt G(H + t h)` on unimodular algebras.
pub fn gauduchon_first_variation(hs: &HermitianStructure, h: &HermMat) -> Result<f64> {
    check_dim(hs, h)?;
    let pkg = analyze(hs)?;
    Ok(first_variation_from(hs, &pkg, &gauduchon_residual_matrix(&pkg)?, h))
}

pub(crate) fn first_variation_from(hs: &HermitianStructure, pkg: &TorsionPackage, q: &CMat, h: &HermMat) -> f64 {
    let hu = transform_metric(h.matrix(), &pkg.frame);
    -volume_factor(hs) * pairing(&hu, q)
}

/// Fourth-order central difference of `f` along `H + t h`:
/// `(−f(2s) + 8f(s) − 8f(−s) + f(−2s)) / 12s`.
pub fn fd_directional<F>(hs: &HermitianStructure, h: &HermMat, step: f64, f: F) -> Result<f64>
where
    F: Fn(&HermitianStructure) -> Result<f64>,
{
    let at = |t: f64| -> Result<f64> {
        let m = HermMat::new(hs.metric().matrix() + h.matrix().scale(t))?;
        f(&hs.with_metric(m)?)
    };
    let v = (-at(2.0 * step)? + 8.0 * at(step)? - 8.0 * at(-step)? + at(-2.0 * step)?) / (12.0 * step);
    if !v.is_finite() {
        return Err(GeometryError::NumericalFailure("finite difference is not finite".into()));
    }
    Ok(v)
}

/// Relative agreement with an absolute floor: `|x − y| ≤ max(rel·max(|x|,|y|), abs)`.
pub fn agrees(x: f64, y: f64, rel: f64, abs: f64) -> bool {
    (x - y).abs() <= (rel * x.abs().max(y.abs())).max(abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_hermitian::{catalog, StructureConstants};
    use crate::sampling;
    use crate::tensor_algebra::matrix::{c, max_abs};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn entry(name: &str) -> HermitianStructure {
        catalog::entry(name).unwrap()
    }

    fn diag(v: &[f64]) -> CMat {
        CMat::from_fn(v.len(), v.len(), |i, j| if i == j { c(v[i], 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn so3c_values() {
        let hs = entry("so3c");
        assert!((torsion_functional(&hs).unwrap() - 6.0).abs() <= 1e-14);
        assert_eq!(gauduchon_functional(&hs).unwrap(), 0.0);
        let (q, norm) = torsion_critical_residual(&hs).unwrap();
        assert!(norm <= 1e-14, "{q}");
        let hs2 = hs.with_metric(HermMat::identity(3).scaled(2.0).unwrap()).unwrap();
        assert!((torsion_functional(&hs2).unwrap() - 6.0).abs() <= 1e-13);
        assert_eq!(conformal_trace_residual(&hs).unwrap(), 0.0);
    }

    #[test]
    fn iwasawa_residual_by_hand() {
        // A = diag(1,1,0), B = diag(0,0,2), |T|² = 2, φ = ξ = 0:
        // Q_F = 2A − B − (2/3) I = diag(4/3, 4/3, −8/3)
        let (q, norm) = torsion_critical_residual(&entry("iwasawa")).unwrap();
        assert!(max_abs(&(&q - diag(&[4.0 / 3.0, 4.0 / 3.0, -8.0 / 3.0]))) <= 1e-14);
        assert!((norm - (96.0f64 / 9.0).sqrt()).abs() <= 1e-14);
        assert!((norm - 3.266).abs() < 1e-3);
    }

    #[test]
    fn kodaira_thurston_values() {
        let hs = entry("kodaira-thurston");
        assert!((gauduchon_functional(&hs).unwrap() - 1.0).abs() <= 1e-14);
        assert!(conformal_trace_residual(&hs).unwrap().abs() <= 1e-14);
        // dη = −φ1∧φ̄1, so √−1(∂η̄ − ∂̄η − η∧η̄) has matrix diag(2, −1) and a = 1/2
        let (q, _) = gauduchon_critical_residual(&hs).unwrap();
        assert!(max_abs(&(&q - diag(&[1.5, -1.5]))) <= 1e-14);
    }

    #[test]
    fn kahler_inputs_have_zero_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=4 {
            let hs = HermitianStructure::new(StructureConstants::abelian(n), sampling::random_positive_definite(&mut rng, n)).unwrap();
            let pkg = analyze(&hs).unwrap();
            let r = residual_report(&hs, &pkg).unwrap();
            assert_eq!(r.norm_q_f + r.norm_q_g + r.f_value + r.g_value, 0.0);
        }
    }

    #[test]
    fn balanced_inputs_have_zero_gauduchon_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for name in ["so3c", "iwasawa", "sokc-4"] {
            let sc = catalog::structure(name).unwrap();
            let n = sc.dim();
            // unitary changes of frame keep the identity metric balanced
            let u = sampling::random_unitary(&mut rng, n);
            let hs = HermitianStructure::with_identity(crate::lie_hermitian::frame_change(&sc, &u).unwrap());
            let (q, norm) = gauduchon_critical_residual(&hs).unwrap();
            assert!(norm <= 1e-12, "{name}: {q}");
        }
    }

    #[test]
    fn trace_of_q_f_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for k in 0..100 {
            let n = 1 + k % 4;
            let sc = sampling::random_structure(&mut rng, n);
            let hs = HermitianStructure::new(sc, sampling::random_positive_definite(&mut rng, n)).unwrap();
            let pkg = analyze(&hs).unwrap();
            let r = residual_report(&hs, &pkg).unwrap();
            let scale = 1.0 + pkg.norm_t2;
            assert!((r.q_f.trace().re - r.trace_residual).abs() <= 1e-10 * scale);
            assert!((r.trace_residual - conformal_trace_residual(&hs).unwrap()).abs() <= 1e-12 * scale);
            assert!(max_abs(&(&r.q_f - r.q_f.adjoint())) == 0.0);
            assert!(max_abs(&(&r.q_g - r.q_g.adjoint())) == 0.0);
        }
    }

    #[test]
    fn scale_invariance() {
        for name in ["abelian-3", "so3c", "sokc-4", "iwasawa", "kodaira-thurston"] {
            let hs = entry(name);
            let f0 = torsion_functional(&hs).unwrap();
            let g0 = gauduchon_functional(&hs).unwrap();
            for cval in [0.5, 2.0, 10.0] {
                let hc = hs.with_metric(hs.metric().scaled(cval).unwrap()).unwrap();
                assert!(agrees(torsion_functional(&hc).unwrap(), f0, 1e-10, 0.0), "{name}");
                assert!(agrees(gauduchon_functional(&hc).unwrap(), g0, 1e-10, 0.0), "{name}");
            }
        }
    }

    #[test]
    fn torsion_variation_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let mut cases: Vec<HermitianStructure> =
            ["abelian-3", "so3c", "iwasawa", "kodaira-thurston"].iter().map(|n| entry(n)).collect();
        for k in 0..6 {
            let n = 2 + k % 3;
            let sc = sampling::random_structure(&mut rng, n);
            cases.push(HermitianStructure::new(sc, sampling::random_positive_definite(&mut rng, n)).unwrap());
        }
        for hs in cases {
            let n = hs.dim();
            let h = sampling::random_hermitian(&mut rng, n);
            let analytic = torsion_variation(&hs, &h).unwrap();
            let step = FD_STEP;
            let plus = hs.with_metric(HermMat::new(hs.metric().matrix() + h.matrix().scale(step)).unwrap()).unwrap();
            let minus = hs.with_metric(HermMat::new(hs.metric().matrix() - h.matrix().scale(step)).unwrap()).unwrap();
            let fd = (&torsion_in_reference_frame(&plus).unwrap() - &torsion_in_reference_frame(&minus).unwrap())
                .scale(c(0.5 / step, 0.0));
            let err = (&fd - &analytic).max_abs();
            assert!(err <= 1e-6 * analytic.max_abs().max(1e-3), "err {err}, size {}", analytic.max_abs());
        }
    }

    #[test]
    fn torsion_variation_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let hs = entry("so3c");
        assert_eq!(torsion_variation(&hs, &HermMat::zeros(3)).unwrap().max_abs(), 0.0);
        let ab = HermitianStructure::new(StructureConstants::abelian(3), sampling::random_positive_definite(&mut rng, 3)).unwrap();
        assert_eq!(torsion_variation(&ab, &sampling::random_hermitian(&mut rng, 3)).unwrap().max_abs(), 0.0);
        // along H itself the metric scales: T_e(1+t) = T_e, since T^j_{ik} in a fixed frame is scale free
        let along = torsion_variation(&hs, hs.metric()).unwrap();
        assert!(along.max_abs() <= 1e-14);
    }

    #[test]
    fn first_variation_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for name in ["abelian-3", "so3c", "iwasawa", "kodaira-thurston", "sokc-4"] {
            let base = entry(name);
            let n = base.dim();
            for k in 0..8 {
                let hs = if k % 2 == 0 {
                    base.clone()
                } else {
                    base.with_metric(sampling::random_positive_definite(&mut rng, n)).unwrap()
                };
                let h = sampling::random_hermitian(&mut rng, n);
                let analytic = first_variation(&hs, &h).unwrap();
                let fd = fd_directional(&hs, &h, FD_STEP, torsion_functional).unwrap();
                assert!(agrees(analytic, fd, 1e-6, 1e-9), "{name}: {analytic} vs {fd}");
            }
        }
    }

    #[test]
    fn gauduchon_variation_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut cases: Vec<HermitianStructure> = ["abelian-3", "so3c", "iwasawa", "kodaira-thurston"].iter().map(|n| entry(n)).collect();
        for k in 0..12 {
            let n = 2 + k % 3;
            let sc = sampling::random_unimodular_structure(&mut rng, n);
            cases.push(HermitianStructure::new(sc, sampling::random_positive_definite(&mut rng, n)).unwrap());
        }
        for hs in cases {
            let h = sampling::random_hermitian(&mut rng, hs.dim());
            let analytic = gauduchon_first_variation(&hs, &h).unwrap();
            let fd = fd_directional(&hs, &h, FD_STEP, gauduchon_functional).unwrap();
            assert!(agrees(analytic, fd, 1e-6, 1e-9), "{analytic} vs {fd}");
            let analytic = first_variation(&hs, &h).unwrap();
            let fd = fd_directional(&hs, &h, FD_STEP, torsion_functional).unwrap();
            assert!(agrees(analytic, fd, 1e-6, 1e-9), "{analytic} vs {fd}");
        }
    }

    #[test]
    fn pairing_identities_need_unimodularity() {
        // on the LCK algebras (not unimodular) the pairing misses the boundary terms
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let hs = HermitianStructure::with_identity(sampling::random_lck_structure(&mut rng, 3));
        let h = sampling::random_hermitian(&mut rng, 3);
        let analytic = gauduchon_first_variation(&hs, &h).unwrap();
        let fd = fd_directional(&hs, &h, FD_STEP, gauduchon_functional).unwrap();
        assert!(!agrees(analytic, fd, 1e-3, 1e-6));
    }

    #[test]
    fn iwasawa_first_variation_sign() {
        // F(diag(1+t,1,1)) = 2 (1+t)^{-2/3}, so dF/dt = −4/3 = −Q_F[0][0]
        let hs = entry("iwasawa");
        let h = HermMat::from_real_diagonal(&[1.0, 0.0, 0.0]).unwrap();
        let v = first_variation(&hs, &h).unwrap();
        assert!((v + 4.0 / 3.0).abs() <= 1e-14);
        let fd = fd_directional(&hs, &h, FD_STEP, torsion_functional).unwrap();
        assert!(agrees(v, fd, 1e-6, 0.0));
    }

    #[test]
    fn so3c_is_critical_in_every_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let hs = entry("so3c");
        for _ in 0..5 {
            let h = sampling::random_hermitian(&mut rng, 3);
            assert!(first_variation(&hs, &h).unwrap().abs() <= 1e-13);
            assert!(fd_directional(&hs, &h, FD_STEP, torsion_functional).unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn first_variation_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let hs = entry("kodaira-thurston").with_metric(sampling::random_positive_definite(&mut rng, 2)).unwrap();
        let h1 = sampling::random_hermitian(&mut rng, 2);
        let h2 = sampling::random_hermitian(&mut rng, 2);
        let sum = HermMat::new(h1.matrix().scale(2.0) + h2.matrix()).unwrap();
        let lhs = first_variation(&hs, &sum).unwrap();
        let rhs = 2.0 * first_variation(&hs, &h1).unwrap() + first_variation(&hs, &h2).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12);
        assert_eq!(first_variation(&hs, &HermMat::zeros(2)).unwrap(), 0.0);
    }
}
