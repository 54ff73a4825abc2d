use hermitian_torsion::classifiers::{classify, DEFAULT_TOL};
use hermitian_torsion::functionals::{gauduchon_functional, residual_report, torsion_functional};
use hermitian_torsion::lie_hermitian::{frame_change, transform_metric};
use hermitian_torsion::optimizer::{minimize, Objective, OptimConfig};
use hermitian_torsion::{analyze, sampling, HermMat, HermitianStructure};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
}

fn random_hs(seed: u64, n: usize) -> HermitianStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sc = sampling::random_structure(&mut rng, n);
    let h = sampling::random_positive_definite(&mut rng, n);
    HermitianStructure::new(sc, h).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn scalars_do_not_depend_on_the_frame(seed in any::<u64>(), n in 2usize..=4) {
        let hs = random_hs(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let p = sampling::random_invertible(&mut rng, n);
        let moved = frame_change(hs.structure(), &p);
        prop_assume!(moved.is_ok());
        let h = HermMat::new(transform_metric(hs.metric().matrix(), &p)).unwrap();
        let other = HermitianStructure::new(moved.unwrap(), h).unwrap();
        let (a, b) = (analyze(&hs).unwrap(), analyze(&other).unwrap());
        prop_assert!(close(a.norm_t2, b.norm_t2, 1e-8));
        prop_assert!(close(a.norm_eta2, b.norm_eta2, 1e-8));
        prop_assert!(close(a.chi, b.chi, 1e-8));
    }

    #[test]
    fn unitary_frame_is_a_fixed_point(seed in any::<u64>(), n in 2usize..=4) {
        let hs = random_hs(seed, n);
        let a = analyze(&hs).unwrap();
        let b = analyze(&HermitianStructure::with_identity(a.sc_unitary.clone())).unwrap();
        prop_assert!(close(a.norm_t2, b.norm_t2, 1e-10));
        prop_assert!(close(a.norm_eta2, b.norm_eta2, 1e-10));
    }

    #[test]
    fn functionals_are_scale_free(seed in any::<u64>(), n in 2usize..=4, c in 0.1f64..10.0) {
        let hs = random_hs(seed, n);
        let scaled = hs.with_metric(hs.metric().scaled(c).unwrap()).unwrap();
        let f = torsion_functional(&hs).unwrap();
        prop_assert!(close(f, torsion_functional(&scaled).unwrap(), 1e-10));
        prop_assert!(close(gauduchon_functional(&hs).unwrap(), gauduchon_functional(&scaled).unwrap(), 1e-10 * (1.0 + f)));
        let (p, q) = (analyze(&hs).unwrap(), analyze(&scaled).unwrap());
        let (x, y) = (classify(&p, &hs, DEFAULT_TOL).unwrap(), classify(&q, &scaled, DEFAULT_TOL).unwrap());
        prop_assert_eq!(x.kahler.holds, y.kahler.holds);
        prop_assert_eq!(x.balanced.holds, y.balanced.holds);
    }

    #[test]
    fn residual_trace_identity(seed in any::<u64>(), n in 2usize..=4) {
        let hs = random_hs(seed, n);
        let pkg = analyze(&hs).unwrap();
        let r = residual_report(&hs, &pkg).unwrap();
        prop_assert!((r.q_f.trace().re - r.trace_residual).abs() <= 1e-9 * (1.0 + pkg.norm_t2));
        let asym = (&r.q_f - r.q_f.adjoint()).norm();
        prop_assert!(asym <= 1e-10 * (1.0 + r.norm_q_f));
    }
}

#[test]
fn descent_keeps_volume_and_decreases() {
    for seed in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hs = HermitianStructure::with_identity(sampling::random_unimodular_structure(&mut rng, 2));
        for objective in [Objective::TorsionFunctional, Objective::GauduchonFunctional] {
            let cfg = OptimConfig {
                max_iter: 15,
                ..OptimConfig::with_objective(objective)
            };
            let tr = minimize(&hs, &cfg).unwrap();
            assert!(tr.is_monotone(), "seed {seed}");
            assert!(tr.records.iter().all(|r| (r.det - 1.0).abs() <= 1e-8), "seed {seed}");
            assert!(tr.final_objective() <= tr.records[0].objective);
        }
    }
}
