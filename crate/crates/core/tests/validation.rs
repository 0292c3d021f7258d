use gmrf_pathsum::validation::{check_positive_definite, log_determinant, Definiteness};
use gmrf_pathsum::{
    determinant_formula_entry, diagnose, direct_inverse, models, BlockPartition, Error,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn cycle_walk_summability_grid() {
    for step in -6..=6 {
        let r = f64::from(step) / 10.0;
        let d = diagnose(&models::cycle_c5(r));
        assert!(d.converged);
        assert!(
            (d.spectral_radius_abs_r - 2.0 * r.abs()).abs() <= 1e-9,
            "r={r}"
        );
        assert_eq!(d.is_walk_summable, r.abs() < 0.5 - 1e-12, "r={r}");
        // eigenvalues of the 5-cycle are 1 + 2r cos(2 pi k / 5)
        let lambda_min = (0..5)
            .map(|k| 1.0 + 2.0 * r * (2.0 * std::f64::consts::PI * f64::from(k) / 5.0).cos())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(d.is_positive_definite, lambda_min > 1e-12, "r={r}");
        assert!(
            (d.min_eigenvalue_estimate - lambda_min).abs() <= 1e-6,
            "r={r}"
        );
    }
}

#[test]
fn membrane_spectral_radius_closed_form() {
    for a in [0.25, 0.5, 1.0, 2.0] {
        for b in [0.25, 0.5, 1.0, 2.0] {
            let d = diagnose(&models::thin_membrane(a, b));
            let closed = (a + 5.0 * b - 1.0_f64).abs() + 19f64.sqrt() * b + b;
            assert!(
                (d.spectral_radius_abs_r - closed).abs() <= 1e-8,
                "a={a} b={b}"
            );
        }
    }
}

#[test]
fn log_determinant_matches_dense_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..8 {
        let m = models::random_spd(&mut rng, n, 0.8).information().clone();
        let indefinite = &m - DMatrix::identity(n, n) * 3.0;
        for x in [m, indefinite] {
            let det = x.determinant();
            let (ln, sign) = log_determinant(&x);
            assert_eq!(sign, det.signum());
            assert!((ln.exp() - det.abs()).abs() <= 1e-10 * det.abs());
        }
    }
}

#[test]
fn definiteness_classification() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    assert_eq!(
        check_positive_definite(&models::random_spd(&mut rng, 5, 0.5)),
        Definiteness::PositiveDefinite
    );
    assert_eq!(
        check_positive_definite(&models::random_low_rank(&mut rng, 5, 3)),
        Definiteness::Singular
    );
    assert_eq!(
        check_positive_definite(&models::cycle_c5(-0.6)),
        Definiteness::Indefinite
    );
}

#[test]
fn determinant_route_needs_singletons() {
    let model = models::thin_membrane(1.0, 1.0);
    let err =
        determinant_formula_entry(&model, &models::thin_membrane_partition(), 0, 1).unwrap_err();
    assert!(matches!(err, Error::UnsupportedPartition(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn determinant_route_matches_direct_inverse(seed in any::<u64>(), n in 1usize..=7, density in 0.1f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = models::random_spd(&mut rng, n, density);
        let oracle = direct_inverse(&model).unwrap();
        let p = BlockPartition::singletons(n);
        for a in 0..n {
            for w in 0..n {
                let v = determinant_formula_entry(&model, &p, a, w).unwrap();
                prop_assert!((v - oracle[(w, a)]).abs() <= 1e-9 * oracle.norm());
            }
        }
    }

    #[test]
    fn walk_summable_implies_positive_definite(seed in any::<u64>(), n in 1usize..=8, density in 0.1f64..1.0, shrink in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut j = models::random_spd(&mut rng, n, density).information().clone();
        for i in 0..n {
            j[(i, i)] -= shrink;
        }
        let d = diagnose(&gmrf_pathsum::InformationModel::new(j, None).unwrap());
        prop_assert!(!d.is_walk_summable || d.is_positive_definite);
        prop_assert!(d.spectral_radius_abs_r >= 0.0);
    }

    #[test]
    fn direct_inverse_residual_is_small(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = models::random_spd(&mut rng, n, 0.6);
        let sigma = direct_inverse(&model).unwrap();
        let residual = model.information() * sigma - DMatrix::identity(n, n);
        prop_assert!(residual.amax() <= 1e-10 * n as f64);
    }
}
