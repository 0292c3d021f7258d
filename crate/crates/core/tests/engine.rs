use gmrf_pathsum::engine::CovarianceOptions;
use gmrf_pathsum::graph::VertexSubset;
use gmrf_pathsum::{
    build_graph, build_scalar_graph, direct_inverse, full_covariance, full_covariance_with,
    mean_vector, models, BlockPartition, Error, PathSumEngine,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn relative(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_covariance_matches_direct_inverse(seed in any::<u64>(), n in 1usize..=8, density in 0.1f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = models::random_spd(&mut rng, n, density);
        let sigma = full_covariance(&model, &BlockPartition::singletons(n)).unwrap();
        prop_assert!(relative(&sigma, &direct_inverse(&model).unwrap()) <= 1e-10);
    }

    #[test]
    fn result_does_not_depend_on_the_partition(seed in any::<u64>(), n in 2usize..=9, blocks in 1usize..=4, density in 0.2f64..1.0) {
        prop_assume!(blocks <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, partition) = models::random_block_spd(&mut rng, n, blocks, density);
        let blocked = full_covariance(&model, &partition).unwrap();
        let scalar = full_covariance(&model, &BlockPartition::singletons(n)).unwrap();
        prop_assert!(relative(&blocked, &scalar) <= 1e-10);
    }

    #[test]
    fn covariance_is_symmetric_with_positive_definite_diagonal_blocks(seed in any::<u64>(), n in 2usize..=8, blocks in 1usize..=3) {
        prop_assume!(blocks <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, partition) = models::random_block_spd(&mut rng, n, blocks, 0.7);
        let graph = build_graph(&model, &partition).unwrap();
        let engine = PathSumEngine::new(&graph);
        for a in 0..blocks {
            let diag = engine.entry(a, a).unwrap().value;
            prop_assert!((&diag - diag.transpose()).norm() <= 1e-10 * diag.norm());
            prop_assert!(diag.clone().cholesky().is_some());
            for w in 0..blocks {
                let wa = engine.entry(a, w).unwrap().value;
                let aw = engine.entry(w, a).unwrap().value;
                prop_assert!((&wa - aw.transpose()).norm() <= 1e-10 * (1.0 + wa.norm()));
            }
        }
    }
}

#[test]
fn threads_give_bit_identical_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..10 {
        let model = models::random_spd(&mut rng, 9, 0.6);
        let p = BlockPartition::singletons(9);
        let serial = full_covariance_with(
            &model,
            &p,
            CovarianceOptions {
                threads: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let parallel = full_covariance_with(
            &model,
            &p,
            CovarianceOptions {
                threads: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(serial, parallel);
    }
}

#[test]
fn resolvents_of_deleted_subgraphs_match_submatrix_inverses() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = models::random_spd(&mut rng, 7, 0.7);
    let graph = build_scalar_graph(&model);
    let engine = PathSumEngine::new(&graph);
    let j = model.information();
    for mask in 0u32..(1 << 7) {
        let deleted: Vec<usize> = (0..7).filter(|v| mask & (1 << v) != 0).collect();
        let kept: Vec<usize> = (0..7).filter(|v| mask & (1 << v) == 0).collect();
        if kept.is_empty() {
            continue;
        }
        let sub = j.select_rows(&kept).select_columns(&kept);
        let inv = sub.try_inverse().unwrap();
        let set = VertexSubset::from_vertices(7, deleted);
        for (i, &v) in kept.iter().enumerate() {
            let g = engine.diagonal_entry(&set, v).unwrap().value[(0, 0)];
            assert!(
                (g - inv[(i, i)]).abs() <= 1e-12 * inv[(i, i)].abs(),
                "mask {mask:b}, vertex {v}"
            );
        }
    }
}

#[test]
fn disconnected_blocks_have_zero_covariance() {
    let model = models::from_edges(5, &[(0, 1), (2, 3), (3, 4)]);
    let graph = build_scalar_graph(&model);
    let engine = PathSumEngine::new(&graph);
    let r = engine.entry(0, 3).unwrap();
    assert_eq!(r.path_count, 0);
    assert_eq!(r.value[(0, 0)], 0.0);
}

#[test]
fn rank_deficient_models_are_singular() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 2..=7 {
        for rank in 1..n {
            let model = models::random_low_rank(&mut rng, n, rank);
            let err = full_covariance(&model, &BlockPartition::singletons(n)).unwrap_err();
            assert!(
                matches!(err, Error::Singular { .. }),
                "n={n} rank={rank}: {err}"
            );
        }
    }
}

#[test]
fn mean_is_covariance_times_potential() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let model = models::random_spd(&mut rng, 6, 0.5);
    let h = DVector::from_fn(6, |i, _| i as f64 - 2.5);
    let model = model.with_potential(h.clone()).unwrap();
    let mu = mean_vector(&model, &BlockPartition::contiguous(&[2, 4]).unwrap()).unwrap();
    let expected = direct_inverse(&model).unwrap() * h;
    assert!((mu - &expected).norm() <= 1e-10 * expected.norm());
}

#[test]
fn drop_tolerance_removes_weak_couplings() {
    let mut j = DMatrix::identity(3, 3) * 2.0;
    j[(0, 1)] = 1e-14;
    j[(1, 0)] = 1e-14;
    j[(1, 2)] = 0.5;
    j[(2, 1)] = 0.5;
    let model = gmrf_pathsum::InformationModel::new(j, None).unwrap();
    let p = BlockPartition::singletons(3);
    let sparse = full_covariance_with(
        &model,
        &p,
        CovarianceOptions {
            drop_tolerance: 1e-12,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(sparse[(0, 1)], 0.0);
    let dense = full_covariance(&model, &p).unwrap();
    assert!(dense[(0, 1)] != 0.0);
}

/// `(J_kept)^{-1}` at `v`, straight from a dense inverse of the surviving submatrix.
fn dense_resolvent(j: &DMatrix<f64>, n: usize, deleted: &[usize], v: usize) -> f64 {
    let kept: Vec<usize> = (0..n).filter(|u| !deleted.contains(u)).collect();
    let inv = j
        .select_rows(&kept)
        .select_columns(&kept)
        .try_inverse()
        .unwrap();
    let i = kept.iter().position(|&u| u == v).unwrap();
    inv[(i, i)]
}

/// Evaluates the cycle and path expansions term by term over explicitly
/// enumerated walks, with every resolvent taken from a dense inverse.
fn literal_expansion(
    model: &gmrf_pathsum::InformationModel,
    alpha: usize,
    omega: usize,
) -> (f64, usize) {
    let n = model.dim();
    let j = model.information();
    let graph = build_scalar_graph(model);
    let none = VertexSubset::empty(n);

    let mut cycle_sum = 0.0;
    for cycle in graph.simple_cycles(&none, alpha).unwrap() {
        let mu = &cycle.vertices;
        let l = mu.len();
        if l == 1 {
            cycle_sum += j[(alpha, alpha)];
            continue;
        }
        // J_{μ1 μℓ} ∏_{k=ℓ..2} G_k J_{μk μk-1}
        let mut term = j[(mu[0], mu[l - 1])];
        for k in (1..l).rev() {
            term *= dense_resolvent(j, n, &mu[..k], mu[k]) * j[(mu[k], mu[k - 1])];
        }
        cycle_sum += if (l + 1) % 2 == 0 { term } else { -term };
    }
    let sigma_aa = 1.0 / cycle_sum;
    if alpha == omega {
        return (sigma_aa, 1);
    }

    let mut total = 0.0;
    let mut count = 0;
    for path in graph.simple_paths(&none, alpha, omega).unwrap() {
        let nu = &path.vertices;
        let mut term = sigma_aa;
        for k in 1..nu.len() {
            term *= j[(nu[k], nu[k - 1])] * dense_resolvent(j, n, &nu[..k], nu[k]);
        }
        total += if path.len() % 2 == 0 { term } else { -term };
        count += 1;
    }
    (total, count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn memoized_sums_equal_the_literal_expansion(seed in any::<u64>(), n in 1usize..=7, density in 0.2f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = models::random_spd(&mut rng, n, density);
        let graph = build_scalar_graph(&model);
        let engine = PathSumEngine::new(&graph);
        for a in 0..n {
            for w in 0..n {
                let got = engine.entry(a, w).unwrap();
                let (expected, count) = literal_expansion(&model, a, w);
                prop_assert!((got.value[(0, 0)] - expected).abs() <= 1e-11 * (1.0 + expected.abs()));
                if graph.connected_component(&VertexSubset::empty(n), a).unwrap().contains(w) {
                    prop_assert_eq!(got.path_count, count);
                }
            }
        }
    }
}

#[test]
fn condition_estimates_separate_regular_from_singular_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let model = models::random_spd(&mut rng, 8, 0.7);
        let graph = build_scalar_graph(&model);
        let engine = PathSumEngine::new(&graph);
        for v in 0..8 {
            let c = engine
                .diagonal_entry(&VertexSubset::empty(8), v)
                .unwrap()
                .condition;
            assert!((1.0..1e8).contains(&c), "condition {c}");
        }
    }
}
