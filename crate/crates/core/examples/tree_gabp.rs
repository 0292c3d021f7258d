//! Belief propagation on a random tree compared with the path-sum engine.
//!
//! Run with `cargo run --example tree_gabp`.

use std::error::Error;

use gmrf_pathsum::graph::VertexSubset;
use gmrf_pathsum::{
    build_scalar_graph, direct_inverse, gabp_marginals, is_tree, models, PathSumEngine,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() -> Result<(), Box<dyn Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in [5, 10, 20, 30] {
        let model = models::random_tree_spd(&mut rng, n);
        let graph = build_scalar_graph(&model);
        assert!(is_tree(&graph));

        let table = gabp_marginals(&model)?;
        let engine = PathSumEngine::new(&graph);
        let oracle = direct_inverse(&model)?;
        let all = VertexSubset::empty(n);
        let mut worst: f64 = 0.0;
        let mut leaves = 0;
        for v in 0..n {
            let d = engine.diagonal_entry(&all, v)?;
            leaves += d.stats.leaf_count;
            let exact = oracle[(v, v)];
            worst = worst
                .max((table.variance(v) - exact).abs() / exact)
                .max((d.value[(0, 0)] - exact).abs() / exact);
        }
        println!(
            "n = {n:>2}: {} messages, max relative error {worst:.1e}, {leaves} leaf resolvents, {} memo entries",
            table.messages.len(),
            engine.cache_len()
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
