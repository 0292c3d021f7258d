//! Covariances of the 5-cycle on both sides of the walk-summability boundary.
//!
//! Run with `cargo run --example cycle_c5`.

use std::error::Error;

use gmrf_pathsum::graph::VertexSubset;
use gmrf_pathsum::{build_scalar_graph, diagnose, direct_inverse, models, PathSumEngine};

pub fn run() -> Result<(), Box<dyn Error>> {
    for r in [0.3, 0.6] {
        let model = models::cycle_c5(r);
        let graph = build_scalar_graph(&model);
        let engine = PathSumEngine::new(&graph);
        let report = diagnose(&model);
        println!(
            "r = {r}: rho(|R|) = {:.3}, walk-summable = {}, positive definite = {}",
            report.spectral_radius_abs_r, report.is_walk_summable, report.is_positive_definite
        );

        let oracle = direct_inverse(&model)?;
        for omega in 0..3 {
            let e = engine.entry(0, omega)?;
            println!(
                "  Sigma[{},1] = {:>10.5}   (direct {:>10.5}, {} paths, depth {})",
                omega + 1,
                e.value[(0, 0)],
                oracle[(omega, 0)],
                e.path_count,
                e.max_depth
            );
        }

        // The continued fraction unrolls through resolvents of shrinking subgraphs.
        let mut deleted = VertexSubset::empty(5);
        for v in 0..5 {
            let g = engine.diagonal_entry(&deleted, v)?;
            println!(
                "  resolvent of vertex {} with {:?} deleted = {:.6}",
                v + 1,
                deleted.iter().map(|d| d + 1).collect::<Vec<_>>(),
                g.value[(0, 0)]
            );
            deleted.insert(v);
        }
        println!("  memo entries: {}", engine.cache_len());
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
