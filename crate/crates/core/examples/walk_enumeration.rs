//! Listing the simple paths and simple cycles that the expansion sums over.
//!
//! Run with `cargo run --example walk_enumeration`.

use std::error::Error;

use gmrf_pathsum::graph::VertexSubset;
use gmrf_pathsum::{build_scalar_graph, models};

fn one_based(vs: &[usize]) -> Vec<usize> {
    vs.iter().map(|v| v + 1).collect()
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = models::cycle_c5(0.3);
    let graph = build_scalar_graph(&model);
    let none = VertexSubset::empty(5);

    println!("simple cycles rooted at 1:");
    for c in graph.simple_cycles(&none, 0)? {
        println!("  length {}: {:?}", c.len(), one_based(&c.vertices));
    }
    println!("simple paths from 1 to 3:");
    for p in graph.simple_paths(&none, 0, 2)? {
        println!("  length {}: {:?}", p.len(), one_based(&p.vertices));
    }

    let deleted = VertexSubset::from_vertices(5, [0]);
    println!("simple cycles rooted at 2 with vertex 1 deleted:");
    for c in graph.simple_cycles(&deleted, 1)? {
        println!("  length {}: {:?}", c.len(), one_based(&c.vertices));
    }
    println!(
        "component of 3 with vertex 1 deleted: {:?}",
        one_based(&graph.connected_component(&deleted, 2)?.to_vec())
    );
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
