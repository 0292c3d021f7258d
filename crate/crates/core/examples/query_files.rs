//! Writing a model to Matrix Market, reloading it and running queries, the
//! same path taken by the `pathsum` binary.
//!
//! Run with `cargo run --example query_files`.

use std::error::Error;
use std::fs::File;

use gmrf_pathsum::cli::{render_table, run_queries, Method, Query, QuerySpec};
use gmrf_pathsum::io::write_matrix_market;
use gmrf_pathsum::models;

pub fn run() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join(format!("gmrf-pathsum-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("membrane.mtx");
    write_matrix_market(&models::thin_membrane(1.0, 1.0), File::create(&path)?)?;

    let mut spec = QuerySpec::new(&path, Method::Pathsum);
    spec.partition = Some(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
    spec.queries = vec![
        Query::Diag { alpha: 1 },
        Query::Entry { alpha: 1, omega: 2 },
    ];
    spec.verify = true;
    spec.diagnose = true;
    let report = run_queries(&spec)?;
    print!("{}", render_table(&report));
    println!("{}", serde_json::to_string(&report.diagnostics)?);

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
