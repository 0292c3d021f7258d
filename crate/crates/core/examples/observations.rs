//! Conditioning a prior on noisy linear observations, then reading off the
//! posterior mean and marginal variances by path-sums.
//!
//! Run with `cargo run --example observations`.

use std::error::Error;

use gmrf_pathsum::{
    absorb_observations, direct_inverse, full_covariance, mean_vector, models, BlockPartition,
};
use nalgebra::{DMatrix, DVector};

pub fn run() -> Result<(), Box<dyn Error>> {
    // A chain of six variables observed at both ends and in the middle.
    let prior = models::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
    let mut c = DMatrix::zeros(3, 6);
    c[(0, 0)] = 1.0;
    c[(1, 2)] = 1.0;
    c[(1, 3)] = 1.0;
    c[(2, 5)] = 1.0;
    let noise = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 0.2, 0.1]));
    let y = DVector::from_vec(vec![1.0, -0.5, 2.0]);

    let posterior = absorb_observations(&prior, &c, &noise, &y)?;
    let partition = BlockPartition::singletons(6);
    let sigma = full_covariance(&posterior, &partition)?;
    let mean = mean_vector(&posterior, &partition)?;
    let oracle = direct_inverse(&posterior)?;

    println!("var  mean        variance   (direct)");
    for i in 0..6 {
        println!(
            "x{}   {:>9.5}   {:>8.5}   ({:.5})",
            i + 1,
            mean[i],
            sigma[(i, i)],
            oracle[(i, i)]
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
