//! Covariance entries from path weights and principal-minor determinants.
//!
//! Run with `cargo run --example determinant_route`.

use std::error::Error;

use gmrf_pathsum::{
    determinant_formula_entry, direct_inverse, full_covariance, models, BlockPartition,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() -> Result<(), Box<dyn Error>> {
    let c5 = models::cycle_c5(0.3);
    let singletons = BlockPartition::singletons(5);
    println!(
        "C5 r=0.3: Sigma[2,1] = {:.5}",
        determinant_formula_entry(&c5, &singletons, 0, 1)?
    );

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model = models::random_spd(&mut rng, 7, 0.6);
    let partition = BlockPartition::singletons(7);
    let oracle = direct_inverse(&model)?;
    let pathsum = full_covariance(&model, &partition)?;
    let mut worst: f64 = 0.0;
    for alpha in 0..7 {
        for omega in 0..7 {
            let v = determinant_formula_entry(&model, &partition, alpha, omega)?;
            worst = worst.max((v - pathsum[(omega, alpha)]).abs() / oracle.norm());
        }
    }
    println!("random 7x7: determinant route vs path-sum, max relative deviation {worst:.1e}");

    let blocks = BlockPartition::contiguous(&[3, 4])?;
    match determinant_formula_entry(&model, &blocks, 0, 1) {
        Err(e) => println!("block partition: {e}"),
        Ok(_) => unreachable!("the determinant route is scalar only"),
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
