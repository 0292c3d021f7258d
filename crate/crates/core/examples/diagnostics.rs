//! Walk-summability and definiteness diagnostics.
//!
//! Run with `cargo run --example diagnostics`.

use std::error::Error;

use gmrf_pathsum::{diagnose, models};

pub fn run() -> Result<(), Box<dyn Error>> {
    println!("   r   rho(|R|)  walk-summable  PD     lambda_min");
    for step in -6..=6 {
        let r = f64::from(step) / 10.0;
        let d = diagnose(&models::cycle_c5(r));
        println!(
            "{r:>5.1}  {:>8.4}  {:>13}  {:<5}  {:>9.5}",
            d.spectral_radius_abs_r,
            d.is_walk_summable,
            d.is_positive_definite,
            d.min_eigenvalue_estimate
        );
    }

    println!("\nthin membrane:");
    for (a, b) in [(0.25, 0.25), (0.5, 1.0), (1.0, 1.0), (2.0, 0.5)] {
        let d = diagnose(&models::thin_membrane(a, b));
        let closed = (a + 5.0 * b - 1.0_f64).abs() + 19f64.sqrt() * b + b;
        println!(
            "  a={a:<4} b={b:<4} rho = {:.10} (closed form {closed:.10})",
            d.spectral_radius_abs_r
        );
    }
    println!(
        "\n{}",
        serde_json::to_string_pretty(&diagnose(&models::thin_membrane(1.0, 1.0)))?
    );
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
