//! The raw metric functions on hand-built distributions.
//!
//! `cargo run --example metrics`

use cohortlens::metrics::{equitability, js_distance, shannon_entropy, MAX_JS_DISTANCE};
use cohortlens::table::Distribution;

fn main() -> cohortlens::Result<()> {
    let even = Distribution::from_probabilities(vec![0.5, 0.5])?;
    let skewed = Distribution::from_probabilities(vec![0.9, 0.1])?;
    println!("H(50/50) = {:.4} nats", shannon_entropy(&even).value());
    println!("E(50/50) = {:.1}%", equitability(&even, 2)?.percent());
    println!("E(90/10) = {:.1}%", equitability(&skewed, 2)?.percent());
    println!("JS(50/50, 90/10) = {:.4}", js_distance(&even, &skewed)?);

    let a = Distribution::from_probabilities(vec![1.0, 0.0])?;
    let b = Distribution::from_probabilities(vec![0.0, 1.0])?;
    println!(
        "JS(disjoint) = {:.6} (bound {MAX_JS_DISTANCE:.6})",
        js_distance(&a, &b)?
    );
    Ok(())
}
