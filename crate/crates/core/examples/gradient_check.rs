//! Compares back-propagated gradients with central differences and shows the
//! error shrinking as the step size does.
//!
//! ```text
//! cargo run --release --example gradient_check
//! ```

use hri_sim::recognizer::{check_instance, gradient_check, gradient_check_many, numeric_gradient};

fn main() -> anyhow::Result<()> {
    let report = gradient_check_many(1, 20, 1e-5)?;
    println!("20 random networks: max relative error {:.3e}", report.max_relative_error);

    let (net, seq, label) = check_instance(4);
    println!("one network, {} parameters, {} steps", net.parameter_count(), seq.len());
    for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
        let r = gradient_check(&net, &seq, label, eps)?;
        println!("  epsilon {eps:.0e}: max relative error {:.3e}", r.max_relative_error);
    }
    // Central differences are second order: halving epsilon quarters the error.
    let coarse = numeric_gradient(&net, &seq, label, 2e-3)?;
    let fine = numeric_gradient(&net, &seq, label, 1e-3)?;
    let finest = numeric_gradient(&net, &seq, label, 5e-4)?;
    let d1: f64 = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let d2: f64 = fine.iter().zip(&finest).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("  successive differences {d1:.3e}, {d2:.3e}, ratio {:.2}", d1 / d2);
    Ok(())
}
