//! Trains the activity classifier on a synthetic corpus and reports held-out
//! accuracy with a confusion matrix.
//!
//! ```text
//! cargo run --release --example train_recognizer -- [per_class] [out.json]
//! ```

use std::time::Instant;

use hri_sim::gesture::{build_dataset, DatasetSpec};
use hri_sim::recognizer::{evaluate, save_weights, train, TrainConfig};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let per_class: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let out = args.next();

    let train_set = build_dataset(&DatasetSpec::all_activities(per_class, 0.01, 1))?;
    let held_out = build_dataset(&DatasetSpec::all_activities(per_class, 0.01, 2))?;
    let config = TrainConfig::default();

    let started = Instant::now();
    let model = train(&train_set, &config)?;
    let elapsed = started.elapsed();
    for (epoch, (loss, acc)) in model.epoch_losses.iter().zip(&model.epoch_accuracy).enumerate() {
        println!("epoch {epoch:>3}  loss {loss:.5}  train accuracy {:.1}%", acc * 100.0);
    }
    println!("trained on {} samples in {:.1?}", train_set.len(), elapsed);

    let confusion = evaluate(&model.network, &held_out)?;
    println!("held-out accuracy {:.2}%", confusion.accuracy() * 100.0);
    print!("{confusion}");

    if let Some(path) = out {
        save_weights(&model.network, &path)?;
        println!("weights written to {path}");
    }
    Ok(())
}
