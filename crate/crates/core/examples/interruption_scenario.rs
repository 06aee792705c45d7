//! Plays a scenario script through a trained recognizer and prints the event
//! log, one line per event.
//!
//! ```text
//! cargo run --release --example interruption_scenario -- weights.json [script.txt]
//! ```

use hri_sim::interaction::{run_scenario, InteractionConfig};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let weights = args.next().ok_or_else(|| anyhow::anyhow!("usage: interruption_scenario <weights> [script]"))?;
    let script = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/circle_then_go_back.txt").to_string());

    let run = run_scenario(&script, &weights, InteractionConfig::default())?;
    for event in run.log.events() {
        println!("{:>8.3}s  {}", event.time, event.label());
    }
    let pose = run.state.executor().pose();
    println!("final pose x={:.3} y={:.3} heading={:.3}", pose.x, pose.y, pose.heading);
    Ok(())
}
