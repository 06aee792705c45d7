//! The recognizer gets the first gesture wrong. The user can recover in three
//! ways: a higher-priority gesture, a stop, or repeating the wrong one.
//!
//! ```text
//! cargo run --example misunderstanding_recovery
//! ```

use hri_sim::gesture::ScenarioScript;
use hri_sim::interaction::{run_script, InteractionConfig, MisclassifyFirst, ScriptedRecognizer};
use hri_sim::ActivityClass;

const PREFIX: &str = "at 0 perform raise_left_hand\nat 1.5 perform lower_left_hand\nat 1.8 perform wave_backwards\n\
    at 7 perform raise_left_hand\nat 8.5 perform lower_left_hand\nat 8.9 perform ";

fn main() -> anyhow::Result<()> {
    for (follow_up, class) in [
        ("wave_forwards", ActivityClass::WaveForwards),
        ("stretch_right_hand", ActivityClass::StretchRightHand),
        ("draw_circle", ActivityClass::DrawCircle),
    ] {
        let script = ScenarioScript::parse(&format!("{PREFIX}{follow_up}\nat 20 end\n"))?;
        // The user meant wave_backwards; the robot hears draw_circle.
        let rec = MisclassifyFirst::new(ScriptedRecognizer::new([ActivityClass::WaveBackwards, class]), ActivityClass::DrawCircle);
        let cfg = InteractionConfig { drain_limit_seconds: 300.0, ..InteractionConfig::default() };
        let run = run_script(&script, rec, cfg)?;
        println!("follow-up {follow_up}:");
        for e in run.log.events().iter().filter(|e| !e.kind.is_marker()) {
            println!("  {:>7.3}s  {}", e.time, e.label());
        }
        println!("  ends {}", run.state.executor().mode().name());
    }
    Ok(())
}
