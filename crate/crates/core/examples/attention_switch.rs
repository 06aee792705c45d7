//! Feeds a synthesized raise / lower / gesture stream through the attention
//! switch and recording collector and prints every transition.
//!
//! ```text
//! cargo run --example attention_switch
//! ```

use hri_sim::gesture::{GestureKind, GestureStream, StreamConfig};
use hri_sim::switch::{switch_step, RecordingCollector, SwitchConfig, SwitchEvent, SwitchState};

fn main() -> anyhow::Result<()> {
    let mut stream = GestureStream::new(StreamConfig::default());
    // A right-hand wave first: it must not open the switch.
    for kind in [
        GestureKind::WaveRightHand,
        GestureKind::RaiseLeftHand,
        GestureKind::LowerLeftHand,
        GestureKind::Salute,
        GestureKind::Idle,
    ] {
        stream.perform(kind);
    }
    let cfg = SwitchConfig::default();
    let mut state = SwitchState::default();
    let mut collector = RecordingCollector::new(stream.config().frame_rate);
    while !stream.is_quiet() {
        let frame = stream.next_frame()?;
        let (next, event) = switch_step(state, &frame, &cfg);
        if next.stage != state.stage {
            println!("{:>7.3}s  {:?} -> {:?} ({event:?})", frame.timestamp(), state.stage, next.stage);
        }
        state = next;
        if event == SwitchEvent::RecordingStarted {
            collector.activate();
        }
        if !collector.is_active() {
            continue;
        }
        if let Some(window) = collector.collect_step(&frame)? {
            println!(
                "{:>7.3}s  recorded {} frames ({:.2} s)",
                frame.timestamp(),
                window.len(),
                window.nominal_duration()
            );
            state = state.reset();
        }
    }
    println!("final stage {:?}", state.stage);
    Ok(())
}
