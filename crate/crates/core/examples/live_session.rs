//! Runs the serve-side session in process: queue gestures as a client would
//! and print the snapshot JSON once per simulated second.
//!
//! ```text
//! cargo run --example live_session
//! ```

use hri_sim::gesture::GestureKind;
use hri_sim::interaction::{InteractionConfig, ScriptedRecognizer};
use hri_sim::serve::{ClientMessage, Command, LiveSession};
use hri_sim::ActivityClass;

fn main() -> anyhow::Result<()> {
    let mut session = LiveSession::new(ScriptedRecognizer::new([ActivityClass::Salute]), InteractionConfig::default());
    for (id, g) in [GestureKind::RaiseLeftHand, GestureKind::LowerLeftHand, GestureKind::Salute].into_iter().enumerate() {
        let reply = session.handle(&ClientMessage::new(id as u64, Command::Perform { gesture: g }));
        println!("{}", reply.to_json());
    }
    for tick in 1..=300 {
        session.step()?;
        if tick % 30 == 0 {
            let mut snap = session.snapshot();
            // Only the newest event, to keep the output short.
            let keep = snap.events.len().saturating_sub(1);
            snap.events.drain(..keep);
            println!("{}", serde_json::to_string(&snap)?);
        }
    }
    Ok(())
}
