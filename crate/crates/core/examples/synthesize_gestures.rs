//! Renders every gesture, reports how much of it satisfies its pose
//! predicate, and optionally writes one window as a text skeleton stream.
//!
//! ```text
//! cargo run --example synthesize_gestures -- [draw_circle out.txt]
//! ```

use std::fs::File;
use std::io::BufWriter;

use hri_sim::gesture::{in_active_phase, synthesize, GestureKind, SynthesisSpec};
use hri_sim::skeleton::{write_stream, JointId};

fn main() -> anyhow::Result<()> {
    for kind in GestureKind::ALL {
        let spec = SynthesisSpec { noise_stddev: 0.01, seed: 3, ..SynthesisSpec::new(kind) };
        let window = synthesize(&spec)?;
        let frames = window.frames();
        let active = frames.iter().filter(|f| in_active_phase(kind, f.timestamp())).count();
        let holds = frames
            .iter()
            .filter(|f| in_active_phase(kind, f.timestamp()) && kind.predicate_holds(f))
            .count();
        let wrist = frames.last().unwrap().joint(JointId::RightWrist);
        println!(
            "{:<20} {:>4} frames  predicate {holds}/{active} active frames  last right wrist ({:+.2}, {:+.2}, {:+.2})",
            kind.name(),
            frames.len(),
            wrist.x,
            wrist.y,
            wrist.z
        );
    }

    let mut args = std::env::args().skip(1);
    if let (Some(name), Some(path)) = (args.next(), args.next()) {
        let kind: GestureKind = serde_json::from_value(serde_json::Value::String(name))?;
        let window = synthesize(&SynthesisSpec::new(kind))?;
        write_stream(BufWriter::new(File::create(&path)?), &window)?;
        println!("wrote {} frames to {path}", window.len());
    }
    Ok(())
}
