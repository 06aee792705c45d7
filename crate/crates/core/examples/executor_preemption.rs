//! Drives the task executor directly: start, pause, preempt, reject, resume,
//! with the breakpoint and suspended slot printed at each step.
//!
//! ```text
//! cargo run --example executor_preemption
//! ```

use hri_sim::executor::{intent_to_command, Command, ExecutorConfig, ExecutorState};
use hri_sim::ActivityClass;

const DT: f64 = 1.0 / 30.0;

fn run_for(ex: &mut ExecutorState, seconds: f64) -> anyhow::Result<()> {
    for _ in 0..(seconds / DT).round() as usize {
        if let Some(done) = ex.task_step(DT)?.completed {
            println!("    completed {}", done);
            break;
        }
    }
    Ok(())
}

fn show(ex: &ExecutorState, what: &str) {
    let p = ex.pose();
    let task = ex
        .mode()
        .task()
        .map(|b| format!("{} {:.1}%", b.response(), b.progress() * 100.0))
        .unwrap_or_else(|| "-".into());
    let slot = ex.suspended().map(|b| b.response().to_string()).unwrap_or_else(|| "-".into());
    println!("{what:<32} {:<8} {task:<28} slot {slot:<10} pose ({:+.3}, {:+.3})", ex.mode().name(), p.x, p.y);
}

fn main() -> anyhow::Result<()> {
    let cfg = ExecutorConfig::default();
    let mut ex = ExecutorState::new(cfg.clone());

    let Command::Task(circle) = intent_to_command(ActivityClass::DrawCircle, &cfg) else { unreachable!() };
    ex.start(circle)?;
    show(&ex, "draw_circle from idle");
    run_for(&mut ex, 4.0)?;
    ex.pause_current();
    show(&ex, "paused after 4 s");

    let d = ex.apply_intent(intent_to_command(ActivityClass::WaveForwards, &cfg))?;
    show(&ex, &format!("wave_forwards: {d:?}"));
    run_for(&mut ex, 7.5)?;
    ex.pause_current();
    show(&ex, "paused after 7.5 s");

    let d = ex.apply_intent(intent_to_command(ActivityClass::DrawCircle, &cfg))?;
    show(&ex, &format!("draw_circle: {d:?}"));
    run_for(&mut ex, 5.0)?;
    ex.pause_current();
    show(&ex, "paused once more");

    let d = ex.apply_intent(intent_to_command(ActivityClass::StretchRightHand, &cfg))?;
    show(&ex, &format!("stretch_right_hand: {d:?}"));
    Ok(())
}
