use std::path::Path;

use thiserror::Error;

use super::{EventKind, EventLog, InteractionConfig, InteractionState};
use crate::executor::ExecutorMode;
use crate::gesture::{GestureStream, ScenarioError, ScenarioScript};
use crate::recognizer::{load_weights, IntentRecognizer, LstmRecognizer, WeightsError};
use crate::skeleton::SkeletonError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("weights: {0}")]
    Weights(#[from] WeightsError),
    #[error("frame synthesis: {0}")]
    Frame(#[from] SkeletonError),
}

#[derive(Debug)]
pub struct ScenarioRun<R> {
    pub log: EventLog,
    pub state: InteractionState<R>,
    /// Frames appended after the script so a running task could finish.
    pub drained_frames: usize,
}

/// Loads the script and weights (both before any tick runs) and plays the
/// scenario through the trained recognizer.
pub fn run_scenario(
    script_path: impl AsRef<Path>,
    weights_path: impl AsRef<Path>,
    config: InteractionConfig,
) -> Result<ScenarioRun<LstmRecognizer>, RunError> {
    let script = ScenarioScript::load(script_path)?;
    let net = load_weights(weights_path)?;
    let recognizer = LstmRecognizer { net, stride: config.stride };
    run_script(&script, recognizer, config)
}

/// Plays `script` frame by frame. Each gesture is queued on the stream at
/// its start frame. If a task is still running when the script ends, idle
/// frames are appended until it stops, up to `drain_limit_seconds`.
pub fn run_script<R: IntentRecognizer>(
    script: &ScenarioScript,
    recognizer: R,
    config: InteractionConfig,
) -> Result<ScenarioRun<R>, RunError> {
    let rate = config.frame_rate();
    let starts = script.start_frames(rate)?;
    let total = script.total_frames(rate)?;
    let drain_cap = (config.drain_limit_seconds.max(0.0) * rate).round() as usize;
    let mut stream = GestureStream::new(config.stream.clone());
    let mut state = InteractionState::new(recognizer, config);
    state.record(EventKind::ScenarioStarted { frames: total, frame_rate: rate });

    let mut next = starts.iter().zip(&script.events).peekable();
    for k in 0..total {
        while let Some((_, e)) = next.next_if(|(s, _)| **s == k) {
            stream.perform(e.kind);
        }
        let frame = stream.next_frame()?;
        state.tick(&frame);
    }
    let mut drained = 0;
    while drained < drain_cap && (busy(&state) || !stream.is_quiet()) {
        let frame = stream.next_frame()?;
        state.tick(&frame);
        drained += 1;
    }
    if busy(&state) {
        state.record(EventKind::Warning {
            text: format!("task still running after a {drained}-frame tail"),
        });
    }
    state.record(EventKind::ScenarioFinished { frames: total + drained });
    let log = state.log().clone();
    Ok(ScenarioRun { log, state, drained_frames: drained })
}

fn busy<R: IntentRecognizer>(state: &InteractionState<R>) -> bool {
    matches!(state.executor().mode(), ExecutorMode::Running(_))
        || state.collector().is_active()
        || state.pending_intents() > 0
}
