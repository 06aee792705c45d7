//! The left-hand attention switch and the post-trigger recording collector.
//!
//! Stages: `ArmsDown` (flag false) → left wrist raised above the torso →
//! `LeftRaised` (flag true) → left wrist lowered again → `Triggered`, which
//! starts a 3.5 s recording. The switch ignores the right arm entirely and is
//! inert while a recording is in progress.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::skeleton::{FrameWindow, JointId, SkeletonError, SkeletonFrame, RECORDING_SECONDS};

pub const DEFAULT_HYSTERESIS: f64 = 0.05;
pub const DEFAULT_DEBOUNCE_FRAMES: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwitchStage {
    ArmsDown,
    LeftRaised,
    Triggered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchEvent {
    None,
    AttentionGained,
    RecordingStarted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchConfig {
    /// Band around torso height inside which the wrist counts as neither
    /// raised nor lowered.
    pub hysteresis: f64,
    /// Consecutive raised frames needed before attention is gained.
    pub debounce_frames: u32,
}

impl Default for SwitchConfig {
    fn default() -> Self {
        SwitchConfig {
            hysteresis: DEFAULT_HYSTERESIS,
            debounce_frames: DEFAULT_DEBOUNCE_FRAMES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwitchState {
    pub stage: SwitchStage,
    pub flag: bool,
    raised_run: u32,
}

impl Default for SwitchState {
    fn default() -> Self {
        SwitchState {
            stage: SwitchStage::ArmsDown,
            flag: false,
            raised_run: 0,
        }
    }
}

impl SwitchState {
    /// Back to `ArmsDown` once the recording window has been consumed.
    pub fn reset(self) -> Self {
        SwitchState::default()
    }
}

/// `(left_raised, right_raised)` with the default hysteresis.
pub fn hand_flags(frame: &SkeletonFrame) -> (bool, bool) {
    hand_flags_with(frame, DEFAULT_HYSTERESIS)
}

pub fn hand_flags_with(frame: &SkeletonFrame, hysteresis: f64) -> (bool, bool) {
    let torso = frame.joint(JointId::Torso).y;
    (
        frame.joint(JointId::LeftWrist).y < torso - hysteresis,
        frame.joint(JointId::RightWrist).y < torso - hysteresis,
    )
}

fn left_lowered(frame: &SkeletonFrame, hysteresis: f64) -> bool {
    frame.joint(JointId::LeftWrist).y > frame.joint(JointId::Torso).y + hysteresis
}

pub fn switch_step(
    state: SwitchState,
    frame: &SkeletonFrame,
    config: &SwitchConfig,
) -> (SwitchState, SwitchEvent) {
    let (left_raised, _) = hand_flags_with(frame, config.hysteresis);
    match state.stage {
        SwitchStage::ArmsDown => {
            let run = if left_raised { state.raised_run + 1 } else { 0 };
            if run >= config.debounce_frames.max(1) {
                let next = SwitchState {
                    stage: SwitchStage::LeftRaised,
                    flag: true,
                    raised_run: 0,
                };
                (next, SwitchEvent::AttentionGained)
            } else {
                (SwitchState { raised_run: run, ..state }, SwitchEvent::None)
            }
        }
        SwitchStage::LeftRaised if left_lowered(frame, config.hysteresis) => {
            let next = SwitchState {
                stage: SwitchStage::Triggered,
                flag: true,
                raised_run: 0,
            };
            (next, SwitchEvent::RecordingStarted)
        }
        SwitchStage::LeftRaised | SwitchStage::Triggered => (state, SwitchEvent::None),
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CollectorError {
    #[error("collector is not active")]
    Inactive,
    #[error(transparent)]
    Window(#[from] SkeletonError),
}

/// Buffers exactly `target_frames` frames after a trigger.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordingCollector {
    active: bool,
    buffer: Vec<SkeletonFrame>,
    target_frames: usize,
    frame_rate: f64,
}

impl RecordingCollector {
    pub fn new(frame_rate: f64) -> Self {
        Self::with_target(frame_rate, (RECORDING_SECONDS * frame_rate).round() as usize)
    }

    pub fn with_target(frame_rate: f64, target_frames: usize) -> Self {
        RecordingCollector {
            active: false,
            buffer: Vec::with_capacity(target_frames),
            target_frames: target_frames.max(1),
            frame_rate,
        }
    }

    pub fn activate(&mut self) {
        self.active = true;
        self.buffer.clear();
    }

    pub fn deactivate(&mut self) {
        self.active = false;
        self.buffer.clear();
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn target_frames(&self) -> usize {
        self.target_frames
    }

    pub fn fill_fraction(&self) -> f64 {
        self.buffer.len() as f64 / self.target_frames as f64
    }

    /// Appends a frame; returns the finished window on the frame that fills it.
    pub fn collect_step(
        &mut self,
        frame: &SkeletonFrame,
    ) -> Result<Option<FrameWindow>, CollectorError> {
        if !self.active {
            return Err(CollectorError::Inactive);
        }
        self.buffer.push(frame.clone());
        if self.buffer.len() < self.target_frames {
            return Ok(None);
        }
        self.active = false;
        let frames = std::mem::replace(&mut self.buffer, Vec::with_capacity(self.target_frames));
        Ok(Some(FrameWindow::new(frames, self.frame_rate)?))
    }
}
