//! Scenario scripts: timed gesture events rendered into one continuous stream.
//!
//! ```text
//! # comment
//! at 1.0 perform raise_left_hand
//! at 2.0 perform lower_left_hand
//! at 2.3 perform draw_circle
//! at 60 end
//! ```
//!
//! The optional `at <seconds> end` line fixes the stream length; without it
//! the stream stops one second after the last event.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::{GestureKind, GestureStream, StreamConfig};
use crate::skeleton::{FrameWindow, SkeletonError};

const DEFAULT_TAIL: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioEvent {
    pub start: f64,
    pub kind: GestureKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioScript {
    pub events: Vec<ScenarioEvent>,
    pub end: Option<f64>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("events {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("events {0} and {1} are out of time order")]
    Unordered(usize, usize),
    #[error("event {0} has an invalid start time")]
    BadStart(usize),
    #[error("end time {end} precedes the end of event {index}")]
    EndTooEarly { end: f64, index: usize },
    #[error("frame rate must be positive")]
    FrameRate,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
}

impl ScenarioScript {
    pub fn new(events: Vec<ScenarioEvent>) -> Self {
        ScenarioScript { events, end: None }
    }

    pub fn with_end(mut self, end: f64) -> Self {
        self.end = Some(end);
        self
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut script = ScenarioScript::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| ScenarioError::Parse { line, message };
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let start = match tokens.as_slice() {
                ["at", t, ..] => t
                    .parse::<f64>()
                    .ok()
                    .filter(|t| t.is_finite() && *t >= 0.0)
                    .ok_or_else(|| err(format!("bad time `{t}`")))?,
                _ => return Err(err("expected `at <seconds> ...`".into())),
            };
            match &tokens[2..] {
                ["perform", name] => {
                    let kind = name.parse::<GestureKind>().map_err(err)?;
                    script.events.push(ScenarioEvent { start, kind });
                }
                ["end"] => {
                    if script.end.is_some() {
                        return Err(err("duplicate `end`".into()));
                    }
                    script.end = Some(start);
                }
                _ => return Err(err("expected `perform <gesture>` or `end`".into())),
            }
        }
        Ok(script)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            let _ = writeln!(out, "at {} perform {}", e.start, e.kind);
        }
        if let Some(end) = self.end {
            let _ = writeln!(out, "at {end} end");
        }
        out
    }

    /// Frame index at which each event begins, after validation.
    pub fn start_frames(&self, frame_rate: f64) -> Result<Vec<usize>, ScenarioError> {
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(ScenarioError::FrameRate);
        }
        let frames = |s: f64| (s * frame_rate).round() as usize;
        for (i, e) in self.events.iter().enumerate() {
            if !(e.start.is_finite() && e.start >= 0.0) {
                return Err(ScenarioError::BadStart(i));
            }
        }
        let starts: Vec<usize> = self.events.iter().map(|e| frames(e.start)).collect();
        for i in 1..starts.len() {
            if self.events[i].start < self.events[i - 1].start {
                return Err(ScenarioError::Unordered(i - 1, i));
            }
            let prev_end = starts[i - 1] + event_frames(self.events[i - 1].kind, frame_rate);
            if prev_end > starts[i] {
                return Err(ScenarioError::Overlap(i - 1, i));
            }
        }
        if let (Some(end), Some(last)) = (self.end, starts.len().checked_sub(1)) {
            let last_end = starts[last] + event_frames(self.events[last].kind, frame_rate);
            if frames(end) < last_end {
                return Err(ScenarioError::EndTooEarly { end, index: last });
            }
        }
        Ok(starts)
    }

    /// Total frames in the compiled stream.
    pub fn total_frames(&self, frame_rate: f64) -> Result<usize, ScenarioError> {
        let starts = self.start_frames(frame_rate)?;
        Ok(match self.end {
            Some(end) => (end * frame_rate).round() as usize,
            None => match (starts.last(), self.events.last()) {
                (Some(s), Some(e)) => {
                    s + event_frames(e.kind, frame_rate) + (DEFAULT_TAIL * frame_rate).round() as usize
                }
                _ => (DEFAULT_TAIL * frame_rate).round() as usize,
            },
        })
    }
}

fn event_frames(kind: GestureKind, frame_rate: f64) -> usize {
    ((kind.default_duration() * frame_rate).round() as usize).max(1)
}

/// Renders the script as one stream: idle filler with each gesture inserted at
/// its start frame.
pub fn compile_scenario(
    script: &ScenarioScript,
    config: &StreamConfig,
) -> Result<FrameWindow, ScenarioError> {
    let starts = script.start_frames(config.frame_rate)?;
    let total = script.total_frames(config.frame_rate)?;
    let mut stream = GestureStream::new(config.clone());
    let mut next = starts.iter().zip(&script.events).peekable();
    let mut frames = Vec::with_capacity(total);
    for k in 0..total {
        while let Some((_, e)) = next.next_if(|(s, _)| **s == k) {
            stream.perform(e.kind);
        }
        frames.push(stream.next_frame()?);
    }
    Ok(FrameWindow::new(frames, config.frame_rate)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::switch::hand_flags;

    #[test]
    fn empty_script_is_idle_filler() {
        let script = ScenarioScript::default().with_end(10.0);
        let w = compile_scenario(&script, &StreamConfig::default()).unwrap();
        assert_eq!(w.len(), 300);
        assert!(w.frames().iter().all(|f| GestureKind::Idle.predicate_holds(f)));
    }

    #[test]
    fn raise_then_lower_flips_the_left_flag() {
        let script = ScenarioScript::parse(
            "at 1 perform raise_left_hand\nat 3 perform lower_left_hand\nat 5 end\n",
        )
        .unwrap();
        let w = compile_scenario(&script, &StreamConfig::default()).unwrap();
        let bits: Vec<bool> = w.frames().iter().map(|f| hand_flags(f).0).collect();
        let mut runs: Vec<bool> = Vec::new();
        for b in bits {
            if runs.last() != Some(&b) {
                runs.push(b);
            }
        }
        assert_eq!(runs, vec![false, true, false]);
    }

    #[test]
    fn overlapping_events_name_both_indices() {
        let script = ScenarioScript::parse("at 0 perform draw_circle\nat 1 perform salute\n").unwrap();
        assert!(matches!(
            compile_scenario(&script, &StreamConfig::default()),
            Err(ScenarioError::Overlap(0, 1))
        ));
        let script = ScenarioScript::parse("at 5 perform idle\nat 1 perform idle\n").unwrap();
        assert!(matches!(
            script.start_frames(30.0),
            Err(ScenarioError::Unordered(0, 1))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = ScenarioScript::parse("# header\nat 1 perform jump\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2, .. }), "{err}");
        let err = ScenarioScript::parse("perform idle").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 1, .. }));
        let err = ScenarioScript::parse("at -1 perform idle").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 1, .. }));
    }

    #[test]
    fn text_round_trip() {
        let text = "at 1 perform raise_left_hand\nat 2.5 perform lower_left_hand\nat 2.8 perform wave_forwards\nat 20 end\n";
        let script = ScenarioScript::parse(text).unwrap();
        assert_eq!(script.to_text(), text);
    }

    #[test]
    fn default_tail_without_end() {
        let script = ScenarioScript::parse("at 1 perform salute").unwrap();
        assert_eq!(script.total_frames(30.0).unwrap(), 30 + 105 + 30);
    }
}
