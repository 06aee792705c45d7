//! Event records and their line-delimited JSON form:
//!
//! ```text
//! {"time":1.2,"kind":"TaskStarted","detail":{"response":"circling",...}}
//! ```
//!
//! Field order is fixed by the type definitions, so equal logs serialize to
//! identical bytes.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::activity::ActivityClass;
use crate::executor::{InterruptDecision, Pose2, RobotResponse};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail")]
pub enum EventKind {
    ScenarioStarted { frames: usize, frame_rate: f64 },
    AttentionGained {},
    RecordingStarted {},
    RecordingCompleted { frames: usize },
    IntentRecognized { class: ActivityClass, confidence: f64 },
    TaskStarted {
        response: RobotResponse,
        priority: u32,
        pose: Pose2,
        /// The task whose breakpoint moved into the suspended slot.
        preempted: Option<RobotResponse>,
    },
    TaskPaused { response: RobotResponse, progress: f64, remaining: f64, pose: Pose2 },
    TaskResumed {
        response: RobotResponse,
        progress: f64,
        pose: Pose2,
        /// `None` for an automatic restart from the suspended slot.
        decision: Option<InterruptDecision>,
    },
    TaskCompleted { response: RobotResponse, pose: Pose2 },
    TaskRejected { response: RobotResponse, current: RobotResponse },
    Stopped { forgotten: Option<RobotResponse> },
    Warning { text: String },
    ScenarioFinished { frames: usize },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::ScenarioStarted { .. } => "ScenarioStarted",
            EventKind::AttentionGained {} => "AttentionGained",
            EventKind::RecordingStarted {} => "RecordingStarted",
            EventKind::RecordingCompleted { .. } => "RecordingCompleted",
            EventKind::IntentRecognized { .. } => "IntentRecognized",
            EventKind::TaskStarted { .. } => "TaskStarted",
            EventKind::TaskPaused { .. } => "TaskPaused",
            EventKind::TaskResumed { .. } => "TaskResumed",
            EventKind::TaskCompleted { .. } => "TaskCompleted",
            EventKind::TaskRejected { .. } => "TaskRejected",
            EventKind::Stopped { .. } => "Stopped",
            EventKind::Warning { .. } => "Warning",
            EventKind::ScenarioFinished { .. } => "ScenarioFinished",
        }
    }

    /// The response a task event refers to.
    pub fn response(&self) -> Option<RobotResponse> {
        match self {
            EventKind::TaskStarted { response, .. }
            | EventKind::TaskPaused { response, .. }
            | EventKind::TaskResumed { response, .. }
            | EventKind::TaskCompleted { response, .. }
            | EventKind::TaskRejected { response, .. } => Some(*response),
            _ => None,
        }
    }

    pub fn is_marker(&self) -> bool {
        matches!(self, EventKind::ScenarioStarted { .. } | EventKind::ScenarioFinished { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Simulated seconds.
    pub time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl Event {
    pub fn new(time: f64, kind: EventKind) -> Self {
        Event { time, kind }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("events always serialize")
    }

    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }

    /// `Kind(detail)` shorthand for logs and assertions, e.g.
    /// `TaskStarted(circling)`.
    pub fn label(&self) -> String {
        match &self.kind {
            EventKind::IntentRecognized { class, .. } => format!("IntentRecognized({class})"),
            EventKind::Warning { text } => format!("Warning({text})"),
            k => match k.response() {
                Some(r) => format!("{}({r})", k.name()),
                None => k.name().to_string(),
            },
        }
    }
}

/// Append-only, time-ordered events. With a capacity, the oldest entries are
/// dropped first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    events: Vec<Event>,
    capacity: Option<usize>,
    dropped: usize,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity_limit(capacity: usize) -> Self {
        EventLog {
            events: Vec::new(),
            capacity: Some(capacity.max(1)),
            dropped: 0,
        }
    }

    pub fn push(&mut self, event: Event) {
        debug_assert!(self.events.last().is_none_or(|e| e.time <= event.time), "log must be time-ordered");
        if let Some(cap) = self.capacity {
            if self.events.len() >= cap {
                let excess = self.events.len() + 1 - cap;
                self.events.drain(..excess);
                self.dropped += excess;
            }
        }
        self.events.push(event);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events evicted by the capacity limit.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn clear(&mut self) {
        self.events.clear();
        self.dropped = 0;
    }

    pub fn last(&self, n: usize) -> &[Event] {
        &self.events[self.events.len().saturating_sub(n)..]
    }

    pub fn labels(&self) -> Vec<String> {
        self.events.iter().map(Event::label).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_line());
            out.push('\n');
        }
        out
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.events {
            writeln!(w, "{}", e.to_line())?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> io::Result<Self> {
        let mut log = EventLog::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            log.push(Event::from_line(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?);
        }
        Ok(log)
    }
}

impl<'a> IntoIterator for &'a EventLog {
    type Item = &'a Event;
    type IntoIter = std::slice::Iter<'a, Event>;
    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}
