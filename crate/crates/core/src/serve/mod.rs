//! The live session behind the operator console.
//!
//! [`LiveSession`] is the synchronous core: it owns the gesture stream and the
//! interaction state, applies client commands, and renders snapshots.
//! [`server`] runs it at paced real time behind a WebSocket endpoint. The
//! message schema lives in `docs/protocol.md` and `docs/snapshot.schema.json`.

pub mod server;

pub use server::{serve, spawn, ServeConfig, ServerHandle};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::activity::ActivityClass;
use crate::executor::{ExecutorMode, Pose2, RobotResponse};
use crate::gesture::{GestureKind, GestureStream};
use crate::interaction::{Event, InteractionConfig, InteractionState};
use crate::recognizer::IntentRecognizer;
use crate::skeleton::SkeletonError;
use crate::switch::SwitchStage;

pub const PROTOCOL_VERSION: u32 = 1;
/// Events carried by each snapshot.
pub const SNAPSHOT_EVENTS: usize = 50;
/// Ticks between snapshots (10 Hz at 30 Hz).
pub const DEFAULT_SNAPSHOT_EVERY: u64 = 3;
/// Events kept in the live log.
pub const LIVE_LOG_CAPACITY: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Command {
    Perform { gesture: GestureKind },
    SetConfig { key: String, value: Value },
    Reset,
}

/// A client message: `{"v":1,"id":3,"type":"perform","gesture":"draw_circle"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientMessage {
    pub v: u32,
    pub id: u64,
    #[serde(flatten)]
    pub command: Command,
}

impl ClientMessage {
    pub fn new(id: u64, command: Command) -> Self {
        ClientMessage { v: PROTOCOL_VERSION, id, command }
    }

    /// Parses and checks the version; failures carry the id when one could
    /// be read.
    pub fn parse(text: &str) -> Result<Self, (Option<u64>, String)> {
        let value: Value = serde_json::from_str(text).map_err(|e| (None, format!("invalid JSON: {e}")))?;
        let id = value.get("id").and_then(Value::as_u64);
        match value.get("v").and_then(Value::as_u64) {
            Some(v) if v == PROTOCOL_VERSION as u64 => {}
            Some(v) => return Err((id, format!("unsupported protocol version {v}"))),
            None => return Err((id, "missing protocol version `v`".into())),
        }
        serde_json::from_value(value).map_err(|e| (id, format!("invalid message: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchView {
    pub stage: SwitchStage,
    pub flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectorView {
    pub active: bool,
    pub fill_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskView {
    pub response: RobotResponse,
    pub progress: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutorView {
    /// `idle`, `running` or `paused`.
    pub mode: String,
    pub task: Option<TaskView>,
    pub arm_pose: Option<String>,
    pub pose: Pose2,
    pub suspended: Option<TaskView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentView {
    pub class: ActivityClass,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub tick: u64,
    pub switch: SwitchView,
    pub collector: CollectorView,
    pub executor: ExecutorView,
    pub intent: Option<IntentView>,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerBody {
    Snapshot(Snapshot),
    Ack { id: u64 },
    Error { id: Option<u64>, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServerMessage {
    pub v: u32,
    #[serde(flatten)]
    pub body: ServerBody,
}

impl ServerMessage {
    pub fn new(body: ServerBody) -> Self {
        ServerMessage { v: PROTOCOL_VERSION, body }
    }

    pub fn ack(id: u64) -> Self {
        Self::new(ServerBody::Ack { id })
    }

    pub fn error(id: Option<u64>, message: impl Into<String>) -> Self {
        Self::new(ServerBody::Error { id, message: message.into() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages always serialize")
    }
}

fn task_view(bp: &crate::executor::Breakpoint) -> TaskView {
    TaskView { response: bp.response(), progress: bp.progress() }
}

/// One interaction session driven by queued gestures instead of a script.
pub struct LiveSession<R> {
    state: InteractionState<R>,
    stream: GestureStream,
}

impl<R: IntentRecognizer> LiveSession<R> {
    pub fn new(recognizer: R, mut config: InteractionConfig) -> Self {
        if config.log_capacity.is_none() {
            config.log_capacity = Some(LIVE_LOG_CAPACITY);
        }
        LiveSession {
            stream: GestureStream::new(config.stream.clone()),
            state: InteractionState::new(recognizer, config),
        }
    }

    pub fn state(&self) -> &InteractionState<R> {
        &self.state
    }

    pub fn stream(&self) -> &GestureStream {
        &self.stream
    }

    /// Applies one command; the reply is an ack or an error for the same id.
    pub fn handle(&mut self, msg: &ClientMessage) -> ServerMessage {
        match self.apply(&msg.command) {
            Ok(()) => ServerMessage::ack(msg.id),
            Err(e) => ServerMessage::error(Some(msg.id), e),
        }
    }

    fn apply(&mut self, command: &Command) -> Result<(), String> {
        match command {
            Command::Perform { gesture } => {
                self.stream.perform(*gesture);
                Ok(())
            }
            Command::Reset => {
                self.state.reset();
                self.stream = GestureStream::new(self.state.config().stream.clone());
                Ok(())
            }
            Command::SetConfig { key, value } => {
                let text = match value {
                    Value::String(s) => s.clone(),
                    Value::Number(_) | Value::Bool(_) => value.to_string(),
                    _ => return Err(format!("value for `{key}` must be a string, number or boolean")),
                };
                let mut cfg = self.state.config().executor.clone();
                cfg.set(key, &text)?;
                self.state.set_executor_config(cfg);
                Ok(())
            }
        }
    }

    /// Synthesizes the next frame and runs one tick.
    pub fn step(&mut self) -> Result<Vec<Event>, SkeletonError> {
        let frame = self.stream.next_frame()?;
        Ok(self.state.tick(&frame))
    }

    pub fn snapshot(&self) -> Snapshot {
        let s = &self.state;
        let ex = s.executor();
        Snapshot {
            time: s.clock(),
            tick: s.ticks(),
            switch: SwitchView { stage: s.switch().stage, flag: s.switch().flag },
            collector: CollectorView {
                active: s.collector().is_active(),
                fill_fraction: s.collector().fill_fraction(),
            },
            executor: ExecutorView {
                mode: ex.mode().name().to_string(),
                task: ex.mode().task().map(task_view),
                arm_pose: match ex.mode() {
                    ExecutorMode::Idle => None,
                    m => m.task().and_then(|b| b.arm_pose()).map(str::to_string),
                },
                pose: ex.pose(),
                suspended: ex.suspended().map(task_view),
            },
            intent: s.last_intent().map(|i| IntentView { class: i.class, confidence: i.confidence }),
            events: s.log().last(SNAPSHOT_EVENTS).to_vec(),
        }
    }

    pub fn snapshot_message(&self) -> ServerMessage {
        ServerMessage::new(ServerBody::Snapshot(self.snapshot()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gesture::ScenarioScript;
    use crate::interaction::{run_script, ScriptedRecognizer};

    fn session(answers: &[ActivityClass]) -> LiveSession<ScriptedRecognizer> {
        LiveSession::new(ScriptedRecognizer::new(answers.iter().copied()), InteractionConfig::default())
    }

    #[test]
    fn client_message_wire_form() {
        let m = ClientMessage::new(3, Command::Perform { gesture: GestureKind::DrawCircle });
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"v":1,"id":3,"type":"perform","gesture":"draw_circle"}"#);
        assert_eq!(ClientMessage::parse(&text).unwrap(), m);
        let reset = ClientMessage::parse(r#"{"v":1,"id":4,"type":"reset"}"#).unwrap();
        assert_eq!(reset.command, Command::Reset);
    }

    #[test]
    fn malformed_messages_are_errors_with_ids() {
        assert_eq!(ClientMessage::parse("{").unwrap_err().0, None);
        assert_eq!(ClientMessage::parse(r#"{"v":2,"id":9,"type":"reset"}"#).unwrap_err().0, Some(9));
        assert_eq!(ClientMessage::parse(r#"{"id":9,"type":"reset"}"#).unwrap_err().0, Some(9));
        let (id, msg) = ClientMessage::parse(r#"{"v":1,"id":5,"type":"perform","gesture":"fly"}"#).unwrap_err();
        assert_eq!(id, Some(5));
        assert!(msg.contains("invalid message"));
        assert!(ClientMessage::parse(r#"{"v":1,"id":5,"type":"jump"}"#).is_err());
    }

    #[test]
    fn set_config_validates() {
        let mut s = session(&[]);
        let ok = ClientMessage::new(1, Command::SetConfig { key: "circling".into(), value: Value::from(7) });
        assert_eq!(s.handle(&ok), ServerMessage::ack(1));
        assert_eq!(s.state().executor().config().priority(RobotResponse::Circling), 7);
        let bad = ClientMessage::new(2, Command::SetConfig { key: "warp".into(), value: Value::from(1) });
        assert!(matches!(s.handle(&bad).body, ServerBody::Error { id: Some(2), .. }));
        let flag = ClientMessage::new(3, Command::SetConfig { key: "auto_resume_suspended".into(), value: Value::from(true) });
        assert_eq!(s.handle(&flag), ServerMessage::ack(3));
        assert!(s.state().executor().config().auto_resume_suspended);
    }

    #[test]
    fn snapshot_round_trips() {
        let mut s = session(&[ActivityClass::DrawCircle]);
        s.handle(&ClientMessage::new(1, Command::Perform { gesture: GestureKind::RaiseLeftHand }));
        s.handle(&ClientMessage::new(2, Command::Perform { gesture: GestureKind::LowerLeftHand }));
        for _ in 0..200 {
            s.step().unwrap();
        }
        let msg = s.snapshot_message();
        let text = msg.to_json();
        let back: ServerMessage = serde_json::from_str(&text).unwrap();
        assert_eq!(back, msg);
        let ServerBody::Snapshot(snap) = back.body else { panic!() };
        assert_eq!(snap.executor.mode, "running");
        assert_eq!(snap.executor.task.unwrap().response, RobotResponse::Circling);
        assert_eq!(snap.intent.unwrap().class, ActivityClass::DrawCircle);
    }

    #[test]
    fn reset_contract() {
        let mut s = session(&[ActivityClass::DrawCircle]);
        s.handle(&ClientMessage::new(1, Command::Perform { gesture: GestureKind::RaiseLeftHand }));
        for _ in 0..40 {
            s.step().unwrap();
        }
        assert_eq!(s.snapshot().switch.stage, SwitchStage::LeftRaised);
        s.handle(&ClientMessage::new(2, Command::Reset));
        let snap = s.snapshot();
        assert_eq!(snap.switch.stage, SwitchStage::ArmsDown);
        assert_eq!(snap.executor.mode, "idle");
        assert!(snap.events.is_empty());
        assert_eq!(snap.tick, 0);
    }

    #[test]
    fn live_timeline_matches_scenario_runner() {
        let script = ScenarioScript::parse(
            "at 1 perform raise_left_hand\nat 2 perform lower_left_hand\nat 2.3 perform draw_circle\n\
             at 10 perform raise_left_hand\nat 11 perform lower_left_hand\nat 11.3 perform wave_forwards\nat 20 end\n",
        )
        .unwrap();
        let answers = [ActivityClass::DrawCircle, ActivityClass::WaveForwards];
        let cfg = InteractionConfig::default();
        let offline = run_script(&script, ScriptedRecognizer::new(answers), cfg.clone()).unwrap();
        assert!(offline.drained_frames > 0);

        let mut live = LiveSession::new(ScriptedRecognizer::new(answers), cfg);
        let starts = script.start_frames(30.0).unwrap();
        let total = script.total_frames(30.0).unwrap() + offline.drained_frames;
        for k in 0..total {
            for (s, e) in starts.iter().zip(&script.events) {
                if *s == k {
                    live.handle(&ClientMessage::new(k as u64, Command::Perform { gesture: e.kind }));
                }
            }
            live.step().unwrap();
        }
        let strip = |evs: &[Event]| evs.iter().filter(|e| !e.kind.is_marker()).cloned().collect::<Vec<_>>();
        assert_eq!(strip(live.state().log().events()), strip(offline.log.events()));
    }
}
