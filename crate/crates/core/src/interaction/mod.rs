//! The tick pipeline: switch → recorder → recognizer → executor.
//!
//! One tick processes one frame, in this order:
//!
//! 1. The switch sees the frame, even while a task runs. Gaining attention
//!    pauses a running task.
//! 2. On `RecordingStarted` the collector is armed; an armed collector takes
//!    the frame. The frame that fills it completes the recording, resets the
//!    switch and runs the recognizer.
//! 3. A recognized intent is routed: a paused task goes through the
//!    interruption decision, an idle executor starts the task (or logs the
//!    stop), and a running executor rejects it with a warning.
//! 4. The executor advances by one frame period.
//!
//! Events of tick `k` carry time `k / rate`; `TaskCompleted` (and an
//! automatic resume) carry the end of the step, `(k + 1) / rate`.

mod event;
mod runner;

pub use event::{Event, EventKind, EventLog};
pub use runner::{run_scenario, run_script, RunError, ScenarioRun};

use std::collections::VecDeque;

use crate::activity::ActivityClass;
use crate::executor::{Command, ExecutorConfig, ExecutorMode, ExecutorState, InterruptDecision};
use crate::gesture::StreamConfig;
use crate::recognizer::{ActivityIntent, IntentRecognizer, RecognizerError};
use crate::skeleton::{FrameWindow, SkeletonFrame, DEFAULT_STRIDE};
use crate::switch::{switch_step, RecordingCollector, SwitchConfig, SwitchEvent, SwitchState};

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionConfig {
    /// Frame rate, noise and subject placement of synthesized streams.
    pub stream: StreamConfig,
    pub stride: usize,
    pub switch: SwitchConfig,
    pub executor: ExecutorConfig,
    /// Ticks between a completed recording and its intent taking effect.
    pub recognition_latency_ticks: u32,
    /// Longest idle tail the scenario runner appends while a task still runs.
    pub drain_limit_seconds: f64,
    /// Keep at most this many events in memory.
    pub log_capacity: Option<usize>,
}

impl Default for InteractionConfig {
    fn default() -> Self {
        InteractionConfig {
            stream: StreamConfig::default(),
            stride: DEFAULT_STRIDE,
            switch: SwitchConfig::default(),
            executor: ExecutorConfig::default(),
            recognition_latency_ticks: 0,
            drain_limit_seconds: 600.0,
            log_capacity: None,
        }
    }
}

impl InteractionConfig {
    pub fn frame_rate(&self) -> f64 {
        self.stream.frame_rate
    }
}

/// Everything one interaction session owns.
#[derive(Debug, Clone)]
pub struct InteractionState<R> {
    switch: SwitchState,
    collector: RecordingCollector,
    executor: ExecutorState,
    recognizer: R,
    config: InteractionConfig,
    tick: u64,
    pending: VecDeque<(u64, ActivityIntent)>,
    last_intent: Option<ActivityIntent>,
    log: EventLog,
}

impl<R: IntentRecognizer> InteractionState<R> {
    pub fn new(recognizer: R, config: InteractionConfig) -> Self {
        let log = match config.log_capacity {
            Some(cap) => EventLog::with_capacity_limit(cap),
            None => EventLog::new(),
        };
        InteractionState {
            switch: SwitchState::default(),
            collector: RecordingCollector::new(config.frame_rate()),
            executor: ExecutorState::new(config.executor.clone()),
            recognizer,
            config,
            tick: 0,
            pending: VecDeque::new(),
            last_intent: None,
            log,
        }
    }

    pub fn switch(&self) -> &SwitchState {
        &self.switch
    }

    pub fn collector(&self) -> &RecordingCollector {
        &self.collector
    }

    pub fn executor(&self) -> &ExecutorState {
        &self.executor
    }

    pub fn executor_mut(&mut self) -> &mut ExecutorState {
        &mut self.executor
    }

    pub fn recognizer(&self) -> &R {
        &self.recognizer
    }

    pub fn config(&self) -> &InteractionConfig {
        &self.config
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn last_intent(&self) -> Option<&ActivityIntent> {
        self.last_intent.as_ref()
    }

    /// Frames processed so far.
    pub fn ticks(&self) -> u64 {
        self.tick
    }

    /// Simulated time of the next tick.
    pub fn clock(&self) -> f64 {
        self.tick as f64 / self.config.frame_rate()
    }

    /// Intents recognized but not yet routed (latency injection).
    pub fn pending_intents(&self) -> usize {
        self.pending.len()
    }

    pub fn into_parts(self) -> (R, EventLog) {
        (self.recognizer, self.log)
    }

    /// Appends a marker or externally produced event.
    pub fn record(&mut self, kind: EventKind) {
        let time = self.clock();
        self.log.push(Event::new(time, kind));
    }

    /// Back to the initial state; the recognizer and config are kept.
    pub fn reset(&mut self) {
        self.switch = SwitchState::default();
        self.collector = RecordingCollector::new(self.config.frame_rate());
        self.executor = ExecutorState::new(self.config.executor.clone());
        self.tick = 0;
        self.pending.clear();
        self.last_intent = None;
        self.log.clear();
    }

    /// Replaces the executor settings; the running task keeps its spec.
    pub fn set_executor_config(&mut self, config: ExecutorConfig) {
        *self.executor.config_mut() = config.clone();
        self.config.executor = config;
    }

    /// Processes one frame and returns the events it produced (also appended
    /// to the log).
    pub fn tick(&mut self, frame: &SkeletonFrame) -> Vec<Event> {
        let dt = 1.0 / self.config.frame_rate();
        let now = self.clock();
        let mut out = Vec::new();
        let emit = |out: &mut Vec<Event>, time: f64, kind: EventKind| out.push(Event::new(time, kind));

        // 1. attention
        let (next, ev) = switch_step(self.switch, frame, &self.config.switch);
        self.switch = next;
        match ev {
            SwitchEvent::AttentionGained => {
                emit(&mut out, now, EventKind::AttentionGained {});
                if matches!(self.executor.mode(), ExecutorMode::Running(_)) {
                    let pose = self.executor.pose();
                    if let Some(bp) = self.executor.pause_current() {
                        emit(
                            &mut out,
                            now,
                            EventKind::TaskPaused {
                                response: bp.response(),
                                progress: bp.progress(),
                                remaining: bp.remaining(),
                                pose,
                            },
                        );
                    }
                }
            }
            SwitchEvent::RecordingStarted => {
                emit(&mut out, now, EventKind::RecordingStarted {});
                self.collector.activate();
            }
            SwitchEvent::None => {}
        }

        // 2. recording
        if self.collector.is_active() {
            match self.collector.collect_step(frame) {
                Ok(Some(window)) => {
                    emit(&mut out, now, EventKind::RecordingCompleted { frames: window.len() });
                    self.switch = self.switch.reset();
                    match self.recognize(&window) {
                        Ok(intent) => {
                            let due = self.tick + self.config.recognition_latency_ticks as u64;
                            self.pending.push_back((due, intent));
                        }
                        Err(e) => emit(&mut out, now, EventKind::Warning { text: format!("recognition failed: {e}") }),
                    }
                }
                Ok(None) => {}
                Err(e) => {
                    self.collector.deactivate();
                    self.switch = self.switch.reset();
                    emit(&mut out, now, EventKind::Warning { text: format!("recording failed: {e}") });
                }
            }
        }

        // 3. routing
        while self.pending.front().is_some_and(|(due, _)| *due <= self.tick) {
            let (_, intent) = self.pending.pop_front().expect("checked");
            emit(
                &mut out,
                now,
                EventKind::IntentRecognized { class: intent.class, confidence: intent.confidence },
            );
            self.last_intent = Some(intent);
            self.route(intent.class, now, &mut out);
        }

        // 4. execution
        match self.executor.task_step(dt) {
            Ok(step) => {
                let end = (self.tick + 1) as f64 / self.config.frame_rate();
                if let Some(response) = step.completed {
                    emit(&mut out, end, EventKind::TaskCompleted { response, pose: self.executor.pose() });
                }
                if let Some(bp) = step.auto_resumed {
                    emit(
                        &mut out,
                        end,
                        EventKind::TaskResumed {
                            response: bp.response(),
                            progress: bp.progress(),
                            pose: self.executor.pose(),
                            decision: None,
                        },
                    );
                }
            }
            Err(e) => emit(&mut out, now, EventKind::Warning { text: format!("executor: {e}") }),
        }

        self.tick += 1;
        for e in &out {
            self.log.push(e.clone());
        }
        out
    }

    fn recognize(&mut self, window: &FrameWindow) -> Result<ActivityIntent, RecognizerError> {
        self.recognizer.recognize(window)
    }

    fn route(&mut self, class: ActivityClass, now: f64, out: &mut Vec<Event>) {
        let command = self.executor.command_for(class);
        let pose = self.executor.pose();
        match *self.executor.mode() {
            ExecutorMode::Paused(paused) => match self.executor.apply_intent(command) {
                Ok(InterruptDecision::StopAndForget) => {
                    out.push(Event::new(now, EventKind::Stopped { forgotten: Some(paused.response()) }));
                }
                Ok(decision @ (InterruptDecision::ResumeCurrent | InterruptDecision::RejectNew)) => {
                    if decision == InterruptDecision::RejectNew {
                        out.push(Event::new(
                            now,
                            EventKind::TaskRejected { response: command.response(), current: paused.response() },
                        ));
                    }
                    out.push(Event::new(
                        now,
                        EventKind::TaskResumed {
                            response: paused.response(),
                            progress: paused.progress(),
                            pose,
                            decision: Some(decision),
                        },
                    ));
                }
                Ok(InterruptDecision::PreemptAndSwitch) => {
                    if let Command::Task(task) = command {
                        out.push(Event::new(
                            now,
                            EventKind::TaskStarted {
                                response: task.response,
                                priority: task.priority,
                                pose,
                                preempted: Some(paused.response()),
                            },
                        ));
                    }
                }
                Err(e) => out.push(Event::new(now, EventKind::Warning { text: format!("executor: {e}") })),
            },
            ExecutorMode::Idle => match command {
                Command::Stop => {
                    self.executor.stop();
                    out.push(Event::new(now, EventKind::Stopped { forgotten: None }));
                }
                Command::Task(task) => match self.executor.start(task) {
                    Ok(()) => out.push(Event::new(
                        now,
                        EventKind::TaskStarted {
                            response: task.response,
                            priority: task.priority,
                            pose,
                            preempted: None,
                        },
                    )),
                    Err(e) => out.push(Event::new(now, EventKind::Warning { text: format!("executor: {e}") })),
                },
            },
            ExecutorMode::Running(current) => {
                out.push(Event::new(
                    now,
                    EventKind::TaskRejected { response: command.response(), current: current.response() },
                ));
                out.push(Event::new(
                    now,
                    EventKind::Warning {
                        text: format!("intent {class} arrived while {} was running", current.response()),
                    },
                ));
            }
        }
    }
}

/// Returns a fixed sequence of classes, one per recording; test fixture and
/// stand-in when no trained network is at hand.
#[derive(Debug, Clone, Default)]
pub struct ScriptedRecognizer {
    answers: VecDeque<ActivityClass>,
}

impl ScriptedRecognizer {
    pub fn new(answers: impl IntoIterator<Item = ActivityClass>) -> Self {
        ScriptedRecognizer { answers: answers.into_iter().collect() }
    }

    pub fn remaining(&self) -> usize {
        self.answers.len()
    }
}

impl IntentRecognizer for ScriptedRecognizer {
    fn recognize(&mut self, _window: &FrameWindow) -> Result<ActivityIntent, RecognizerError> {
        self.answers
            .pop_front()
            .map(ActivityIntent::certain)
            .ok_or(RecognizerError::Config("scripted recognizer has no answers left".into()))
    }
}

/// Wraps a recognizer and replaces its first answer with `wrong`.
#[derive(Debug, Clone)]
pub struct MisclassifyFirst<R> {
    pub inner: R,
    wrong: Option<ActivityClass>,
}

impl<R> MisclassifyFirst<R> {
    pub fn new(inner: R, wrong: ActivityClass) -> Self {
        MisclassifyFirst { inner, wrong: Some(wrong) }
    }
}

impl<R: IntentRecognizer> IntentRecognizer for MisclassifyFirst<R> {
    fn recognize(&mut self, window: &FrameWindow) -> Result<ActivityIntent, RecognizerError> {
        let real = self.inner.recognize(window)?;
        Ok(match self.wrong.take() {
            Some(class) => ActivityIntent::certain(class),
            None => real,
        })
    }
}

impl<R: IntentRecognizer + ?Sized> IntentRecognizer for Box<R> {
    fn recognize(&mut self, window: &FrameWindow) -> Result<ActivityIntent, RecognizerError> {
        (**self).recognize(window)
    }
}
