//! Robot responses, the simulated chassis and arm, and the interruption
//! decision logic: pause on attention, then stop / resume / preempt / reject
//! depending on the newly recognized command and task priorities.

mod chassis;
mod config;

pub use chassis::{chassis_step, wrap_angle, Pose2};
pub use config::{ConfigError, ExecutorConfig};

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::activity::ActivityClass;

/// Tasks whose remaining extent is within this fraction of the total are done.
const COMPLETION_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotResponse {
    WavingRightHand,
    Stopping,
    Saluting,
    LiftingRightArm,
    MovingBackwards,
    MovingForwards,
    Circling,
    WavingArmsAround,
}

impl RobotResponse {
    pub const ALL: [RobotResponse; 8] = [
        RobotResponse::WavingRightHand,
        RobotResponse::Stopping,
        RobotResponse::Saluting,
        RobotResponse::LiftingRightArm,
        RobotResponse::MovingBackwards,
        RobotResponse::MovingForwards,
        RobotResponse::Circling,
        RobotResponse::WavingArmsAround,
    ];

    pub fn for_activity(class: ActivityClass) -> Self {
        Self::ALL[class.index()]
    }

    pub fn activity(self) -> ActivityClass {
        ActivityClass::ALL[self as usize]
    }

    pub fn name(self) -> &'static str {
        match self {
            RobotResponse::WavingRightHand => "waving_right_hand",
            RobotResponse::Stopping => "stopping",
            RobotResponse::Saluting => "saluting",
            RobotResponse::LiftingRightArm => "lifting_right_arm",
            RobotResponse::MovingBackwards => "moving_backwards",
            RobotResponse::MovingForwards => "moving_forwards",
            RobotResponse::Circling => "circling",
            RobotResponse::WavingArmsAround => "waving_arms_around",
        }
    }

    pub fn is_chassis(self) -> bool {
        matches!(
            self,
            RobotResponse::MovingBackwards | RobotResponse::MovingForwards | RobotResponse::Circling
        )
    }

    /// Named keyframes of the arm animation, empty for chassis responses.
    pub fn arm_keyframes(self) -> &'static [&'static str] {
        match self {
            RobotResponse::WavingRightHand => &["raise_right", "wave_out", "wave_in", "wave_out", "wave_in", "rest"],
            RobotResponse::Saluting => &["raise_right", "hand_to_brow", "hold", "rest"],
            RobotResponse::LiftingRightArm => &["raise_right", "arm_overhead", "hold", "rest"],
            RobotResponse::WavingArmsAround => &["arms_out", "swing_left", "swing_right", "swing_left", "swing_right", "rest"],
            _ => &[],
        }
    }
}

impl fmt::Display for RobotResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RobotResponse {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown response `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskKind {
    ChassisLinear { speed: f64, distance: f64, direction: i8 },
    ChassisSpin { angular_speed: f64, laps: u32 },
    ArmAnimation { duration: f64 },
}

impl TaskKind {
    /// Meters, radians or seconds depending on the kind.
    pub fn total_extent(&self) -> f64 {
        match *self {
            TaskKind::ChassisLinear { distance, .. } => distance,
            TaskKind::ChassisSpin { laps, .. } => laps as f64 * TAU,
            TaskKind::ArmAnimation { duration } => duration,
        }
    }

    /// Extent covered per second while running.
    fn rate(&self) -> f64 {
        match *self {
            TaskKind::ChassisLinear { speed, .. } => speed,
            TaskKind::ChassisSpin { angular_speed, .. } => angular_speed,
            TaskKind::ArmAnimation { .. } => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub response: RobotResponse,
    pub priority: u32,
    pub kind: TaskKind,
}

/// What a recognized intent asks the robot to do.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Command {
    Task(TaskSpec),
    Stop,
}

impl Command {
    pub fn response(&self) -> RobotResponse {
        match self {
            Command::Task(t) => t.response,
            Command::Stop => RobotResponse::Stopping,
        }
    }
}

pub fn intent_to_command(class: ActivityClass, config: &ExecutorConfig) -> Command {
    let response = RobotResponse::for_activity(class);
    let priority = config.priority(response);
    let kind = match response {
        RobotResponse::Stopping => return Command::Stop,
        RobotResponse::MovingBackwards | RobotResponse::MovingForwards => TaskKind::ChassisLinear {
            speed: config.linear_speed,
            distance: config.linear_distance,
            direction: if response == RobotResponse::MovingBackwards { -1 } else { 1 },
        },
        RobotResponse::Circling => TaskKind::ChassisSpin {
            angular_speed: config.circling_angular_speed,
            laps: config.circling_laps,
        },
        _ => TaskKind::ArmAnimation { duration: config.arm_duration },
    };
    Command::Task(TaskSpec { response, priority, kind })
}

/// Progress of a task in its own units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub task: TaskSpec,
    /// Extent already completed.
    pub done: f64,
}

impl Breakpoint {
    pub fn fresh(task: TaskSpec) -> Self {
        Breakpoint { task, done: 0.0 }
    }

    pub fn response(&self) -> RobotResponse {
        self.task.response
    }

    pub fn total(&self) -> f64 {
        self.task.kind.total_extent()
    }

    pub fn progress(&self) -> f64 {
        (self.done / self.total()).clamp(0.0, 1.0)
    }

    pub fn remaining(&self) -> f64 {
        self.total() - self.done
    }

    /// Completed spin laps, zero for other kinds.
    pub fn laps_completed(&self) -> u32 {
        match self.task.kind {
            TaskKind::ChassisSpin { .. } => (self.done / TAU).floor() as u32,
            _ => 0,
        }
    }

    /// Current arm keyframe for animation tasks.
    pub fn arm_pose(&self) -> Option<&'static str> {
        let frames = self.response().arm_keyframes();
        if frames.is_empty() {
            return None;
        }
        let idx = ((self.progress() * frames.len() as f64) as usize).min(frames.len() - 1);
        Some(frames[idx])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ExecutorMode {
    Idle,
    Running(Breakpoint),
    Paused(Breakpoint),
}

impl ExecutorMode {
    pub fn name(&self) -> &'static str {
        match self {
            ExecutorMode::Idle => "idle",
            ExecutorMode::Running(_) => "running",
            ExecutorMode::Paused(_) => "paused",
        }
    }

    pub fn task(&self) -> Option<&Breakpoint> {
        match self {
            ExecutorMode::Idle => None,
            ExecutorMode::Running(b) | ExecutorMode::Paused(b) => Some(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InterruptDecision {
    StopAndForget,
    ResumeCurrent,
    PreemptAndSwitch,
    RejectNew,
}

/// The decision table for a paused task and a newly recognized command.
pub fn decide(paused: &TaskSpec, new: &Command) -> InterruptDecision {
    match new {
        Command::Stop => InterruptDecision::StopAndForget,
        Command::Task(t) if t.response == paused.response => InterruptDecision::ResumeCurrent,
        Command::Task(t) if t.priority > paused.priority => InterruptDecision::PreemptAndSwitch,
        Command::Task(_) => InterruptDecision::RejectNew,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecutorError {
    #[error("executor is {0}, expected paused")]
    NotPaused(&'static str),
    #[error("executor is {0}, expected idle")]
    NotIdle(&'static str),
    #[error("breakpoint does not match the paused task")]
    BreakpointMismatch,
    #[error("dt must be positive")]
    BadTimestep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub completed: Option<RobotResponse>,
    /// A suspended task restarted after completion (`auto_resume_suspended`).
    pub auto_resumed: Option<Breakpoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutorState {
    mode: ExecutorMode,
    suspended: Option<Breakpoint>,
    pose: Pose2,
    config: ExecutorConfig,
}

impl Default for ExecutorState {
    fn default() -> Self {
        Self::new(ExecutorConfig::default())
    }
}

impl ExecutorState {
    pub fn new(config: ExecutorConfig) -> Self {
        ExecutorState {
            mode: ExecutorMode::Idle,
            suspended: None,
            pose: Pose2::default(),
            config,
        }
    }

    pub fn mode(&self) -> &ExecutorMode {
        &self.mode
    }

    pub fn suspended(&self) -> Option<&Breakpoint> {
        self.suspended.as_ref()
    }

    pub fn pose(&self) -> Pose2 {
        self.pose
    }

    pub fn config(&self) -> &ExecutorConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut ExecutorConfig {
        &mut self.config
    }

    pub fn is_idle(&self) -> bool {
        self.mode == ExecutorMode::Idle
    }

    pub fn command_for(&self, class: ActivityClass) -> Command {
        intent_to_command(class, &self.config)
    }

    /// `(linear, angular)` speed currently commanded to the chassis; zero
    /// unless a chassis task is running.
    pub fn commanded_velocity(&self) -> (f64, f64) {
        match &self.mode {
            ExecutorMode::Running(b) => match b.task.kind {
                TaskKind::ChassisLinear { speed, direction, .. } => (speed * direction as f64, 0.0),
                TaskKind::ChassisSpin { angular_speed, .. } => (0.0, angular_speed),
                TaskKind::ArmAnimation { .. } => (0.0, 0.0),
            },
            _ => (0.0, 0.0),
        }
    }

    pub fn start(&mut self, task: TaskSpec) -> Result<(), ExecutorError> {
        if !self.is_idle() {
            return Err(ExecutorError::NotIdle(self.mode.name()));
        }
        self.mode = ExecutorMode::Running(Breakpoint::fresh(task));
        Ok(())
    }

    /// Advances the running task by `dt` seconds.
    pub fn task_step(&mut self, dt: f64) -> Result<StepOutcome, ExecutorError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ExecutorError::BadTimestep);
        }
        let mut outcome = StepOutcome { completed: None, auto_resumed: None };
        let ExecutorMode::Running(bp) = &mut self.mode else {
            return Ok(outcome);
        };
        let total = bp.total();
        let rate = bp.task.kind.rate();
        let advance = (rate * dt).min(total - bp.done);
        let finished = total - (bp.done + advance) <= COMPLETION_EPS * total;
        // overshoot is truncated: the chassis moves exactly the remaining extent
        let velocity_scale = if rate * dt > 0.0 { advance / (rate * dt) } else { 0.0 };
        bp.done = if finished { total } else { bp.done + advance };
        let response = bp.response();
        let (v, w) = match bp.task.kind {
            TaskKind::ChassisLinear { speed, direction, .. } => (speed * direction as f64 * velocity_scale, 0.0),
            TaskKind::ChassisSpin { angular_speed, .. } => (0.0, angular_speed * velocity_scale),
            TaskKind::ArmAnimation { .. } => (0.0, 0.0),
        };
        self.pose = chassis_step(self.pose, v, w, dt);
        if finished {
            outcome.completed = Some(response);
            self.mode = ExecutorMode::Idle;
            if self.config.auto_resume_suspended {
                if let Some(bp) = self.suspended.take() {
                    self.mode = ExecutorMode::Running(bp);
                    outcome.auto_resumed = Some(bp);
                }
            }
        }
        Ok(outcome)
    }

    /// Suspends the running task and records its breakpoint. Returns `None`
    /// (nothing to pause) when not running.
    pub fn pause_current(&mut self) -> Option<Breakpoint> {
        match self.mode {
            ExecutorMode::Running(bp) => {
                self.mode = ExecutorMode::Paused(bp);
                Some(bp)
            }
            _ => None,
        }
    }

    /// Resolves a paused task against a new command.
    pub fn apply_intent(&mut self, new: Command) -> Result<InterruptDecision, ExecutorError> {
        let ExecutorMode::Paused(paused) = self.mode else {
            return Err(ExecutorError::NotPaused(self.mode.name()));
        };
        let decision = decide(&paused.task, &new);
        match (decision, new) {
            (InterruptDecision::StopAndForget, _) => {
                self.mode = ExecutorMode::Idle;
                self.suspended = None;
            }
            (InterruptDecision::ResumeCurrent | InterruptDecision::RejectNew, _) => {
                self.resume_from_breakpoint(paused)?;
            }
            (InterruptDecision::PreemptAndSwitch, Command::Task(task)) => {
                self.suspended = Some(paused);
                self.mode = ExecutorMode::Running(Breakpoint::fresh(task));
            }
            (InterruptDecision::PreemptAndSwitch, Command::Stop) => unreachable!("stop never preempts"),
        }
        Ok(decision)
    }

    /// Continues the paused task from `breakpoint`, which must be the one
    /// recorded when it was paused.
    pub fn resume_from_breakpoint(&mut self, breakpoint: Breakpoint) -> Result<(), ExecutorError> {
        match self.mode {
            ExecutorMode::Paused(current) if current == breakpoint => {
                self.mode = ExecutorMode::Running(breakpoint);
                Ok(())
            }
            ExecutorMode::Paused(_) => Err(ExecutorError::BreakpointMismatch),
            other => Err(ExecutorError::NotPaused(other.name())),
        }
    }

    /// Drops everything: idle, empty slot. The pose is kept.
    pub fn stop(&mut self) {
        self.mode = ExecutorMode::Idle;
        self.suspended = None;
    }

    pub fn reset(&mut self) {
        *self = ExecutorState::new(self.config.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn task(response: RobotResponse) -> TaskSpec {
        match intent_to_command(response.activity(), &ExecutorConfig::default()) {
            Command::Task(t) => t,
            Command::Stop => panic!("stop is not a task"),
        }
    }

    fn running(response: RobotResponse) -> ExecutorState {
        let mut s = ExecutorState::default();
        s.start(task(response)).unwrap();
        s
    }

    #[test]
    fn table_mapping() {
        let cfg = ExecutorConfig::default();
        match intent_to_command(ActivityClass::WaveForwards, &cfg) {
            Command::Task(t) => {
                assert_eq!(t.response, RobotResponse::MovingBackwards);
                assert_eq!(t.kind, TaskKind::ChassisLinear { speed: 0.2, distance: 4.0, direction: -1 });
            }
            Command::Stop => panic!(),
        }
        match intent_to_command(ActivityClass::DrawCircle, &cfg) {
            Command::Task(t) => assert_eq!(t.kind, TaskKind::ChassisSpin { angular_speed: 0.5, laps: 20 }),
            Command::Stop => panic!(),
        }
        assert_eq!(intent_to_command(ActivityClass::StretchRightHand, &cfg), Command::Stop);
        for class in ActivityClass::ALL {
            assert_eq!(RobotResponse::for_activity(class).activity(), class);
        }
    }

    #[test]
    fn move_back_completes_in_twenty_one_second_steps() {
        let mut s = running(RobotResponse::MovingBackwards);
        for i in 0..20 {
            let out = s.task_step(1.0).unwrap();
            if i < 19 {
                assert_eq!(out.completed, None, "step {i}");
            } else {
                assert_eq!(out.completed, Some(RobotResponse::MovingBackwards));
            }
        }
        assert!(s.is_idle());
        assert!((s.pose().x + 4.0).abs() < 1e-12);
    }

    #[test]
    fn paused_and_idle_do_not_move() {
        let mut s = running(RobotResponse::MovingForwards);
        s.task_step(1.0).unwrap();
        s.pause_current().unwrap();
        let before = s.clone();
        s.task_step(5.0).unwrap();
        assert_eq!(s, before);
        assert_eq!(s.commanded_velocity(), (0.0, 0.0));

        let mut idle = ExecutorState::default();
        idle.task_step(1.0).unwrap();
        assert_eq!(idle, ExecutorState::default());
    }

    #[test]
    fn circling_laps_follow_closed_form() {
        let dt = 1.0 / 30.0;
        let mut s = running(RobotResponse::Circling);
        let mut t = 0.0;
        let mut completed_at = None;
        for k in 1..=8000 {
            let out = s.task_step(dt).unwrap();
            t = k as f64 * dt;
            if let ExecutorMode::Running(bp) = s.mode() {
                let expected = (0.5 * t / TAU).floor() as i64;
                assert!((bp.laps_completed() as i64 - expected).abs() <= 1, "t={t}");
            }
            if out.completed.is_some() {
                completed_at = Some(t);
                break;
            }
        }
        let done = completed_at.expect("circling completes");
        assert!((done - 80.0 * PI).abs() <= dt, "{done} vs {}", 80.0 * PI);
        assert!(t > 0.0);
        // spinning in place
        assert_eq!((s.pose().x, s.pose().y), (0.0, 0.0));
    }

    #[test]
    fn pause_records_breakpoint() {
        let mut s = running(RobotResponse::MovingBackwards);
        for _ in 0..(7.5 * 30.0) as usize {
            s.task_step(1.0 / 30.0).unwrap();
        }
        let bp = s.pause_current().unwrap();
        assert!((bp.remaining() - 2.5).abs() < 1e-9);
        assert!((bp.remaining() - (1.0 - bp.progress()) * bp.total()).abs() < 1e-12);

        let mut c = running(RobotResponse::Circling);
        assert_eq!(c.pause_current().unwrap().progress(), 0.0);
        assert!(ExecutorState::default().pause_current().is_none());
    }

    #[test]
    fn resume_completes_after_remaining_time() {
        let mut s = running(RobotResponse::MovingBackwards);
        for _ in 0..75 {
            s.task_step(0.1).unwrap();
        }
        let bp = s.pause_current().unwrap();
        s.resume_from_breakpoint(bp).unwrap();
        let mut steps = 0;
        while s.task_step(0.1).unwrap().completed.is_none() {
            steps += 1;
        }
        assert_eq!(steps + 1, 125);
    }

    #[test]
    fn zero_progress_resume_equals_fresh_start() {
        let mut a = running(RobotResponse::MovingForwards);
        let mut b = running(RobotResponse::MovingForwards);
        let bp = b.pause_current().unwrap();
        b.resume_from_breakpoint(bp).unwrap();
        for _ in 0..50 {
            a.task_step(0.1).unwrap();
            b.task_step(0.1).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn resume_contract_errors() {
        let mut s = running(RobotResponse::Circling);
        let other = Breakpoint::fresh(task(RobotResponse::MovingForwards));
        assert_eq!(s.resume_from_breakpoint(other), Err(ExecutorError::NotPaused("running")));
        s.pause_current();
        assert_eq!(s.resume_from_breakpoint(other), Err(ExecutorError::BreakpointMismatch));
        assert_eq!(
            ExecutorState::default().apply_intent(Command::Stop),
            Err(ExecutorError::NotPaused("idle"))
        );
    }

    #[test]
    fn interruption_cases() {
        let mut s = running(RobotResponse::Circling);
        s.pause_current();
        assert_eq!(
            s.apply_intent(Command::Task(task(RobotResponse::MovingBackwards))).unwrap(),
            InterruptDecision::PreemptAndSwitch
        );
        assert_eq!(s.suspended().unwrap().response(), RobotResponse::Circling);

        s.pause_current();
        assert_eq!(
            s.apply_intent(Command::Task(task(RobotResponse::Circling))).unwrap(),
            InterruptDecision::RejectNew
        );
        assert_eq!(s.mode().task().unwrap().response(), RobotResponse::MovingBackwards);
        assert!(matches!(s.mode(), ExecutorMode::Running(_)));

        s.pause_current();
        assert_eq!(s.apply_intent(Command::Stop).unwrap(), InterruptDecision::StopAndForget);
        assert!(s.is_idle());
        assert!(s.suspended().is_none());
    }

    #[test]
    fn second_preemption_overwrites_slot() {
        let mut s = running(RobotResponse::Saluting);
        s.pause_current();
        s.apply_intent(Command::Task(task(RobotResponse::Circling))).unwrap();
        s.task_step(1.0).unwrap();
        s.pause_current();
        s.apply_intent(Command::Task(task(RobotResponse::MovingForwards))).unwrap();
        let slot = s.suspended().unwrap();
        assert_eq!(slot.response(), RobotResponse::Circling);
        assert!((slot.done - 0.5).abs() < 1e-12);
    }

    #[test]
    fn auto_resume_restarts_suspended_task() {
        let cfg = ExecutorConfig { auto_resume_suspended: true, arm_duration: 1.0, ..ExecutorConfig::default() };
        let mut s = ExecutorState::new(cfg);
        let circle = match s.command_for(ActivityClass::DrawCircle) {
            Command::Task(t) => t,
            Command::Stop => unreachable!(),
        };
        s.start(circle).unwrap();
        s.task_step(1.0).unwrap();
        s.pause_current();
        s.apply_intent(s.command_for(ActivityClass::WaveForwards)).unwrap();
        let mut auto = None;
        for _ in 0..21 {
            let out = s.task_step(1.0).unwrap();
            if out.completed.is_some() {
                auto = out.auto_resumed;
            }
        }
        assert_eq!(auto.map(|b| b.response()), Some(RobotResponse::Circling));
        assert!(s.suspended().is_none());
    }

    #[test]
    fn arm_tasks_accrue_time_only() {
        let mut s = running(RobotResponse::WavingRightHand);
        s.task_step(2.5).unwrap();
        assert_eq!(s.pose(), Pose2::default());
        let bp = *s.mode().task().unwrap();
        assert_eq!(bp.progress(), 0.5);
        assert!(bp.arm_pose().is_some());
        assert_eq!(s.task_step(2.5).unwrap().completed, Some(RobotResponse::WavingRightHand));
    }

    #[test]
    fn decision_table_is_total_and_antisymmetric() {
        let cfg = ExecutorConfig::default();
        for paused in RobotResponse::ALL.into_iter().filter(|r| *r != RobotResponse::Stopping) {
            let p = task(paused);
            for new in RobotResponse::ALL {
                let cmd = intent_to_command(new.activity(), &cfg);
                let d = decide(&p, &cmd);
                if new == RobotResponse::Stopping {
                    assert_eq!(d, InterruptDecision::StopAndForget);
                    continue;
                }
                if d == InterruptDecision::PreemptAndSwitch {
                    let back = decide(&task(new), &Command::Task(p));
                    assert_eq!(back, InterruptDecision::RejectNew, "{paused} / {new}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn pause_resume_conserves_extent(pauses in prop::collection::vec(1usize..40, 0..15)) {
            let dt = 1.0 / 30.0;
            let mut reference = running(RobotResponse::MovingBackwards);
            while reference.task_step(dt).unwrap().completed.is_none() {}

            let mut s = running(RobotResponse::MovingBackwards);
            let mut segments = Vec::new();
            let mut last_done = 0.0;
            let mut k = 0usize;
            let mut next_pause = pauses.iter().scan(0usize, |acc, p| { *acc += p; Some(*acc) }).peekable();
            loop {
                if next_pause.peek() == Some(&k) {
                    next_pause.next();
                    let bp = s.pause_current().unwrap();
                    segments.push(bp.done - last_done);
                    last_done = bp.done;
                    s.task_step(dt).unwrap();
                    s.resume_from_breakpoint(bp).unwrap();
                }
                k += 1;
                if s.task_step(dt).unwrap().completed.is_some() {
                    break;
                }
            }
            segments.push(4.0 - last_done);
            let total_progress: f64 = segments.iter().map(|d| d / 4.0).sum();
            prop_assert!((total_progress - 1.0).abs() < 1e-9);
            prop_assert!((s.pose().x - reference.pose().x).abs() < 1e-9);
            prop_assert!((s.pose().y - reference.pose().y).abs() < 1e-9);
        }
    }
}
