//! Deterministic synthetic skeleton streams standing in for a depth sensor.
//!
//! Every gesture is an analytic trajectory on top of a standing pose. Poses are
//! computed in a body frame (torso at the origin, y down, `+x` toward the
//! subject's left, `-z` toward the camera) and then placed at
//! [`SUBJECT_ORIGIN`] plus the requested offset.
//!
//! Defining predicates (checked on every noiseless frame after the entry ramp):
//!
//! | kind | predicate |
//! |---|---|
//! | `idle` | both wrists below the torso |
//! | `raise_left_hand` (held phase) | left wrist 0.5 m above the torso, right wrist below it |
//! | `lower_left_hand` (settled) | both wrists below the torso |
//! | `wave_right_hand` | right wrist 0.2 m above the right shoulder |
//! | `stretch_right_hand` | right wrist 0.4 m in front of the torso |
//! | `salute` | right wrist within 0.3 m of the head |
//! | `lift_right_arm` | right wrist 0.15 m above the head |
//! | `wave_forwards` | right wrist between shoulder and torso height, in front of the torso |
//! | `wave_backwards` | right wrist above the shoulder, 0.1 m in front of the torso |
//! | `draw_circle` | right wrist within 0.15 m of the 0.2 m drawing circle |
//! | `wave_arms_around` | wrists below the torso, swinging in anti-phase |
//!
//! Each characteristic displacement clears its threshold by at least 0.12 m,
//! so the predicates survive 0.02 m sensor jitter.
//!
//! All activity kinds keep the left wrist below the torso so they never
//! operate the attention switch.

mod dataset;
mod scenario;
mod stream;

pub use dataset::{build_dataset, DatasetSpec};
pub use scenario::{compile_scenario, ScenarioError, ScenarioEvent, ScenarioScript};
pub use stream::{GestureStream, StreamConfig};

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::activity::ActivityClass;
use crate::skeleton::{
    FrameWindow, JointId, SkeletonError, SkeletonFrame, Vec3, DEFAULT_FRAME_RATE, JOINT_COUNT,
    RECORDING_SECONDS,
};

/// Torso position of an un-offset subject in camera coordinates.
pub const SUBJECT_ORIGIN: Vec3 = Vec3::new(0.0, 0.1, 2.5);

/// Time taken to blend from the standing pose into an activity.
const ENTRY_RAMP: f64 = 0.3;
const RAISE_TIME: f64 = 0.5;
const LOWER_TIME: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureKind {
    WaveRightHand,
    StretchRightHand,
    Salute,
    LiftRightArm,
    WaveForwards,
    WaveBackwards,
    DrawCircle,
    WaveArmsAround,
    RaiseLeftHand,
    LowerLeftHand,
    Idle,
}

impl GestureKind {
    pub const ALL: [GestureKind; 11] = [
        GestureKind::WaveRightHand,
        GestureKind::StretchRightHand,
        GestureKind::Salute,
        GestureKind::LiftRightArm,
        GestureKind::WaveForwards,
        GestureKind::WaveBackwards,
        GestureKind::DrawCircle,
        GestureKind::WaveArmsAround,
        GestureKind::RaiseLeftHand,
        GestureKind::LowerLeftHand,
        GestureKind::Idle,
    ];

    pub fn activity(self) -> Option<ActivityClass> {
        let idx = Self::ALL.iter().position(|k| *k == self)?;
        ActivityClass::from_index(idx)
    }

    pub fn from_activity(class: ActivityClass) -> Self {
        Self::ALL[class.index()]
    }

    pub fn name(self) -> &'static str {
        match self {
            GestureKind::RaiseLeftHand => "raise_left_hand",
            GestureKind::LowerLeftHand => "lower_left_hand",
            GestureKind::Idle => "idle",
            other => other.activity().map(ActivityClass::name).unwrap_or_default(),
        }
    }

    /// Length of the gesture when performed inside a stream.
    pub fn default_duration(self) -> f64 {
        match self {
            GestureKind::RaiseLeftHand => 1.0,
            GestureKind::LowerLeftHand => LOWER_TIME,
            GestureKind::Idle => 1.0,
            _ => RECORDING_SECONDS,
        }
    }

    /// The defining joint predicate for this kind, see the module table.
    pub fn predicate_holds(self, frame: &SkeletonFrame) -> bool {
        let j = |id| frame.joint(id);
        let torso = j(JointId::Torso);
        let lw = j(JointId::LeftWrist);
        let rw = j(JointId::RightWrist);
        let rs = j(JointId::RightShoulder);
        let head = j(JointId::Head);
        let left_down = lw.y > torso.y;
        match self {
            GestureKind::Idle => left_down && rw.y > torso.y,
            GestureKind::RaiseLeftHand => lw.y < torso.y - 0.5 && rw.y > torso.y,
            GestureKind::LowerLeftHand => left_down && rw.y > torso.y,
            GestureKind::WaveRightHand => left_down && rw.y < rs.y - 0.2,
            GestureKind::StretchRightHand => left_down && rw.z < torso.z - 0.4,
            GestureKind::Salute => left_down && (rw - head).norm() < 0.3,
            GestureKind::LiftRightArm => left_down && rw.y < head.y - 0.15,
            GestureKind::WaveForwards => {
                left_down && rw.y > rs.y && rw.y < torso.y - 0.1 && rw.z < torso.z - 0.05
            }
            GestureKind::WaveBackwards => left_down && rw.y < rs.y && rw.z < torso.z - 0.1,
            GestureKind::DrawCircle => {
                let c = torso + CIRCLE_CENTER;
                let r = (rw.x - c.x).hypot(rw.y - c.y);
                left_down && (r - CIRCLE_RADIUS).abs() < 0.15
            }
            GestureKind::WaveArmsAround => {
                left_down
                    && rw.y > torso.y
                    && ((lw.z - torso.z) + (rw.z - torso.z)).abs() < 0.15
            }
        }
    }
}

impl fmt::Display for GestureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GestureKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown gesture `{s}`"))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SynthesisError {
    #[error("duration must be positive, got {0}")]
    Duration(f64),
    #[error("noise_stddev must be non-negative, got {0}")]
    Noise(f64),
    #[error("frame_rate must be positive, got {0}")]
    FrameRate(f64),
    #[error("subject offset must be finite")]
    Offset,
    #[error("`{0}` is not one of the eight activities")]
    NotAnActivity(GestureKind),
    #[error("per_class must be at least 1")]
    EmptyClass,
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec {
    pub kind: GestureKind,
    pub duration: f64,
    pub noise_stddev: f64,
    pub seed: u64,
    pub subject_offset: Vec3,
    pub frame_rate: f64,
}

impl SynthesisSpec {
    pub fn new(kind: GestureKind) -> Self {
        SynthesisSpec {
            kind,
            duration: kind.default_duration(),
            noise_stddev: 0.0,
            seed: 0,
            subject_offset: Vec3::ZERO,
            frame_rate: DEFAULT_FRAME_RATE,
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(SynthesisError::Duration(self.duration));
        }
        if !(self.noise_stddev.is_finite() && self.noise_stddev >= 0.0) {
            return Err(SynthesisError::Noise(self.noise_stddev));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            return Err(SynthesisError::FrameRate(self.frame_rate));
        }
        if !self.subject_offset.is_finite() {
            return Err(SynthesisError::Offset);
        }
        Ok(())
    }
}

/// Renders one gesture as a standalone window starting at `t = 0`.
pub fn synthesize(spec: &SynthesisSpec) -> Result<FrameWindow, SynthesisError> {
    spec.validate()?;
    let n = ((spec.duration * spec.frame_rate).round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let left_held = spec.kind == GestureKind::LowerLeftHand;
    let origin = SUBJECT_ORIGIN + spec.subject_offset;
    let frames = (0..n)
        .map(|i| {
            let t = i as f64 / spec.frame_rate;
            let joints = body_pose(spec.kind, t, left_held);
            stream::place(&joints, origin, spec.noise_stddev, &mut rng, t)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FrameWindow::new(frames, spec.frame_rate)?)
}

type Pose = [Vec3; JOINT_COUNT];

const CIRCLE_CENTER: Vec3 = Vec3::new(-0.32, -0.40, -0.25);
const CIRCLE_RADIUS: f64 = 0.20;

fn standing(left_held: bool) -> Pose {
    let mut p = [Vec3::ZERO; JOINT_COUNT];
    let mut set = |id: JointId, v: Vec3| p[id.index()] = v;
    set(JointId::Head, Vec3::new(0.0, -0.62, 0.0));
    set(JointId::Neck, Vec3::new(0.0, -0.42, 0.0));
    set(JointId::Torso, Vec3::ZERO);
    set(JointId::LeftShoulder, Vec3::new(0.18, -0.40, 0.0));
    set(JointId::RightShoulder, Vec3::new(-0.18, -0.40, 0.0));
    set(JointId::LeftHip, Vec3::new(0.10, 0.20, 0.0));
    set(JointId::RightHip, Vec3::new(-0.10, 0.20, 0.0));
    set(JointId::LeftKnee, Vec3::new(0.11, 0.62, 0.0));
    set(JointId::RightKnee, Vec3::new(-0.11, 0.62, 0.0));
    set(JointId::LeftAnkle, Vec3::new(0.11, 1.02, 0.0));
    set(JointId::RightAnkle, Vec3::new(-0.11, 1.02, 0.0));
    let (right_elbow, right_wrist) = arm_down(-1.0);
    set(JointId::RightElbow, right_elbow);
    set(JointId::RightWrist, right_wrist);
    let (left_elbow, left_wrist) = if left_held { left_up() } else { arm_down(1.0) };
    set(JointId::LeftElbow, left_elbow);
    set(JointId::LeftWrist, left_wrist);
    p
}

fn arm_down(side: f64) -> (Vec3, Vec3) {
    (Vec3::new(0.21 * side, -0.12, 0.0), Vec3::new(0.23 * side, 0.15, 0.0))
}

fn left_up() -> (Vec3, Vec3) {
    (Vec3::new(0.30, -0.62, 0.0), Vec3::new(0.33, -0.88, 0.0))
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Body-frame joint positions of `kind` at local time `t`.
fn body_pose(kind: GestureKind, t: f64, left_held: bool) -> Pose {
    let mut pose = standing(left_held);
    let mut put = |id: JointId, target: Vec3, blend: f64| {
        let i = id.index();
        pose[i] = pose[i].lerp(target, blend);
    };
    let ramp = smoothstep(t / ENTRY_RAMP);
    let phase = |hz: f64| (TAU * hz * t).sin();
    match kind {
        GestureKind::Idle => {}
        GestureKind::RaiseLeftHand | GestureKind::LowerLeftHand => {
            let (down_e, down_w) = arm_down(1.0);
            let (up_e, up_w) = left_up();
            let s = if kind == GestureKind::RaiseLeftHand {
                smoothstep(t / RAISE_TIME)
            } else {
                1.0 - smoothstep(t / LOWER_TIME)
            };
            put(JointId::LeftElbow, down_e.lerp(up_e, s), 1.0);
            put(JointId::LeftWrist, down_w.lerp(up_w, s), 1.0);
        }
        GestureKind::WaveRightHand => {
            put(JointId::RightElbow, Vec3::new(-0.38, -0.50, 0.0), ramp);
            let w = Vec3::new(-0.40 + 0.18 * phase(1.5), -0.80, 0.0);
            put(JointId::RightWrist, w, ramp);
        }
        GestureKind::StretchRightHand => {
            put(JointId::RightElbow, Vec3::new(-0.20, -0.36, -0.30), ramp);
            put(JointId::RightWrist, Vec3::new(-0.20, -0.42, -0.58), ramp);
        }
        GestureKind::Salute => {
            put(JointId::RightElbow, Vec3::new(-0.40, -0.45, -0.12), ramp);
            put(JointId::RightWrist, Vec3::new(-0.08, -0.62, -0.12), ramp);
        }
        GestureKind::LiftRightArm => {
            put(JointId::RightElbow, Vec3::new(-0.22, -0.70, 0.0), ramp);
            put(JointId::RightWrist, Vec3::new(-0.24, -1.00, 0.0), ramp);
        }
        GestureKind::WaveForwards => {
            let s = phase(1.2);
            put(JointId::RightElbow, Vec3::new(-0.22, -0.15, -0.15 - 0.05 * s), ramp);
            put(JointId::RightWrist, Vec3::new(-0.22, -0.27, -0.34 - 0.16 * s), ramp);
        }
        GestureKind::WaveBackwards => {
            let s = phase(1.2);
            let c = (TAU * 1.2 * t).cos();
            put(JointId::RightElbow, Vec3::new(-0.28, -0.30, -0.25), ramp);
            let w = Vec3::new(-0.28, -0.62 + 0.06 * c, -0.40 + 0.16 * s);
            put(JointId::RightWrist, w, ramp);
        }
        GestureKind::DrawCircle => {
            let a = TAU * 0.8 * t;
            let w = CIRCLE_CENTER + Vec3::new(a.cos(), a.sin(), 0.0) * CIRCLE_RADIUS;
            put(JointId::RightElbow, Vec3::new(-0.28, -0.10, -0.12), ramp);
            put(JointId::RightWrist, w, ramp);
        }
        GestureKind::WaveArmsAround => {
            let s = phase(1.0);
            let lift = |v: f64| v.max(0.0);
            put(JointId::RightElbow, Vec3::new(-0.22, -0.12, 0.12 * s), ramp);
            put(JointId::RightWrist, Vec3::new(-0.25, 0.15, 0.25 * s), ramp);
            put(JointId::LeftElbow, Vec3::new(0.22, -0.12, -0.12 * s), ramp);
            put(JointId::LeftWrist, Vec3::new(0.25, 0.15, -0.25 * s), ramp);
            let lk = lift(s);
            let rk = lift(-s);
            put(JointId::LeftKnee, Vec3::new(0.11, 0.62 - 0.22 * lk, -0.22 * lk), ramp);
            put(JointId::LeftAnkle, Vec3::new(0.11, 1.02 - 0.20 * lk, -0.05 * lk), ramp);
            put(JointId::RightKnee, Vec3::new(-0.11, 0.62 - 0.22 * rk, -0.22 * rk), ramp);
            put(JointId::RightAnkle, Vec3::new(-0.11, 1.02 - 0.20 * rk, -0.05 * rk), ramp);
        }
    }
    pose
}

/// Whether frame `i` of a noiseless rendering of `kind` is past its entry
/// transition, i.e. inside the phase where its predicate must hold.
pub fn in_active_phase(kind: GestureKind, t: f64) -> bool {
    match kind {
        GestureKind::Idle => true,
        GestureKind::RaiseLeftHand => t >= RAISE_TIME,
        GestureKind::LowerLeftHand => t >= LOWER_TIME,
        _ => t >= ENTRY_RAMP,
    }
}
