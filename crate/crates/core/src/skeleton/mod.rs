//! Skeleton frames, the fixed 15-joint layout, body-centric normalization and
//! conversion of recorded windows into classifier feature sequences.
//!
//! Coordinates are camera-frame meters with **y increasing downward**: when the
//! arms hang naturally both wrists have a larger `y` than the torso.

mod io;

pub use io::{read_stream, write_stream, StreamFileError};

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of tracked joints.
pub const JOINT_COUNT: usize = 15;
/// Length of a flattened frame (`x1,y1,z1,...,x15,y15,z15`).
pub const FRAME_DIM: usize = JOINT_COUNT * 3;
/// Default sensor frame rate in Hz.
pub const DEFAULT_FRAME_RATE: f64 = 30.0;
/// Duration of the post-trigger recording window in seconds.
pub const RECORDING_SECONDS: f64 = 3.5;
/// Default temporal subsampling applied before the recognizer.
pub const DEFAULT_STRIDE: usize = 3;

const DEGENERATE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Linear interpolation, `t = 0` gives `self`.
    pub fn lerp(self, other: Vec3, t: f64) -> Vec3 {
        self + (other - self) * t
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// The tracked joints, in flattening order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointId {
    Head,
    Neck,
    Torso,
    LeftShoulder,
    LeftElbow,
    LeftWrist,
    LeftHip,
    LeftKnee,
    LeftAnkle,
    RightShoulder,
    RightElbow,
    RightWrist,
    RightHip,
    RightKnee,
    RightAnkle,
}

impl JointId {
    pub const ALL: [JointId; JOINT_COUNT] = [
        JointId::Head,
        JointId::Neck,
        JointId::Torso,
        JointId::LeftShoulder,
        JointId::LeftElbow,
        JointId::LeftWrist,
        JointId::LeftHip,
        JointId::LeftKnee,
        JointId::LeftAnkle,
        JointId::RightShoulder,
        JointId::RightElbow,
        JointId::RightWrist,
        JointId::RightHip,
        JointId::RightKnee,
        JointId::RightAnkle,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<JointId> {
        Self::ALL.get(index).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SkeletonError {
    #[error("wrong joint count: expected {JOINT_COUNT}, got {0}")]
    WrongJointCount(usize),
    #[error("wrong flattened length: expected {FRAME_DIM}, got {0}")]
    WrongFlatLength(usize),
    #[error("non-finite coordinate at joint {0}")]
    NonFinite(usize),
    #[error("non-finite timestamp")]
    BadTimestamp,
    #[error("degenerate skeleton: {0}")]
    Degenerate(&'static str),
    #[error("empty window")]
    EmptyWindow,
    #[error("stride must be positive")]
    ZeroStride,
    #[error("frame rate must be positive and finite")]
    BadFrameRate,
    #[error("timestamps not strictly increasing at frame {0}")]
    NonMonotonic(usize),
}

/// One time sample of all 15 joints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFrame {
    joints: [Vec3; JOINT_COUNT],
    timestamp: f64,
}

/// Builds a frame from joints given in [`JointId`] order.
pub fn frame_from_joints(joints: &[Vec3], timestamp: f64) -> Result<SkeletonFrame, SkeletonError> {
    let joints: [Vec3; JOINT_COUNT] = joints
        .try_into()
        .map_err(|_| SkeletonError::WrongJointCount(joints.len()))?;
    SkeletonFrame::new(joints, timestamp)
}

impl SkeletonFrame {
    pub fn new(joints: [Vec3; JOINT_COUNT], timestamp: f64) -> Result<Self, SkeletonError> {
        if let Some(bad) = joints.iter().position(|j| !j.is_finite()) {
            return Err(SkeletonError::NonFinite(bad));
        }
        if !timestamp.is_finite() {
            return Err(SkeletonError::BadTimestamp);
        }
        Ok(SkeletonFrame { joints, timestamp })
    }

    pub fn from_flat(values: &[f64], timestamp: f64) -> Result<Self, SkeletonError> {
        if values.len() != FRAME_DIM {
            return Err(SkeletonError::WrongFlatLength(values.len()));
        }
        let mut joints = [Vec3::ZERO; JOINT_COUNT];
        for (joint, xyz) in joints.iter_mut().zip(values.chunks_exact(3)) {
            *joint = Vec3::new(xyz[0], xyz[1], xyz[2]);
        }
        Self::new(joints, timestamp)
    }

    pub fn joint(&self, id: JointId) -> Vec3 {
        self.joints[id.index()]
    }

    pub fn joints(&self) -> &[Vec3; JOINT_COUNT] {
        &self.joints
    }

    pub fn timestamp(&self) -> f64 {
        self.timestamp
    }

    pub fn with_timestamp(mut self, timestamp: f64) -> Self {
        self.timestamp = timestamp;
        self
    }

    /// Returns a copy with every joint shifted by `offset`.
    pub fn translated(&self, offset: Vec3) -> Self {
        let mut out = self.clone();
        for j in out.joints.iter_mut() {
            *j = *j + offset;
        }
        out
    }

    pub fn flatten(&self) -> [f64; FRAME_DIM] {
        flatten_joints(&self.joints)
    }
}

fn flatten_joints(joints: &[Vec3; JOINT_COUNT]) -> [f64; FRAME_DIM] {
    let mut out = [0.0; FRAME_DIM];
    for (chunk, j) in out.chunks_exact_mut(3).zip(joints) {
        chunk.copy_from_slice(&[j.x, j.y, j.z]);
    }
    out
}

/// A frame expressed in the body-centric reference: torso at the origin,
/// shoulder axis in the x-y plane and unit neck-torso distance.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFrame {
    joints: [Vec3; JOINT_COUNT],
    /// Multiplier that was applied to torso-relative coordinates.
    pub scale: f64,
}

impl NormalizedFrame {
    pub fn joint(&self, id: JointId) -> Vec3 {
        self.joints[id.index()]
    }

    pub fn flatten(&self) -> [f64; FRAME_DIM] {
        flatten_joints(&self.joints)
    }
}

/// Translate torso to origin, yaw-rotate so the shoulder axis has no depth
/// component, then scale so `|neck - torso| = 1`.
pub fn normalize_frame(frame: &SkeletonFrame) -> Result<NormalizedFrame, SkeletonError> {
    let torso = frame.joint(JointId::Torso);
    let reference = (frame.joint(JointId::Neck) - torso).norm();
    if reference < DEGENERATE_EPS {
        return Err(SkeletonError::Degenerate("neck coincides with torso"));
    }
    let axis = frame.joint(JointId::LeftShoulder) - frame.joint(JointId::RightShoulder);
    let horizontal = axis.x.hypot(axis.z);
    if horizontal < DEGENERATE_EPS {
        return Err(SkeletonError::Degenerate("shoulder axis has no horizontal extent"));
    }
    // Rotation about y by the shoulder yaw; maps the axis onto +x.
    let (sin, cos) = (axis.z / horizontal, axis.x / horizontal);
    let scale = 1.0 / reference;
    let mut joints = [Vec3::ZERO; JOINT_COUNT];
    for (out, j) in joints.iter_mut().zip(frame.joints.iter()) {
        let p = *j - torso;
        *out = Vec3::new(
            (p.x * cos + p.z * sin) * scale,
            p.y * scale,
            (p.z * cos - p.x * sin) * scale,
        );
    }
    Ok(NormalizedFrame { joints, scale })
}

/// A time-ordered run of frames captured at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameWindow {
    frames: Vec<SkeletonFrame>,
    frame_rate: f64,
}

impl FrameWindow {
    pub fn new(frames: Vec<SkeletonFrame>, frame_rate: f64) -> Result<Self, SkeletonError> {
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(SkeletonError::BadFrameRate);
        }
        if let Some(i) = frames
            .windows(2)
            .position(|w| w[1].timestamp() <= w[0].timestamp())
        {
            return Err(SkeletonError::NonMonotonic(i + 1));
        }
        Ok(FrameWindow { frames, frame_rate })
    }

    /// Frames needed for a canonical recording window at `frame_rate`.
    pub fn canonical_len(frame_rate: f64) -> usize {
        (RECORDING_SECONDS * frame_rate).round() as usize
    }

    pub fn frames(&self) -> &[SkeletonFrame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<SkeletonFrame> {
        self.frames
    }

    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn nominal_duration(&self) -> f64 {
        self.frames.len() as f64 / self.frame_rate
    }

    pub fn translated(&self, offset: Vec3) -> Self {
        FrameWindow {
            frames: self.frames.iter().map(|f| f.translated(offset)).collect(),
            frame_rate: self.frame_rate,
        }
    }
}

/// Ordered 45-dimensional steps fed to the recognizer.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    steps: Vec<[f64; FRAME_DIM]>,
    stride: usize,
}

impl FeatureSequence {
    pub fn new(steps: Vec<[f64; FRAME_DIM]>, stride: usize) -> Self {
        FeatureSequence { steps, stride }
    }

    pub fn steps(&self) -> &[[f64; FRAME_DIM]] {
        &self.steps
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Normalizes and flattens every `stride`-th frame, starting with the first.
pub fn window_to_features(
    window: &FrameWindow,
    stride: usize,
) -> Result<FeatureSequence, SkeletonError> {
    if stride == 0 {
        return Err(SkeletonError::ZeroStride);
    }
    if window.is_empty() {
        return Err(SkeletonError::EmptyWindow);
    }
    let steps = window
        .frames()
        .iter()
        .step_by(stride)
        .map(|f| normalize_frame(f).map(|n| n.flatten()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FeatureSequence { steps, stride })
}
