use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{body_pose, GestureKind, Pose, SUBJECT_ORIGIN};
use crate::skeleton::{SkeletonError, SkeletonFrame, Vec3, DEFAULT_FRAME_RATE, JOINT_COUNT};

/// Settings shared by scenario compilation and the live session.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub frame_rate: f64,
    pub noise_stddev: f64,
    pub seed: u64,
    pub subject_offset: Vec3,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig {
            frame_rate: DEFAULT_FRAME_RATE,
            noise_stddev: 0.0,
            seed: 0,
            subject_offset: Vec3::ZERO,
        }
    }
}

#[derive(Debug, Clone)]
struct Active {
    kind: GestureKind,
    frame: usize,
    total: usize,
}

/// An endless frame source: idle standing, interrupted by queued gestures
/// played back one after another.
///
/// The left arm position is sticky across gestures: after `raise_left_hand`
/// the subject keeps the hand up until a `lower_left_hand` is played.
#[derive(Debug, Clone)]
pub struct GestureStream {
    config: StreamConfig,
    rng: ChaCha8Rng,
    tick: u64,
    left_held: bool,
    active: Option<Active>,
    queue: VecDeque<GestureKind>,
}

impl GestureStream {
    pub fn new(config: StreamConfig) -> Self {
        GestureStream {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            tick: 0,
            left_held: false,
            active: None,
            queue: VecDeque::new(),
        }
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    /// Queues a gesture; it starts with the next frame if nothing is playing.
    pub fn perform(&mut self, kind: GestureKind) {
        self.queue.push_back(kind);
    }

    /// True when no gesture is playing or queued.
    pub fn is_quiet(&self) -> bool {
        self.active.is_none() && self.queue.is_empty()
    }

    pub fn left_held(&self) -> bool {
        self.left_held
    }

    pub fn current(&self) -> Option<GestureKind> {
        self.active.as_ref().map(|a| a.kind)
    }

    pub fn queued(&self) -> usize {
        self.queue.len()
    }

    /// Index of the frame that the next call to [`next_frame`](Self::next_frame) yields.
    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn next_frame(&mut self) -> Result<SkeletonFrame, SkeletonError> {
        if self.active.is_none() {
            if let Some(kind) = self.queue.pop_front() {
                let total =
                    ((kind.default_duration() * self.config.frame_rate).round() as usize).max(1);
                self.active = Some(Active { kind, frame: 0, total });
            }
        }
        let t = self.tick as f64 / self.config.frame_rate;
        let pose = match &self.active {
            Some(a) => body_pose(a.kind, a.frame as f64 / self.config.frame_rate, self.left_held),
            None => body_pose(GestureKind::Idle, 0.0, self.left_held),
        };
        let origin = SUBJECT_ORIGIN + self.config.subject_offset;
        let frame = place(&pose, origin, self.config.noise_stddev, &mut self.rng, t)?;

        if let Some(a) = &mut self.active {
            a.frame += 1;
            if a.frame >= a.total {
                match a.kind {
                    GestureKind::RaiseLeftHand => self.left_held = true,
                    GestureKind::LowerLeftHand => self.left_held = false,
                    _ => {}
                }
                self.active = None;
            }
        }
        self.tick += 1;
        Ok(frame)
    }
}

/// Moves a body-frame pose to `origin` and adds per-coordinate jitter.
pub(super) fn place<R: Rng>(
    pose: &Pose,
    origin: Vec3,
    noise_stddev: f64,
    rng: &mut R,
    timestamp: f64,
) -> Result<SkeletonFrame, SkeletonError> {
    let mut joints = [Vec3::ZERO; JOINT_COUNT];
    let normal = (noise_stddev > 0.0).then(|| Normal::new(0.0, noise_stddev).expect("finite stddev"));
    for (out, p) in joints.iter_mut().zip(pose) {
        let mut v = *p + origin;
        if let Some(n) = &normal {
            v = v + Vec3::new(n.sample(rng), n.sample(rng), n.sample(rng));
        }
        *out = v;
    }
    SkeletonFrame::new(joints, timestamp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::switch::hand_flags;

    #[test]
    fn left_arm_stays_up_between_raise_and_lower() {
        let mut s = GestureStream::new(StreamConfig::default());
        s.perform(GestureKind::RaiseLeftHand);
        let raised: Vec<bool> = (0..90).map(|_| hand_flags(&s.next_frame().unwrap()).0).collect();
        assert!(!raised[0]);
        assert!(raised[29..].iter().all(|r| *r));
        s.perform(GestureKind::LowerLeftHand);
        for _ in 0..9 {
            s.next_frame().unwrap();
        }
        assert!(!hand_flags(&s.next_frame().unwrap()).0);
        assert!(s.is_quiet());
    }

    #[test]
    fn gestures_queue_back_to_back() {
        let mut s = GestureStream::new(StreamConfig::default());
        s.perform(GestureKind::Idle);
        s.perform(GestureKind::Salute);
        assert_eq!(s.queued(), 2);
        s.next_frame().unwrap();
        assert_eq!(s.current(), Some(GestureKind::Idle));
        for _ in 0..30 {
            s.next_frame().unwrap();
        }
        assert_eq!(s.current(), Some(GestureKind::Salute));
    }

    #[test]
    fn timestamps_follow_tick_index() {
        let mut s = GestureStream::new(StreamConfig::default());
        for i in 0..100u64 {
            assert_eq!(s.next_frame().unwrap().timestamp(), i as f64 / 30.0);
        }
    }
}
