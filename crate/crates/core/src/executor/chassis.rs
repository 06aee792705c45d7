use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Planar chassis pose; heading in radians, wrapped to `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2 {
    pub fn distance_to(&self, other: &Pose2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Unicycle integration over `dt`, exact for constant controls.
pub fn chassis_step(pose: Pose2, v: f64, w: f64, dt: f64) -> Pose2 {
    let th = pose.heading;
    let (dx, dy) = if w.abs() < 1e-12 {
        (v * th.cos() * dt, v * th.sin() * dt)
    } else {
        let th2 = th + w * dt;
        ((v / w) * (th2.sin() - th.sin()), -(v / w) * (th2.cos() - th.cos()))
    };
    Pose2 {
        x: pose.x + dx,
        y: pose.y + dy,
        heading: wrap_angle(th + w * dt),
    }
}
