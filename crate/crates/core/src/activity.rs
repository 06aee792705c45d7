//! The eight recognizable interaction activities, in table order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const NUM_CLASSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityClass {
    /// Greet.
    WaveRightHand,
    /// Stop.
    StretchRightHand,
    Salute,
    LiftRightArm,
    /// "Go back".
    WaveForwards,
    /// "Go ahead".
    WaveBackwards,
    /// Perceive environment.
    DrawCircle,
    /// March on the spot.
    WaveArmsAround,
}

impl ActivityClass {
    pub const ALL: [ActivityClass; NUM_CLASSES] = [
        ActivityClass::WaveRightHand,
        ActivityClass::StretchRightHand,
        ActivityClass::Salute,
        ActivityClass::LiftRightArm,
        ActivityClass::WaveForwards,
        ActivityClass::WaveBackwards,
        ActivityClass::DrawCircle,
        ActivityClass::WaveArmsAround,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub const fn name(self) -> &'static str {
        match self {
            ActivityClass::WaveRightHand => "wave_right_hand",
            ActivityClass::StretchRightHand => "stretch_right_hand",
            ActivityClass::Salute => "salute",
            ActivityClass::LiftRightArm => "lift_right_arm",
            ActivityClass::WaveForwards => "wave_forwards",
            ActivityClass::WaveBackwards => "wave_backwards",
            ActivityClass::DrawCircle => "draw_circle",
            ActivityClass::WaveArmsAround => "wave_arms_around",
        }
    }

    /// The interactive intent the activity expresses.
    pub const fn intent(self) -> &'static str {
        match self {
            ActivityClass::WaveRightHand => "greet",
            ActivityClass::StretchRightHand => "stop",
            ActivityClass::Salute => "salute",
            ActivityClass::LiftRightArm => "lift right arm",
            ActivityClass::WaveForwards => "go back",
            ActivityClass::WaveBackwards => "go ahead",
            ActivityClass::DrawCircle => "perceive environment",
            ActivityClass::WaveArmsAround => "march on the spot",
        }
    }
}

impl fmt::Display for ActivityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActivityClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown activity `{s}`"))
    }
}
