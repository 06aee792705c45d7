//! Executor settings. The text form has one `key = value` per line; `#`
//! starts a comment. Priority keys are response names:
//!
//! ```text
//! moving_backwards = 5
//! circling = 2
//! auto_resume_suspended = true
//! circling_angular_speed = 0.5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::RobotResponse;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutorConfig {
    /// Indexed by response; `stopping` is a command and its entry is unused.
    pub priorities: [u32; 8],
    pub linear_speed: f64,
    pub linear_distance: f64,
    pub circling_angular_speed: f64,
    pub circling_laps: u32,
    pub arm_duration: f64,
    /// Restart the suspended task when the preempting one completes.
    pub auto_resume_suspended: bool,
}

impl Default for ExecutorConfig {
    fn default() -> Self {
        let mut priorities = [1; 8];
        priorities[RobotResponse::Stopping as usize] = u32::MAX;
        priorities[RobotResponse::MovingBackwards as usize] = 5;
        priorities[RobotResponse::MovingForwards as usize] = 5;
        priorities[RobotResponse::Circling as usize] = 2;
        ExecutorConfig {
            priorities,
            linear_speed: 0.2,
            linear_distance: 4.0,
            circling_angular_speed: 0.5,
            circling_laps: 20,
            arm_duration: 5.0,
            auto_resume_suspended: false,
        }
    }
}

impl ExecutorConfig {
    pub fn priority(&self, response: RobotResponse) -> u32 {
        self.priorities[response as usize]
    }

    pub fn set_priority(&mut self, response: RobotResponse, priority: u32) {
        self.priorities[response as usize] = priority;
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Starts from the defaults and applies each line as an override.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExecutorConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected `key = value`".into()))?;
            cfg.set(key, value).map_err(err)?;
        }
        Ok(cfg)
    }

    /// Applies one override by key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn positive(key: &str, value: &str) -> Result<f64, String> {
            match value.parse::<f64>() {
                Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
                _ => Err(format!("`{key}` must be a positive number, got `{value}`")),
            }
        }
        match key {
            "auto_resume_suspended" => {
                self.auto_resume_suspended = value
                    .parse()
                    .map_err(|_| format!("`{key}` must be true or false, got `{value}`"))?
            }
            "circling_angular_speed" => self.circling_angular_speed = positive(key, value)?,
            "linear_speed" => self.linear_speed = positive(key, value)?,
            "linear_distance" => self.linear_distance = positive(key, value)?,
            "arm_duration" => self.arm_duration = positive(key, value)?,
            "circling_laps" => {
                self.circling_laps = match value.parse::<u32>() {
                    Ok(n) if n > 0 => n,
                    _ => return Err(format!("`{key}` must be a positive integer, got `{value}`")),
                }
            }
            "stopping" => return Err("`stopping` is a command and has no priority".into()),
            name => {
                let response: RobotResponse = name.parse().map_err(|_| format!("unknown key `{name}`"))?;
                let p = value
                    .parse::<u32>()
                    .map_err(|_| format!("priority for `{name}` must be a non-negative integer, got `{value}`"))?;
                self.set_priority(response, p);
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in RobotResponse::ALL.into_iter().filter(|r| *r != RobotResponse::Stopping) {
            out.push_str(&format!("{} = {}\n", r.name(), self.priority(r)));
        }
        out.push_str(&format!("linear_speed = {}\n", self.linear_speed));
        out.push_str(&format!("linear_distance = {}\n", self.linear_distance));
        out.push_str(&format!("circling_angular_speed = {}\n", self.circling_angular_speed));
        out.push_str(&format!("circling_laps = {}\n", self.circling_laps));
        out.push_str(&format!("arm_duration = {}\n", self.arm_duration));
        out.push_str(&format!("auto_resume_suspended = {}\n", self.auto_resume_suspended));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_on_defaults() {
        let cfg = ExecutorConfig::parse("# swap\ncircling = 9\nauto_resume_suspended = true\n\n").unwrap();
        assert_eq!(cfg.priority(RobotResponse::Circling), 9);
        assert_eq!(cfg.priority(RobotResponse::MovingBackwards), 5);
        assert!(cfg.auto_resume_suspended);
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ExecutorConfig { circling_angular_speed: 0.75, ..ExecutorConfig::default() };
        cfg.set_priority(RobotResponse::Saluting, 3);
        assert_eq!(ExecutorConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("circling = 2\nflying = 3\n", 2),
            ("circling = -1\n", 1),
            ("\n\ncircling_angular_speed = 0\n", 3),
            ("stopping = 1", 1),
            ("no equals sign", 1),
        ] {
            match ExecutorConfig::parse(text) {
                Err(ConfigError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
