//! Desk-scale simulator of a gesture-driven service-robot interaction:
//! skeleton stream → left-hand attention switch → LSTM intent recognition →
//! priority-preemptive task execution with breakpoints.
//!
//! The crate is organized bottom-up:
//!
//! - [`skeleton`]: frames, normalization, feature sequences, stream files
//! - [`gesture`]: synthetic skeleton streams, scenario scripts, datasets
//! - [`switch`]: the attention switch automaton and recording collector
//! - [`recognizer`]: the from-scratch three-layer LSTM classifier
//! - [`executor`]: robot responses, chassis simulation, interruption logic
//! - [`interaction`]: the tick pipeline, event log and scenario runner
//! - [`serve`]: the live WebSocket session used by the operator console
//! - [`cli`]: the `hri` command line
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod activity;
pub mod cli;
pub mod executor;
pub mod gesture;
pub mod interaction;
pub mod recognizer;
pub mod serve;
pub mod skeleton;
pub mod switch;

pub use activity::{ActivityClass, NUM_CLASSES};
