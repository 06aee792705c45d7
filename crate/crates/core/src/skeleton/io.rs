//! Line-delimited skeleton stream files.
//!
//! ```text
//! #skeleton-v1 rate=30
//! 0 x1 y1 z1 ... x15 y15 z15
//! ```

use std::io::{BufRead, Write};

use thiserror::Error;

use super::{FrameWindow, SkeletonError, SkeletonFrame, FRAME_DIM};

const HEADER: &str = "#skeleton-v1";

#[derive(Debug, Error)]
pub enum StreamFileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing or malformed header (expected `{HEADER} rate=<Hz>`)")]
    Header,
    #[error("line {line}: expected 46 fields, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: bad number `{token}`")]
    Number { line: usize, token: String },
    #[error("line {line}: {source}")]
    Frame {
        line: usize,
        #[source]
        source: SkeletonError,
    },
    #[error(transparent)]
    Window(SkeletonError),
}

pub fn write_stream<W: Write>(mut out: W, window: &FrameWindow) -> std::io::Result<()> {
    writeln!(out, "{HEADER} rate={}", window.frame_rate())?;
    for frame in window.frames() {
        write!(out, "{}", frame.timestamp())?;
        for v in frame.flatten() {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_stream<R: BufRead>(input: R) -> Result<FrameWindow, StreamFileError> {
    let mut lines = input.lines().enumerate();
    let rate = loop {
        let Some((_, line)) = lines.next() else {
            return Err(StreamFileError::Header);
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        break parse_header(&line).ok_or(StreamFileError::Header)?;
    };

    let mut frames = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let values = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| StreamFileError::Number {
                    line: line_no,
                    token: tok.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != FRAME_DIM + 1 {
            return Err(StreamFileError::FieldCount {
                line: line_no,
                got: values.len(),
            });
        }
        let frame = SkeletonFrame::from_flat(&values[1..], values[0])
            .map_err(|source| StreamFileError::Frame { line: line_no, source })?;
        frames.push(frame);
    }
    FrameWindow::new(frames, rate).map_err(StreamFileError::Window)
}

fn parse_header(line: &str) -> Option<f64> {
    let mut parts = line.split_whitespace();
    if parts.next()? != HEADER {
        return None;
    }
    let rate = parts.next()?.strip_prefix("rate=")?.parse::<f64>().ok()?;
    (rate.is_finite() && rate > 0.0).then_some(rate)
}
