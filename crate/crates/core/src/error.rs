use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bounding box ({x}, {y}, {w}, {h}): {reason}")]
    InvalidBox {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
        reason: &'static str,
    },

    #[error("confidence {0} outside [0, 1]")]
    InvalidConfidence(f64),

    #[error("frame {index} has {count} detections, limit is {limit}")]
    TooManyDetections {
        index: u64,
        count: usize,
        limit: usize,
    },

    #[error(
        "frame {index} at t={timestamp} does not follow frame {prev_index} at t={prev_timestamp}"
    )]
    NonMonotonicFrame {
        index: u64,
        timestamp: f64,
        prev_index: u64,
        prev_timestamp: f64,
    },

    #[error("segment needs {expected} frames, got {actual}")]
    SegmentLength { expected: usize, actual: usize },

    #[error("unknown object class {0:?}")]
    UnknownClass(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("time {now} is not after previously seen time {last}")]
    TimeRewind { now: f64, last: f64 },

    #[error("event log is not ordered by timestamp at record {index}")]
    UnorderedLog { index: usize },

    #[error("i/o failure after {records_written} complete records ({bytes_written} bytes)")]
    LogWrite {
        records_written: usize,
        bytes_written: u64,
        #[source]
        source: io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("no ground truth")]
    NoGroundTruth,

    #[error("{0}")]
    Metrics(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
