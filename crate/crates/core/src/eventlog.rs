//! JSONL event log: one [`EventRecord`] per line, keys in the order
//! `device_id, timestamp, kind, payload`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model::EventRecord;

/// Writes `records` as JSONL and returns the number of bytes written.
///
/// Records must be ordered by timestamp (ties allowed). On an I/O failure the
/// error carries how many complete records made it to the sink.
pub fn write_event_log<W: Write>(records: &[EventRecord], mut sink: W) -> Result<u64> {
    if let Some(i) = records
        .windows(2)
        .position(|w| w[1].timestamp < w[0].timestamp)
    {
        return Err(Error::UnorderedLog { index: i + 1 });
    }

    let mut bytes: u64 = 0;
    let mut line = Vec::with_capacity(256);
    for (i, record) in records.iter().enumerate() {
        line.clear();
        serde_json::to_writer(&mut line, record).map_err(|e| Error::Parse {
            line: i as u64 + 1,
            message: e.to_string(),
        })?;
        line.push(b'\n');
        sink.write_all(&line).map_err(|source| Error::LogWrite {
            records_written: i,
            bytes_written: bytes,
            source,
        })?;
        bytes += line.len() as u64;
    }
    sink.flush().map_err(|source| Error::LogWrite {
        records_written: records.len(),
        bytes_written: bytes,
        source,
    })?;
    Ok(bytes)
}

/// Reads a JSONL event log. Any malformed line (blank lines included) fails
/// with its 1-based line number.
pub fn read_event_log<R: BufRead>(source: R) -> Result<Vec<EventRecord>> {
    let mut records = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}
