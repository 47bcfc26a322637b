//! CSV detection datasets with header `frame,class,conf,x,y,w,h`.
//!
//! The same format holds ground truth and predictions.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundingBox, Detection};

pub const HEADER: [&str; 7] = ["frame", "class", "conf", "x", "y", "w", "h"];

/// Detections of one frame, keyed by frame index.
pub type FrameDetections = (u64, Vec<Detection>);

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    frame: u64,
    class: String,
    conf: f64,
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

/// Parses a dataset and groups rows by ascending frame index. Rows of one
/// frame keep their file order.
pub fn read_annotations<R: Read>(source: R) -> Result<Vec<FrameDetections>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers().map_err(|e| csv_error(1, e))?.clone();
    if headers.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header {:?}, found {:?}",
                HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut frames: BTreeMap<u64, Vec<Detection>> = BTreeMap::new();
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(line, e)
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: Row = record
            .deserialize(Some(&headers))
            .map_err(|e| csv_error(line, e))?;
        let detection = parse_row(&row).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        frames.entry(row.frame).or_default().push(detection);
    }
    Ok(frames.into_iter().collect())
}

fn parse_row(row: &Row) -> Result<Detection> {
    let class = row.class.parse()?;
    let bbox = BoundingBox::new(row.x, row.y, row.w, row.h)?;
    Detection::new(class, row.conf, bbox)
}

fn csv_error(line: u64, e: csv::Error) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Writes a dataset in the format [`read_annotations`] accepts.
pub fn write_annotations<W: Write>(frames: &[FrameDetections], sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(sink);
    writer
        .write_record(HEADER)
        .map_err(|e| Error::Io(e.into()))?;
    for (frame, detections) in frames {
        for d in detections {
            let b = d.bbox();
            writer
                .serialize(Row {
                    frame: *frame,
                    class: d.class().to_string(),
                    conf: d.confidence(),
                    x: b.x(),
                    y: b.y(),
                    w: b.w(),
                    h: b.h(),
                })
                .map_err(|e| Error::Io(e.into()))?;
        }
    }
    writer.flush()?;
    Ok(())
}
