//! Newline-delimited file formats for computations and snapshots: one
//! self-describing JSON object per line, a versioned header record first.
//!
//! Trace file: a header with `region_count`, `process_count`, and
//! `initial_values`, then one record per event with fields `id`, `p`, `r`,
//! `rt`, `kind`, `written`. Snapshot file: a header with `region_count`,
//! then one record per region with fields `r`, `v`, `t`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Computation, Event, ModelError, Snapshot, SnapshotEntry, Value};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceHeader {
    format_version: u32,
    region_count: usize,
    process_count: usize,
    initial_values: Vec<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotHeader {
    format_version: u32,
    region_count: usize,
}

fn check_version(version: u32) -> Result<(), TraceError> {
    if version != FORMAT_VERSION {
        return Err(TraceError::Format(format!(
            "format_version {version} not supported (expected {FORMAT_VERSION})"
        )));
    }
    Ok(())
}

pub fn write_computation<W: Write>(mut w: W, comp: &Computation) -> Result<(), TraceError> {
    let header = TraceHeader {
        format_version: FORMAT_VERSION,
        region_count: comp.region_count(),
        process_count: comp.process_count(),
        initial_values: comp.initial_values().to_vec(),
    };
    writeln!(
        w,
        "{}",
        serde_json::to_string(&header).expect("serializable")
    )?;
    for e in comp.events() {
        writeln!(w, "{}", serde_json::to_string(e).expect("serializable"))?;
    }
    Ok(())
}

pub fn computation_to_string(comp: &Computation) -> String {
    let mut buf = Vec::new();
    write_computation(&mut buf, comp).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn read_computation<R: BufRead>(r: R) -> Result<Computation, TraceError> {
    let mut lines = numbered_lines(r);
    let (line_no, header_line) = lines
        .next()
        .transpose()?
        .ok_or_else(|| TraceError::Format("empty trace file".into()))?;
    let header: TraceHeader = parse(line_no, &header_line)?;
    check_version(header.format_version)?;
    let mut events: Vec<Event> = Vec::new();
    for item in lines {
        let (line_no, line) = item?;
        events.push(parse(line_no, &line)?);
    }
    Ok(Computation::new(
        header.region_count,
        header.process_count,
        header.initial_values,
        events,
    )?)
}

pub fn write_snapshot<W: Write>(mut w: W, s: &Snapshot) -> Result<(), TraceError> {
    let header = SnapshotHeader {
        format_version: FORMAT_VERSION,
        region_count: s.region_count(),
    };
    writeln!(
        w,
        "{}",
        serde_json::to_string(&header).expect("serializable")
    )?;
    for entry in s.entries() {
        writeln!(w, "{}", serde_json::to_string(entry).expect("serializable"))?;
    }
    Ok(())
}

pub fn snapshot_to_string(s: &Snapshot) -> String {
    let mut buf = Vec::new();
    write_snapshot(&mut buf, s).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn read_snapshot<R: BufRead>(r: R) -> Result<Snapshot, TraceError> {
    let mut lines = numbered_lines(r);
    let (line_no, header_line) = lines
        .next()
        .transpose()?
        .ok_or_else(|| TraceError::Format("empty snapshot file".into()))?;
    let header: SnapshotHeader = parse(line_no, &header_line)?;
    check_version(header.format_version)?;
    let mut entries: Vec<SnapshotEntry> = Vec::new();
    for item in lines {
        let (line_no, line) = item?;
        entries.push(parse(line_no, &line)?);
    }
    if entries.len() != header.region_count {
        return Err(TraceError::Format(format!(
            "snapshot lists {} regions, header says {}",
            entries.len(),
            header.region_count
        )));
    }
    Ok(Snapshot::from_entries(entries)?)
}

fn numbered_lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String), TraceError>> {
    r.lines()
        .enumerate()
        .filter(|(_, line)| !matches!(line, Ok(l) if l.trim().is_empty()))
        .map(|(i, line)| Ok((i + 1, line?)))
}

fn parse<T: for<'de> Deserialize<'de>>(line: usize, text: &str) -> Result<T, TraceError> {
    serde_json::from_str(text).map_err(|source| TraceError::Json { line, source })
}
