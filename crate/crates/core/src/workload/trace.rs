//! Text trace format, one record per line:
//!
//! ```text
//! # comment
//! <arrival_cycle> <R|W> <hex address>
//! ```
//!
//! Fields are whitespace separated, the address takes an optional `0x`
//! prefix, and anything after `#` is ignored. Arrival cycles must be
//! nondecreasing. Files ending in `.gz` are read and written gzip-compressed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use super::{OpKind, TraceRecord, WorkloadError};

fn parse_line(line: &str, lineno: usize) -> Result<Option<TraceRecord>, WorkloadError> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let err = |reason: String| WorkloadError::Parse {
        line: lineno,
        reason,
    };
    let mut fields = body.split_whitespace();
    let (Some(cycle), Some(kind), Some(addr), None) =
        (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err(err(format!(
            "expected `<cycle> <R|W> <hex address>`, got {body:?}"
        )));
    };
    let cycle = cycle
        .parse::<u64>()
        .map_err(|e| err(format!("bad cycle {cycle:?}: {e}")))?;
    let kind = kind.parse::<OpKind>().map_err(err)?;
    let hex = addr
        .strip_prefix("0x")
        .or_else(|| addr.strip_prefix("0X"))
        .unwrap_or(addr);
    let address =
        u64::from_str_radix(hex, 16).map_err(|e| err(format!("bad address {addr:?}: {e}")))?;
    Ok(Some(TraceRecord::new(cycle, kind, address)))
}

pub fn parse_trace<R: Read>(stream: R) -> Result<Vec<TraceRecord>, WorkloadError> {
    let reader = BufReader::new(stream);
    let mut out = Vec::new();
    let mut previous = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(rec) = parse_line(&line, i + 1)? {
            if rec.arrival_cycle < previous {
                return Err(WorkloadError::Unordered {
                    line: i + 1,
                    cycle: rec.arrival_cycle,
                    previous,
                });
            }
            previous = rec.arrival_cycle;
            out.push(rec);
        }
    }
    Ok(out)
}

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>, WorkloadError> {
    let io = |source| WorkloadError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    let parsed = if is_gzip(path) {
        parse_trace(MultiGzDecoder::new(file))
    } else {
        parse_trace(file)
    };
    parsed.map_err(|e| match e {
        WorkloadError::Stream(source) => io(source),
        other => other,
    })
}

pub fn write_trace<W: Write>(mut out: W, records: &[TraceRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{} {} {:#x}", r.arrival_cycle, r.kind, r.address)?;
    }
    out.flush()
}

pub fn write_trace_file(path: &Path, records: &[TraceRecord]) -> Result<(), WorkloadError> {
    let io = |source| WorkloadError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = BufWriter::new(File::create(path).map_err(io)?);
    if is_gzip(path) {
        let mut enc = GzEncoder::new(file, Compression::default());
        write_trace(&mut enc, records).map_err(io)?;
        enc.finish().map_err(io)?.flush().map_err(io)
    } else {
        write_trace(file, records).map_err(io)
    }
}
