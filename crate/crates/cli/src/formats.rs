//! Line-delimited JSON files for tables and traces, plus class profiles.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flowmatch::classifier::SignatureKey;
use flowmatch::{FieldSet, FlowEntry, FlowTable, LayerSignature, PacketHeader};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRecord {
    id: u64,
    priority: u32,
    #[serde(rename = "match")]
    fields: FieldSet,
    action: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceRecord {
    header: FieldSet,
    len: u32,
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

/// Non-blank lines with their 1-based line numbers.
fn lines(path: &Path) -> Result<Vec<(usize, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

pub fn parse_table<R: BufRead>(input: R, source: &str) -> Result<FlowTable, CliError> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CliError::Io {
            path: source.to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::input(source, i + 1, msg);
        let rec: TableRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        if !seen.insert(rec.id) {
            return Err(bad(format!("duplicate entry id {}", rec.id)));
        }
        entries.push(FlowEntry::new(rec.id, rec.priority, rec.fields, rec.action));
    }
    Ok(FlowTable::from_entries(entries).expect("ids checked while reading"))
}

pub fn read_table(path: &Path) -> Result<FlowTable, CliError> {
    parse_table(open(path)?, &path.display().to_string())
}

pub fn parse_trace<R: BufRead>(input: R, source: &str) -> Result<Vec<PacketHeader>, CliError> {
    let mut trace = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CliError::Io {
            path: source.to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::input(source, i + 1, msg);
        let rec: TraceRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        trace.push(PacketHeader::new(rec.header, rec.len).map_err(|e| bad(e.to_string()))?);
    }
    Ok(trace)
}

pub fn read_trace(path: &Path) -> Result<Vec<PacketHeader>, CliError> {
    parse_trace(open(path)?, &path.display().to_string())
}

pub fn write_table<W: Write>(table: &FlowTable, mut out: W) -> io::Result<()> {
    for e in table.entries() {
        let rec = TableRecord {
            id: e.id,
            priority: e.priority,
            fields: e.fields,
            action: e.action.clone(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_trace<W: Write>(trace: &[PacketHeader], mut out: W) -> io::Result<()> {
    for p in trace {
        let rec = TraceRecord {
            header: *p.fields(),
            len: p.byte_len(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Creates `path` and hands a buffered writer to `write`.
pub fn write_file<F>(path: &Path, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write(&mut out)
        .and_then(|()| out.flush())
        .map_err(|e| CliError::io(path, e))
}

/// `c1-c2-c3-c4:count` lines; `#` starts a comment.
pub fn read_profile(path: &Path) -> Result<Vec<(LayerSignature, usize)>, CliError> {
    let name = path.display().to_string();
    let mut profile = Vec::new();
    for (n, line) in lines(path)? {
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::input(&name, n, msg);
        let (key, count) = text
            .split_once(':')
            .ok_or_else(|| bad(format!("expected `c1-c2-c3-c4:count`, got `{text}`")))?;
        let key: SignatureKey = key.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|e| bad(format!("bad count `{}`: {e}", count.trim())))?;
        profile.push((key.signature(), count));
    }
    Ok(profile)
}
