//! JSON-lines dump of shot records for offline re-decoding.
//!
//! The first line is a header `{"format": "baconshor-shots", "version": 1,
//! "experiment": ...}`; each further line holds one shot, with every block
//! written as a string of `0`/`1` in block order.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::circuit::Block;
use crate::engine::shot::{FaultEvent, ShotRecord};
use crate::error::{Error, Result};

pub const FORMAT: &str = "baconshor-shots";
pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    experiment: String,
}

#[derive(Serialize, Deserialize)]
struct Line {
    shot: u64,
    blocks: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    faults: Option<Vec<FaultEvent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phonons: Option<Vec<u64>>,
}

fn encode(bits: u16, size: usize) -> String {
    (1..=size)
        .map(|k| if bits >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn decode(text: &str) -> Result<u16> {
    if text.is_empty() || text.len() > 15 {
        return Err(Error::MalformedRecord(format!("bad block length in `{text}`")));
    }
    text.chars().enumerate().try_fold(0u16, |acc, (k, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << (k + 1)),
        _ => Err(Error::MalformedRecord(format!("bad bit `{c}` in `{text}`"))),
    })
}

pub fn write_records<W: Write>(mut w: W, experiment: &str, records: &[ShotRecord]) -> Result<()> {
    let header = Header {
        format: FORMAT.into(),
        version: VERSION,
        experiment: experiment.into(),
    };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    for r in records {
        let blocks = r
            .blocks
            .iter()
            .map(|(b, &bits)| (b.name().to_string(), encode(bits, r.block_sizes[b])))
            .collect();
        let line = Line {
            shot: r.shot,
            blocks,
            faults: r.fault_log.clone(),
            phonons: r.phonon_trace.clone(),
        };
        writeln!(w, "{}", serde_json::to_string(&line)?)?;
    }
    Ok(())
}

/// Reads a dump; returns the experiment id and the records.
pub fn read_records<R: BufRead>(r: R) -> Result<(String, Vec<ShotRecord>)> {
    let mut lines = r.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::MalformedRecord("empty dump".into()))??;
    let header: Header = serde_json::from_str(&first)
        .map_err(|e| Error::MalformedRecord(format!("header: {e}")))?;
    if header.format != FORMAT || header.version != VERSION {
        return Err(Error::MalformedRecord(format!(
            "unsupported dump {} v{}",
            header.format, header.version
        )));
    }
    let mut records = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line)
            .map_err(|e| Error::MalformedRecord(format!("line {}: {e}", n + 2)))?;
        let mut blocks = BTreeMap::new();
        let mut block_sizes = BTreeMap::new();
        for (name, bits) in &parsed.blocks {
            let block: Block = name.parse()?;
            blocks.insert(block, decode(bits)?);
            block_sizes.insert(block, bits.len());
        }
        records.push(ShotRecord {
            shot: parsed.shot,
            blocks,
            block_sizes,
            fault_log: parsed.faults,
            phonon_trace: parsed.phonons,
        });
    }
    Ok((header.experiment, records))
}
