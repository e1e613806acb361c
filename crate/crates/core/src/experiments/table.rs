//! Result rows and their CSV / JSON serialization.
//!
//! Column order is fixed: `protocol, mode, metric, stratum, k, n, point,
//! lo, hi, source`. Empty cells mean "not applicable": `stratum` outside the
//! conditional rows, `k`/`n` for combined estimates, and all numbers when
//! no shot was accepted.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{EstimateCI, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "LER")]
    Ler,
    #[serde(rename = "DSTB")]
    Dstb,
    #[serde(rename = "RR")]
    Rr,
    #[serde(rename = "mu")]
    Mu,
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "delta")]
    Delta,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Ler => "LER",
            Metric::Dstb => "DSTB",
            Metric::Rr => "RR",
            Metric::Mu => "mu",
            Metric::Lambda => "lambda",
            Metric::Delta => "delta",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which parameter set produced a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Source {
    /// The configured noise parameters.
    #[serde(rename = "SIM")]
    Sim,
    /// The same parameters after the projected hardware improvements.
    #[serde(rename = "IMP")]
    Imp,
}

impl Source {
    pub const ALL: [Source; 2] = [Source::Sim, Source::Imp];

    pub fn name(self) -> &'static str {
        match self {
            Source::Sim => "SIM",
            Source::Imp => "IMP",
        }
    }
}

impl FromStr for Source {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SIM" | "sim" => Ok(Source::Sim),
            "IMP" | "imp" => Ok(Source::Imp),
            _ => Err(Error::InvalidArgument(format!("unknown source `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub protocol: String,
    pub mode: String,
    pub metric: Metric,
    pub stratum: Option<String>,
    pub k: Option<u64>,
    pub n: Option<u64>,
    pub point: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub source: Source,
}

impl ResultRow {
    pub fn key(&self) -> (String, String, Metric, Option<String>, Source) {
        (self.protocol.clone(), self.mode.clone(), self.metric, self.stratum.clone(), self.source)
    }

    /// Interval view of the row, if it carries numbers.
    pub fn interval(&self) -> Option<Interval> {
        Some(Interval { point: self.point?, lo: self.lo?, hi: self.hi? })
    }

    pub(crate) fn from_estimate(
        key: (&str, &str, Metric, Option<String>, Source),
        counts: (u64, u64),
        estimate: Option<EstimateCI>,
    ) -> Self {
        let (protocol, mode, metric, stratum, source) = key;
        ResultRow {
            protocol: protocol.into(),
            mode: mode.into(),
            metric,
            stratum,
            k: Some(counts.0),
            n: Some(counts.1),
            point: estimate.map(|e| e.point),
            lo: estimate.map(|e| e.lo),
            hi: estimate.map(|e| e.hi),
            source,
        }
    }

    pub(crate) fn from_interval(key: (&str, &str, Metric, Option<String>, Source), interval: Option<Interval>) -> Self {
        let (protocol, mode, metric, stratum, source) = key;
        ResultRow {
            protocol: protocol.into(),
            mode: mode.into(),
            metric,
            stratum,
            k: None,
            n: None,
            point: interval.map(|e| e.point),
            lo: interval.map(|e| e.lo),
            hi: interval.map(|e| e.hi),
            source,
        }
    }
}

/// What produced a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub shots: u64,
    /// SHA-256 of the canonical JSON of the noise parameters.
    pub config_sha256: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub meta: RunMeta,
    pub rows: Vec<ResultRow>,
}

pub const CSV_COLUMNS: [&str; 10] = ["protocol", "mode", "metric", "stratum", "k", "n", "point", "lo", "hi", "source"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::MalformedRecord(format!("csv: {other:?}")),
    }
}

impl ResultTable {
    pub fn new(meta: RunMeta) -> Self {
        ResultTable { meta, rows: Vec::new() }
    }

    pub fn find(&self, protocol: &str, mode: &str, metric: Metric, source: Source) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.protocol == protocol && r.mode == mode && r.metric == metric && r.source == source)
    }

    /// Rows only; the run metadata is carried by the JSON form.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        out.write_record(CSV_COLUMNS).map_err(csv_error)?;
        for row in &self.rows {
            out.serialize(row).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv_rows<R: Read>(r: R) -> Result<Vec<ResultRow>> {
        let mut input = csv::Reader::from_reader(r);
        let header: Vec<String> = input.headers().map_err(csv_error)?.iter().map(String::from).collect();
        if header != CSV_COLUMNS {
            return Err(Error::MalformedRecord(format!("unexpected csv header {header:?}")));
        }
        input.deserialize().map(|row| row.map_err(csv_error)).collect()
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn emit<W: Write>(&self, format: Format, w: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    pub fn to_string(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.emit(format, &mut buf)?;
        Ok(String::from_utf8(buf).expect("serializers write utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> RunMeta {
        RunMeta { seed: 1, shots: 10, config_sha256: "ab".into(), version: "0".into() }
    }

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(meta());
        t.rows.push(ResultRow {
            protocol: "shor".into(),
            mode: "round1".into(),
            metric: Metric::Mu,
            stratum: Some("01".into()),
            k: Some(3),
            n: Some(10),
            point: Some(0.3),
            lo: Some(0.0667395111777),
            hi: Some(0.652454398),
            source: Source::Sim,
        });
        t.rows.push(ResultRow {
            protocol: "shor".into(),
            mode: "adaptive2".into(),
            metric: Metric::Ler,
            stratum: None,
            k: None,
            n: None,
            point: Some(1.0 / 3.0),
            lo: None,
            hi: None,
            source: Source::Imp,
        });
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let s = ResultTable::new(meta()).to_string(Format::Csv).unwrap();
        assert_eq!(s, "protocol,mode,metric,stratum,k,n,point,lo,hi,source\n");
    }

    #[test]
    fn csv_layout() {
        let s = sample().to_string(Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "shor,round1,mu,01,3,10,0.3,0.0667395111777,0.652454398,SIM");
        assert_eq!(lines[2], "shor,adaptive2,LER,,,,0.3333333333333333,,,IMP");
        let back = ResultTable::read_csv_rows(s.as_bytes()).unwrap();
        assert_eq!(back, sample().rows);
    }

    #[test]
    fn json_round_trip() {
        let t = sample();
        let s = t.to_string(Format::Json).unwrap();
        let back = ResultTable::read_json(s.as_bytes()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_string(Format::Json).unwrap(), s);
    }
}
