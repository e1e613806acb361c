//! Experiment registry, runner and report tables.

pub mod oracle;
pub mod reference;
pub mod registry;
pub mod table;

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::circuit::{build_experiment, ExperimentKind};
use crate::engine::{run_monte_carlo, PreparedCircuit, SeedPolicy, ShotOptions, ShotRecord};
use crate::error::{Error, Result};
use crate::noise::{apply_improved, NoiseParams};
use crate::scalar::Real;

pub use oracle::{run_ft_oracle, FtProtocol, FtReport, OracleFault, Violation};
pub use registry::{manifest, Accumulator, Protocol, RowKey};
pub use table::{Format, Metric, ResultRow, ResultTable, RunMeta, Source};

/// Shots are simulated and folded into the tallies this many at a time.
pub const CHUNK_SHOTS: u64 = 16_384;

/// Run-wide settings shared by every protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunSettings {
    /// Shots per simulated circuit.
    pub shots: u64,
    pub seed: u64,
    pub workers: usize,
}

/// One registered protocol bound to a parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub protocol: Protocol,
    pub experiments: Vec<ExperimentKind>,
    pub rows: Vec<RowKey>,
    pub shots: u64,
    pub source: Source,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(protocol: Protocol, source: Source, settings: &RunSettings) -> Self {
        ExperimentSpec {
            protocol,
            experiments: protocol.experiments().to_vec(),
            rows: protocol.rows(),
            shots: settings.shots,
            source,
            seed: settings.seed,
        }
    }
}

/// Loads and validates a noise config; also returns the fields that fell
/// back to defaults.
pub fn load_config(path: impl AsRef<Path>) -> Result<(NoiseParams, Vec<&'static str>)> {
    let text = std::fs::read_to_string(path)?;
    let params = NoiseParams::from_json(&text)?;
    Ok((params, NoiseParams::defaulted_fields(&text)?))
}

/// Hex SHA-256 of the canonical JSON form of `params`.
pub fn config_sha256(params: &NoiseParams) -> String {
    Sha256::digest(params.to_json().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn params_for(params: &NoiseParams, source: Source) -> NoiseParams {
    match source {
        Source::Sim => params.clone(),
        Source::Imp => apply_improved(params),
    }
}

/// Seed policy of circuit `kind`. It does not depend on the source, so
/// SIM and IMP runs share their random streams.
pub fn seed_policy(seed: u64, kind: ExperimentKind) -> SeedPolicy {
    SeedPolicy::new(seed).derive(kind.id())
}

/// Simulates shots `range` of circuit `kind`.
pub fn simulate<T: Real>(
    kind: ExperimentKind,
    params: &NoiseParams,
    seed: u64,
    range: std::ops::Range<u64>,
    options: &ShotOptions,
    workers: usize,
) -> Result<Vec<ShotRecord>> {
    let prepared = PreparedCircuit::new(build_experiment(kind)?)?;
    run_monte_carlo::<T>(&prepared, params, range, &seed_policy(seed, kind), options, workers)
}

/// Rows of `protocol` computed from already simulated (or reloaded) records.
pub fn rows_from_records(
    protocol: Protocol,
    source: Source,
    records: &BTreeMap<ExperimentKind, Vec<ShotRecord>>,
) -> Result<Vec<ResultRow>> {
    let mut acc = Accumulator::new(protocol);
    for &kind in protocol.experiments() {
        let r = records
            .get(&kind)
            .ok_or_else(|| Error::InvalidArgument(format!("no {kind} records for {protocol}")))?;
        acc.add(kind, r)?;
    }
    acc.rows(protocol, source)
}

/// Simulates every circuit of `spec` in chunks and returns its rows.
pub fn run_spec<T: Real>(spec: &ExperimentSpec, params: &NoiseParams, workers: usize) -> Result<Vec<ResultRow>> {
    if spec.shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let params = params_for(params, spec.source);
    params.validate()?;
    let mut acc = Accumulator::new(spec.protocol);
    for &kind in &spec.experiments {
        let prepared = PreparedCircuit::new(build_experiment(kind)?)?;
        let policy = seed_policy(spec.seed, kind);
        let mut start = 0;
        while start < spec.shots {
            let end = (start + CHUNK_SHOTS).min(spec.shots);
            let records =
                run_monte_carlo::<T>(&prepared, &params, start..end, &policy, &ShotOptions::default(), workers)?;
            acc.add(kind, &records)?;
            start = end;
        }
    }
    acc.rows(spec.protocol, spec.source)
}

fn meta(params: &NoiseParams, settings: &RunSettings) -> RunMeta {
    RunMeta {
        seed: settings.seed,
        shots: settings.shots,
        config_sha256: config_sha256(params),
        version: crate::VERSION.to_string(),
    }
}

/// Runs one protocol under the configured (`improved = false`) or improved
/// parameters.
pub fn run_experiment(
    protocol: Protocol,
    params: &NoiseParams,
    improved: bool,
    settings: &RunSettings,
) -> Result<ResultTable> {
    let source = if improved { Source::Imp } else { Source::Sim };
    let spec = ExperimentSpec::new(protocol, source, settings);
    Ok(ResultTable {
        meta: meta(params, settings),
        rows: run_spec::<f64>(&spec, params, settings.workers)?,
    })
}

/// Every protocol under every requested source, in manifest order.
pub fn run_all(params: &NoiseParams, sources: &[Source], settings: &RunSettings) -> Result<ResultTable> {
    let mut table = ResultTable::new(meta(params, settings));
    for &source in sources {
        for protocol in Protocol::ALL {
            let spec = ExperimentSpec::new(protocol, source, settings);
            table.rows.extend(run_spec::<f64>(&spec, params, settings.workers)?);
        }
    }
    Ok(table)
}
