//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or runtime error, 2 configuration error,
//! 3 fault-tolerance violation.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use baconshor::circuit::{build_experiment, build_experiment_with, ExperimentKind};
use baconshor::engine::{default_workers, read_records, write_records, ShotOptions};
use baconshor::error::Error;
use baconshor::experiments::{
    config_sha256, load_config, params_for, rows_from_records, run_all, run_experiment, run_ft_oracle, simulate, Format,
    FtProtocol, Protocol, ResultTable, RunMeta, RunSettings, Source,
};
use baconshor::noise::{fit_heating_rate, fit_mean_phonon, NoiseParams};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "baconshor", version, about = "Bacon-Shor syndrome extraction simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Noise configuration (JSON). Built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; defaults to BACONSHOR_WORKERS or all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one protocol and print its rows.
    Run {
        experiment: String,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        /// Use the projected improved parameters.
        #[arg(long)]
        improved: bool,
        /// Also write every shot record to DIR/<circuit>.jsonl.
        #[arg(long, value_name = "DIR")]
        dump_shots: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute a protocol's rows from dumped shot records.
    Decode {
        experiment: String,
        dir: PathBuf,
        #[arg(long)]
        improved: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check a protocol against every single fault. Exits 3 when the result
    /// contradicts the protocol's expected fault tolerance.
    Oracle {
        protocol: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Simulate every protocol under the configured and improved parameters.
    Table {
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 200_000)]
        shots: u64,
        /// Comma-separated sources to run.
        #[arg(long, default_value = "SIM,IMP")]
        sources: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print a circuit's native gates as JSON lines.
    DumpCircuit {
        experiment: String,
        /// Keep every rotation of the gate decompositions.
        #[arg(long)]
        unfused: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the mean phonon number (and heating rate) from a CSV with
    /// columns `u`, `eps_bar` and optionally `gamma`.
    CalibrateFit { csv: PathBuf },
}

enum Failure {
    Usage(String),
    Config(Error),
    Runtime(Error),
    Violation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Probability { .. } => Failure::Config(e),
            e => Failure::Runtime(e),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(Error::Io(e))
    }
}

fn load_params(path: Option<&Path>) -> Result<NoiseParams, Failure> {
    let Some(path) = path else {
        return Ok(NoiseParams::default());
    };
    match load_config(path) {
        Ok((params, defaulted)) => {
            if !defaulted.is_empty() {
                eprintln!("config: defaults used for {}", defaulted.join(", "));
            }
            Ok(params)
        }
        // Anything wrong with the config file itself is a config error.
        Err(e) => Err(Failure::Config(e)),
    }
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, Failure> {
    s.parse().map_err(|e: Error| Failure::Usage(e.to_string()))
}

fn settings(common: &Common, shots: u64) -> RunSettings {
    RunSettings {
        shots,
        seed: common.seed,
        workers: common.workers.unwrap_or_else(default_workers),
    }
}

fn emit(table: &ResultTable, common: &Common) -> Result<(), Failure> {
    let format: Format = parse(&common.format)?;
    let mut w = output(common.out.as_deref())?;
    table.emit(format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn meta(params: &NoiseParams, common: &Common, shots: u64) -> RunMeta {
    RunMeta {
        seed: common.seed,
        shots,
        config_sha256: config_sha256(params),
        version: baconshor::VERSION.to_string(),
    }
}

fn source(improved: bool) -> Source {
    if improved {
        Source::Imp
    } else {
        Source::Sim
    }
}

fn dump_path(dir: &Path, kind: ExperimentKind) -> PathBuf {
    dir.join(format!("{}.jsonl", kind.id()))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { experiment, shots, improved, dump_shots, common } => {
            let protocol: Protocol = parse(&experiment)?;
            let params = load_params(common.config.as_deref())?;
            let s = settings(&common, shots);
            let Some(dir) = dump_shots else {
                return emit(&run_experiment(protocol, &params, improved, &s)?, &common);
            };
            // Keep the records in memory so the table and the dump agree.
            std::fs::create_dir_all(&dir)?;
            let p = params_for(&params, source(improved));
            let mut records = BTreeMap::new();
            for &kind in protocol.experiments() {
                let r = simulate::<f64>(kind, &p, s.seed, 0..shots, &ShotOptions::default(), s.workers)?;
                let mut w = BufWriter::new(File::create(dump_path(&dir, kind))?);
                write_records(&mut w, kind.id(), &r)?;
                w.flush()?;
                records.insert(kind, r);
            }
            let table = ResultTable {
                meta: meta(&params, &common, shots),
                rows: rows_from_records(protocol, source(improved), &records)?,
            };
            emit(&table, &common)
        }
        Command::Decode { experiment, dir, improved, common } => {
            let protocol: Protocol = parse(&experiment)?;
            let params = load_params(common.config.as_deref())?;
            let mut records = BTreeMap::new();
            let mut shots = 0;
            for &kind in protocol.experiments() {
                let (name, r) = read_records(BufReader::new(File::open(dump_path(&dir, kind))?))?;
                if name != kind.id() {
                    return Err(Error::MalformedRecord(format!("expected {kind} records, found {name}")).into());
                }
                shots = r.len() as u64;
                records.insert(kind, r);
            }
            let table = ResultTable {
                meta: meta(&params, &common, shots),
                rows: rows_from_records(protocol, source(improved), &records)?,
            };
            emit(&table, &common)
        }
        Command::Oracle { protocol, json } => {
            let protocol: FtProtocol = parse(&protocol)?;
            let report = run_ft_oracle(protocol)?;
            let mut out = io::stdout().lock();
            if json {
                serde_json::to_writer_pretty(&mut out, &report).map_err(Error::from)?;
                writeln!(out)?;
            } else {
                writeln!(
                    out,
                    "{}: {} faults checked, {} violations (expected {})",
                    report.protocol,
                    report.faults_checked,
                    report.violations.len(),
                    if report.expected_clean { "none" } else { "some" }
                )?;
                for v in &report.violations {
                    writeln!(out, "  p_error={:.6} {}", v.p_error, v.location)?;
                }
            }
            if report.meets_expectation() {
                Ok(())
            } else {
                Err(Failure::Violation)
            }
        }
        Command::Table { all, shots, sources, common } => {
            if !all {
                return Err(Failure::Usage("table needs --all".into()));
            }
            let sources = sources.split(',').map(|s| parse::<Source>(s.trim())).collect::<Result<Vec<_>, _>>()?;
            let params = load_params(common.config.as_deref())?;
            let table = run_all(&params, &sources, &settings(&common, shots))?;
            emit(&table, &common)
        }
        Command::DumpCircuit { experiment, unfused, out } => {
            let kind: ExperimentKind = parse(&experiment)?;
            let circuit = if unfused { build_experiment_with(kind, false)? } else { build_experiment(kind)? };
            let mut w = output(out.as_deref())?;
            circuit.dump_jsonl(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::CalibrateFit { csv } => calibrate(&csv),
    }
}

fn calibrate(path: &Path) -> Result<(), Failure> {
    let bad = |m: String| Failure::Runtime(Error::MalformedRecord(m));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let u_col = col("u").ok_or_else(|| bad("missing column `u`".into()))?;
    let (eps_col, gamma_col) = (col("eps_bar"), col("gamma"));
    if eps_col.is_none() && gamma_col.is_none() {
        return Err(bad("need a column `eps_bar` or `gamma`".into()));
    }
    let mut u = Vec::new();
    let mut eps = Vec::new();
    let mut gamma = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |c: usize| -> Result<f64, Failure> {
            rec.get(c)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| bad(format!("row {}: column {c} is not a number", line + 1)))
        };
        u.push(num(u_col)?);
        if let Some(c) = eps_col {
            eps.push(num(c)?);
        }
        if let Some(c) = gamma_col {
            gamma.push(num(c)?);
        }
    }
    if eps_col.is_some() {
        let fit = fit_mean_phonon(&eps, &u)?;
        println!("n_bar0 = {:.3} +/- {:.3}", fit.slope, fit.std_error);
    }
    if gamma_col.is_some() {
        let fit = fit_heating_rate(&gamma, &u)?;
        println!("n_dot = {:.6} +/- {:.6} (per unit time of gamma)", fit.slope, fit.std_error);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Violation) => ExitCode::from(3),
    }
}
