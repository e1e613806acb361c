//! Acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! `BACONSHOR_ACCEPTANCE_SHOTS` overrides the shot count of the statistical
//! criteria (default 200000). Criteria listed in `KNOWN_RED` are reported
//! but do not fail the target; see the README for why.

use std::collections::BTreeMap;
use std::time::Instant;

use baconshor::circuit::{build_cnot, build_prep_plus, build_prep_zero, schedule, ExperimentKind, GateDurations, GateKind, DATA_IONS};
use baconshor::code::{COLUMNS, ROWS};
use baconshor::decode::Combination;
use baconshor::engine::{final_state, read_records, write_records, PreparedCircuit, ShotOptions, StateVector};
use baconshor::experiments::reference::{conditional_rates, lookup};
use baconshor::experiments::{
    rows_from_records, run_all, run_experiment, run_ft_oracle, simulate, Format, FtProtocol, Metric, Protocol, ResultRow,
    ResultTable, RunSettings, Source,
};
use baconshor::noise::{advance_phonons, rabi_decay_f, sample_initial_phonons, MotionalState, NoiseParams};
use baconshor::stats::estimate_ci;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, Discrete};

/// Criteria that fail under the shipped configuration.
const KNOWN_RED: &[u32] = &[4, 5];

const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Collects named sub-checks; the criterion passes when all of them do.
#[derive(Default)]
struct Checks(Vec<(String, bool)>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push((name.into(), ok));
    }

    fn outcome(self, extra: String) -> Outcome {
        let failed: Vec<_> = self.0.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
        let detail = if failed.is_empty() {
            format!("{} checks ok; {extra}", self.0.len())
        } else {
            format!("failed: {}; {extra}", failed.join(", "))
        };
        Outcome {
            pass: failed.is_empty(),
            detail,
        }
    }
}

fn workers() -> usize {
    baconshor::engine::default_workers()
}

fn shots() -> u64 {
    std::env::var("BACONSHOR_ACCEPTANCE_SHOTS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000)
}

fn target_state(rows: bool) -> Vec<Complex<f64>> {
    (0..512usize)
        .map(|idx| {
            let bit = |q: usize| (idx >> (q - 1)) & 1;
            let ok = if rows {
                ROWS.iter().all(|r| r.iter().map(|&q| bit(q)).sum::<usize>() % 2 == 0)
            } else {
                COLUMNS.iter().all(|c| bit(c[0]) == bit(c[1]) && bit(c[1]) == bit(c[2]))
            };
            let amp = if rows { 0.125 } else { 0.125f64.sqrt() };
            Complex::new(if ok { amp } else { 0.0 }, 0.0)
        })
        .collect()
}

fn noiseless_exactness() -> Outcome {
    let mut checks = Checks::default();
    let settings = RunSettings {
        shots: 10_000,
        seed: SEED,
        workers: workers(),
    };
    for protocol in Protocol::ALL {
        let table = run_experiment(protocol, &NoiseParams::noiseless(), false, &settings).unwrap();
        let bad = table
            .rows
            .iter()
            .filter(|r| matches!(r.metric, Metric::Ler | Metric::Dstb | Metric::Rr))
            .filter(|r| r.point != Some(0.0))
            .count();
        checks.add(format!("{} zero rates", protocol.id()), bad == 0);
    }
    let mut worst: f64 = 1.0;
    for (circ, rows) in [
        (build_prep_zero(&DATA_IONS).unwrap(), true),
        (build_prep_plus(&DATA_IONS).unwrap(), false),
    ] {
        let prepared = PreparedCircuit::new(schedule(&circ, &GateDurations::default()).unwrap()).unwrap();
        let state = final_state(&prepared, None).unwrap();
        let target = StateVector::from_amplitudes(&DATA_IONS, target_state(rows)).unwrap();
        worst = worst.min(state.fidelity(&target).unwrap());
    }
    checks.add("prep fidelity", worst >= 1.0 - 1e-10);
    checks.outcome(format!("worst prep fidelity 1-{:.1e}", 1.0 - worst))
}

fn fault_tolerance() -> Outcome {
    let mut checks = Checks::default();
    let mut summary = Vec::new();
    let circuit = baconshor::experiments::oracle::oracle_circuit(ExperimentKind::ShorE1).unwrap();
    for protocol in FtProtocol::ALL {
        let report = run_ft_oracle(protocol).unwrap();
        summary.push(format!("{} {}/{}", protocol.id(), report.violations.len(), report.faults_checked));
        if protocol.expected_clean() {
            checks.add(format!("{} clean", protocol.id()), report.violations.is_empty());
        } else {
            checks.add(format!("{} has violations", protocol.id()), !report.violations.is_empty());
            checks.add(
                format!("{} violations are internal", protocol.id()),
                report.violations.iter().all(|v| v.is_internal(&circuit)),
            );
        }
    }
    checks.outcome(format!("violations/faults: {}", summary.join(", ")))
}

fn table_arithmetic() -> Outcome {
    let mut checks = Checks::default();
    let rates = conditional_rates("EXP").unwrap();
    let mut got = Vec::new();
    for variant in Combination::ALL {
        let expect = lookup("shor", variant.name(), Metric::Ler, None, "EXP").unwrap();
        let value = rates.combine(variant);
        got.push(format!("{} {:.2}%", variant.name(), 100.0 * value));
        checks.add(variant.name(), (value - expect).abs() <= 1e-3);
    }
    checks.outcome(got.join(", "))
}

fn row<'a>(table: &'a ResultTable, protocol: &str, mode: &str, metric: Metric, source: Source) -> Option<&'a ResultRow> {
    table.find(protocol, mode, metric, source).filter(|r| r.point.is_some())
}

/// Paper gap between two SIM rows, in percentage points.
fn paper_gap(a: (&str, &str, Metric), b: (&str, &str, Metric)) -> f64 {
    let get = |(p, m, metric): (&str, &str, Metric)| lookup(p, m, metric, None, "SIM").unwrap();
    100.0 * (get(b) - get(a)).abs()
}

/// `a < b`; with non-overlapping intervals when the paper's gap exceeds 1 pp.
fn ordered(table: &ResultTable, checks: &mut Checks, a: (&str, &str, Metric), b: (&str, &str, Metric)) {
    let name = format!("{}/{} < {}/{}", a.0, a.1, b.0, b.1);
    let (Some(ra), Some(rb)) = (row(table, a.0, a.1, a.2, Source::Sim), row(table, b.0, b.1, b.2, Source::Sim)) else {
        checks.add(name + " (missing)", false);
        return;
    };
    let (ia, ib) = (ra.interval().unwrap(), rb.interval().unwrap());
    let ok = if paper_gap(a, b) > 1.0 {
        ia.hi < ib.lo
    } else {
        ia.point < ib.point
    };
    checks.add(name, ok);
}

fn ordering(table: &ResultTable) -> Outcome {
    use Metric::*;
    let mut checks = Checks::default();
    for steane in ["steane_plus", "steane_zero"] {
        ordered(table, &mut checks, (steane, "feedback", Ler), ("shor", "adaptive2", Ler));
        ordered(table, &mut checks, (steane, "disturbance", Dstb), ("shor", "disturbance", Dstb));
    }
    ordered(table, &mut checks, ("shor", "adaptive2", Ler), ("shor", "single_shot", Ler));
    let ps = [
        ("direct_prep", "majority", Ler),
        ("steane_zero", "ps_ancilla", Ler),
        ("steane_plus", "ps_ancilla", Ler),
        ("shor", "detection", Ler),
    ];
    for w in ps.windows(2) {
        ordered(table, &mut checks, w[0], w[1]);
    }
    let mut within = 0;
    let mut total = 0;
    for r in table.rows.iter().filter(|r| r.source == Source::Sim && r.stratum.is_none()) {
        if let (Some(p), Some(reference)) = (r.point, lookup(&r.protocol, &r.mode, r.metric, None, "SIM")) {
            total += 1;
            if reference > 0.0 && (p / reference - 1.0).abs() <= 0.5 {
                within += 1;
            }
        }
    }
    checks.outcome(format!("{within}/{total} SIM rows within 50% of the published values"))
}

fn improvement(table: &ResultTable) -> Outcome {
    let mut checks = Checks::default();
    let mut worse = Vec::new();
    for sim in table.rows.iter().filter(|r| r.source == Source::Sim && r.stratum.is_none()) {
        let Some(imp) = row(table, &sim.protocol, &sim.mode, sim.metric, Source::Imp) else {
            continue;
        };
        let (Some(s), Some(i)) = (sim.interval(), imp.interval()) else {
            continue;
        };
        if !(i.hi < s.lo) {
            worse.push(format!("{}/{}/{}", sim.protocol, sim.mode, sim.metric.name()));
        }
    }
    checks.add(format!("every metric improves ({} not separated)", worse.len()), worse.is_empty());
    let imp = |p: &str, m: &str| row(table, p, m, Metric::Ler, Source::Imp).and_then(|r| r.point);
    let sim = |p: &str, m: &str| row(table, p, m, Metric::Ler, Source::Sim).and_then(|r| r.point);
    for steane in ["steane_plus", "steane_zero"] {
        checks.add(format!("{steane} IMP < 1.5%"), imp(steane, "feedback").is_some_and(|v| v < 0.015));
    }
    let a2 = imp("shor", "adaptive2");
    checks.add("shor adaptive2 IMP in 2-4%", a2.is_some_and(|v| (0.02..=0.04).contains(&v)));
    let gain = |p: &str| Some(1.0 - imp(p, "ec")? / sim(p, "ec")?);
    let (zz, xx) = (gain("bell_zz"), gain("bell_xx"));
    checks.add(
        "bell XX gains under half of ZZ",
        matches!((zz, xx), (Some(z), Some(x)) if x < 0.5 * z),
    );
    let pct = |v: Option<f64>| v.map_or("n/a".into(), |v| format!("{:.2}%", 100.0 * v));
    checks.outcome(format!(
        "steane+ {}, steane0 {}, shor a2 {}, bell gain zz {} xx {}{}",
        pct(imp("steane_plus", "feedback")),
        pct(imp("steane_zero", "feedback")),
        pct(a2),
        pct(zz),
        pct(xx),
        if worse.is_empty() { String::new() } else { format!(", not separated: {}", worse.join(" ")) }
    ))
}

/// (1/π) ∫_0^π exp(-2x sin²φ) dφ by the trapezoid rule.
fn phase_average(x: f64) -> f64 {
    let n = 4096;
    let h = std::f64::consts::PI / n as f64;
    (0..n).map(|k| (-2.0 * x * (k as f64 * h).sin().powi(2)).exp()).sum::<f64>() / n as f64
}

fn cp_coverage(n: u64, p: f64) -> f64 {
    let dist = Binomial::new(p, n).unwrap();
    (0..=n)
        .filter(|&k| estimate_ci(k, n, 0.95).unwrap().contains(p))
        .map(|k| dist.pmf(k))
        .sum()
}

fn cnot_error() -> f64 {
    let gates = build_cnot(1, 2).unwrap();
    let mut worst: f64 = 0.0;
    let mut phase = None;
    for b in 0..4 {
        let mut amps = vec![Complex::new(0.0, 0.0); 4];
        amps[b] = Complex::new(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(&[1, 2], amps).unwrap();
        for g in &gates {
            match g.kind {
                GateKind::R { ion, phi, theta } => s.apply_rotation(ion, phi, theta).unwrap(),
                GateKind::Xx { i, j, theta } => s.apply_xx(i, j, theta).unwrap(),
                GateKind::Rz { ion, theta } => s.apply_rz(ion, theta).unwrap(),
                _ => {}
            }
        }
        // bit 0 is the control, bit 1 the target
        let image = (b & 1) | (((b >> 1) ^ (b & 1)) << 1);
        let ph = *phase.get_or_insert(s.amplitudes()[image]);
        for (a, amp) in s.amplitudes().iter().enumerate() {
            let expect = if a == image { ph } else { Complex::new(0.0, 0.0) };
            worst = worst.max((amp - expect).norm());
        }
    }
    worst.max((phase.unwrap().norm() - 1.0).abs())
}

fn unit_oracles() -> Outcome {
    let mut checks = Checks::default();
    let rabi = (0..=500)
        .map(|k| k as f64 * 0.1)
        .map(|x| (rabi_decay_f(x).unwrap() - phase_average(x)).abs())
        .fold(0.0, f64::max);
    checks.add("rabi decay", rabi <= 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trajectories = 100_000;
    let drift = (0..trajectories)
        .map(|_| {
            let s0 = MotionalState::new(sample_initial_phonons(660.0, &mut rng).unwrap());
            advance_phonons(s0, 2000.0, 0.18, &mut rng).unwrap().n as f64
        })
        .sum::<f64>()
        / trajectories as f64;
    checks.add("phonon drift", (drift / 1020.0 - 1.0).abs() <= 0.02);

    let draws: Vec<f64> = (0..1_000_000)
        .map(|_| sample_initial_phonons(660.0, &mut rng).unwrap() as f64)
        .collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    checks.add("thermal mean", (mean / 660.0 - 1.0).abs() <= 0.01);
    checks.add("thermal variance", (var / (660.0 * 661.0) - 1.0).abs() <= 0.01);

    let coverage = [(100, 0.02), (100, 0.3), (1000, 0.001), (1000, 0.05), (1000, 0.5)]
        .into_iter()
        .map(|(n, p)| cp_coverage(n, p))
        .fold(1.0, f64::min);
    checks.add("clopper-pearson coverage", coverage >= 0.95);

    let cnot = cnot_error();
    checks.add("cnot decomposition", cnot <= 1e-12);
    checks.outcome(format!(
        "rabi {rabi:.1e}, drift {drift:.1}, thermal {mean:.1}/{var:.0}, coverage {coverage:.4}, cnot {cnot:.1e}"
    ))
}

fn determinism() -> Outcome {
    let mut checks = Checks::default();
    let params = NoiseParams::default();
    let csv = |workers: usize| {
        let settings = RunSettings {
            shots: 3000,
            seed: 7,
            workers,
        };
        run_experiment(Protocol::Shor, &params, false, &settings)
            .unwrap()
            .to_string(Format::Csv)
            .unwrap()
    };
    let first = csv(1);
    checks.add("repeat run", first == csv(1));
    checks.add("worker count", first == csv(2) && first == csv(4));

    let mut records = BTreeMap::new();
    let mut reloaded = BTreeMap::new();
    for &kind in Protocol::Shor.experiments() {
        let r = simulate::<f64>(kind, &params, 7, 0..3000, &ShotOptions::default(), workers()).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, kind.id(), &r).unwrap();
        let (id, back) = read_records(buf.as_slice()).unwrap();
        checks.add(format!("{id} roundtrip"), id == kind.id() && back == r);
        records.insert(kind, r);
        reloaded.insert(kind, back);
    }
    let direct = rows_from_records(Protocol::Shor, Source::Sim, &records).unwrap();
    let again = rows_from_records(Protocol::Shor, Source::Sim, &reloaded).unwrap();
    checks.add("re-decoded tallies", direct == again);
    let settings = RunSettings {
        shots: 3000,
        seed: 7,
        workers: workers(),
    };
    let ran = run_experiment(Protocol::Shor, &params, false, &settings).unwrap().rows;
    checks.add("dump matches run", again == ran);
    checks.outcome("shor, 3000 shots".into())
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut timed = |n: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        results.push((n, name, outcome, start.elapsed().as_secs_f64()));
    };
    timed(1, "noiseless exactness", &noiseless_exactness);
    timed(2, "fault-tolerance certification", &fault_tolerance);
    timed(3, "table arithmetic", &table_arithmetic);

    let n = shots();
    let start = Instant::now();
    let settings = RunSettings {
        shots: n,
        seed: SEED,
        workers: workers(),
    };
    let table = run_all(&NoiseParams::default(), &Source::ALL, &settings).unwrap();
    let table_secs = start.elapsed().as_secs_f64();
    timed(4, "SIM orderings", &|| ordering(&table));
    timed(5, "IMP projection", &|| improvement(&table));
    timed(6, "noise-model unit oracles", &unit_oracles);
    timed(7, "determinism", &determinism);

    println!("acceptance: {n} shots per circuit, table in {table_secs:.0}s");
    let mut unexpected = Vec::new();
    for (num, name, outcome, secs) in &results {
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        let note = if !outcome.pass && KNOWN_RED.contains(num) { " (known)" } else { "" };
        println!("criterion {num} {verdict}{note} [{name}, {secs:.1}s]: {}", outcome.detail);
        if !outcome.pass && !KNOWN_RED.contains(num) {
            unexpected.push(*num);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
