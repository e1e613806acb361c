//! Protocols, the rows each one reports, and the shot-to-row pipeline.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::circuit::ExperimentKind;
use crate::code::Syndrome;
use crate::decode::{
    combine_adaptive_ler, decode_bell, decode_direct, decode_shor_detection, decode_shor_single_shot,
    decode_steane, AncillaKind, BellBasis, Combination, ConditionalTable, RoundCounts, SteaneMode, Tally,
};
use crate::decode::conditional::tally_round;
use crate::engine::ShotRecord;
use crate::error::{Error, Result};
use crate::experiments::table::{Metric, ResultRow, Source};
use crate::stats::reported_ci;

/// A row of the report: which estimate, from which protocol and mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowKey {
    pub protocol: Protocol,
    pub mode: &'static str,
    pub metric: Metric,
    pub stratum: Option<Syndrome>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    DirectPrep,
    Shor,
    Steane { ancilla: AncillaKind, cnot: bool },
    Bell(BellBasis),
}

impl Protocol {
    pub const ALL: [Protocol; 8] = [
        Protocol::DirectPrep,
        Protocol::Shor,
        Protocol::Steane { ancilla: AncillaKind::Plus, cnot: true },
        Protocol::Steane { ancilla: AncillaKind::Zero, cnot: true },
        Protocol::Steane { ancilla: AncillaKind::Plus, cnot: false },
        Protocol::Steane { ancilla: AncillaKind::Zero, cnot: false },
        Protocol::Bell(BellBasis::ZZ),
        Protocol::Bell(BellBasis::XX),
    ];

    pub fn id(self) -> &'static str {
        match self {
            Protocol::DirectPrep => "direct_prep",
            Protocol::Shor => "shor",
            Protocol::Steane { ancilla: AncillaKind::Plus, cnot: true } => "steane_plus",
            Protocol::Steane { ancilla: AncillaKind::Zero, cnot: true } => "steane_zero",
            Protocol::Steane { ancilla: AncillaKind::Plus, cnot: false } => "steane_no_cnot_plus",
            Protocol::Steane { ancilla: AncillaKind::Zero, cnot: false } => "steane_no_cnot_zero",
            Protocol::Bell(BellBasis::ZZ) => "bell_zz",
            Protocol::Bell(BellBasis::XX) => "bell_xx",
        }
    }

    /// Circuits that have to be simulated for this protocol.
    pub fn experiments(self) -> &'static [ExperimentKind] {
        use ExperimentKind::*;
        match self {
            Protocol::DirectPrep => &[DirectPrep],
            Protocol::Shor => &[ShorE1, ShorE2],
            Protocol::Steane { ancilla: AncillaKind::Plus, cnot: true } => &[SteanePlus],
            Protocol::Steane { ancilla: AncillaKind::Zero, cnot: true } => &[SteaneZero],
            Protocol::Steane { ancilla: AncillaKind::Plus, cnot: false } => &[SteaneNoCnotPlus],
            Protocol::Steane { ancilla: AncillaKind::Zero, cnot: false } => &[SteaneNoCnotZero],
            Protocol::Bell(BellBasis::ZZ) => &[BellZz],
            Protocol::Bell(BellBasis::XX) => &[BellXx],
        }
    }

    /// `(mode, metric)` pairs reported, in output order. Conditional rows
    /// of the Shor protocol are expanded over the four strata.
    pub fn rows(self) -> Vec<RowKey> {
        use Metric::*;
        let plain: &[(&'static str, Metric)] = match self {
            Protocol::DirectPrep => &[("majority", Ler), ("ps_data", Ler), ("ps_data", Rr)],
            Protocol::Shor => &[
                ("single_shot", Ler),
                ("adaptive1", Ler),
                ("adaptive2", Ler),
                ("disturbance", Dstb),
                ("detection", Ler),
                ("detection", Rr),
            ],
            Protocol::Steane { cnot: true, .. } => &[
                ("feedback", Ler),
                ("disturbance", Dstb),
                ("ps_ancilla", Ler),
                ("ps_ancilla", Rr),
                ("ps_data", Ler),
                ("ps_data", Rr),
                ("ps_joint", Ler),
                ("ps_joint", Rr),
            ],
            Protocol::Steane { cnot: false, .. } => &[
                ("disturbance", Dstb),
                ("ps_ancilla", Rr),
                ("ps_data", Ler),
                ("ps_data", Rr),
                ("ps_joint", Rr),
            ],
            Protocol::Bell(_) => &[("ec", Ler), ("ps", Ler), ("ps", Rr)],
        };
        let mut out: Vec<RowKey> = plain
            .iter()
            .map(|&(mode, metric)| RowKey { protocol: self, mode, metric, stratum: None })
            .collect();
        if self == Protocol::Shor {
            for mode in ["round1", "round2"] {
                for metric in [Mu, Lambda, Delta] {
                    for s in Syndrome::STRATA {
                        out.push(RowKey { protocol: self, mode, metric, stratum: Some(s) });
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// Every row a full run reports, per source.
pub fn manifest() -> Vec<(RowKey, Source)> {
    Source::ALL
        .into_iter()
        .flat_map(|source| {
            Protocol::ALL
                .into_iter()
                .flat_map(|p| p.rows())
                .map(move |k| (k, source))
        })
        .collect()
}

/// Running counts for one protocol. Shot records are folded in chunk by
/// chunk, so memory stays bounded however many shots are run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Accumulator {
    DirectPrep { majority: Tally, ps: Tally },
    Shor { round1: RoundCounts, round2: RoundCounts, single_shot: Tally, detection: Tally },
    Steane { ancilla: AncillaKind, modes: BTreeMap<SteaneMode, Tally> },
    Bell { basis: BellBasis, ec: Tally, ps: Tally },
}

impl Accumulator {
    pub fn new(protocol: Protocol) -> Self {
        match protocol {
            Protocol::DirectPrep => Accumulator::DirectPrep { majority: Tally::default(), ps: Tally::default() },
            Protocol::Shor => Accumulator::Shor {
                round1: RoundCounts::default(),
                round2: RoundCounts::default(),
                single_shot: Tally::default(),
                detection: Tally::default(),
            },
            Protocol::Steane { ancilla, .. } => Accumulator::Steane {
                ancilla,
                modes: SteaneMode::ALL.into_iter().map(|m| (m, Tally::default())).collect(),
            },
            Protocol::Bell(basis) => Accumulator::Bell { basis, ec: Tally::default(), ps: Tally::default() },
        }
    }

    /// Folds in records of circuit `kind`.
    pub fn add(&mut self, kind: ExperimentKind, records: &[ShotRecord]) -> Result<()> {
        match self {
            Accumulator::DirectPrep { majority, ps } => {
                for r in records {
                    majority.add(&decode_direct(r, false)?);
                    ps.add(&decode_direct(r, true)?);
                }
            }
            Accumulator::Shor { round1, round2, single_shot, detection } => match kind {
                ExperimentKind::ShorE1 => {
                    round1.merge(&tally_round(records, 1)?);
                    for r in records {
                        single_shot.add(&decode_shor_single_shot(r)?);
                        detection.add(&decode_shor_detection(r)?);
                    }
                }
                ExperimentKind::ShorE2 => round2.merge(&tally_round(records, 2)?),
                other => return Err(Error::InvalidArgument(format!("{other} records in a Shor tally"))),
            },
            Accumulator::Steane { ancilla, modes } => {
                for r in records {
                    for (&mode, tally) in modes.iter_mut() {
                        tally.add(&decode_steane(r, *ancilla, mode)?);
                    }
                }
            }
            Accumulator::Bell { basis, ec, ps } => {
                for r in records {
                    ec.add(&decode_bell(r, *basis, false)?);
                    ps.add(&decode_bell(r, *basis, true)?);
                }
            }
        }
        Ok(())
    }

    fn tally_for(&self, mode: &str) -> Result<Tally> {
        let missing = || Error::InvalidArgument(format!("no tally for mode `{mode}`"));
        Ok(match self {
            Accumulator::DirectPrep { majority, ps } => match mode {
                "majority" => *majority,
                "ps_data" => *ps,
                _ => return Err(missing()),
            },
            Accumulator::Shor { single_shot, detection, .. } => match mode {
                "single_shot" => *single_shot,
                "detection" => *detection,
                _ => return Err(missing()),
            },
            Accumulator::Steane { modes, .. } => *SteaneMode::ALL
                .iter()
                .find(|m| m.name() == mode)
                .and_then(|m| modes.get(m))
                .ok_or_else(missing)?,
            Accumulator::Bell { ec, ps, .. } => match mode {
                "ec" => *ec,
                "ps" => *ps,
                _ => return Err(missing()),
            },
        })
    }

    /// One row per key of `protocol.rows()`.
    pub fn rows(&self, protocol: Protocol, source: Source) -> Result<Vec<ResultRow>> {
        protocol.rows().into_iter().map(|key| self.row(&key, source)).collect()
    }

    fn row(&self, key: &RowKey, source: Source) -> Result<ResultRow> {
        let label = (key.protocol.id(), key.mode, key.metric, key.stratum.map(|s| s.label()), source);
        let from_counts = |k: u64, n: u64| -> Result<ResultRow> {
            let estimate = if n == 0 { None } else { Some(reported_ci(k, n, 0.95)?) };
            Ok(ResultRow::from_estimate(label.clone(), (k, n), estimate))
        };
        if let Accumulator::Shor { round1, round2, .. } = self {
            let table = ConditionalTable { round1: *round1, round2: *round2 };
            match (key.mode, key.metric) {
                ("adaptive1" | "adaptive2", Metric::Ler) => {
                    let variant = if key.mode == "adaptive1" { Combination::A1 } else { Combination::A2 };
                    let interval = match combine_adaptive_ler(&table, variant) {
                        Ok(i) => Some(i),
                        // A stratum the formula needs never occurred.
                        Err(Error::InvalidArgument(_)) => None,
                        Err(e) => return Err(e),
                    };
                    return Ok(ResultRow::from_interval(label, interval));
                }
                ("disturbance", Metric::Dstb) => {
                    return from_counts(round1.raw_errors.iter().sum(), round1.shots);
                }
                ("round1" | "round2", metric) => {
                    let c = if key.mode == "round1" { round1 } else { round2 };
                    let s = key.stratum.expect("conditional rows carry a stratum").stratum();
                    let k = match metric {
                        Metric::Mu => return from_counts(c.occurrences[s], c.shots),
                        Metric::Lambda => c.corrected_errors[s],
                        Metric::Delta => c.raw_errors[s],
                        _ => return Err(Error::InvalidArgument(format!("metric {metric} per stratum"))),
                    };
                    return from_counts(k, c.occurrences[s]);
                }
                _ => {}
            }
        }
        let t = self.tally_for(key.mode)?;
        match key.metric {
            Metric::Ler | Metric::Dstb => from_counts(t.errors, t.accepted),
            Metric::Rr => from_counts(t.shots - t.accepted, t.shots),
            other => Err(Error::InvalidArgument(format!("metric {other} for mode {}", key.mode))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn ids_round_trip_and_are_unique() {
        let ids: BTreeSet<_> = Protocol::ALL.iter().map(|p| p.id()).collect();
        assert_eq!(ids.len(), Protocol::ALL.len());
        for p in Protocol::ALL {
            assert_eq!(p.id().parse::<Protocol>().unwrap(), p);
        }
        assert!("shor_e3".parse::<Protocol>().is_err());
    }

    #[test]
    fn manifest_has_no_duplicates() {
        let m = manifest();
        let unique: BTreeSet<_> = m.iter().collect();
        assert_eq!(unique.len(), m.len());
        // 3 + (6 + 24) + 2*8 + 2*5 + 2*3 per source
        assert_eq!(m.len(), 2 * 65);
    }

    #[test]
    fn empty_accumulators_report_every_row() {
        for p in Protocol::ALL {
            let rows = Accumulator::new(p).rows(p, Source::Sim).unwrap();
            assert_eq!(rows.len(), p.rows().len());
            assert!(rows.iter().all(|r| r.point.is_none()));
        }
    }
}
