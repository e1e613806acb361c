//! Exhaustive single-fault certification of the fault-tolerant protocols.
//!
//! Every single-location fault (one- or two-qubit Pauli after a gate, a
//! Pauli on any ion before the first gate, or one flipped readout bit) is
//! inserted into an otherwise noiseless run, and the exact probability of a
//! logical error under the protocol's decoder is computed from the final
//! statevector. A distance-3 protocol is fault tolerant when that
//! probability is zero for every such fault.
//!
//! Circuits are checked without rotation fusion. Every fault location of a
//! fused circuit is also a location of the unfused one, so this is the
//! stricter check.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{
    build_experiment_with, build_prep_plus, ry, schedule, Basis, Block, ExperimentKind, GateDurations, GateKind,
    NativeCircuit, NativeGate, DATA_IONS,
};
use crate::code::{decode_x_readout, Syndrome};
use crate::decode::{
    decode_direct, decode_shor_adaptive, decode_shor_single_shot, decode_steane, needs_second_round,
    shor_round_syndrome, AdaptiveVariant, AncillaKind, SteaneMode,
};
use crate::engine::{enumerate_faults, final_state, InjectedFault, PreparedCircuit, ShotRecord};
use crate::error::{Error, Result};
use crate::circuit::Ion;

/// Logical error probabilities at or below this count as zero.
pub const VIOLATION_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FtProtocol {
    PrepZero,
    PrepPlus,
    ShorSingleShot,
    ShorAdaptive1,
    ShorAdaptive2,
    SteanePlus,
    SteaneZero,
}

impl FtProtocol {
    pub const ALL: [FtProtocol; 7] = [
        FtProtocol::PrepZero,
        FtProtocol::PrepPlus,
        FtProtocol::ShorSingleShot,
        FtProtocol::ShorAdaptive1,
        FtProtocol::ShorAdaptive2,
        FtProtocol::SteanePlus,
        FtProtocol::SteaneZero,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FtProtocol::PrepZero => "prep_zero",
            FtProtocol::PrepPlus => "prep_plus",
            FtProtocol::ShorSingleShot => "shor_single_shot",
            FtProtocol::ShorAdaptive1 => "shor_adaptive1",
            FtProtocol::ShorAdaptive2 => "shor_adaptive2",
            FtProtocol::SteanePlus => "steane_plus",
            FtProtocol::SteaneZero => "steane_zero",
        }
    }

    /// Whether the protocol should survive every single fault.
    pub fn expected_clean(self) -> bool {
        self != FtProtocol::ShorSingleShot
    }
}

impl fmt::Display for FtProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for FtProtocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FtProtocol::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::UnknownProtocol(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleFault {
    Gate(InjectedFault),
    /// The readout bit of this ion is flipped.
    Readout(Ion),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub fault: OracleFault,
    /// Human-readable description of the fault location.
    pub location: String,
    pub p_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FtReport {
    pub protocol: String,
    pub expected_clean: bool,
    pub faults_checked: usize,
    pub violations: Vec<Violation>,
}

impl FtReport {
    /// Clean protocols have no violations; the others have at least one.
    pub fn meets_expectation(&self) -> bool {
        self.expected_clean == self.violations.is_empty()
    }
}

/// `|+_L>` prepared on the data block and read out in X, unfused.
pub fn prep_plus_circuit() -> Result<NativeCircuit> {
    let mut c = build_prep_plus(&DATA_IONS)?;
    c.extend(DATA_IONS.iter().map(|&ion| ry(ion, -FRAC_PI_2)));
    c.blocks.insert(Block::Data, DATA_IONS.to_vec());
    c.readout = Basis::X;
    c.push(NativeGate::new(GateKind::MeasureZ { ions: DATA_IONS.to_vec() }));
    c.validate()?;
    schedule(&c, &GateDurations::default())
}

/// Every readout with nonzero probability under `fault`.
pub fn fault_outcomes(prepared: &PreparedCircuit, fault: Option<&OracleFault>) -> Result<Vec<(ShotRecord, f64)>> {
    let (gate, flip) = match fault {
        None => (None, None),
        Some(OracleFault::Gate(f)) => (Some(f), None),
        Some(OracleFault::Readout(ion)) => (None, Some(*ion)),
    };
    let state = final_state(prepared, gate)?;
    let ions = state.ions().to_vec();
    let circuit = prepared.circuit();
    Ok(state
        .probabilities()
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > crate::engine::inject::PROBABILITY_FLOOR)
        .map(|(index, p)| {
            let record = ShotRecord::from_ion_bits(circuit, |ion| {
                let k = ions.iter().position(|&i| i == ion).expect("ion in state");
                ((index >> k) & 1 == 1) ^ (flip == Some(ion))
            });
            (record, p)
        })
        .collect())
}

/// Gate faults from [`enumerate_faults`] plus one readout flip per ion.
pub fn all_faults(prepared: &PreparedCircuit) -> Vec<OracleFault> {
    enumerate_faults(prepared)
        .into_iter()
        .map(OracleFault::Gate)
        .chain(prepared.circuit().ions.iter().map(|&ion| OracleFault::Readout(ion)))
        .collect()
}

fn describe(circuit: &NativeCircuit, fault: &OracleFault) -> String {
    match fault {
        OracleFault::Readout(ion) => format!("readout of ion {ion}"),
        OracleFault::Gate(f) => {
            let paulis: Vec<String> = f.paulis.iter().map(|(ion, p)| format!("{p:?}{ion}")).collect();
            match f.after_gate {
                None => format!("{} before the first gate", paulis.join(" ")),
                Some(g) => {
                    let kind = &circuit.gates[g].kind;
                    format!("{} after gate {g} ({} on {:?})", paulis.join(" "), kind.name(), kind.ions())
                }
            }
        }
    }
}

fn error_probability(
    prepared: &PreparedCircuit,
    fault: &OracleFault,
    decode: impl Fn(&ShotRecord) -> Result<bool>,
) -> Result<f64> {
    let mut p_error = 0.0;
    for (record, p) in fault_outcomes(prepared, Some(fault))? {
        if decode(&record)? {
            p_error += p;
        }
    }
    Ok(p_error)
}

/// The one-round circuit is a prefix of the two-round circuit; a fault of
/// the latter restricted to that prefix, if anything is left of it.
fn restrict_to_prefix(fault: &OracleFault, e1: &PreparedCircuit, prefix: usize) -> Option<OracleFault> {
    let ions = &e1.circuit().ions;
    match fault {
        OracleFault::Readout(ion) => ions.contains(ion).then_some(fault.clone()),
        OracleFault::Gate(f) => match f.after_gate {
            Some(g) if g >= prefix => None,
            Some(_) => Some(fault.clone()),
            None => {
                let paulis: Vec<_> = f.paulis.iter().copied().filter(|(ion, _)| ions.contains(ion)).collect();
                (!paulis.is_empty()).then_some(OracleFault::Gate(InjectedFault { after_gate: None, paulis }))
            }
        },
    }
}

/// Number of leading gates the two circuits share.
fn shared_prefix(e1: &NativeCircuit, e2: &NativeCircuit) -> Result<usize> {
    let n = e1.gates.len() - 1;
    let same = e1.gates[..n]
        .iter()
        .zip(&e2.gates)
        .all(|(a, b)| a.kind == b.kind);
    if !same || !matches!(e1.gates[n].kind, GateKind::MeasureZ { .. }) {
        return Err(Error::InvalidArgument("one-round circuit is not a prefix of the two-round one".into()));
    }
    Ok(n)
}

/// Logical error probability of adaptive decoding when the same physical
/// fault hits both the one-round and the two-round experiment. Branches
/// settled in round one read the one-round outcomes; the others read the
/// two-round outcomes, reweighted to the first-round syndrome frequencies
/// of the one-round run.
fn adaptive_error(
    e1: &PreparedCircuit,
    e2: &PreparedCircuit,
    prefix: usize,
    fault: &OracleFault,
    variant: AdaptiveVariant,
) -> Result<f64> {
    let f1 = restrict_to_prefix(fault, e1, prefix);
    let d1 = fault_outcomes(e1, f1.as_ref())?;
    let d2 = fault_outcomes(e2, Some(fault))?;
    let mut p1 = [0.0; 4];
    let mut p2 = [0.0; 4];
    for (r, p) in &d1 {
        p1[shor_round_syndrome(r, 1)?.stratum()] += p;
    }
    for (r, p) in &d2 {
        p2[shor_round_syndrome(r, 1)?.stratum()] += p;
    }
    let mut p_error = 0.0;
    for (r, p) in &d1 {
        let s = shor_round_syndrome(r, 1)?;
        if !needs_second_round(s, variant) && decode_shor_adaptive(r, None, variant)?.logical_error {
            p_error += p;
        }
    }
    for (r, p) in &d2 {
        let s = shor_round_syndrome(r, 1)?;
        if !needs_second_round(s, variant) {
            continue;
        }
        let k = s.stratum();
        if p1[k] <= VIOLATION_THRESHOLD {
            continue;
        }
        if decode_shor_adaptive(r, Some(r), variant)?.logical_error {
            p_error += p * p1[k] / p2[k];
        }
    }
    Ok(p_error)
}

/// Unfused circuit of `kind`, as checked by the oracle.
pub fn oracle_circuit(kind: ExperimentKind) -> Result<NativeCircuit> {
    build_experiment_with(kind, false)
}

fn prepared(kind: ExperimentKind) -> Result<PreparedCircuit> {
    PreparedCircuit::new(oracle_circuit(kind)?)
}

fn check_all<F>(circuit: &PreparedCircuit, faults: Vec<OracleFault>, p_error: F) -> Result<(usize, Vec<Violation>)>
where
    F: Fn(&OracleFault) -> Result<f64> + Sync,
{
    let results: Vec<Result<Option<Violation>>> = faults
        .par_iter()
        .map(|fault| {
            let p = p_error(fault)?;
            Ok((p > VIOLATION_THRESHOLD).then(|| Violation {
                fault: fault.clone(),
                location: describe(circuit.circuit(), fault),
                p_error: p,
            }))
        })
        .collect();
    let mut violations = Vec::new();
    for r in results {
        violations.extend(r?);
    }
    Ok((faults.len(), violations))
}

/// Certifies `protocol` against every single fault.
pub fn run_ft_oracle(protocol: FtProtocol) -> Result<FtReport> {
    let (faults_checked, violations) = match protocol {
        FtProtocol::PrepZero => {
            let c = prepared(ExperimentKind::DirectPrep)?;
            check_all(&c, all_faults(&c), |f| {
                error_probability(&c, f, |r| Ok(decode_direct(r, false)?.logical_error))
            })?
        }
        FtProtocol::PrepPlus => {
            let c = PreparedCircuit::new(prep_plus_circuit()?)?;
            check_all(&c, all_faults(&c), |f| {
                error_probability(&c, f, |r| Ok(decode_x_readout(r.code_bits(Block::Data)?)))
            })?
        }
        FtProtocol::ShorSingleShot => {
            let c = prepared(ExperimentKind::ShorE1)?;
            check_all(&c, all_faults(&c), |f| {
                error_probability(&c, f, |r| Ok(decode_shor_single_shot(r)?.logical_error))
            })?
        }
        FtProtocol::ShorAdaptive1 | FtProtocol::ShorAdaptive2 => {
            let variant = if protocol == FtProtocol::ShorAdaptive1 {
                AdaptiveVariant::I
            } else {
                AdaptiveVariant::II
            };
            let e1 = prepared(ExperimentKind::ShorE1)?;
            let e2 = prepared(ExperimentKind::ShorE2)?;
            let prefix = shared_prefix(e1.circuit(), e2.circuit())?;
            check_all(&e2, all_faults(&e2), |f| adaptive_error(&e1, &e2, prefix, f, variant))?
        }
        FtProtocol::SteanePlus | FtProtocol::SteaneZero => {
            let (kind, ancilla) = if protocol == FtProtocol::SteanePlus {
                (ExperimentKind::SteanePlus, AncillaKind::Plus)
            } else {
                (ExperimentKind::SteaneZero, AncillaKind::Zero)
            };
            let c = prepared(kind)?;
            check_all(&c, all_faults(&c), |f| {
                error_probability(&c, f, |r| Ok(decode_steane(r, ancilla, SteaneMode::Feedback)?.logical_error))
            })?
        }
    };
    Ok(FtReport {
        protocol: protocol.id().to_string(),
        expected_clean: protocol.expected_clean(),
        faults_checked,
        violations,
    })
}

fn is_xx_between(g: &NativeGate, a: Ion, b: Ion) -> bool {
    matches!(g.kind, GateKind::Xx { i, j, .. } if (i, j) == (a, b) || (i, j) == (b, a))
}

/// Indices `(a, b)` of the XX gates coupling data qubit `q` to the
/// first-round S1 and S2 ancillas.
pub fn internal_window(circuit: &NativeCircuit, q: Ion) -> Option<(usize, usize)> {
    let s1 = *circuit.blocks.get(&Block::S1Round1)?.first()?;
    let s2 = *circuit.blocks.get(&Block::S2Round1)?.first()?;
    let data = *circuit.blocks.get(&Block::Data)?.get(q.checked_sub(1)?)?;
    let a = circuit.gates.iter().position(|g| is_xx_between(g, data, s1))?;
    let b = circuit.gates.iter().position(|g| is_xx_between(g, data, s2))?;
    (a < b).then_some((a, b))
}

impl Violation {
    /// A gate fault on one data qubit among 4..=6 (possibly together with
    /// an ancilla), located after that qubit's S1 coupling gate and no
    /// later than its S2 coupling gate, i.e. before S2 has fully seen it.
    pub fn is_internal(&self, circuit: &NativeCircuit) -> bool {
        let OracleFault::Gate(InjectedFault { after_gate: Some(g), paulis }) = &self.fault else {
            return false;
        };
        let Some(data) = circuit.blocks.get(&Block::Data) else {
            return false;
        };
        let qubits: Vec<Ion> = paulis
            .iter()
            .filter_map(|(ion, _)| data.iter().position(|d| d == ion).map(|k| k + 1))
            .collect();
        match qubits.as_slice() {
            [q] if (4..=6).contains(q) => {
                internal_window(circuit, *q).is_some_and(|(a, b)| (a..=b).contains(g))
            }
            _ => false,
        }
    }
}

/// First-round syndrome a fault produces deterministically in a noiseless
/// one-round run, if it is deterministic.
pub fn deterministic_syndrome(prepared: &PreparedCircuit, fault: &OracleFault) -> Result<Option<Syndrome>> {
    let outcomes = fault_outcomes(prepared, Some(fault))?;
    let mut seen = None;
    for (r, _) in &outcomes {
        let s = shor_round_syndrome(r, 1)?;
        match seen {
            None => seen = Some(s),
            Some(prev) if prev != s => return Ok(None),
            _ => {}
        }
    }
    Ok(seen)
}
