//! Native trapped-ion circuits: single-qubit rotations in the x-y plane,
//! virtual Z rotations, Molmer-Sorensen `XX(θ) = exp(-iθ X⊗X)` gates and a
//! terminal measurement, laid out on a strictly serial schedule.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chain position label (1-based, as printed on the ion chain diagrams).
pub type Ion = usize;

pub const DATA_IONS: [Ion; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];
pub const ANCILLA_IONS: [Ion; 9] = [10, 11, 12, 13, 14, 15, 16, 17, 18];
/// Shor ancillas: (S1, S2) for round one and round two.
pub const SHOR_ROUND1_ANCILLAS: [Ion; 2] = [10, 12];
pub const SHOR_ROUND2_ANCILLAS: [Ion; 2] = [11, 13];

/// Coupling order for S1 and S2, pairing qubits along the Z gauges.
pub const S1_ORDER: [usize; 6] = [1, 4, 2, 5, 3, 6];
pub const S2_ORDER: [usize; 6] = [4, 7, 5, 8, 6, 9];

/// Rotation axis angle of an X rotation.
pub const AXIS_X: f64 = 0.0;
/// Rotation axis angle of a Y rotation.
pub const AXIS_Y: f64 = FRAC_PI_2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    /// `exp(-i θ/2 (cos φ X + sin φ Y))`
    R { ion: Ion, phi: f64, theta: f64 },
    /// `exp(-i θ/2 Z)`, implemented as a frame change.
    Rz { ion: Ion, theta: f64 },
    /// `exp(-i θ X_i X_j)`
    Xx { i: Ion, j: Ion, theta: f64 },
    MeasureZ { ions: Vec<Ion> },
    Idle { ion: Ion, duration_us: f64 },
}

impl GateKind {
    pub fn ions(&self) -> Vec<Ion> {
        match self {
            GateKind::R { ion, .. } | GateKind::Rz { ion, .. } | GateKind::Idle { ion, .. } => {
                vec![*ion]
            }
            GateKind::Xx { i, j, .. } => vec![*i, *j],
            GateKind::MeasureZ { ions } => ions.clone(),
        }
    }

    pub fn touches(&self, ion: Ion) -> bool {
        match self {
            GateKind::R { ion: a, .. } | GateKind::Rz { ion: a, .. } | GateKind::Idle { ion: a, .. } => {
                *a == ion
            }
            GateKind::Xx { i, j, .. } => *i == ion || *j == ion,
            GateKind::MeasureZ { ions } => ions.contains(&ion),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::R { .. } => "R",
            GateKind::Rz { .. } => "RZ",
            GateKind::Xx { .. } => "XX",
            GateKind::MeasureZ { .. } => "MEASURE_Z",
            GateKind::Idle { .. } => "IDLE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NativeGate {
    pub kind: GateKind,
    pub start_us: f64,
    pub duration_us: f64,
}

impl NativeGate {
    pub fn new(kind: GateKind) -> Self {
        NativeGate {
            kind,
            start_us: 0.0,
            duration_us: 0.0,
        }
    }

    pub fn end_us(&self) -> f64 {
        self.start_us + self.duration_us
    }
}

pub fn rx(ion: Ion, theta: f64) -> NativeGate {
    NativeGate::new(GateKind::R { ion, phi: AXIS_X, theta })
}

pub fn ry(ion: Ion, theta: f64) -> NativeGate {
    NativeGate::new(GateKind::R { ion, phi: AXIS_Y, theta })
}

pub fn xx(i: Ion, j: Ion, theta: f64) -> NativeGate {
    NativeGate::new(GateKind::Xx { i, j, theta })
}

/// Named groups of ions whose readouts are decoded together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Data,
    Ancilla,
    S1Round1,
    S2Round1,
    S1Round2,
    S2Round2,
}

impl Block {
    pub fn name(self) -> &'static str {
        match self {
            Block::Data => "data",
            Block::Ancilla => "ancilla",
            Block::S1Round1 => "s1_r1",
            Block::S2Round1 => "s2_r1",
            Block::S1Round2 => "s1_r2",
            Block::S2Round2 => "s2_r2",
        }
    }
}

impl FromStr for Block {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            Block::Data,
            Block::Ancilla,
            Block::S1Round1,
            Block::S2Round1,
            Block::S1Round2,
            Block::S2Round2,
        ]
        .into_iter()
        .find(|b| b.name() == s)
        .ok_or_else(|| Error::MalformedRecord(format!("unknown block `{s}`")))
    }
}

/// Basis in which the code blocks are read out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

/// Gate durations in microseconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GateDurations {
    pub sq_segment_us: f64,
    pub sq_segments: u32,
    pub xx_us: f64,
    pub measure_us: f64,
}

impl Default for GateDurations {
    fn default() -> Self {
        GateDurations {
            sq_segment_us: 13.0,
            sq_segments: 3,
            xx_us: 200.0,
            measure_us: 100.0,
        }
    }
}

impl GateDurations {
    pub fn single_qubit_us(&self) -> f64 {
        self.sq_segment_us * f64::from(self.sq_segments)
    }

    pub fn of(&self, kind: &GateKind) -> f64 {
        match kind {
            GateKind::R { .. } => self.single_qubit_us(),
            GateKind::Rz { .. } => 0.0,
            GateKind::Xx { .. } => self.xx_us,
            GateKind::MeasureZ { .. } => self.measure_us,
            GateKind::Idle { duration_us, .. } => *duration_us,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("durations.sq_segment_us", self.sq_segment_us),
            ("durations.xx_us", self.xx_us),
        ];
        for (field, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(field, format!("must be positive, got {v}")));
            }
        }
        if self.sq_segments == 0 {
            return Err(Error::config("durations.sq_segments", "must be at least 1"));
        }
        if !(self.measure_us >= 0.0 && self.measure_us.is_finite()) {
            return Err(Error::config("durations.measure_us", "must be non-negative"));
        }
        Ok(())
    }
}

/// Stretch of time during which an ion is not driven.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdleInterval {
    pub ion: Ion,
    pub start_us: f64,
    pub end_us: f64,
    /// Index of the gate the dephasing fault is inserted before; `None` (or an
    /// index past the last unitary gate) means just before the readout.
    pub before_gate: Option<usize>,
}

impl IdleInterval {
    pub fn duration_us(&self) -> f64 {
        self.end_us - self.start_us
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NativeCircuit {
    pub ions: Vec<Ion>,
    pub gates: Vec<NativeGate>,
    pub blocks: BTreeMap<Block, Vec<Ion>>,
    pub readout: Basis,
    pub idle: Vec<IdleInterval>,
    pub total_us: f64,
}

impl NativeCircuit {
    pub fn new(ions: impl IntoIterator<Item = Ion>) -> Self {
        let mut ions: Vec<Ion> = ions.into_iter().collect();
        ions.sort_unstable();
        ions.dedup();
        NativeCircuit {
            ions,
            gates: Vec::new(),
            blocks: BTreeMap::new(),
            readout: Basis::Z,
            idle: Vec::new(),
            total_us: 0.0,
        }
    }

    pub fn push(&mut self, gate: NativeGate) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = NativeGate>) {
        self.gates.extend(gates);
    }

    pub fn append(&mut self, other: NativeCircuit) {
        for ion in other.ions {
            if let Err(pos) = self.ions.binary_search(&ion) {
                self.ions.insert(pos, ion);
            }
        }
        self.gates.extend(other.gates);
        self.blocks.extend(other.blocks);
    }

    /// Every gate only references ions in the layout.
    pub fn validate(&self) -> Result<()> {
        for (k, g) in self.gates.iter().enumerate() {
            for ion in g.kind.ions() {
                if self.ions.binary_search(&ion).is_err() {
                    return Err(Error::InvalidArgument(format!(
                        "gate {k} ({}) references ion {ion} outside the layout",
                        g.kind.name()
                    )));
                }
            }
            if let GateKind::Xx { i, j, .. } = g.kind {
                if i == j {
                    return Err(Error::InvalidArgument(format!("gate {k}: XX on a single ion {i}")));
                }
            }
        }
        Ok(())
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g.kind, GateKind::Xx { .. }))
            .count()
    }

    pub fn single_qubit_gate_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g.kind, GateKind::R { .. }))
            .count()
    }

    /// Merge same-axis rotations that are adjacent on their ion and drop the
    /// ones that reduce to the identity (up to a global phase). A merged
    /// rotation takes the place of the later one, so an ion waits in the
    /// frame it would have had before the first rotation.
    pub fn fuse_rotations(&mut self) {
        let mut out: Vec<Option<NativeGate>> = Vec::with_capacity(self.gates.len());
        let mut last_on: BTreeMap<Ion, usize> = BTreeMap::new();
        for mut gate in self.gates.drain(..) {
            if let GateKind::R { ion, phi, theta } = gate.kind {
                if let Some(&k) = last_on.get(&ion) {
                    if let Some(NativeGate {
                        kind: GateKind::R { phi: p, theta: t, .. },
                        ..
                    }) = out[k]
                    {
                        if p == phi {
                            out[k] = None;
                            let merged = wrap_angle(t + theta);
                            if merged.abs() < 1e-12 {
                                last_on.remove(&ion);
                                continue;
                            }
                            gate.kind = GateKind::R { ion, phi, theta: merged };
                        }
                    }
                }
            }
            for ion in gate.kind.ions() {
                last_on.insert(ion, out.len());
            }
            out.push(Some(gate));
        }
        // a removed rotation may leave its ion's earlier gate as the last one;
        // one pass is enough for the sequences built here
        self.gates = out.into_iter().flatten().collect();
    }

    /// Write one JSON object per gate.
    pub fn dump_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for g in &self.gates {
            serde_json::to_writer(&mut w, &DumpLine::from(g))?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.dump_jsonl(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("json is utf-8")
    }
}

/// Wrap into `(-π, π]`; rotations by `2π` only contribute a global phase.
fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    } else if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct DumpLine {
    pub kind: String,
    pub ions: Vec<Ion>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub angle: Option<f64>,
    pub start: f64,
    pub duration: f64,
}

impl From<&NativeGate> for DumpLine {
    fn from(g: &NativeGate) -> Self {
        let (phi, angle) = match g.kind {
            GateKind::R { phi, theta, .. } => (Some(phi), Some(theta)),
            GateKind::Rz { theta, .. } => (None, Some(theta)),
            GateKind::Xx { theta, .. } => (None, Some(theta)),
            _ => (None, None),
        };
        DumpLine {
            kind: g.kind.name().to_string(),
            ions: g.kind.ions(),
            phi,
            angle,
            start: g.start_us,
            duration: g.duration_us,
        }
    }
}

/// CNOT from one `XX(π/4)` and four quarter-turn rotations.
pub fn build_cnot(control: Ion, target: Ion) -> Result<Vec<NativeGate>> {
    if control == target {
        return Err(Error::InvalidArgument(format!("CNOT control equals target ({control})")));
    }
    Ok(vec![
        ry(control, FRAC_PI_2),
        xx(control, target, FRAC_PI_4),
        rx(control, -FRAC_PI_2),
        rx(target, -FRAC_PI_2),
        ry(control, -FRAC_PI_2),
    ])
}

fn check_block(block: &[Ion]) -> Result<[Ion; 9]> {
    let arr: [Ion; 9] = block
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("code block needs 9 ions, got {}", block.len())))?;
    let mut sorted = arr;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!("repeated ion in block {arr:?}")));
    }
    Ok(arr)
}

/// GHZ `|000> + |111>` on `(a, mid, c)` with `mid` as the fan-out control.
fn ghz_gates(a: Ion, mid: Ion, c: Ion) -> Vec<NativeGate> {
    let mut gates = vec![ry(mid, FRAC_PI_2)];
    gates.extend(build_cnot(mid, a).expect("distinct ions"));
    gates.extend(build_cnot(mid, c).expect("distinct ions"));
    gates
}

/// `|0_L>`: each row in `|+++> + |--->`.
pub fn build_prep_zero(block: &[Ion]) -> Result<NativeCircuit> {
    let b = check_block(block)?;
    let mut circ = NativeCircuit::new(b);
    for row in crate::code::ROWS {
        let [a, mid, c] = row.map(|q| b[q - 1]);
        circ.extend(ghz_gates(a, mid, c));
        circ.extend([a, mid, c].map(|ion| ry(ion, -FRAC_PI_2)));
    }
    Ok(circ)
}

/// `|+_L>`: each column in `|000> + |111>`.
pub fn build_prep_plus(block: &[Ion]) -> Result<NativeCircuit> {
    let b = check_block(block)?;
    let mut circ = NativeCircuit::new(b);
    for col in crate::code::COLUMNS {
        let [a, mid, c] = col.map(|q| b[q - 1]);
        circ.extend(ghz_gates(a, mid, c));
    }
    Ok(circ)
}

/// One round of bare-ancilla extraction of S1 then S2 on data ions 1..=9.
pub fn build_shor_round(ancillas: &[Ion]) -> Result<NativeCircuit> {
    let [a1, a2]: [Ion; 2] = ancillas
        .try_into()
        .map_err(|_| Error::InvalidArgument(format!("Shor round needs 2 ancillas, got {}", ancillas.len())))?;
    if a1 == a2 || DATA_IONS.contains(&a1) || DATA_IONS.contains(&a2) {
        return Err(Error::InvalidArgument(format!("bad Shor ancillas {ancillas:?}")));
    }
    let mut circ = NativeCircuit::new(DATA_IONS.iter().copied().chain([a1, a2]));
    for q in S1_ORDER {
        circ.extend(build_cnot(DATA_IONS[q - 1], a1)?);
    }
    for q in S2_ORDER {
        circ.extend(build_cnot(DATA_IONS[q - 1], a2)?);
    }
    Ok(circ)
}

/// Nine sequential CNOTs, `data[k]` controlling `ancilla[k]`.
pub fn build_transversal_cnot(data: &[Ion], ancilla: &[Ion]) -> Result<NativeCircuit> {
    if data.len() != ancilla.len() {
        return Err(Error::InvalidArgument(format!(
            "block size mismatch: {} vs {}",
            data.len(),
            ancilla.len()
        )));
    }
    let d = check_block(data)?;
    let a = check_block(ancilla)?;
    let mut circ = NativeCircuit::new(d.iter().chain(a.iter()).copied());
    for (c, t) in d.into_iter().zip(a) {
        circ.extend(build_cnot(c, t)?);
    }
    Ok(circ)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "direct_prep")]
    DirectPrep,
    #[serde(rename = "shor_E1")]
    ShorE1,
    #[serde(rename = "shor_E2")]
    ShorE2,
    #[serde(rename = "steane_plus")]
    SteanePlus,
    #[serde(rename = "steane_zero")]
    SteaneZero,
    #[serde(rename = "steane_no_cnot_plus")]
    SteaneNoCnotPlus,
    #[serde(rename = "steane_no_cnot_zero")]
    SteaneNoCnotZero,
    #[serde(rename = "bell_zz")]
    BellZz,
    #[serde(rename = "bell_xx")]
    BellXx,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::DirectPrep,
        ExperimentKind::ShorE1,
        ExperimentKind::ShorE2,
        ExperimentKind::SteanePlus,
        ExperimentKind::SteaneZero,
        ExperimentKind::SteaneNoCnotPlus,
        ExperimentKind::SteaneNoCnotZero,
        ExperimentKind::BellZz,
        ExperimentKind::BellXx,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ExperimentKind::DirectPrep => "direct_prep",
            ExperimentKind::ShorE1 => "shor_E1",
            ExperimentKind::ShorE2 => "shor_E2",
            ExperimentKind::SteanePlus => "steane_plus",
            ExperimentKind::SteaneZero => "steane_zero",
            ExperimentKind::SteaneNoCnotPlus => "steane_no_cnot_plus",
            ExperimentKind::SteaneNoCnotZero => "steane_no_cnot_zero",
            ExperimentKind::BellZz => "bell_zz",
            ExperimentKind::BellXx => "bell_xx",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// Full circuit for `kind`, rotations fused, scheduled with default durations.
pub fn build_experiment(kind: ExperimentKind) -> Result<NativeCircuit> {
    build_experiment_with(kind, true)
}

/// As [`build_experiment`], optionally keeping every rotation of the
/// literal gate decompositions.
pub fn build_experiment_with(kind: ExperimentKind, fuse: bool) -> Result<NativeCircuit> {
    let mut circ = build_unscheduled(kind)?;
    if fuse {
        circ.fuse_rotations();
    }
    circ.validate()?;
    schedule(&circ, &GateDurations::default())
}

fn build_unscheduled(kind: ExperimentKind) -> Result<NativeCircuit> {
    use ExperimentKind::*;
    let mut circ = match kind {
        DirectPrep => build_prep_zero(&DATA_IONS)?,
        ShorE1 | ShorE2 => {
            let mut c = build_prep_zero(&DATA_IONS)?;
            c.append(build_shor_round(&SHOR_ROUND1_ANCILLAS)?);
            c.blocks.insert(Block::S1Round1, vec![SHOR_ROUND1_ANCILLAS[0]]);
            c.blocks.insert(Block::S2Round1, vec![SHOR_ROUND1_ANCILLAS[1]]);
            if kind == ShorE2 {
                c.append(build_shor_round(&SHOR_ROUND2_ANCILLAS)?);
                c.blocks.insert(Block::S1Round2, vec![SHOR_ROUND2_ANCILLAS[0]]);
                c.blocks.insert(Block::S2Round2, vec![SHOR_ROUND2_ANCILLAS[1]]);
            }
            c
        }
        SteanePlus | SteaneZero | SteaneNoCnotPlus | SteaneNoCnotZero => {
            let mut c = build_prep_zero(&DATA_IONS)?;
            c.append(match kind {
                SteanePlus | SteaneNoCnotPlus => build_prep_plus(&ANCILLA_IONS)?,
                _ => build_prep_zero(&ANCILLA_IONS)?,
            });
            if matches!(kind, SteanePlus | SteaneZero) {
                c.append(build_transversal_cnot(&DATA_IONS, &ANCILLA_IONS)?);
            }
            c.blocks.insert(Block::Ancilla, ANCILLA_IONS.to_vec());
            c
        }
        BellZz | BellXx => {
            let mut c = build_prep_plus(&DATA_IONS)?;
            c.append(build_prep_zero(&ANCILLA_IONS)?);
            c.append(build_transversal_cnot(&DATA_IONS, &ANCILLA_IONS)?);
            c.blocks.insert(Block::Ancilla, ANCILLA_IONS.to_vec());
            if kind == BellXx {
                let ions = c.ions.clone();
                c.extend(ions.into_iter().map(|ion| ry(ion, -FRAC_PI_2)));
                c.readout = Basis::X;
            }
            c
        }
    };
    circ.blocks.insert(Block::Data, DATA_IONS.to_vec());
    let ions = circ.ions.clone();
    circ.push(NativeGate::new(GateKind::MeasureZ { ions }));
    Ok(circ)
}

/// Lay gates out back to back and record every ion's idle stretches.
pub fn schedule(circuit: &NativeCircuit, durations: &GateDurations) -> Result<NativeCircuit> {
    durations.validate()?;
    let mut out = circuit.clone();
    out.idle.clear();
    let mut clock = 0.0;
    let mut free_since: BTreeMap<Ion, f64> = circuit.ions.iter().map(|&i| (i, 0.0)).collect();
    for (k, gate) in out.gates.iter_mut().enumerate() {
        gate.start_us = clock;
        gate.duration_us = durations.of(&gate.kind);
        clock += gate.duration_us;
        if matches!(gate.kind, GateKind::MeasureZ { .. }) {
            continue;
        }
        for ion in gate.kind.ions() {
            let since = free_since.get_mut(&ion).ok_or_else(|| {
                Error::InvalidArgument(format!("gate {k} references ion {ion} outside the layout"))
            })?;
            if gate.start_us > *since {
                out.idle.push(IdleInterval {
                    ion,
                    start_us: *since,
                    end_us: gate.start_us,
                    before_gate: Some(k),
                });
            }
            if matches!(gate.kind, GateKind::Idle { .. }) {
                // explicit waits dephase like any other idle stretch
                out.idle.push(IdleInterval {
                    ion,
                    start_us: gate.start_us,
                    end_us: gate.end_us(),
                    before_gate: Some(k + 1),
                });
            }
            *since = gate.end_us();
        }
    }
    let readout_at = out
        .gates
        .iter()
        .rev()
        .find(|g| matches!(g.kind, GateKind::MeasureZ { .. }))
        .map_or(clock, |g| g.start_us);
    for (&ion, &since) in &free_since {
        if readout_at > since {
            out.idle.push(IdleInterval {
                ion,
                start_us: since,
                end_us: readout_at,
                before_gate: None,
            });
        }
    }
    out.total_us = clock;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_is_serial() {
        let mut c = NativeCircuit::new([1, 2]);
        c.push(NativeGate::new(GateKind::Idle { ion: 1, duration_us: 100.0 }));
        c.push(NativeGate::new(GateKind::Idle { ion: 2, duration_us: 200.0 }));
        let s = schedule(&c, &GateDurations::default()).unwrap();
        assert_eq!(s.total_us, 300.0);
        assert_eq!(s.gates[1].start_us, 100.0);
    }

    #[test]
    fn untouched_ion_idles_for_the_whole_circuit() {
        let mut c = NativeCircuit::new([1, 2]);
        c.push(rx(1, 1.0));
        c.push(rx(1, 1.0));
        let s = schedule(&c, &GateDurations::default()).unwrap();
        let idle2: Vec<_> = s.idle.iter().filter(|i| i.ion == 2).collect();
        assert_eq!(idle2.len(), 1);
        assert_eq!(idle2[0].duration_us(), s.total_us);
        assert_eq!(s.total_us, 78.0);
    }

    #[test]
    fn default_single_qubit_duration() {
        assert_eq!(GateDurations::default().single_qubit_us(), 39.0);
    }

    #[test]
    fn idle_intervals_tile_the_timeline() {
        for kind in ExperimentKind::ALL {
            let c = build_experiment(kind).unwrap();
            let readout = c.gates.last().unwrap().start_us;
            for &ion in &c.ions {
                let busy: f64 = c
                    .gates
                    .iter()
                    .filter(|g| !matches!(g.kind, GateKind::MeasureZ { .. }) && g.kind.touches(ion))
                    .map(|g| g.duration_us)
                    .sum();
                let idle: f64 = c.idle.iter().filter(|i| i.ion == ion).map(|i| i.duration_us()).sum();
                assert!((busy + idle - readout).abs() < 1e-6, "{kind} ion {ion}");
            }
        }
    }

    #[test]
    fn gate_counts() {
        let e1 = build_unscheduled(ExperimentKind::ShorE1).unwrap();
        // 6 for prep, 12 couplings
        assert_eq!(e1.two_qubit_gate_count(), 18);
        let st = build_unscheduled(ExperimentKind::SteanePlus).unwrap();
        assert_eq!(st.two_qubit_gate_count(), 21);
        let e2 = build_experiment(ExperimentKind::ShorE2).unwrap();
        assert_eq!(e2.two_qubit_gate_count(), 30);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_cnot(3, 3).is_err());
        assert!(build_shor_round(&[10]).is_err());
        assert!(build_shor_round(&[10, 11, 12]).is_err());
        assert!(build_transversal_cnot(&DATA_IONS, &ANCILLA_IONS[..8]).is_err());
        assert!(build_prep_zero(&DATA_IONS[..8]).is_err());
        assert!("shor_E3".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn fusion_cancels_inverse_pairs() {
        let mut c = NativeCircuit::new([1, 2]);
        c.push(ry(1, FRAC_PI_2));
        c.push(rx(2, 1.0));
        c.push(ry(1, -FRAC_PI_2));
        c.push(ry(2, 0.5));
        c.fuse_rotations();
        assert_eq!(c.gates.len(), 2);
        let mut c = NativeCircuit::new([1]);
        c.extend([ry(1, FRAC_PI_2), ry(1, FRAC_PI_2)]);
        c.fuse_rotations();
        assert_eq!(c.gates.len(), 1);
        assert!(matches!(c.gates[0].kind, GateKind::R { theta, .. } if (theta - PI).abs() < 1e-15));
    }

    #[test]
    fn jsonl_dump_has_one_line_per_gate() {
        let c = build_experiment(ExperimentKind::DirectPrep).unwrap();
        let dump = c.to_jsonl();
        assert_eq!(dump.lines().count(), c.gates.len());
        let first: DumpLine = serde_json::from_str(dump.lines().next().unwrap()).unwrap();
        assert_eq!(first.kind, "R");
        assert_eq!(first.start, 0.0);
        assert_eq!(first.duration, 39.0);
    }
}
