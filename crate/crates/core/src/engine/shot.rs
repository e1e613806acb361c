//! One noisy execution of a scheduled circuit.
//!
//! All classical randomness of a shot (phonon numbers, Pauli faults, idle
//! dephasing) is drawn first, in gate order, and turned into a flat list of
//! operations. The list is then applied to a [`FactoredState`], and every ion
//! is measured as soon as its last operation has run. For a terminal
//! Z-basis readout this gives the same outcome distribution as measuring
//! everything at the end, with much smaller state vectors.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Block, GateKind, Ion, NativeCircuit};
use crate::error::{Error, Result};
use crate::engine::factored::FactoredState;
use crate::engine::state::StateVector;
use crate::noise::{
    advance_phonons, crosstalk_rotations, effective_angle_1q, effective_angle_2q,
    sample_gate_faults, sample_idle_fault, sample_initial_phonons, sample_readout_flip,
    MotionalState, NoiseParams, Pauli,
};
use crate::scalar::Real;

/// A unitary gate together with the idle stretches that end right before it.
#[derive(Clone, Debug)]
struct Step {
    gate: usize,
    kind: GateKind,
    start_us: f64,
    idle: Vec<(Ion, f64)>,
}

/// A scheduled circuit indexed for repeated execution.
#[derive(Clone, Debug)]
pub struct PreparedCircuit {
    circuit: NativeCircuit,
    steps: Vec<Step>,
    final_idle: Vec<(Ion, f64)>,
}

impl PreparedCircuit {
    pub fn new(circuit: NativeCircuit) -> Result<Self> {
        circuit.validate()?;
        let mut steps: Vec<Step> = circuit
            .gates
            .iter()
            .enumerate()
            .filter(|(_, g)| is_unitary(&g.kind))
            .map(|(k, g)| Step {
                gate: k,
                kind: g.kind.clone(),
                start_us: g.start_us,
                idle: Vec::new(),
            })
            .collect();
        let mut final_idle = Vec::new();
        for interval in &circuit.idle {
            let entry = (interval.ion, interval.duration_us());
            let target = interval
                .before_gate
                .and_then(|g| steps.iter().position(|s| s.gate >= g));
            match target {
                Some(s) => steps[s].idle.push(entry),
                None => final_idle.push(entry),
            }
        }
        Ok(PreparedCircuit {
            circuit,
            steps,
            final_idle,
        })
    }

    pub fn circuit(&self) -> &NativeCircuit {
        &self.circuit
    }

    /// Indices (into the circuit's gate list) of gates that act unitarily.
    pub fn unitary_gates(&self) -> impl Iterator<Item = (usize, &GateKind)> + '_ {
        self.steps.iter().map(|s| (s.gate, &s.kind))
    }
}

fn is_unitary(kind: &GateKind) -> bool {
    matches!(kind, GateKind::R { .. } | GateKind::Rz { .. } | GateKind::Xx { .. })
}

/// Where a recorded fault came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultSource {
    Gate,
    Idle,
    Injected,
    Readout,
}

/// A Pauli applied during a shot. `gate` is the gate it follows (or, for
/// idle faults, precedes); `None` means at the readout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub source: FaultSource,
    pub gate: Option<usize>,
    pub ion: Ion,
    pub pauli: Pauli,
}

/// Paulis inserted deterministically right after gate `after_gate`, or
/// before the first gate when `after_gate` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectedFault {
    pub after_gate: Option<usize>,
    pub paulis: Vec<(Ion, Pauli)>,
}

impl InjectedFault {
    pub fn single(after_gate: Option<usize>, ion: Ion, pauli: Pauli) -> Self {
        InjectedFault {
            after_gate,
            paulis: vec![(ion, pauli)],
        }
    }

    pub fn validate(&self, prepared: &PreparedCircuit) -> Result<()> {
        let allowed: Vec<Ion> = match self.after_gate {
            None => prepared.circuit.ions.clone(),
            Some(g) => match prepared.circuit.gates.get(g) {
                Some(gate) if is_unitary(&gate.kind) => gate.kind.ions(),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "fault location {g} is not a unitary gate"
                    )))
                }
            },
        };
        if self.paulis.len() > 2 {
            return Err(Error::InvalidArgument("a fault acts on at most two ions".into()));
        }
        for (ion, _) in &self.paulis {
            if !allowed.contains(ion) {
                return Err(Error::InvalidArgument(format!(
                    "fault on ion {ion} is not adjacent to location {:?}",
                    self.after_gate
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct ShotOptions {
    pub record_faults: bool,
    pub record_phonons: bool,
    pub inject: Option<InjectedFault>,
}

/// Measured bits of one shot, per block. Within a block the `k`-th ion is
/// bit `k + 1`, so a 9-ion code block lines up with qubits 1..=9.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub shot: u64,
    pub blocks: BTreeMap<Block, u16>,
    pub block_sizes: BTreeMap<Block, usize>,
    pub fault_log: Option<Vec<FaultEvent>>,
    pub phonon_trace: Option<Vec<u64>>,
}

impl ShotRecord {
    pub fn from_ion_bits(circuit: &NativeCircuit, bit_of: impl Fn(Ion) -> bool) -> Self {
        let mut blocks = BTreeMap::new();
        let mut block_sizes = BTreeMap::new();
        for (&block, ions) in &circuit.blocks {
            let bits = ions
                .iter()
                .enumerate()
                .fold(0u16, |acc, (k, &ion)| acc | ((bit_of(ion) as u16) << (k + 1)));
            blocks.insert(block, bits);
            block_sizes.insert(block, ions.len());
        }
        ShotRecord {
            shot: 0,
            blocks,
            block_sizes,
            fault_log: None,
            phonon_trace: None,
        }
    }

    pub fn bits(&self, block: Block) -> Result<u16> {
        self.blocks
            .get(&block)
            .copied()
            .ok_or_else(|| Error::MalformedRecord(format!("missing block `{}`", block.name())))
    }

    /// Readout of a single-ion block.
    pub fn bit(&self, block: Block) -> Result<bool> {
        match self.block_sizes.get(&block) {
            Some(1) => Ok(self.bits(block)? & 0b10 != 0),
            Some(n) => Err(Error::MalformedRecord(format!(
                "block `{}` has {n} ions, expected 1",
                block.name()
            ))),
            None => Err(Error::MalformedRecord(format!("missing block `{}`", block.name()))),
        }
    }

    /// Readout of a 9-ion code block.
    pub fn code_bits(&self, block: Block) -> Result<u16> {
        match self.block_sizes.get(&block) {
            Some(9) => self.bits(block),
            Some(n) => Err(Error::MalformedRecord(format!(
                "block `{}` has {n} ions, expected 9",
                block.name()
            ))),
            None => Err(Error::MalformedRecord(format!("missing block `{}`", block.name()))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Op<T> {
    Rot { ion: Ion, phi: T, theta: T },
    Rz { ion: Ion, theta: T },
    Xx { i: Ion, j: Ion, theta: T },
    Pauli { ion: Ion, pauli: Pauli },
}

impl<T> Op<T> {
    fn ions(&self) -> (Ion, Option<Ion>) {
        match *self {
            Op::Rot { ion, .. } | Op::Rz { ion, .. } | Op::Pauli { ion, .. } => (ion, None),
            Op::Xx { i, j, .. } => (i, Some(j)),
        }
    }
}

struct Compiled<T> {
    ops: Vec<Op<T>>,
    faults: Vec<FaultEvent>,
    phonons: Vec<u64>,
}

fn compile<T: Real, R: Rng + ?Sized>(
    prepared: &PreparedCircuit,
    params: &NoiseParams,
    inject: Option<&InjectedFault>,
    initial: Option<MotionalState>,
    rng: &mut R,
) -> Result<Compiled<T>> {
    let mut out = Compiled {
        ops: Vec::with_capacity(prepared.steps.len() + 16),
        faults: Vec::new(),
        phonons: Vec::new(),
    };
    let push_pauli = |out: &mut Compiled<T>, source, gate, ion, pauli| {
        out.ops.push(Op::Pauli { ion, pauli });
        out.faults.push(FaultEvent {
            source,
            gate,
            ion,
            pauli,
        });
    };
    if let Some(f) = inject.filter(|f| f.after_gate.is_none()) {
        for &(ion, pauli) in &f.paulis {
            push_pauli(&mut out, FaultSource::Injected, None, ion, pauli);
        }
    }

    let motional = prepared.circuit.ions.iter().any(|&i| params.u_of(i) > 0.0);
    let n_bar0 = T::of(params.n_bar0);
    let mut motion = match (motional, initial) {
        (false, _) => MotionalState::new(0),
        (true, Some(m)) => m,
        (true, None) => MotionalState::new(sample_initial_phonons(params.n_bar0, rng)?),
    };
    let crosstalk = params.crosstalk_enabled();

    for step in &prepared.steps {
        let physical = !matches!(step.kind, GateKind::Rz { .. });
        if motional && physical {
            motion = if params.cooling_reset {
                MotionalState {
                    n: sample_initial_phonons(params.n_bar0, rng)?,
                    t_us: step.start_us,
                }
            } else {
                let dt = (step.start_us - motion.t_us).max(0.0);
                advance_phonons(motion, dt, params.n_dot_per_us(), rng)?
            };
            out.phonons.push(motion.n);
        }
        for &(ion, duration) in &step.idle {
            if sample_idle_fault(duration, params.gamma_deph_per_us, rng)? {
                push_pauli(&mut out, FaultSource::Idle, Some(step.gate), ion, Pauli::Z);
            }
        }
        match step.kind {
            GateKind::R { ion, phi, theta } => {
                let theta = effective_angle_1q(T::of(theta), T::of(params.u_of(ion)), motion.n, n_bar0)?;
                out.ops.push(Op::Rot {
                    ion,
                    phi: T::of(phi),
                    theta,
                });
            }
            GateKind::Rz { ion, theta } => out.ops.push(Op::Rz {
                ion,
                theta: T::of(theta),
            }),
            GateKind::Xx { i, j, theta } => {
                let theta = effective_angle_2q(
                    T::of(theta),
                    T::of(params.u_of(i)),
                    T::of(params.u_of(j)),
                    motion.n,
                    n_bar0,
                )?;
                out.ops.push(Op::Xx { i, j, theta });
                if crosstalk {
                    for (a, b, angle) in crosstalk_rotations(i, j, params, &prepared.circuit.ions)? {
                        out.ops.push(Op::Xx {
                            i: a,
                            j: b,
                            theta: T::of(angle),
                        });
                    }
                }
            }
            GateKind::MeasureZ { .. } | GateKind::Idle { .. } => unreachable!("filtered out"),
        }
        for (ion, pauli) in sample_gate_faults(&step.kind, params, rng)? {
            push_pauli(&mut out, FaultSource::Gate, Some(step.gate), ion, pauli);
        }
        if let Some(f) = inject.filter(|f| f.after_gate == Some(step.gate)) {
            for &(ion, pauli) in &f.paulis {
                push_pauli(&mut out, FaultSource::Injected, Some(step.gate), ion, pauli);
            }
        }
    }
    // Dephasing right before a Z readout cannot change the outcome, so it is
    // logged but not applied.
    for &(ion, duration) in &prepared.final_idle {
        if sample_idle_fault(duration, params.gamma_deph_per_us, rng)? {
            out.faults.push(FaultEvent {
                source: FaultSource::Idle,
                gate: None,
                ion,
                pauli: Pauli::Z,
            });
        }
    }
    Ok(out)
}

fn apply<T: Real>(state: &mut FactoredState<T>, op: &Op<T>) -> Result<()> {
    match *op {
        Op::Rot { ion, phi, theta } => state.apply_rotation(ion, phi, theta),
        Op::Rz { ion, theta } => state.apply_rz(ion, theta),
        Op::Xx { i, j, theta } => state.apply_xx(i, j, theta),
        Op::Pauli { ion, pauli } => state.apply_pauli(ion, pauli),
    }
}

/// Runs one shot. `initial` overrides the sampled starting phonon number.
pub fn run_shot<T: Real, R: Rng + ?Sized>(
    prepared: &PreparedCircuit,
    params: &NoiseParams,
    options: &ShotOptions,
    initial: Option<MotionalState>,
    rng: &mut R,
) -> Result<ShotRecord> {
    if let Some(f) = &options.inject {
        f.validate(prepared)?;
    }
    let compiled = compile::<T, R>(prepared, params, options.inject.as_ref(), initial, rng)?;
    let ions = &prepared.circuit.ions;
    let size = ions.iter().max().map_or(0, |m| m + 1);
    // Ops after an ion's last entangling gate touch only that ion, so they
    // commute with everything later. Applying them early lets the ion be
    // measured and dropped as soon as it is done with the other ions.
    let mut local: Vec<Vec<usize>> = vec![Vec::new(); size];
    let mut last_xx: Vec<Option<usize>> = vec![None; size];
    for (k, op) in compiled.ops.iter().enumerate() {
        match op.ions() {
            (a, Some(b)) => {
                last_xx[a] = Some(k);
                last_xx[b] = Some(k);
            }
            (a, None) => local[a].push(k),
        }
    }
    let mut state = FactoredState::<T>::new(ions);
    let mut bits = vec![false; size];
    let early = |k: usize, ion: Ion| last_xx[ion].is_none_or(|last| k > last);
    let mut finish = |state: &mut FactoredState<T>, ion: Ion, from: usize, rng: &mut R| -> Result<()> {
        for &k in local[ion].iter().filter(|&&k| k >= from) {
            apply(state, &compiled.ops[k])?;
        }
        bits[ion] = state.measure(ion, rng)?;
        Ok(())
    };
    for &ion in ions {
        if last_xx[ion].is_none() {
            finish(&mut state, ion, 0, rng)?;
        }
    }
    for (k, op) in compiled.ops.iter().enumerate() {
        match op.ions() {
            (a, Some(b)) => {
                apply(&mut state, op)?;
                for ion in [a, b] {
                    if last_xx[ion] == Some(k) {
                        finish(&mut state, ion, k + 1, rng)?;
                    }
                }
            }
            (a, None) if !early(k, a) => apply(&mut state, op)?,
            _ => {}
        }
    }
    let mut faults = compiled.faults;
    for &ion in ions {
        let read = sample_readout_flip(bits[ion], params, rng)?;
        if read != bits[ion] {
            faults.push(FaultEvent {
                source: FaultSource::Readout,
                gate: None,
                ion,
                pauli: Pauli::X,
            });
        }
        bits[ion] = read;
    }
    let mut record = ShotRecord::from_ion_bits(&prepared.circuit, |ion| bits[ion]);
    if options.record_faults {
        record.fault_log = Some(faults);
    }
    if options.record_phonons {
        record.phonon_trace = Some(compiled.phonons);
    }
    Ok(record)
}

/// Noiseless joint state just before readout, with `fault` inserted.
pub fn final_state(
    prepared: &PreparedCircuit,
    fault: Option<&InjectedFault>,
) -> Result<StateVector<f64>> {
    if let Some(f) = fault {
        f.validate(prepared)?;
    }
    // Only zero-probability draws consume this generator.
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    let compiled = compile::<f64, _>(prepared, &NoiseParams::noiseless(), fault, None, &mut rng)?;
    let mut state = FactoredState::<f64>::new(&prepared.circuit.ions);
    for op in &compiled.ops {
        apply(&mut state, op)?;
    }
    state.into_state()
}
