//! Exact outcome distributions of noiseless runs with one inserted fault.

use crate::circuit::GateKind;
use crate::engine::shot::{final_state, InjectedFault, PreparedCircuit, ShotRecord};
use crate::error::Result;
use crate::noise::Pauli;

/// Outcomes below this probability are treated as impossible.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Every readout with nonzero Born probability, paired with that probability.
pub fn exact_outcomes(
    prepared: &PreparedCircuit,
    fault: Option<&InjectedFault>,
) -> Result<Vec<(ShotRecord, f64)>> {
    let state = final_state(prepared, fault)?;
    let ions = state.ions().to_vec();
    let circuit = prepared.circuit();
    Ok(state
        .probabilities()
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > PROBABILITY_FLOOR)
        .map(|(index, p)| {
            let record = ShotRecord::from_ion_bits(circuit, |ion| {
                let k = ions.iter().position(|&i| i == ion).expect("ion in state");
                (index >> k) & 1 == 1
            });
            (record, p)
        })
        .collect())
}

/// Probability that `decode` reports a logical error. `decode` returns
/// `None` for readouts it does not count (rejected or out of scope).
pub fn inject_fault_run<F>(prepared: &PreparedCircuit, fault: Option<&InjectedFault>, decode: F) -> Result<f64>
where
    F: Fn(&ShotRecord) -> Result<Option<bool>>,
{
    let mut p_error = 0.0;
    for (record, p) in exact_outcomes(prepared, fault)? {
        if decode(&record)? == Some(true) {
            p_error += p;
        }
    }
    Ok(p_error)
}

/// All single-location faults: X, Y, Z on every ion before the first gate
/// and after every single-qubit gate, and the 15 non-identity two-qubit
/// Paulis after every XX gate.
pub fn enumerate_faults(prepared: &PreparedCircuit) -> Vec<InjectedFault> {
    let mut faults = Vec::new();
    for &ion in &prepared.circuit().ions {
        for p in Pauli::ALL {
            faults.push(InjectedFault::single(None, ion, p));
        }
    }
    for (gate, kind) in prepared.unitary_gates() {
        match *kind {
            GateKind::R { ion, .. } | GateKind::Rz { ion, .. } => {
                for p in Pauli::ALL {
                    faults.push(InjectedFault::single(Some(gate), ion, p));
                }
            }
            GateKind::Xx { i, j, .. } => {
                let options = [None, Some(Pauli::X), Some(Pauli::Y), Some(Pauli::Z)];
                for pi in options {
                    for pj in options {
                        let paulis: Vec<_> = [(i, pi), (j, pj)]
                            .into_iter()
                            .filter_map(|(ion, p)| p.map(|p| (ion, p)))
                            .collect();
                        if !paulis.is_empty() {
                            faults.push(InjectedFault {
                                after_gate: Some(gate),
                                paulis,
                            });
                        }
                    }
                }
            }
            _ => {}
        }
    }
    faults
}
