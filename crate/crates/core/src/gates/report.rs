use super::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateReport {
    pub one_qubit: usize,
    pub cnot: usize,
    pub depth: usize,
}

/// Counts over a flat circuit. Global phases are not gates and are skipped.
pub fn gate_report(circuit: &Circuit) -> Result<GateReport> {
    let mut frontier = vec![0usize; circuit.n_qubits];
    let mut r = GateReport::default();
    for g in &circuit.gates {
        match g {
            Gate::X(q) | Gate::H(q) | Gate::Rz { target: q, .. } | Gate::Phase { target: q, .. } => {
                r.one_qubit += 1;
                frontier[*q] += 1;
            }
            Gate::Cnot { control, target } => {
                r.cnot += 1;
                let d = frontier[*control].max(frontier[*target]) + 1;
                frontier[*control] = d;
                frontier[*target] = d;
            }
            Gate::GlobalPhase(_) => {}
            other => {
                return Err(Error::Contract(format!(
                    "gate_report needs a decomposed circuit, found {}",
                    super::text::mnemonic(other)
                )))
            }
        }
    }
    r.depth = frontier.into_iter().max().unwrap_or(0);
    Ok(r)
}
