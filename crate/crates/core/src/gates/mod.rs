//! Gate IR, circuit synthesis, decomposition and counting.
//!
//! Besides the primitive kinds, the IR carries two compound gates that the
//! statevector engine executes directly: [`PairRotation`] (one `W_j` block)
//! and [`Gate::Power`] (the ancilla-controlled power ladder). Both expand
//! into primitives through [`decompose`].

mod decompose;
mod matrix;
mod report;
mod synth;
mod text;

pub use decompose::{decompose, expand_compound};
pub use matrix::{circuit_to_matrix, MATRIX_QUBIT_CAP};
pub use report::{gate_report, GateReport};
pub use synth::{
    ancilla_transform, controlled_power_block, power_gate, qft, v1_block, v1_gates, v2_block,
    v2_gates, vd_block, vd_gates, w_j, w_j_gates,
};
pub use text::{circuit_from_text, circuit_to_text};
pub(crate) use synth::fix_body_width;

use crate::error::{Error, Result};

/// A control qubit and the basis value it must hold.
pub type Control = (usize, bool);

/// Two-level rotation realised by the `W_j(gamma_tau, lambda, x)` block.
///
/// Acts on the basis pair `(a, b)` of `register` where `a` has bit `level-1`
/// clear and lower bits all set (`x = false`) or all clear (`x = true`), and
/// `b = a ^ (2^level - 1)`. On that pair the matrix is
/// `[[c, -i s e^{i lambda}], [-i s e^{-i lambda}, c]]` with
/// `c = cos(gamma_tau)`, `s = -sin(gamma_tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRotation {
    /// Register qubits, least significant first.
    pub register: Vec<usize>,
    /// `j` in `1..=register.len()`.
    pub level: usize,
    pub gamma_tau: f64,
    pub lambda: f64,
    pub x: bool,
}

impl PairRotation {
    /// The 2x2 block on `(a, b)`.
    pub fn matrix(&self) -> [[num_complex::Complex64; 2]; 2] {
        use num_complex::Complex64 as C;
        let half = -self.gamma_tau;
        let (s, c) = half.sin_cos();
        let e = C::from_polar(1.0, self.lambda);
        let off = C::new(0.0, -s);
        [[C::new(c, 0.0), off * e], [off * e.conj(), C::new(c, 0.0)]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    Rz { target: usize, theta: f64 },
    Phase { target: usize, lambda: f64 },
    GlobalPhase(f64),
    Cnot { control: usize, target: usize },
    Controlled { controls: Vec<Control>, body: Circuit },
    Pair(PairRotation),
    /// `sum_k body^(k - N/2) (x) |k><k|` over the `ancilla` register
    /// (least significant first, `N = 2^ancilla.len()`).
    Power { ancilla: Vec<usize>, body: Circuit },
}

impl Gate {
    /// All qubits the gate touches, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_qubits(&mut out);
        out
    }

    fn collect_qubits(&self, out: &mut Vec<usize>) {
        match self {
            Gate::X(q) | Gate::H(q) => out.push(*q),
            Gate::Rz { target, .. } | Gate::Phase { target, .. } => out.push(*target),
            Gate::GlobalPhase(_) => {}
            Gate::Cnot { control, target } => {
                out.push(*control);
                out.push(*target);
            }
            Gate::Controlled { controls, body } => {
                out.extend(controls.iter().map(|c| c.0));
                for g in &body.gates {
                    g.collect_qubits(out);
                }
            }
            Gate::Pair(p) => out.extend_from_slice(&p.register[..p.level]),
            Gate::Power { ancilla, body } => {
                out.extend_from_slice(ancilla);
                for g in &body.gates {
                    g.collect_qubits(out);
                }
            }
        }
    }

    /// Checks index range, parameter finiteness and control/target disjointness.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q >= n_qubits {
                Err(Error::QubitRange { qubit: q, n_qubits })
            } else {
                Ok(())
            }
        };
        let finite = |v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("non-finite gate parameter {v}")))
            }
        };
        match self {
            Gate::X(q) | Gate::H(q) => check(*q),
            Gate::Rz { target, theta } => {
                finite(*theta)?;
                check(*target)
            }
            Gate::Phase { target, lambda } => {
                finite(*lambda)?;
                check(*target)
            }
            Gate::GlobalPhase(phi) => finite(*phi),
            Gate::Cnot { control, target } => {
                check(*control)?;
                check(*target)?;
                if control == target {
                    return Err(Error::DuplicateQubit(*control));
                }
                Ok(())
            }
            Gate::Pair(p) => {
                finite(p.gamma_tau)?;
                finite(p.lambda)?;
                if p.level == 0 || p.level > p.register.len() {
                    return Err(Error::Invalid(format!(
                        "pair level {} outside 1..={}",
                        p.level,
                        p.register.len()
                    )));
                }
                distinct(&p.register)?;
                p.register.iter().try_for_each(|&q| check(q))
            }
            Gate::Controlled { controls, body } => {
                let ctrl: Vec<usize> = controls.iter().map(|c| c.0).collect();
                distinct(&ctrl)?;
                ctrl.iter().try_for_each(|&q| check(q))?;
                for g in &body.gates {
                    g.validate(n_qubits)?;
                    for q in g.qubits() {
                        if ctrl.contains(&q) {
                            return Err(Error::DuplicateQubit(q));
                        }
                    }
                }
                Ok(())
            }
            Gate::Power { ancilla, body } => {
                distinct(ancilla)?;
                ancilla.iter().try_for_each(|&q| check(q))?;
                for g in &body.gates {
                    g.validate(n_qubits)?;
                    for q in g.qubits() {
                        if ancilla.contains(&q) {
                            return Err(Error::DuplicateQubit(q));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::X(_) | Gate::H(_) | Gate::Cnot { .. } => self.clone(),
            Gate::Rz { target, theta } => Gate::Rz {
                target: *target,
                theta: -theta,
            },
            Gate::Phase { target, lambda } => Gate::Phase {
                target: *target,
                lambda: -lambda,
            },
            Gate::GlobalPhase(phi) => Gate::GlobalPhase(-phi),
            Gate::Controlled { controls, body } => Gate::Controlled {
                controls: controls.clone(),
                body: body.inverse(),
            },
            Gate::Pair(p) => Gate::Pair(PairRotation {
                gamma_tau: -p.gamma_tau,
                ..p.clone()
            }),
            Gate::Power { ancilla, body } => Gate::Power {
                ancilla: ancilla.clone(),
                body: body.inverse(),
            },
        }
    }

    /// True for the kinds accepted by [`gate_report`].
    pub fn is_flat(&self) -> bool {
        matches!(
            self,
            Gate::X(_)
                | Gate::H(_)
                | Gate::Rz { .. }
                | Gate::Phase { .. }
                | Gate::GlobalPhase(_)
                | Gate::Cnot { .. }
        )
    }
}

fn distinct(qs: &[usize]) -> Result<()> {
    for (i, q) in qs.iter().enumerate() {
        if qs[..i].contains(q) {
            return Err(Error::DuplicateQubit(*q));
        }
    }
    Ok(())
}

/// Ordered gate list on `n_qubits` wires.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub labels: Vec<String>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Self {
        Self {
            n_qubits,
            gates,
            labels: Vec::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.labels.push(label.into());
        self
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn append(&mut self, other: &Circuit) {
        self.gates.extend(other.gates.iter().cloned());
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Adjoint: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            labels: self.labels.clone(),
        }
    }

    /// The circuit applied `times` times in a row.
    pub fn repeated(&self, times: usize) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len() * times);
        for _ in 0..times {
            gates.extend(self.gates.iter().cloned());
        }
        Circuit {
            n_qubits: self.n_qubits,
            gates,
            labels: self.labels.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.n_qubits))
    }

    pub fn is_flat(&self) -> bool {
        self.gates.iter().all(Gate::is_flat)
    }
}
