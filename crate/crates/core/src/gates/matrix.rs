//! Dense unitary of a circuit by literal left-multiplication.
//!
//! Compound gates are expanded into their primitive sequences first, so this
//! path shares no kernel code with the statevector engine.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::synth::{controlled_power_block, w_j_gates};
use super::{Circuit, Gate};
use crate::error::{Error, Result};

pub const MATRIX_QUBIT_CAP: usize = 12;

pub fn circuit_to_matrix(circuit: &Circuit) -> Result<DMatrix<C64>> {
    let n = circuit.n_qubits;
    if n > MATRIX_QUBIT_CAP {
        return Err(Error::SizeCap {
            what: "circuit_to_matrix",
            requested: n,
            limit: MATRIX_QUBIT_CAP,
        });
    }
    circuit.validate()?;
    let mut u = DMatrix::<C64>::identity(1 << n, 1 << n);
    for g in &circuit.gates {
        left_mul(&mut u, g, &[])?;
    }
    Ok(u)
}

fn two(a: [[f64; 2]; 2]) -> [[C64; 2]; 2] {
    a.map(|r| r.map(|v| C64::new(v, 0.0)))
}

fn left_mul(u: &mut DMatrix<C64>, g: &Gate, ctrl: &[(usize, bool)]) -> Result<()> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match g {
        Gate::X(q) => single(u, *q, ctrl, two([[0.0, 1.0], [1.0, 0.0]])),
        Gate::H(q) => single(u, *q, ctrl, two([[r, r], [r, -r]])),
        Gate::Rz { target, theta } => {
            let z = C64::new(0.0, 0.0);
            single(
                u,
                *target,
                ctrl,
                [
                    [C64::from_polar(1.0, -theta / 2.0), z],
                    [z, C64::from_polar(1.0, theta / 2.0)],
                ],
            )
        }
        Gate::Phase { target, lambda } => {
            let z = C64::new(0.0, 0.0);
            single(
                u,
                *target,
                ctrl,
                [[C64::new(1.0, 0.0), z], [z, C64::from_polar(1.0, *lambda)]],
            )
        }
        Gate::Cnot { control, target } => {
            let mut c = ctrl.to_vec();
            c.push((*control, true));
            single(u, *target, &c, two([[0.0, 1.0], [1.0, 0.0]]))
        }
        Gate::GlobalPhase(phi) => {
            let p = C64::from_polar(1.0, *phi);
            for i in 0..u.nrows() {
                if satisfied(i, ctrl) {
                    let mut row = u.row_mut(i);
                    row *= p;
                }
            }
        }
        Gate::Controlled { controls, body } => {
            let mut c = ctrl.to_vec();
            c.extend_from_slice(controls);
            for h in &body.gates {
                left_mul(u, h, &c)?;
            }
        }
        Gate::Pair(p) => {
            for h in w_j_gates(&p.register, p.level, p.gamma_tau, p.lambda, p.x)? {
                left_mul(u, &h, ctrl)?;
            }
        }
        Gate::Power { ancilla, body } => {
            let lit = controlled_power_block(|_| Ok(body.clone()), ancilla, 0.0)?;
            for h in &lit.gates {
                left_mul(u, h, ctrl)?;
            }
        }
    }
    Ok(())
}

fn satisfied(i: usize, ctrl: &[(usize, bool)]) -> bool {
    ctrl.iter().all(|&(q, v)| ((i >> q) & 1 == 1) == v)
}

/// Row update for a controlled 2x2 gate: rows `i0` (target 0) and `i1`.
fn single(u: &mut DMatrix<C64>, t: usize, ctrl: &[(usize, bool)], m: [[C64; 2]; 2]) {
    let dim = u.nrows();
    for i0 in 0..dim {
        if (i0 >> t) & 1 == 1 || !satisfied(i0, ctrl) {
            continue;
        }
        let i1 = i0 | 1 << t;
        for c in 0..dim {
            let a = u[(i0, c)];
            let b = u[(i1, c)];
            u[(i0, c)] = m[0][0] * a + m[0][1] * b;
            u[(i1, c)] = m[1][0] * a + m[1][1] * b;
        }
    }
}
