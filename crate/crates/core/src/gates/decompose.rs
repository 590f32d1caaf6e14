//! Expansion of compound and controlled gates into `{1-qubit, CNOT}`.
//!
//! Controls are pushed inward: a controlled `W_j` only controls its central
//! rotation, since the surrounding conjugation cancels when the control is
//! off. Multi-controlled X uses qubits idle in the current gate as dirty
//! ancillas; no extra wires are ever added.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::synth::{controlled_power_block, fix_body_width, w_j_gates};
use super::{Circuit, Control, Gate};

/// Flat circuit over `{X, H, RZ, Phase, GlobalPhase, CNOT}` with the same unitary.
pub fn decompose(circuit: &Circuit) -> Circuit {
    let mut out = Vec::new();
    let n = circuit.n_qubits;
    for g in &circuit.gates {
        emit(g, &[], n, &mut out);
    }
    Circuit::from_gates(n, out)
}

/// Replaces `Pair` and `Power` gates by their literal primitive sequences,
/// keeping `Controlled` wrappers.
pub fn expand_compound(circuit: &Circuit) -> Circuit {
    let mut out = Circuit::new(circuit.n_qubits);
    for g in &circuit.gates {
        expand_into(g, &mut out.gates);
    }
    out.labels = circuit.labels.clone();
    fix_body_width(&mut out);
    out
}

fn expand_into(g: &Gate, out: &mut Vec<Gate>) {
    match g {
        Gate::Pair(p) => out.extend(
            w_j_gates(&p.register, p.level, p.gamma_tau, p.lambda, p.x)
                .expect("validated pair gate"),
        ),
        Gate::Power { ancilla, body } => {
            let lit = controlled_power_block(|_| Ok(body.clone()), ancilla, 0.0)
                .expect("validated power gate");
            for h in &lit.gates {
                expand_into(h, out);
            }
        }
        Gate::Controlled { controls, body } => {
            let mut inner = Vec::new();
            for h in &body.gates {
                expand_into(h, &mut inner);
            }
            out.push(Gate::Controlled {
                controls: controls.clone(),
                body: Circuit::from_gates(body.n_qubits, inner),
            });
        }
        _ => out.push(g.clone()),
    }
}

fn emit(g: &Gate, ctrl: &[usize], n: usize, out: &mut Vec<Gate>) {
    match g {
        Gate::X(t) => mcx(ctrl, *t, n, out),
        Gate::Cnot { control, target } => {
            let mut c = ctrl.to_vec();
            c.push(*control);
            mcx(&c, *target, n, out);
        }
        Gate::Rz { target, theta } => mcrz(ctrl, *target, *theta, n, out),
        Gate::Phase { target, lambda } => {
            if ctrl.is_empty() {
                out.push(g.clone());
            } else {
                mcrz(ctrl, *target, *lambda, n, out);
                mc_phase(ctrl, lambda / 2.0, n, out);
            }
        }
        Gate::GlobalPhase(phi) => mc_phase(ctrl, *phi, n, out),
        Gate::H(t) => {
            if ctrl.is_empty() {
                out.push(g.clone());
            } else {
                // H = i RY(pi/2) RZ(pi)
                mcrz(ctrl, *t, PI, n, out);
                mcry(ctrl, *t, FRAC_PI_2, n, out);
                mc_phase(ctrl, FRAC_PI_2, n, out);
            }
        }
        Gate::Pair(p) => {
            let seq = w_j_gates(&p.register, p.level, p.gamma_tau, p.lambda, p.x)
                .expect("validated pair gate");
            for h in &seq {
                let central = matches!(h, Gate::Rz { .. } | Gate::Controlled { .. });
                emit(h, if central { ctrl } else { &[] }, n, out);
            }
        }
        Gate::Power { ancilla, body } => {
            let lit = controlled_power_block(|_| Ok(body.clone()), ancilla, 0.0)
                .expect("validated power gate");
            for h in &lit.gates {
                emit(h, ctrl, n, out);
            }
        }
        Gate::Controlled { controls, body } => {
            let mut c = ctrl.to_vec();
            let negated: Vec<usize> = controls
                .iter()
                .filter(|(_, pol)| !pol)
                .map(|&(q, _)| q)
                .collect();
            c.extend(controls.iter().map(|&(q, _): &Control| q));
            out.extend(negated.iter().map(|&q| Gate::X(q)));
            for h in &body.gates {
                emit(h, &c, n, out);
            }
            out.extend(negated.iter().map(|&q| Gate::X(q)));
        }
    }
}

/// Phase `e^{i phi}` applied when every control is set.
fn mc_phase(ctrl: &[usize], phi: f64, n: usize, out: &mut Vec<Gate>) {
    match ctrl.split_last() {
        None => out.push(Gate::GlobalPhase(phi)),
        Some((&last, rest)) => emit(
            &Gate::Phase {
                target: last,
                lambda: phi,
            },
            rest,
            n,
            out,
        ),
    }
}

fn mcry(ctrl: &[usize], t: usize, phi: f64, n: usize, out: &mut Vec<Gate>) {
    // RY(phi) = S H RZ(phi) H S^dagger
    out.push(Gate::Phase {
        target: t,
        lambda: -FRAC_PI_2,
    });
    out.push(Gate::H(t));
    mcrz(ctrl, t, phi, n, out);
    out.push(Gate::H(t));
    out.push(Gate::Phase {
        target: t,
        lambda: FRAC_PI_2,
    });
}

fn mcrz(ctrl: &[usize], t: usize, theta: f64, n: usize, out: &mut Vec<Gate>) {
    let rz = |theta: f64| Gate::Rz { target: t, theta };
    match ctrl.len() {
        0 => out.push(rz(theta)),
        1 => {
            let c = Gate::Cnot {
                control: ctrl[0],
                target: t,
            };
            out.extend([rz(theta / 2.0), c.clone(), rz(-theta / 2.0), c]);
        }
        k => {
            // [C^{K1}X . RZ(-theta/4) . C^{K2}X . RZ(theta/4)]^2 realises C^k RZ(theta)
            let (k1, k2) = ctrl.split_at(k.div_ceil(2));
            for _ in 0..2 {
                out.push(rz(theta / 4.0));
                mcx(k2, t, n, out);
                out.push(rz(-theta / 4.0));
                mcx(k1, t, n, out);
            }
        }
    }
}

fn mcx(ctrl: &[usize], t: usize, n: usize, out: &mut Vec<Gate>) {
    match ctrl.len() {
        0 => out.push(Gate::X(t)),
        1 => out.push(Gate::Cnot {
            control: ctrl[0],
            target: t,
        }),
        2 => toffoli(ctrl[0], ctrl[1], t, out),
        m => {
            let dirty: Vec<usize> = (0..n).filter(|q| *q != t && !ctrl.contains(q)).collect();
            if dirty.len() >= m - 2 {
                v_chain(ctrl, t, &dirty[..m - 2], out);
            } else if let Some(&a) = dirty.first() {
                let (k1, k2) = ctrl.split_at(m.div_ceil(2));
                let mut k2a = k2.to_vec();
                k2a.push(a);
                for _ in 0..2 {
                    mcx(k1, a, n, out);
                    mcx(&k2a, t, n, out);
                }
            } else {
                // C^m X = H . C^m Z . H, with C^m Z = C^m RZ(pi) and a phase pi/2
                out.push(Gate::H(t));
                mcrz(ctrl, t, PI, n, out);
                mc_phase(ctrl, FRAC_PI_2, n, out);
                out.push(Gate::H(t));
            }
        }
    }
}

/// Toffoli-ladder C^m X with `m - 2` dirty ancillas. Only the two Toffolis
/// on `t` are exact; the ladder uses relative-phase Toffolis whose phases
/// cancel pairwise, for `12m - 18` CNOTs.
fn v_chain(c: &[usize], t: usize, a: &[usize], out: &mut Vec<Gate>) {
    let m = c.len();
    for _ in 0..2 {
        toffoli(c[m - 1], a[m - 3], t, out);
        for i in (2..m - 1).rev() {
            rccx(c[i], a[i - 2], a[i - 1], out);
        }
        rccx(c[0], c[1], a[0], out);
        for i in 2..m - 1 {
            rccx(c[i], a[i - 2], a[i - 1], out);
        }
    }
}

/// Toffoli up to a diagonal phase on the controls, 3 CNOTs. Self-inverse.
fn rccx(a: usize, b: usize, t: usize, out: &mut Vec<Gate>) {
    let p = |s: f64| Gate::Phase {
        target: t,
        lambda: s * FRAC_PI_4,
    };
    let cx = |c: usize| Gate::Cnot { control: c, target: t };
    out.extend([
        Gate::H(t),
        p(1.0),
        cx(b),
        p(-1.0),
        cx(a),
        p(1.0),
        cx(b),
        p(-1.0),
        Gate::H(t),
    ]);
}

fn toffoli(a: usize, b: usize, t: usize, out: &mut Vec<Gate>) {
    let tg = |q: usize, s: f64| Gate::Phase {
        target: q,
        lambda: s * FRAC_PI_4,
    };
    let cx = |c: usize, t: usize| Gate::Cnot { control: c, target: t };
    out.extend([
        Gate::H(t),
        cx(b, t),
        tg(t, -1.0),
        cx(a, t),
        tg(t, 1.0),
        cx(b, t),
        tg(t, -1.0),
        cx(a, t),
        tg(b, 1.0),
        tg(t, 1.0),
        Gate::H(t),
        cx(a, b),
        tg(a, 1.0),
        tg(b, -1.0),
        cx(a, b),
    ]);
}
