//! Circuit synthesis for the per-axis blocks and the ancilla ladder.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{Circuit, Gate, PairRotation};
use crate::error::{Error, Result};

fn check_level(n: usize, j: usize) -> Result<()> {
    if j == 0 || j > n {
        return Err(Error::Invalid(format!("level j={j} outside 1..={n}")));
    }
    Ok(())
}

/// Literal gate sequence of `W_j(gamma_tau, lambda, x)` on `register`
/// (least significant qubit first).
pub fn w_j_gates(
    register: &[usize],
    j: usize,
    gamma_tau: f64,
    lambda: f64,
    x: bool,
) -> Result<Vec<Gate>> {
    check_level(register.len(), j)?;
    let qj = register[j - 1];
    let lows = &register[..j - 1];
    let mut g = Vec::with_capacity(4 * j + 5);
    for &q in lows {
        g.push(Gate::Cnot {
            control: qj,
            target: q,
        });
    }
    if x {
        g.extend(lows.iter().map(|&q| Gate::X(q)));
    }
    g.push(Gate::Phase {
        target: qj,
        lambda,
    });
    g.push(Gate::H(qj));
    let rz = Gate::Rz {
        target: qj,
        theta: -2.0 * gamma_tau,
    };
    if lows.is_empty() {
        g.push(rz);
    } else {
        g.push(Gate::Controlled {
            controls: lows.iter().map(|&q| (q, true)).collect(),
            body: Circuit::from_gates(0, vec![rz]),
        });
    }
    g.push(Gate::H(qj));
    g.push(Gate::Phase {
        target: qj,
        lambda: -lambda,
    });
    if x {
        g.extend(lows.iter().map(|&q| Gate::X(q)));
    }
    for &q in lows.iter().rev() {
        g.push(Gate::Cnot {
            control: qj,
            target: q,
        });
    }
    Ok(g)
}

/// `W_j` on qubits `0..n_alpha` as its literal primitive sequence.
pub fn w_j(n_alpha: usize, j: usize, gamma_tau: f64, lambda: f64, x: bool) -> Result<Circuit> {
    let reg: Vec<usize> = (0..n_alpha).collect();
    let mut c = Circuit::from_gates(n_alpha, w_j_gates(&reg, j, gamma_tau, lambda, x)?);
    fix_body_width(&mut c);
    Ok(c)
}

fn pair(register: &[usize], level: usize, gamma_tau: f64, lambda: f64, x: bool) -> Gate {
    Gate::Pair(PairRotation {
        register: register.to_vec(),
        level,
        gamma_tau,
        lambda,
        x,
    })
}

/// `exp(-i gamma_tau S1)` to first order, as compound `W_j` gates.
///
/// The literal blocks generate `exp(+i g S1)`, so they are fed `g = -gamma_tau`.
pub fn v1_gates(register: &[usize], gamma_tau: f64) -> Vec<Gate> {
    let n = register.len();
    let g = -gamma_tau;
    let mut out: Vec<Gate> = (1..=n).map(|j| pair(register, j, g, 0.0, false)).collect();
    out.push(Gate::GlobalPhase(-2.0 * g));
    out.push(pair(register, n, g, 0.0, true));
    out
}

/// `exp(-i gamma_tau S2)` to first order.
pub fn v2_gates(register: &[usize], gamma_tau: f64) -> Vec<Gate> {
    let n = register.len();
    let g = -gamma_tau;
    let mut out: Vec<Gate> = (1..=n)
        .map(|j| pair(register, j, g, -FRAC_PI_2, false))
        .collect();
    out.push(pair(register, n, g, FRAC_PI_2, true));
    out
}

/// Diffusion block; same synthesis as [`v1_gates`].
pub fn vd_gates(register: &[usize], gamma_tau: f64) -> Vec<Gate> {
    v1_gates(register, gamma_tau)
}

fn block(n_alpha: usize, gates: impl Fn(&[usize]) -> Vec<Gate>) -> Result<Circuit> {
    if n_alpha == 0 {
        return Err(Error::Invalid("register needs at least one qubit".into()));
    }
    let reg: Vec<usize> = (0..n_alpha).collect();
    Ok(Circuit::from_gates(n_alpha, gates(&reg)))
}

pub fn v1_block(n_alpha: usize, gamma1_tau: f64) -> Result<Circuit> {
    block(n_alpha, |r| v1_gates(r, gamma1_tau)).map(|c| c.with_label("V1"))
}

pub fn v2_block(n_alpha: usize, gamma2_tau: f64) -> Result<Circuit> {
    block(n_alpha, |r| v2_gates(r, gamma2_tau)).map(|c| c.with_label("V2"))
}

pub fn vd_block(n_alpha: usize, gamma_d_tau: f64) -> Result<Circuit> {
    block(n_alpha, |r| vd_gates(r, gamma_d_tau)).map(|c| c.with_label("VD"))
}

/// Literal ancilla ladder: for each ancilla bit `m` a controlled copy of
/// `V(tau)^(2^m)`, then `V(tau)^(-2^(n_p-1))` uncontrolled. Block `k` of the
/// result is `V(tau)^(k - N_p/2)`.
pub fn controlled_power_block(
    base: impl Fn(f64) -> Result<Circuit>,
    ancilla: &[usize],
    tau: f64,
) -> Result<Circuit> {
    if ancilla.is_empty() {
        return Err(Error::Invalid("controlled power needs n_p >= 1".into()));
    }
    let v = base(tau)?;
    let width = ancilla
        .iter()
        .map(|q| q + 1)
        .max()
        .unwrap_or(0)
        .max(v.n_qubits);
    let mut out = Circuit::new(width).with_label("controlled-power");
    for (m, &a) in ancilla.iter().enumerate() {
        out.push(Gate::Controlled {
            controls: vec![(a, true)],
            body: v.repeated(1 << m),
        });
    }
    out.append(&v.inverse().repeated(1 << (ancilla.len() - 1)));
    out.validate()?;
    Ok(out)
}

/// Compound form of [`controlled_power_block`] executed blockwise by the engine.
pub fn power_gate(body: Vec<Gate>, ancilla: &[usize]) -> Gate {
    Gate::Power {
        ancilla: ancilla.to_vec(),
        body: Circuit::from_gates(0, body),
    }
}

/// Quantum Fourier transform on `qubits` (least significant first), with the
/// final bit reversal: `|j> -> N^{-1/2} sum_k e^{2 pi i jk/N} |k>`.
pub fn qft_gates(qubits: &[usize], inverse: bool) -> Vec<Gate> {
    let n = qubits.len();
    let mut g = Vec::new();
    for i in (0..n).rev() {
        g.push(Gate::H(qubits[i]));
        for m in (0..i).rev() {
            g.push(Gate::Controlled {
                controls: vec![(qubits[m], true)],
                body: Circuit::from_gates(
                    0,
                    vec![Gate::Phase {
                        target: qubits[i],
                        lambda: PI / (1u64 << (i - m)) as f64,
                    }],
                ),
            });
        }
    }
    for i in 0..n / 2 {
        let (a, b) = (qubits[i], qubits[n - 1 - i]);
        g.push(Gate::Cnot {
            control: a,
            target: b,
        });
        g.push(Gate::Cnot {
            control: b,
            target: a,
        });
        g.push(Gate::Cnot {
            control: a,
            target: b,
        });
    }
    if inverse {
        g = g.iter().rev().map(Gate::inverse).collect();
    }
    g
}

pub fn qft(n_p: usize, inverse: bool) -> Result<Circuit> {
    if n_p == 0 {
        return Err(Error::Invalid("qft needs at least one qubit".into()));
    }
    let q: Vec<usize> = (0..n_p).collect();
    let mut c = Circuit::from_gates(n_p, qft_gates(&q, inverse)).with_label("QFT");
    fix_body_width(&mut c);
    Ok(c)
}

/// Centred Fourier map on the ancilla: `X_msb QFT X_msb`, sending p-slot `j`
/// to Fourier mode `eta_k = k - N/2` at index `k`.
pub fn ancilla_transform(ancilla: &[usize], n_qubits: usize, inverse: bool) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    if let Some(&msb) = ancilla.last() {
        c.push(Gate::X(msb));
        c.gates.extend(qft_gates(ancilla, inverse));
        c.push(Gate::X(msb));
    }
    fix_body_width(&mut c);
    c
}

/// Gives nested bodies the width of the enclosing circuit.
pub(crate) fn fix_body_width(c: &mut Circuit) {
    let n = c.n_qubits;
    for g in &mut c.gates {
        if let Gate::Controlled { body, .. } | Gate::Power { body, .. } = g {
            body.n_qubits = n;
            fix_body_width(body);
        }
    }
}
