//! Line-oriented circuit text: one gate per line,
//! `GATE target(s) [controls] [params]`, nested bodies in braces.

use std::fmt::Write as _;

use super::{Circuit, Gate, PairRotation};
use crate::error::{Error, Result};

pub(crate) fn mnemonic(g: &Gate) -> &'static str {
    match g {
        Gate::X(_) => "X",
        Gate::H(_) => "H",
        Gate::Rz { .. } => "RZ",
        Gate::Phase { .. } => "P",
        Gate::GlobalPhase(_) => "GPHASE",
        Gate::Cnot { .. } => "CNOT",
        Gate::Controlled { .. } => "CTRL",
        Gate::Pair(_) => "W",
        Gate::Power { .. } => "POWER",
    }
}

fn list(qs: &[usize]) -> String {
    qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

pub fn circuit_to_text(c: &Circuit) -> String {
    let mut s = format!("QUBITS {}\n", c.n_qubits);
    for l in &c.labels {
        let _ = writeln!(s, "# {l}");
    }
    write_gates(&mut s, &c.gates, 0);
    s
}

fn write_gates(s: &mut String, gates: &[Gate], indent: usize) {
    let pad = "  ".repeat(indent);
    for g in gates {
        let m = mnemonic(g);
        let _ = match g {
            Gate::X(q) | Gate::H(q) => writeln!(s, "{pad}{m} {q}"),
            Gate::Rz { target, theta } => writeln!(s, "{pad}{m} {target} theta={theta:e}"),
            Gate::Phase { target, lambda } => writeln!(s, "{pad}{m} {target} lambda={lambda:e}"),
            Gate::GlobalPhase(phi) => writeln!(s, "{pad}{m} phi={phi:e}"),
            Gate::Cnot { control, target } => writeln!(s, "{pad}{m} {target} ctrl={control}"),
            Gate::Pair(p) => writeln!(
                s,
                "{pad}{m} {} level={} gt={:e} lambda={:e} x={}",
                list(&p.register),
                p.level,
                p.gamma_tau,
                p.lambda,
                p.x as u8
            ),
            Gate::Controlled { controls, body } => {
                let cs: Vec<String> = controls
                    .iter()
                    .map(|(q, v)| format!("{q}:{}", *v as u8))
                    .collect();
                let _ = writeln!(s, "{pad}{m} {} {{", cs.join(","));
                write_gates(s, &body.gates, indent + 1);
                writeln!(s, "{pad}}}")
            }
            Gate::Power { ancilla, body } => {
                let _ = writeln!(s, "{pad}{m} {} {{", list(ancilla));
                write_gates(s, &body.gates, indent + 1);
                writeln!(s, "{pad}}}")
            }
        };
    }
}

fn bad(line: &str, why: &str) -> Error {
    Error::Invalid(format!("circuit text line {line:?}: {why}"))
}

pub fn circuit_from_text(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .peekable();
    let head = lines.next().ok_or_else(|| bad("", "empty input"))?;
    let n = head
        .strip_prefix("QUBITS ")
        .and_then(|v| v.trim().parse::<usize>().ok())
        .ok_or_else(|| bad(head, "expected QUBITS n"))?;
    let mut c = Circuit::new(n);
    while let Some(l) = lines.peek() {
        match l.strip_prefix('#') {
            Some(label) => {
                c.labels.push(label.trim().to_string());
                lines.next();
            }
            None => break,
        }
    }
    let mut it = lines;
    c.gates = parse_block(&mut it, n, false)?;
    Ok(c)
}

fn parse_block<'a>(
    lines: &mut impl Iterator<Item = &'a str>,
    n: usize,
    nested: bool,
) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    while let Some(line) = lines.next() {
        if line == "}" {
            if nested {
                return Ok(gates);
            }
            return Err(bad(line, "unbalanced brace"));
        }
        let mut parts = line.split_whitespace();
        let op = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let param = |key: &str| -> Result<f64> {
            rest.iter()
                .find_map(|p| p.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
                .ok_or_else(|| bad(line, &format!("missing {key}")))?
                .parse::<f64>()
                .map_err(|e| bad(line, &e.to_string()))
        };
        let qubit = |i: usize| -> Result<usize> {
            rest.get(i)
                .ok_or_else(|| bad(line, "missing qubit"))?
                .parse::<usize>()
                .map_err(|e| bad(line, &e.to_string()))
        };
        let qlist = |i: usize| -> Result<Vec<usize>> {
            rest.get(i)
                .ok_or_else(|| bad(line, "missing qubit list"))?
                .split(',')
                .map(|q| q.parse::<usize>().map_err(|e| bad(line, &e.to_string())))
                .collect()
        };
        let g = match op {
            "X" => Gate::X(qubit(0)?),
            "H" => Gate::H(qubit(0)?),
            "RZ" => Gate::Rz {
                target: qubit(0)?,
                theta: param("theta")?,
            },
            "P" => Gate::Phase {
                target: qubit(0)?,
                lambda: param("lambda")?,
            },
            "GPHASE" => Gate::GlobalPhase(param("phi")?),
            "CNOT" => Gate::Cnot {
                target: qubit(0)?,
                control: param("ctrl")? as usize,
            },
            "W" => Gate::Pair(PairRotation {
                register: qlist(0)?,
                level: param("level")? as usize,
                gamma_tau: param("gt")?,
                lambda: param("lambda")?,
                x: param("x")? != 0.0,
            }),
            "CTRL" => {
                let spec = rest.first().ok_or_else(|| bad(line, "missing controls"))?;
                let controls = spec
                    .split(',')
                    .map(|c| {
                        let (q, v) = c.split_once(':').ok_or_else(|| bad(line, "control q:v"))?;
                        Ok((
                            q.parse::<usize>().map_err(|e| bad(line, &e.to_string()))?,
                            v == "1",
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Gate::Controlled {
                    controls,
                    body: Circuit::from_gates(n, parse_block(lines, n, true)?),
                }
            }
            "POWER" => Gate::Power {
                ancilla: qlist(0)?,
                body: Circuit::from_gates(n, parse_block(lines, n, true)?),
            },
            _ => return Err(bad(line, "unknown gate")),
        };
        gates.push(g);
    }
    if nested {
        return Err(bad("", "missing closing brace"));
    }
    Ok(gates)
}
