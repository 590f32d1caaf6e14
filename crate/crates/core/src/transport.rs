//! Transport fields and per-step circuit assembly.
//!
//! Each axis sweep (x, then y, then z) applies, in order: the diffusion
//! ladder, the upwind `V1` ladder, the skew `V2` block, and finally the
//! constant-offset `V1`/`V2` pair. A linear velocity `scale * coord` is
//! realised bit by bit: factor `m` runs with time `2^m dt` under control of
//! bit `m` of the controlling axis.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::field::{FieldArray, GridSpec};
use crate::gates::{
    controlled_power_block, fix_body_width, power_gate, v1_gates, v2_gates, vd_gates, Circuit, Gate,
};
use crate::schrodingerise::{energy, prepare, recover, WarpSpec};
use crate::statevec::{QuantumState, RegisterLayout};

/// Velocity contribution `scale * coord[axis]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearTerm {
    pub axis: usize,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisTransport {
    pub constant: f64,
    pub linear: Option<LinearTerm>,
}

/// Per-axis velocity `constant + scale * coord[controlling axis]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportSpec {
    pub axes: Vec<AxisTransport>,
}

impl TransportSpec {
    pub fn none(d: usize) -> Self {
        Self {
            axes: vec![AxisTransport::default(); d],
        }
    }

    pub fn constant(v: &[f64]) -> Self {
        Self {
            axes: v
                .iter()
                .map(|&c| AxisTransport {
                    constant: c,
                    linear: None,
                })
                .collect(),
        }
    }

    /// `v[moving] = scale * coord[ctrl]` in `d` dimensions.
    pub fn shear_with_scale(d: usize, moving: usize, ctrl: usize, scale: f64) -> Self {
        let mut t = Self::none(d);
        t.axes[moving].linear = Some(LinearTerm { axis: ctrl, scale });
        t
    }

    /// `v = (y / (L/2), 0)`.
    pub fn shear2d(l: f64) -> Self {
        Self::shear_with_scale(2, 0, 1, 2.0 / l)
    }

    /// `v = (y/(L/2) - 1, -x/(L/2) + 1)`, a clockwise rotation about the centre.
    pub fn rotation2d(l: f64) -> Self {
        Self {
            axes: vec![
                AxisTransport {
                    constant: -1.0,
                    linear: Some(LinearTerm {
                        axis: 1,
                        scale: 2.0 / l,
                    }),
                },
                AxisTransport {
                    constant: 1.0,
                    linear: Some(LinearTerm {
                        axis: 0,
                        scale: -2.0 / l,
                    }),
                },
            ],
        }
    }

    /// `v = (z/(L/2), z/(L/2), 0)`.
    pub fn shear3d(l: f64) -> Self {
        let lin = Some(LinearTerm {
            axis: 2,
            scale: 2.0 / l,
        });
        Self {
            axes: vec![
                AxisTransport {
                    constant: 0.0,
                    linear: lin,
                },
                AxisTransport {
                    constant: 0.0,
                    linear: lin,
                },
                AxisTransport::default(),
            ],
        }
    }

    pub fn velocity(&self, axis: usize, coords: &[usize]) -> f64 {
        let a = &self.axes[axis];
        a.constant + a.linear.map_or(0.0, |l| l.scale * coords[l.axis] as f64)
    }

    /// Coefficient of the upwind term: the linear and constant parts enter
    /// as separate factors, so their magnitudes add.
    pub fn upwind_speed(&self, axis: usize, coords: &[usize]) -> f64 {
        let a = &self.axes[axis];
        a.constant.abs() + a.linear.map_or(0.0, |l| l.scale.abs() * coords[l.axis] as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.axes
            .iter()
            .all(|a| a.constant == 0.0 && a.linear.map_or(true, |l| l.scale == 0.0))
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.axes.len() != grid.dim() {
            return Err(Error::Invalid(format!(
                "transport has {} axes, grid {}",
                self.axes.len(),
                grid.dim()
            )));
        }
        for (a, t) in self.axes.iter().enumerate() {
            if !t.constant.is_finite() {
                return Err(Error::Invalid(format!("non-finite velocity on axis {a}")));
            }
            if let Some(l) = t.linear {
                if l.axis == a || l.axis >= grid.dim() {
                    return Err(Error::Invalid(format!(
                        "axis {a} controlled by invalid axis {}",
                        l.axis
                    )));
                }
                if !l.scale.is_finite() {
                    return Err(Error::Invalid(format!("non-finite scale on axis {a}")));
                }
            }
        }
        Ok(())
    }

    /// Largest `|v|` on `axis` over the grid.
    pub fn max_speed(&self, grid: &GridSpec, axis: usize) -> f64 {
        let a = &self.axes[axis];
        match a.linear {
            None => a.constant.abs(),
            Some(l) => {
                let top = (grid.axis_len(l.axis) - 1) as f64;
                a.constant.abs().max((a.constant + l.scale * top).abs())
            }
        }
    }

    /// `max |v| dt <= 1` on every axis.
    pub fn check_cfl(&self, grid: &GridSpec, dt: f64) -> Result<()> {
        for a in 0..grid.dim() {
            let c = self.max_speed(grid, a) * dt;
            if c > 1.0 + 1e-12 {
                return Err(Error::Cfl(format!("axis {a}: |v| dt = {c} > 1")));
            }
        }
        Ok(())
    }
}

/// One time step. With `drop_cv1` only the uncontrolled `V1^{-N_p/2}` part
/// of each upwind ladder is kept.
pub fn assemble_step(
    grid: &GridSpec,
    transport: &TransportSpec,
    d: f64,
    dt: f64,
    drop_cv1: bool,
) -> Result<Circuit> {
    transport.validate(grid)?;
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::Invalid(format!("time step {dt} must be finite and >= 0")));
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Invalid(format!("diffusivity {d} must be finite and >= 0")));
    }
    transport.check_cfl(grid, dt)?;
    let mut c = Circuit::new(grid.total_qubits()).with_label("step");
    if dt == 0.0 {
        return Ok(c);
    }
    let anc = grid.ancilla_qubits();
    let g1 = 1.0 / (2.0 * grid.r);
    let upwind = |reg: &[usize], gt: f64| -> Vec<Gate> {
        let v1 = v1_gates(reg, gt);
        if drop_cv1 {
            Circuit::from_gates(0, v1)
                .inverse()
                .repeated(1 << (anc.len() - 1))
                .gates
        } else {
            vec![power_gate(v1, &anc)]
        }
    };
    for axis in 0..grid.dim() {
        let reg = grid.axis_qubits(axis);
        if d > 0.0 && !anc.is_empty() {
            c.push(power_gate(vd_gates(&reg, d / grid.r * dt), &anc));
        }
        let t = transport.axes[axis];
        if let Some(l) = t.linear.filter(|l| l.scale != 0.0) {
            let ctrl = grid.axis_qubits(l.axis);
            if !anc.is_empty() {
                for (m, &q) in ctrl.iter().enumerate() {
                    let tau = (1u64 << m) as f64 * dt;
                    c.push(Gate::Controlled {
                        controls: vec![(q, true)],
                        body: Circuit::from_gates(0, upwind(&reg, g1 * l.scale.abs() * tau)),
                    });
                }
            }
            for (m, &q) in ctrl.iter().enumerate() {
                let tau = (1u64 << m) as f64 * dt;
                c.push(Gate::Controlled {
                    controls: vec![(q, true)],
                    body: Circuit::from_gates(0, v2_gates(&reg, 0.5 * l.scale * tau)),
                });
            }
        }
        if t.constant != 0.0 {
            if !anc.is_empty() {
                c.gates.extend(upwind(&reg, g1 * t.constant.abs() * dt));
            }
            c.gates.extend(v2_gates(&reg, 0.5 * t.constant * dt));
        }
    }
    fix_body_width(&mut c);
    c.validate()?;
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub field: FieldArray,
    /// Projection weight after each step.
    pub energy: Vec<f64>,
    /// Final projection weight.
    pub weight: f64,
    /// `| ||psi||^2 - 1 |` at the end of the run.
    pub norm_drift: f64,
}

/// Prepares, steps `n_steps` times and recovers.
#[allow(clippy::too_many_arguments)]
pub fn evolve(
    grid: &GridSpec,
    transport: &TransportSpec,
    d: f64,
    dt: f64,
    n_steps: usize,
    initial: &FieldArray,
    drop_cv1: bool,
) -> Result<Evolution> {
    evolve_with(grid, transport, d, dt, n_steps, initial, drop_cv1, |_, _| {})
}

/// [`evolve`] with a callback after each step (step index from 1, state).
#[allow(clippy::too_many_arguments)]
pub fn evolve_with(
    grid: &GridSpec,
    transport: &TransportSpec,
    d: f64,
    dt: f64,
    n_steps: usize,
    initial: &FieldArray,
    drop_cv1: bool,
    mut on_step: impl FnMut(usize, &QuantumState),
) -> Result<Evolution> {
    if n_steps == 0 {
        return Err(Error::Invalid("n_steps must be at least 1".into()));
    }
    let warp = WarpSpec::new(grid.r, grid.n_p)?;
    let step = assemble_step(grid, transport, d, dt, drop_cv1)?;
    let mut state = prepare(initial, &warp, &grid.layout())?;
    let mut trace = Vec::with_capacity(n_steps);
    for s in 1..=n_steps {
        state.apply_circuit(&step)?;
        trace.push(energy(&state)?);
        on_step(s, &state);
    }
    let norm_drift = (state.norm_sqr() - 1.0).abs();
    if norm_drift > 1e-8 {
        return Err(Error::Contract(format!("norm drifted by {norm_drift:e}")));
    }
    let (field, weight) = recover(&state, &warp)?;
    Ok(Evolution {
        field,
        energy: trace,
        weight,
        norm_drift,
    })
}

/// The controlled copies of every upwind ladder, `sum_k V1^k (x) |k><k|`,
/// without the uncontrolled offset.
pub fn cv1_circuit(grid: &GridSpec, transport: &TransportSpec, dt: f64) -> Result<Circuit> {
    transport.validate(grid)?;
    let anc = grid.ancilla_qubits();
    let mut c = Circuit::new(grid.total_qubits()).with_label("c-V1");
    if anc.is_empty() {
        return Ok(c);
    }
    let g1 = 1.0 / (2.0 * grid.r);
    let controlled_copies = |reg: &[usize], gt: f64| -> Result<Vec<Gate>> {
        let v = Circuit::from_gates(0, v1_gates(reg, gt));
        let lit = controlled_power_block(|_| Ok(v.clone()), &anc, 0.0)?;
        Ok(lit.gates[..anc.len()].to_vec())
    };
    for axis in 0..grid.dim() {
        let reg = grid.axis_qubits(axis);
        let t = transport.axes[axis];
        if let Some(l) = t.linear.filter(|l| l.scale != 0.0) {
            for (m, &q) in grid.axis_qubits(l.axis).iter().enumerate() {
                let tau = (1u64 << m) as f64 * dt;
                c.push(Gate::Controlled {
                    controls: vec![(q, true)],
                    body: Circuit::from_gates(0, controlled_copies(&reg, g1 * l.scale.abs() * tau)?),
                });
            }
        }
        if t.constant != 0.0 {
            c.gates
                .extend(controlled_copies(&reg, g1 * t.constant.abs() * dt)?);
        }
    }
    fix_body_width(&mut c);
    c.validate()?;
    Ok(c)
}

/// Largest number of qubits a c-V1 block may act on non-trivially.
pub const CV1_TARGET_CAP: usize = 12;

/// `||U - I||_F / sqrt(dim)` for the c-V1 part of one step.
///
/// The operator is block diagonal in every qubit used only as a control, so
/// the norm is accumulated block by block on the remaining target wires.
pub fn cv1_identity_distance(grid: &GridSpec, transport: &TransportSpec, dt: f64) -> Result<f64> {
    let c = cv1_circuit(grid, transport, dt)?;
    let n = c.n_qubits;
    let mut targets = Vec::new();
    collect_targets(&c.gates, &mut targets);
    targets.sort_unstable();
    targets.dedup();
    if targets.len() > CV1_TARGET_CAP {
        return Err(Error::SizeCap {
            what: "cv1_identity_distance",
            requested: targets.len(),
            limit: CV1_TARGET_CAP,
        });
    }
    let others: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let t = targets.len();
    let mut total = 0.0;
    for assign in 0..1usize << others.len() {
        let fixed: Vec<(usize, bool)> = others
            .iter()
            .enumerate()
            .map(|(b, &q)| (q, assign >> b & 1 == 1))
            .collect();
        let gates = restrict(&c.gates, &fixed, &targets);
        if gates.is_empty() {
            continue;
        }
        // columns of the block sit on the upper t qubits
        let mut amps = vec![C64::new(0.0, 0.0); 1 << (2 * t)];
        for j in 0..1usize << t {
            amps[j + (j << t)] = C64::new(1.0, 0.0);
        }
        let mut s = QuantumState::from_amplitudes(amps, RegisterLayout::flat(2 * t))?;
        let mut block = Circuit::from_gates(2 * t, gates);
        fix_body_width(&mut block);
        s.apply_circuit(&block)?;
        for (i, a) in s.amplitudes().iter().enumerate() {
            let delta = if i & ((1 << t) - 1) == i >> t { 1.0 } else { 0.0 };
            total += (a - C64::new(delta, 0.0)).norm_sqr();
        }
    }
    Ok((total / (1u64 << n) as f64).sqrt())
}

fn collect_targets(gates: &[Gate], out: &mut Vec<usize>) {
    for g in gates {
        match g {
            Gate::Controlled { body, .. } => collect_targets(&body.gates, out),
            Gate::Power { body, .. } => collect_targets(&body.gates, out),
            Gate::Cnot { target, .. } => out.push(*target),
            other => out.extend(other.qubits()),
        }
    }
}

/// Resolves controls on `fixed` qubits and renumbers `targets` to `0..`.
fn restrict(gates: &[Gate], fixed: &[(usize, bool)], targets: &[usize]) -> Vec<Gate> {
    let map = |q: usize| targets.iter().position(|&t| t == q).expect("target qubit");
    let value = |q: usize| fixed.iter().find(|f| f.0 == q).map(|f| f.1);
    let mut out = Vec::new();
    for g in gates {
        match g {
            Gate::Controlled { controls, body } => {
                let mut keep = Vec::new();
                let mut live = true;
                for &(q, pol) in controls {
                    match value(q) {
                        Some(v) if v != pol => live = false,
                        Some(_) => {}
                        None => keep.push((map(q), pol)),
                    }
                }
                if !live {
                    continue;
                }
                let inner = restrict(&body.gates, fixed, targets);
                if keep.is_empty() {
                    out.extend(inner);
                } else {
                    out.push(Gate::Controlled {
                        controls: keep,
                        body: Circuit::from_gates(0, inner),
                    });
                }
            }
            Gate::Power { ancilla, body } => {
                let lit = controlled_power_block(|_| Ok(body.clone()), ancilla, 0.0)
                    .expect("validated power gate");
                out.extend(restrict(&lit.gates, fixed, targets));
            }
            Gate::Pair(p) => {
                let mut p = p.clone();
                p.register = p.register.iter().map(|&q| map(q)).collect();
                out.push(Gate::Pair(p));
            }
            Gate::X(q) => out.push(Gate::X(map(*q))),
            Gate::H(q) => out.push(Gate::H(map(*q))),
            Gate::Rz { target, theta } => out.push(Gate::Rz {
                target: map(*target),
                theta: *theta,
            }),
            Gate::Phase { target, lambda } => out.push(Gate::Phase {
                target: map(*target),
                lambda: *lambda,
            }),
            Gate::GlobalPhase(phi) => out.push(Gate::GlobalPhase(*phi)),
            Gate::Cnot { control, target } => match value(*control) {
                Some(false) => {}
                Some(true) => out.push(Gate::X(map(*target))),
                None => out.push(Gate::Cnot {
                    control: map(*control),
                    target: map(*target),
                }),
            },
        }
    }
    out
}
