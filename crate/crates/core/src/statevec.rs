//! Statevector storage and in-place gate kernels.
//!
//! Qubit `i` is bit `i` of the basis index. Axis registers occupy the low
//! qubits in x, y, z order and the ancilla register sits on top, so the
//! basis index of grid point `s` with ancilla value `k` is `s + N_sys * k`.

use std::collections::BTreeMap;
use std::ops::Range;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::FieldArray;
use crate::gates::{Circuit, Gate};

/// Default qubit cap (2^26 amplitudes, 1 GiB).
pub const DEFAULT_MAX_QUBITS: usize = 26;
/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "ADVQ_MAX_QUBITS";

/// Below this many updates per gate the kernels stay sequential.
const PAR_THRESHOLD: usize = 1 << 15;

pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

/// Mapping from named registers to qubit ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterLayout {
    axes: Vec<(String, Range<usize>)>,
    ancilla: Range<usize>,
}

impl RegisterLayout {
    pub fn new(axes: Vec<(String, Range<usize>)>, ancilla: Range<usize>) -> Self {
        Self { axes, ancilla }
    }

    /// A layout with no axis structure: one register `q` over all qubits.
    pub fn flat(n_qubits: usize) -> Self {
        Self::new(vec![("q".into(), 0..n_qubits)], n_qubits..n_qubits)
    }

    pub fn axis_registers(&self) -> &[(String, Range<usize>)] {
        &self.axes
    }

    pub fn ancilla_register(&self) -> Range<usize> {
        self.ancilla.clone()
    }

    pub fn n_qubits(&self) -> usize {
        self.ancilla.end
    }

    pub fn system_qubits(&self) -> usize {
        self.ancilla.start
    }

    pub fn n_p(&self) -> usize {
        self.ancilla.len()
    }

    pub fn field_shape(&self) -> Vec<usize> {
        self.axes.iter().map(|(_, r)| 1usize << r.len()).collect()
    }

    fn check(&self) -> Result<()> {
        let mut next = 0;
        for (name, r) in &self.axes {
            if r.start != next || r.is_empty() {
                return Err(Error::Shape(format!("register {name} at {r:?} is not contiguous")));
            }
            next = r.end;
        }
        if self.ancilla.start != next {
            return Err(Error::Shape("ancilla must follow the axis registers".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amps: Vec<C64>,
    layout: RegisterLayout,
}

/// `|0...0>` on `n_qubits`, subject to [`max_qubits`].
pub fn zero_state(n_qubits: usize) -> Result<QuantumState> {
    zero_state_capped(n_qubits, max_qubits())
}

pub fn zero_state_capped(n_qubits: usize, cap: usize) -> Result<QuantumState> {
    if n_qubits == 0 {
        return Err(Error::Invalid("state needs at least one qubit".into()));
    }
    check_cap(n_qubits, cap)?;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
    amps[0] = C64::new(1.0, 0.0);
    Ok(QuantumState {
        n_qubits,
        amps,
        layout: RegisterLayout::flat(n_qubits),
    })
}

fn check_cap(n_qubits: usize, cap: usize) -> Result<()> {
    if n_qubits > cap {
        return Err(Error::Capacity {
            requested: n_qubits,
            cap,
        });
    }
    Ok(())
}

/// `normalize(field) (x) normalize(ancilla_amps)` under `layout`.
pub fn load_product_state(
    field: &FieldArray,
    ancilla_amps: &[C64],
    layout: &RegisterLayout,
) -> Result<QuantumState> {
    layout.check()?;
    if field.shape() != layout.field_shape().as_slice() {
        return Err(Error::Shape(format!(
            "field shape {:?} does not match layout {:?}",
            field.shape(),
            layout.field_shape()
        )));
    }
    if ancilla_amps.len() != 1 << layout.n_p() {
        return Err(Error::Shape(format!(
            "{} ancilla amplitudes for {} ancilla qubits",
            ancilla_amps.len(),
            layout.n_p()
        )));
    }
    let n_qubits = layout.n_qubits();
    check_cap(n_qubits, max_qubits())?;
    let fnorm = field.norm();
    let anorm = ancilla_amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if fnorm == 0.0 {
        return Err(Error::ZeroInput("field"));
    }
    if anorm == 0.0 {
        return Err(Error::ZeroInput("ancilla amplitudes"));
    }
    let n_sys = field.len();
    let mut amps = Vec::with_capacity(n_sys * ancilla_amps.len());
    for a in ancilla_amps {
        let a = a / anorm;
        amps.extend(field.data().iter().map(|&f| a * (f / fnorm)));
    }
    Ok(QuantumState {
        n_qubits,
        amps,
        layout: layout.clone(),
    })
}

impl QuantumState {
    /// Wraps raw amplitudes without normalising them.
    pub fn from_amplitudes(amps: Vec<C64>, layout: RegisterLayout) -> Result<Self> {
        layout.check()?;
        let n_qubits = layout.n_qubits();
        if amps.len() != 1 << n_qubits {
            return Err(Error::Shape(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                n_qubits
            )));
        }
        check_cap(n_qubits, max_qubits())?;
        Ok(Self {
            n_qubits,
            amps,
            layout,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply(&mut self.amps, self.n_qubits, gate, 0, 0);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits > self.n_qubits {
            return Err(Error::Shape(format!(
                "{}-qubit circuit on {}-qubit state",
                circuit.n_qubits, self.n_qubits
            )));
        }
        circuit
            .gates
            .iter()
            .try_for_each(|g| g.validate(self.n_qubits))?;
        for g in &circuit.gates {
            apply(&mut self.amps, self.n_qubits, g, 0, 0);
        }
        Ok(())
    }

    /// System amplitudes in the block where the ancilla equals `ancilla_index`.
    pub fn ancilla_block(&self, ancilla_index: usize) -> Result<&[C64]> {
        if ancilla_index >= 1 << self.layout.n_p() {
            return Err(Error::Invalid(format!(
                "ancilla index {ancilla_index} out of range for {} ancilla qubits",
                self.layout.n_p()
            )));
        }
        let n_sys = 1 << self.layout.system_qubits();
        Ok(&self.amps[ancilla_index * n_sys..(ancilla_index + 1) * n_sys])
    }

    /// Real part of the projected block, renormalised, and the block's
    /// squared weight before normalisation.
    pub fn extract_field(&self, ancilla_index: usize) -> Result<(FieldArray, f64)> {
        let block = self.ancilla_block(ancilla_index)?;
        let weight: f64 = block.iter().map(|a| a.norm_sqr()).sum();
        if weight < 1e-15 {
            return Err(Error::DegenerateProjection(weight));
        }
        let f = FieldArray::new(
            self.layout.field_shape(),
            block.iter().map(|a| a.re).collect(),
        )?;
        Ok((f.normalized()?, weight))
    }

    /// Multinomial draw of `shots` measurements of all qubits. Bitstrings put
    /// the highest qubit first.
    pub fn sample_counts(&self, shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::Invalid("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::ZeroInput("state has zero norm"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = BTreeMap::<usize, u64>::new();
        for _ in 0..shots {
            let r = rng.gen::<f64>() * acc;
            let i = cdf.partition_point(|&c| c <= r).min(cdf.len() - 1);
            *hits.entry(i).or_default() += 1;
        }
        Ok(hits
            .into_iter()
            .map(|(i, c)| (format!("{:0width$b}", i, width = self.n_qubits), c))
            .collect())
    }

    /// Debug dump: `index,re,im` per line, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            s.push_str(&format!("{i},{:.16e},{:.16e}\n", a.re, a.im));
        }
        s
    }
}

/// Applies `gate` to the amplitudes whose bits under `mask` equal `val`.
fn apply(amps: &mut [C64], n: usize, gate: &Gate, mask: usize, val: usize) {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match gate {
        Gate::X(q) => swap_pairs(amps, n, mask | 1 << q, val, 1 << q),
        Gate::Cnot { control, target } => {
            let m = mask | 1 << control;
            swap_pairs(amps, n, m | 1 << target, val | 1 << control, 1 << target)
        }
        Gate::H(q) => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            rotate_pairs(amps, n, mask | 1 << q, val, 1 << q, [[h, h], [h, -h]]);
        }
        Gate::Rz { target, theta } => {
            let d0 = C64::from_polar(1.0, -theta / 2.0);
            diag_pairs(amps, n, mask | 1 << target, val, 1 << target, d0, d0.conj());
        }
        Gate::Phase { target, lambda } => {
            let d1 = C64::from_polar(1.0, *lambda);
            diag_pairs(amps, n, mask | 1 << target, val, 1 << target, one, d1);
        }
        Gate::GlobalPhase(phi) => scale(amps, n, mask, val, C64::from_polar(1.0, *phi)),
        Gate::Controlled { controls, body } => {
            let (mut m, mut v) = (mask, val);
            for &(q, pol) in controls {
                m |= 1 << q;
                v |= (pol as usize) << q;
            }
            for g in &body.gates {
                apply(amps, n, g, m, v);
            }
        }
        Gate::Pair(p) => {
            let low: usize = p.register[..p.level - 1].iter().map(|q| 1 << q).sum();
            let top = 1 << p.register[p.level - 1];
            let fixed_val = if p.x { 0 } else { low };
            let m = p.matrix();
            if m[0][1] == zero {
                diag_pairs(amps, n, mask | low | top, val | fixed_val, low | top, m[0][0], m[1][1]);
            } else {
                rotate_pairs(amps, n, mask | low | top, val | fixed_val, low | top, m);
            }
        }
        Gate::Power { ancilla, body } => {
            let inv = body.inverse();
            let n_blocks = 1usize << ancilla.len();
            let amask: usize = ancilla.iter().map(|q| 1 << q).sum();
            for k in 0..n_blocks {
                let eta = k as isize - (n_blocks / 2) as isize;
                let kval: usize = ancilla
                    .iter()
                    .enumerate()
                    .map(|(b, q)| ((k >> b) & 1) << q)
                    .sum();
                let c = if eta >= 0 { body } else { &inv };
                for _ in 0..eta.unsigned_abs() {
                    for g in &c.gates {
                        apply(amps, n, g, mask | amask, val | kval);
                    }
                }
            }
        }
    }
}

/// Expands `k` into a basis index by inserting zero bits at `fixed` positions
/// (ascending).
#[inline]
fn deposit(mut k: usize, fixed: &[u32]) -> usize {
    for &p in fixed {
        let low = k & ((1usize << p) - 1);
        k = ((k >> p) << (p + 1)) | low;
    }
    k
}

fn bit_positions(mask: usize) -> Vec<u32> {
    (0..usize::BITS).filter(|b| mask >> b & 1 == 1).collect()
}

/// Raw pointer that may cross threads; each index is written by one task.
#[derive(Clone, Copy)]
struct SharedPtr(*mut C64);
unsafe impl Send for SharedPtr {}
unsafe impl Sync for SharedPtr {}

/// Runs `f(a)` for every index `a` with `a & fixed_mask == fixed_val`.
/// `f` must only touch `a` and `a ^ flip` where `flip` is inside `fixed_mask`,
/// so distinct calls touch disjoint amplitudes.
#[inline]
fn for_each_anchor(
    amps: &mut [C64],
    n: usize,
    fixed_mask: usize,
    fixed_val: usize,
    f: impl Fn(SharedPtr, usize) + Sync,
) {
    let fixed = bit_positions(fixed_mask);
    let count = 1usize << (n - fixed.len());
    let ptr = SharedPtr(amps.as_mut_ptr());
    if count < PAR_THRESHOLD {
        for k in 0..count {
            f(ptr, deposit(k, &fixed) | fixed_val);
        }
    } else {
        (0..count)
            .into_par_iter()
            .with_min_len(1 << 12)
            .for_each(|k| f(ptr, deposit(k, &fixed) | fixed_val));
    }
}

fn rotate_pairs(
    amps: &mut [C64],
    n: usize,
    fixed_mask: usize,
    fixed_val: usize,
    flip: usize,
    m: [[C64; 2]; 2],
) {
    for_each_anchor(amps, n, fixed_mask, fixed_val, |p, a| {
        let b = a ^ flip;
        // SAFETY: a and b lie in the state (they are valid n-bit indices) and
        // no other anchor maps to either of them.
        unsafe {
            let x = *p.0.add(a);
            let y = *p.0.add(b);
            *p.0.add(a) = m[0][0] * x + m[0][1] * y;
            *p.0.add(b) = m[1][0] * x + m[1][1] * y;
        }
    });
}

fn swap_pairs(amps: &mut [C64], n: usize, fixed_mask: usize, fixed_val: usize, flip: usize) {
    for_each_anchor(amps, n, fixed_mask, fixed_val, |p, a| {
        // SAFETY: as in rotate_pairs.
        unsafe { std::ptr::swap(p.0.add(a), p.0.add(a ^ flip)) }
    });
}

fn diag_pairs(
    amps: &mut [C64],
    n: usize,
    fixed_mask: usize,
    fixed_val: usize,
    flip: usize,
    d0: C64,
    d1: C64,
) {
    for_each_anchor(amps, n, fixed_mask, fixed_val, |p, a| {
        // SAFETY: as in rotate_pairs.
        unsafe {
            *p.0.add(a) *= d0;
            *p.0.add(a ^ flip) *= d1;
        }
    });
}

fn scale(amps: &mut [C64], n: usize, mask: usize, val: usize, s: C64) {
    if mask == 0 {
        amps.par_iter_mut().with_min_len(1 << 12).for_each(|a| *a *= s);
        return;
    }
    for_each_anchor(amps, n, mask, val, |p, a| {
        // SAFETY: each anchor is a distinct index inside the state.
        unsafe { *p.0.add(a) *= s }
    });
}
