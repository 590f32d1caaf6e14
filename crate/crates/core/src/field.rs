//! Grid description and real scalar fields on periodic lattices.
//!
//! Flat indices put axis 0 (x) fastest: `i = x + Nx*y + Nx*Ny*z`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::statevec::RegisterLayout;

pub const AXIS_LABELS: [&str; 3] = ["x", "y", "z"];

/// Lattice and warp parameters. Grid step is fixed at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Qubits per spatial axis, in x, y, z order.
    pub n: Vec<usize>,
    /// Ancilla (p-register) qubits.
    pub n_p: usize,
    /// Warp radius.
    pub r: f64,
}

impl GridSpec {
    pub fn new(n: Vec<usize>, n_p: usize, r: f64) -> Result<Self> {
        if n.is_empty() || n.len() > 3 {
            return Err(Error::Invalid(format!("dimension {} not in 1..=3", n.len())));
        }
        if n.iter().any(|&q| q == 0) {
            return Err(Error::Invalid("every axis needs at least one qubit".into()));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Invalid(format!("warp radius {r} must be positive")));
        }
        Ok(Self { n, n_p, r })
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        1 << self.n[axis]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.n.iter().map(|&q| 1usize << q).collect()
    }

    pub fn system_qubits(&self) -> usize {
        self.n.iter().sum()
    }

    pub fn total_qubits(&self) -> usize {
        self.system_qubits() + self.n_p
    }

    /// Qubit indices of an axis register, least significant first.
    pub fn axis_qubits(&self, axis: usize) -> Vec<usize> {
        let start: usize = self.n[..axis].iter().sum();
        (start..start + self.n[axis]).collect()
    }

    pub fn ancilla_qubits(&self) -> Vec<usize> {
        let s = self.system_qubits();
        (s..s + self.n_p).collect()
    }

    pub fn layout(&self) -> RegisterLayout {
        let mut axes = Vec::new();
        let mut start = 0;
        for (a, &q) in self.n.iter().enumerate() {
            axes.push((AXIS_LABELS[a].to_string(), start..start + q));
            start += q;
        }
        RegisterLayout::new(axes, start..start + self.n_p)
    }
}

/// Real field sampled on a d-dimensional grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldArray {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl FieldArray {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if shape.is_empty() || len != data.len() {
            return Err(Error::Shape(format!(
                "shape {:?} holds {} values, got {}",
                shape,
                len,
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![0.0; len],
        }
    }

    /// Builds a field by evaluating `f` at every grid coordinate.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut c = vec![0usize; shape.len()];
        for _ in 0..len {
            data.push(f(&c));
            for (a, v) in c.iter_mut().enumerate() {
                *v += 1;
                if *v < shape[a] {
                    break;
                }
                *v = 0;
            }
        }
        Self { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        let mut i = 0;
        let mut stride = 1;
        for (a, &c) in coords.iter().enumerate() {
            i += c * stride;
            stride *= self.shape[a];
        }
        i
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        self.shape
            .iter()
            .map(|&n| {
                let c = index % n;
                index /= n;
                c
            })
            .collect()
    }

    pub fn get(&self, coords: &[usize]) -> f64 {
        self.data[self.index(coords)]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroInput("field has zero norm"));
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v / n).collect(),
        })
    }

    /// Cyclic shift by `offset` along `axis`: out[c] = self[c - offset].
    pub fn roll(&self, axis: usize, offset: isize) -> Self {
        let n = self.shape[axis] as isize;
        let mut out = Self::zeros(self.shape.clone());
        for i in 0..self.len() {
            let mut c = self.coords(i);
            c[axis] = ((c[axis] as isize + offset).rem_euclid(n)) as usize;
            let j = out.index(&c);
            out.data[j] = self.data[i];
        }
        out
    }

    /// CSV with header `x,y[,z],value`, x fastest, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for a in 0..self.dim() {
            s.push_str(AXIS_LABELS[a]);
            s.push(',');
        }
        s.push_str("value\n");
        for (i, v) in self.data.iter().enumerate() {
            for c in self.coords(i) {
                let _ = write!(s, "{c},");
            }
            let _ = writeln!(s, "{v:.16e}");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::ZeroInput("empty csv"))?;
        let d = header.split(',').count() - 1;
        if d == 0 || d > 3 {
            return Err(Error::Shape(format!("bad csv header {header:?}")));
        }
        let mut rows = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != d + 1 {
                return Err(Error::Shape(format!("bad csv row {line:?}")));
            }
            let mut c = Vec::with_capacity(d);
            for p in &parts[..d] {
                c.push(
                    p.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Shape(format!("{p:?}: {e}")))?,
                );
            }
            let v = parts[d]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Shape(format!("{:?}: {e}", parts[d])))?;
            rows.push((c, v));
        }
        let mut shape = vec![0usize; d];
        for (c, _) in &rows {
            for a in 0..d {
                shape[a] = shape[a].max(c[a] + 1);
            }
        }
        let mut f = Self::zeros(shape);
        if rows.len() != f.len() {
            return Err(Error::Shape("csv does not cover the full grid".into()));
        }
        for (c, v) in rows {
            let i = f.index(&c);
            f.data[i] = v;
        }
        Ok(f)
    }
}
