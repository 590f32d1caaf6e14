//! Shot histograms, field reconstruction and the two mitigation passes:
//! position-scaled thresholding and Savitzky-Golay smoothing.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::{FieldArray, AXIS_LABELS};
use crate::statevec::{load_product_state, RegisterLayout};
use crate::C64;

/// Bitstring counts, highest qubit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotHistogram {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub width: usize,
}

impl ShotHistogram {
    pub fn new(counts: BTreeMap<String, u64>, width: usize) -> Result<Self> {
        for k in counts.keys() {
            if k.len() != width || !k.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::Invalid(format!(
                    "bitstring {k:?} is not {width} binary digits"
                )));
            }
        }
        let shots = counts.values().sum();
        Ok(Self {
            counts,
            shots,
            width,
        })
    }

    /// Keeps shots whose top `width - keep` bits equal `value` and drops
    /// those bits.
    pub fn postselect(&self, keep: usize, value: usize) -> Result<Self> {
        if keep > self.width {
            return Err(Error::Invalid(format!(
                "cannot keep {keep} of {} bits",
                self.width
            )));
        }
        let top = self.width - keep;
        let mut counts = BTreeMap::new();
        for (k, &c) in &self.counts {
            let hi = if top == 0 {
                0
            } else {
                usize::from_str_radix(&k[..top], 2).expect("validated bitstring")
            };
            if hi == value {
                *counts.entry(k[top..].to_string()).or_insert(0) += c;
            }
        }
        Self::new(counts, keep)
    }

    /// `bitstring,count` per line.
    pub fn to_text(&self) -> String {
        self.counts
            .iter()
            .map(|(k, c)| format!("{k},{c}\n"))
            .collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut counts = BTreeMap::new();
        let mut width = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, c) = line
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("histogram line {line:?}")))?;
            let c: u64 = c
                .trim()
                .parse()
                .map_err(|e| Error::Invalid(format!("histogram line {line:?}: {e}")))?;
            if *width.get_or_insert(k.len()) != k.len() {
                return Err(Error::Invalid(format!("ragged bitstring {k:?}")));
            }
            *counts.entry(k.to_string()).or_insert(0) += c;
        }
        Self::new(counts, width.unwrap_or(0))
    }
}

/// Multinomial sample of the amplitude-encoded `field`.
pub fn sample_field(field: &FieldArray, shots: u64, seed: u64) -> Result<ShotHistogram> {
    let axes: Vec<(String, std::ops::Range<usize>)> = {
        let mut start = 0;
        field
            .shape()
            .iter()
            .enumerate()
            .map(|(a, &n)| {
                if !n.is_power_of_two() {
                    return Err(Error::Shape(format!("axis length {n} is not a power of two")));
                }
                let q = n.trailing_zeros() as usize;
                let r = start..start + q;
                start += q;
                Ok((AXIS_LABELS[a].to_string(), r))
            })
            .collect::<Result<_>>()?
    };
    let nq = axes.last().map_or(0, |a| a.1.end);
    let layout = RegisterLayout::new(axes, nq..nq);
    let state = load_product_state(field, &[C64::new(1.0, 0.0)], &layout)?;
    ShotHistogram::new(state.sample_counts(shots, seed)?, nq)
}

/// `sqrt(count / shots)`, normalised. Missing bitstrings give zero.
pub fn counts_to_field(h: &ShotHistogram, shape: &[usize]) -> Result<FieldArray> {
    if h.shots == 0 {
        return Err(Error::ZeroInput("histogram with no shots"));
    }
    let len: usize = shape.iter().product();
    if 1usize << h.width != len {
        return Err(Error::Shape(format!(
            "{}-bit histogram for field of {len} cells",
            h.width
        )));
    }
    let mut f = FieldArray::zeros(shape.to_vec());
    for (k, &c) in &h.counts {
        let i = usize::from_str_radix(k, 2).map_err(|e| Error::Invalid(e.to_string()))?;
        f.data_mut()[i] = (c as f64 / h.shots as f64).sqrt();
    }
    f.normalized()
}

/// Zeroes cells whose squared weight is below `(y + 1) eps_cut`, with `y` the
/// coordinate on axis 1 (axis 0 for 1D fields), spreads the removed weight
/// evenly over the survivors and renormalises.
pub fn threshold_mitigate(field: &FieldArray, eps_cut: f64) -> Result<FieldArray> {
    if !(eps_cut >= 0.0 && eps_cut.is_finite()) {
        return Err(Error::Invalid(format!("eps_cut {eps_cut} must be >= 0")));
    }
    let f = field.normalized()?;
    if eps_cut == 0.0 {
        return Ok(f);
    }
    let row_axis = usize::from(f.dim() > 1);
    let mut removed = 0.0;
    let mut keep = vec![false; f.len()];
    for (i, &u) in f.data().iter().enumerate() {
        let y = f.coords(i)[row_axis] as f64 + 1.0;
        let p = u * u;
        if p == 0.0 {
            continue;
        }
        if p < y * eps_cut {
            removed += p;
        } else {
            keep[i] = true;
        }
    }
    let survivors = keep.iter().filter(|&&k| k).count();
    if survivors == 0 {
        return Err(Error::ZeroInput("threshold removed every entry"));
    }
    let share = removed / survivors as f64;
    let mut out = f.clone();
    for (i, u) in out.data_mut().iter_mut().enumerate() {
        *u = if keep[i] {
            u.signum() * (*u * *u + share).sqrt()
        } else {
            0.0
        };
    }
    out.normalized()
}

/// Smoothing weights: the value at the window centre of the least-squares
/// polynomial fit of degree `order`.
pub fn savgol_coefficients(window: usize, order: usize) -> Result<Vec<f64>> {
    if window % 2 == 0 || order >= window {
        return Err(Error::Invalid(format!(
            "Savitzky-Golay needs odd window > order, got window {window}, order {order}"
        )));
    }
    let h = (window / 2) as f64;
    let a = DMatrix::from_fn(window, order + 1, |i, j| (i as f64 - h).powi(j as i32));
    let pinv = a
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::Contract(format!("Savitzky-Golay design: {e}")))?;
    Ok(pinv.row(0).iter().copied().collect())
}

/// Savitzky-Golay filter along every axis in turn, with periodic padding.
pub fn savgol2d(field: &FieldArray, window: usize, order: usize) -> Result<FieldArray> {
    let w = savgol_coefficients(window, order)?;
    if let Some(&n) = field.shape().iter().find(|&&n| n < window) {
        return Err(Error::Invalid(format!("window {window} exceeds axis length {n}")));
    }
    let half = window / 2;
    let shape = field.shape().to_vec();
    let mut u = field.clone();
    for axis in 0..shape.len() {
        let n = shape[axis];
        let stride: usize = shape[..axis].iter().product();
        let src = u.data().to_vec();
        for (i, out) in u.data_mut().iter_mut().enumerate() {
            let k = (i / stride) % n;
            let base = i - k * stride;
            *out = w
                .iter()
                .enumerate()
                .map(|(j, c)| c * src[base + (k + n + j - half) % n * stride])
                .sum();
        }
    }
    Ok(u)
}
