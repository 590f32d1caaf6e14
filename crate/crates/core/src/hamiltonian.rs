//! Dense operators for small instances: the shift-operator building blocks,
//! the full warped-space Hamiltonian and its exact exponential.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::field::GridSpec;
use crate::statevec::QuantumState;
use crate::transport::TransportSpec;

pub type OperatorMatrix = DMatrix<C64>;

/// Qubit cap for [`build_full_H`].
pub const DENSE_QUBIT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SKind {
    S1,
    S2,
    SD,
}

/// Coefficients of the three operator families for one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSet {
    pub gamma_d: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
}

impl GammaSet {
    /// Grid step 1: `gamma_D = D/R`, `gamma_1 = |v|/(2R)`, `gamma_2 = v/2`.
    pub fn new(d: f64, v: f64, r: f64) -> Self {
        Self {
            gamma_d: d / r,
            gamma_1: v.abs() / (2.0 * r),
            gamma_2: v / 2.0,
        }
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn sigma(a: usize, b: usize) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(2, 2);
    m[(a, b)] = c(1.0);
    m
}

fn kron_all(factors: &[OperatorMatrix]) -> OperatorMatrix {
    factors
        .iter()
        .fold(OperatorMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

fn pow_kron(m: &OperatorMatrix, k: usize) -> OperatorMatrix {
    kron_all(&vec![m.clone(); k])
}

/// `s_j^+ = I^(n-j) (x) sigma_10 (x) sigma_01^(j-1)` and its adjoint. The
/// leftmost Kronecker factor acts on the most significant qubit.
pub fn ladder_ops(n_alpha: usize, j: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if j == 0 || j > n_alpha {
        return Err(Error::Invalid(format!("j={j} outside 1..={n_alpha}")));
    }
    let plus = kron_all(&[
        OperatorMatrix::identity(1 << (n_alpha - j), 1 << (n_alpha - j)),
        sigma(1, 0),
        pow_kron(&sigma(0, 1), j - 1),
    ]);
    let minus = plus.adjoint();
    Ok((plus, minus))
}

/// Cyclic shifts built from the ladder operators: `(P, M)` with
/// `P|j> = |j+1>` and `M = P^T`.
fn shifts(n_alpha: usize) -> (OperatorMatrix, OperatorMatrix) {
    let mut p = pow_kron(&sigma(0, 1), n_alpha);
    let mut m = pow_kron(&sigma(1, 0), n_alpha);
    for j in 1..=n_alpha {
        let (sp, sm) = ladder_ops(n_alpha, j).expect("j in range");
        p += sp;
        m += sm;
    }
    (p, m)
}

/// `S1 = SD = P + M - 2I`, `S2 = -i (M - P)`.
pub fn build_s(n_alpha: usize, kind: SKind) -> Result<OperatorMatrix> {
    if n_alpha == 0 {
        return Err(Error::Invalid("n_alpha must be at least 1".into()));
    }
    let dim = 1 << n_alpha;
    let (p, m) = shifts(n_alpha);
    Ok(match kind {
        SKind::S1 | SKind::SD => &p + &m - OperatorMatrix::identity(dim, dim) * c(2.0),
        SKind::S2 => (m - p) * C64::new(0.0, -1.0),
    })
}

/// Full Hamiltonian over system (x) ancilla:
/// `sum_k eta_k A (x) |k><k| + B (x) I` with
/// `A = sum_a (gamma_D S_D + gamma_1 S_1)` and `B = sum_a gamma_2 S_2`,
/// where spatially varying speeds enter as diagonal weights.
#[allow(non_snake_case)]
pub fn build_full_H(grid: &GridSpec, transport: &TransportSpec, d: f64) -> Result<OperatorMatrix> {
    let nq = grid.total_qubits();
    if nq > DENSE_QUBIT_CAP {
        return Err(Error::SizeCap {
            what: "build_full_H",
            requested: nq,
            limit: DENSE_QUBIT_CAP,
        });
    }
    transport.validate(grid)?;
    let shape = grid.shape();
    let n_sys: usize = shape.iter().product();
    let mut a = OperatorMatrix::zeros(n_sys, n_sys);
    let mut b = OperatorMatrix::zeros(n_sys, n_sys);
    let s1: Vec<OperatorMatrix> = grid.n.iter().map(|&q| build_s(q, SKind::S1).unwrap()).collect();
    let s2: Vec<OperatorMatrix> = grid.n.iter().map(|&q| build_s(q, SKind::S2).unwrap()).collect();
    for col in 0..n_sys {
        let coords = unflatten(col, &shape);
        for axis in 0..grid.dim() {
            let len = shape[axis];
            let stride: usize = shape[..axis].iter().product();
            let wa = d / grid.r + transport.upwind_speed(axis, &coords) / (2.0 * grid.r);
            let wb = transport.velocity(axis, &coords) / 2.0;
            for i in 0..len {
                let row = col - coords[axis] * stride + i * stride;
                a[(row, col)] += s1[axis][(i, coords[axis])] * wa;
                b[(row, col)] += s2[axis][(i, coords[axis])] * wb;
            }
        }
    }
    let n_p = 1usize << grid.n_p;
    let dim = n_sys * n_p;
    let mut h = OperatorMatrix::zeros(dim, dim);
    for k in 0..n_p {
        let eta = if grid.n_p == 0 { 0.0 } else { k as f64 - (n_p / 2) as f64 };
        let off = k * n_sys;
        let mut blk = h.view_mut((off, off), (n_sys, n_sys));
        blk += &a * c(eta) + &b;
    }
    Ok(h)
}

fn unflatten(mut i: usize, shape: &[usize]) -> Vec<usize> {
    shape
        .iter()
        .map(|&n| {
            let v = i % n;
            i /= n;
            v
        })
        .collect()
}

pub fn hermiticity_error(h: &OperatorMatrix) -> f64 {
    (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(-i H t)` for Hermitian `H`, by eigendecomposition.
pub fn expm_hermitian(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::Shape("operator is not square".into()));
    }
    let herr = hermiticity_error(h);
    if herr > 1e-8 {
        return Err(Error::Contract(format!("operator not Hermitian (error {herr:e})")));
    }
    let sym = (h + h.adjoint()) * c(0.5);
    let eig = sym.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = eig
        .eigenvalues
        .map(|l| C64::from_polar(1.0, -l * t));
    let scaled = OperatorMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * phases[j]);
    Ok(scaled * v.adjoint())
}

/// `state <- exp(-i H t) state`, the same sign the circuits implement.
pub fn exact_evolve(h: &OperatorMatrix, t: f64, state: &QuantumState) -> Result<QuantumState> {
    let dim = state.amplitudes().len();
    if dim > 4096 {
        return Err(Error::SizeCap {
            what: "exact_evolve",
            requested: state.n_qubits(),
            limit: 12,
        });
    }
    if h.nrows() != dim {
        return Err(Error::Shape(format!("operator dim {} vs state dim {dim}", h.nrows())));
    }
    let u = expm_hermitian(h, t)?;
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    let out = u * psi;
    QuantumState::from_amplitudes(out.as_slice().to_vec(), state.layout().clone())
}
