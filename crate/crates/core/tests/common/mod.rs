#![allow(dead_code)]

pub mod props;

use advq::field::GridSpec;
use advq::gates::Circuit;
use advq::statevec::{QuantumState, RegisterLayout};
use advq::C64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = DMatrix<C64>;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_v(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_amps(n_qubits: usize, r: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..1usize << n_qubits)
        .map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_state(n_qubits: usize, r: &mut impl Rng) -> QuantumState {
    QuantumState::from_amplitudes(random_amps(n_qubits, r), RegisterLayout::flat(n_qubits)).unwrap()
}

/// `U psi` by dense multiplication.
pub fn dense_apply(u: &Mat, psi: &[C64]) -> Vec<C64> {
    (u * DVector::from_column_slice(psi)).iter().copied().collect()
}

/// Statevector run of `circuit` on `psi`.
pub fn run(circuit: &Circuit, psi: &[C64]) -> Vec<C64> {
    let n = circuit.n_qubits;
    let mut s = QuantumState::from_amplitudes(psi.to_vec(), RegisterLayout::flat(n)).unwrap();
    s.apply_circuit(circuit).unwrap();
    s.amplitudes().to_vec()
}

pub fn identity(dim: usize) -> Mat {
    Mat::identity(dim, dim)
}

/// Embeds a one-qubit matrix on qubit `q` of `n`.
pub fn on_qubit(m: [[C64; 2]; 2], q: usize, n: usize) -> Mat {
    let dim = 1 << n;
    Mat::from_fn(dim, dim, |i, j| {
        if (i ^ j) & !(1 << q) != 0 {
            c(0.0)
        } else {
            m[i >> q & 1][j >> q & 1]
        }
    })
}

/// Permutation matrix `|f(j)><j|`.
pub fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> Mat {
    let mut m = Mat::zeros(dim, dim);
    for j in 0..dim {
        m[(f(j), j)] = c(1.0);
    }
    m
}

/// Unitary applying `m` to qubit `t` whenever every control bit is set.
pub fn controlled_on(m: [[C64; 2]; 2], controls: &[usize], t: usize, n: usize) -> Mat {
    let dim = 1 << n;
    let mask: usize = controls.iter().map(|q| 1 << q).sum();
    Mat::from_fn(dim, dim, |i, j| {
        if (i ^ j) & !(1 << t) != 0 {
            c(0.0)
        } else if j & mask != mask {
            if i == j {
                c(1.0)
            } else {
                c(0.0)
            }
        } else {
            m[i >> t & 1][j >> t & 1]
        }
    })
}

pub fn h2() -> [[C64; 2]; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [[c(r), c(r)], [c(r), c(-r)]]
}

pub fn x2() -> [[C64; 2]; 2] {
    [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]
}

pub fn rz2(theta: f64) -> [[C64; 2]; 2] {
    [
        [C64::from_polar(1.0, -theta / 2.0), c(0.0)],
        [c(0.0), C64::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn p2(lambda: f64) -> [[C64; 2]; 2] {
    [[c(1.0), c(0.0)], [c(0.0), C64::from_polar(1.0, lambda)]]
}

pub fn cnot(control: usize, target: usize, n: usize) -> Mat {
    permutation(1 << n, |j| if j >> control & 1 == 1 { j ^ 1 << target } else { j })
}

/// `T|j> = N^{-1/2} sum_k w^{(j+N/2)(k+N/2)} |k>`, `w = e^{2 pi i/N}`, on
/// the top `n_p` qubits of an `n_sys + n_p` register.
pub fn dense_ancilla_transform(n_sys: usize, n_p: usize) -> Mat {
    let np = 1usize << n_p;
    let ns = 1usize << n_sys;
    let f = Mat::from_fn(np, np, |k, j| {
        let e = ((j + np / 2) * (k + np / 2)) % np;
        C64::from_polar(1.0 / (np as f64).sqrt(), 2.0 * std::f64::consts::PI * e as f64 / np as f64)
    });
    f.kronecker(&identity(ns))
}

/// Log-log least-squares slope.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

pub fn grid(n: &[usize], n_p: usize, r: f64) -> GridSpec {
    GridSpec::new(n.to_vec(), n_p, r).unwrap()
}
