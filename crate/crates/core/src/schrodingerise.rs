//! Warped-phase lifecycle: p-grid, ancilla preparation, Fourier map to the
//! eta basis, and recovery by projection at p = 0.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::field::FieldArray;
use crate::gates::ancilla_transform;
use crate::statevec::{load_product_state, QuantumState, RegisterLayout};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpSpec {
    pub r: f64,
    pub n_p: usize,
}

impl WarpSpec {
    pub fn new(r: f64, n_p: usize) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Invalid(format!("warp radius {r} must be positive")));
        }
        Ok(Self { r, n_p })
    }

    pub fn n_slots(&self) -> usize {
        1 << self.n_p
    }

    /// `p_j = -pi R + j 2 pi R / N_p`.
    pub fn p_values(&self) -> Vec<f64> {
        let n = self.n_slots() as f64;
        let pr = std::f64::consts::PI * self.r;
        (0..self.n_slots())
            .map(|j| -pr + j as f64 * 2.0 * pr / n)
            .collect()
    }

    /// `eta_k = k - N_p/2`.
    pub fn eta_values(&self) -> Vec<f64> {
        let half = (self.n_slots() / 2) as f64;
        (0..self.n_slots()).map(|k| k as f64 - half).collect()
    }

    /// p-grid index of `p = 0`.
    pub fn recovery_index(&self) -> usize {
        self.n_slots() / 2
    }
}

/// Normalised `w_j ~ e^{-|p_j|}`.
pub fn ancilla_init(warp: &WarpSpec) -> Result<Vec<C64>> {
    if warp.n_p == 0 {
        return Err(Error::Invalid("ancilla_init needs n_p >= 1".into()));
    }
    let w: Vec<f64> = warp.p_values().iter().map(|p| (-p.abs()).exp()).collect();
    let n = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(w.into_iter().map(|v| C64::new(v / n, 0.0)).collect())
}

/// Loads `initial (x) w` and maps the ancilla to the eta basis. With
/// `n_p = 0` the field is loaded alone.
pub fn prepare(initial: &FieldArray, warp: &WarpSpec, layout: &RegisterLayout) -> Result<QuantumState> {
    if layout.n_p() != warp.n_p {
        return Err(Error::Shape(format!(
            "layout has {} ancilla qubits, warp {}",
            layout.n_p(),
            warp.n_p
        )));
    }
    if warp.n_p == 0 {
        return load_product_state(initial, &[C64::new(1.0, 0.0)], layout);
    }
    let mut s = load_product_state(initial, &ancilla_init(warp)?, layout)?;
    let anc: Vec<usize> = layout.ancilla_register().collect();
    s.apply_circuit(&ancilla_transform(&anc, layout.n_qubits(), false))?;
    Ok(s)
}

/// Inverse Fourier map on the ancilla, then projection at p = 0. Returns the
/// renormalised field and the projection weight.
pub fn recover(state: &QuantumState, warp: &WarpSpec) -> Result<(FieldArray, f64)> {
    if warp.n_p == 0 {
        return state.extract_field(0);
    }
    let layout = state.layout();
    let anc: Vec<usize> = layout.ancilla_register().collect();
    let mut s = state.clone();
    s.apply_circuit(&ancilla_transform(&anc, layout.n_qubits(), true))?;
    s.extract_field(warp.recovery_index())
}

/// Row `j*` of the inverse ancilla map: projected amplitude at system index
/// `s` is `sum_k row[k] psi[s + N_sys k]`.
pub fn recovery_row(n_p: usize) -> Result<Vec<C64>> {
    let warp = WarpSpec::new(1.0, n_p)?;
    let layout = RegisterLayout::new(Vec::new(), 0..n_p);
    let mut e = vec![C64::new(0.0, 0.0); warp.n_slots()];
    e[warp.recovery_index()] = C64::new(1.0, 0.0);
    let mut s = QuantumState::from_amplitudes(e, layout)?;
    let anc: Vec<usize> = (0..n_p).collect();
    s.apply_circuit(&ancilla_transform(&anc, n_p, false))?;
    Ok(s.amplitudes().iter().map(|a| a.conj()).collect())
}

/// Projection weight at p = 0 without renormalisation.
pub fn energy(state: &QuantumState) -> Result<f64> {
    let layout = state.layout();
    let n_p = layout.n_p();
    if n_p == 0 {
        return Ok(state.norm_sqr());
    }
    let row = recovery_row(n_p)?;
    let n_sys = 1usize << layout.system_qubits();
    let a = state.amplitudes();
    Ok((0..n_sys)
        .map(|s| {
            row.iter()
                .enumerate()
                .map(|(k, r)| r * a[s + n_sys * k])
                .sum::<C64>()
                .norm_sqr()
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    #[test]
    fn ancilla_init_n1() {
        let w = WarpSpec::new(4.0, 1).unwrap();
        let p = w.p_values();
        assert!((p[0] + 4.0 * std::f64::consts::PI).abs() < 1e-15 && p[1] == 0.0);
        let a = ancilla_init(&w).unwrap();
        let e = (-4.0 * std::f64::consts::PI).exp();
        let n = (1.0 + e * e).sqrt();
        assert!((a[0].re - e / n).abs() < 1e-16);
        assert!((a[1].re - 1.0 / n).abs() < 1e-15);
    }

    #[test]
    fn ancilla_init_symmetric() {
        let w = WarpSpec::new(2.0, 3).unwrap();
        let a = ancilla_init(&w).unwrap();
        let n = w.n_slots();
        for j in 1..n {
            assert!((a[j] - a[n - j]).norm() < 1e-12);
        }
        assert!((a.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(w.eta_values(), vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn delta_field_n1_is_hadamard_of_w() {
        let g = GridSpec::new(vec![2], 1, 4.0).unwrap();
        let w = WarpSpec::new(4.0, 1).unwrap();
        let f = FieldArray::new(vec![4], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let s = prepare(&f, &w, &g.layout()).unwrap();
        let a = ancilla_init(&w).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // X H X w = ((a1 - a0), (a0 + a1)) / sqrt 2
        let want0 = (a[1] - a[0]) * r;
        let want1 = (a[0] + a[1]) * r;
        assert!((s.amplitudes()[0] - want0).norm() < 1e-15);
        assert!((s.amplitudes()[4] - want1).norm() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn round_trip_and_energy_agree() {
        let g = GridSpec::new(vec![3, 2], 3, 4.0).unwrap();
        let w = WarpSpec::new(4.0, 3).unwrap();
        let f = FieldArray::from_fn(vec![8, 4], |c| 1.0 + (c[0] * 3 + c[1]) as f64 * 0.25);
        let s = prepare(&f, &w, &g.layout()).unwrap();
        let (u, weight) = recover(&s, &w).unwrap();
        let fnorm = f.normalized().unwrap();
        for (a, b) in u.data().iter().zip(fnorm.data()) {
            assert!((a - b).abs() < 1e-12);
        }
        let a = ancilla_init(&w).unwrap();
        assert!((weight - a[w.recovery_index()].norm_sqr()).abs() < 1e-12);
        assert!((energy(&s).unwrap() - weight).abs() < 1e-14);
    }
}
