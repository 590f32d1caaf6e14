mod common;

use advq::field::FieldArray;
use advq::gates::{
    ancilla_transform, circuit_to_matrix, controlled_power_block, decompose, qft, v1_block,
    v2_block, vd_block, w_j, Circuit, Gate,
};
use advq::oracle::{sample_initial, GaussianMixture};
use advq::schrodingerise::{ancilla_init, WarpSpec};
use advq::statevec::{load_product_state, QuantumState, RegisterLayout};
use advq::transport::{assemble_step, cv1_circuit, evolve, TransportSpec};
use advq::{Error, C64};
use common::*;

fn emitted_circuits() -> Vec<(String, Circuit)> {
    let mut out: Vec<(String, Circuit)> = Vec::new();
    for n in 1..=4 {
        out.push((format!("v1 n={n}"), v1_block(n, 0.37).unwrap()));
        out.push((format!("v2 n={n}"), v2_block(n, -0.61).unwrap()));
        out.push((format!("vd n={n}"), vd_block(n, 0.12).unwrap()));
        for j in 1..=n {
            out.push((format!("w n={n} j={j} x=0"), w_j(n, j, 0.3, 0.4, false).unwrap()));
            out.push((format!("w n={n} j={j} x=1"), w_j(n, j, -0.2, -1.1, true).unwrap()));
        }
    }
    for n_p in 1..=3 {
        let anc: Vec<usize> = (3..3 + n_p).collect();
        out.push((
            format!("c-power n_p={n_p}"),
            controlled_power_block(|t| v1_block(3, t), &anc, 0.2).unwrap(),
        ));
        out.push((format!("qft {n_p}"), qft(n_p, false).unwrap()));
        out.push((format!("iqft {n_p}"), qft(n_p, true).unwrap()));
        out.push((format!("centred map {n_p}"), ancilla_transform(&anc, 3 + n_p, false)));
    }
    let g = grid(&[2, 2], 1, 4.0);
    out.push(("step const".into(), assemble_step(&g, &TransportSpec::constant(&[1.0, -0.5]), 0.0, 0.3, false).unwrap()));
    out.push(("step diffusion".into(), assemble_step(&g, &TransportSpec::none(2), 0.7, 0.2, false).unwrap()));
    out.push(("step rotation".into(), assemble_step(&g, &TransportSpec::rotation2d(4.0), 0.2, 0.1, false).unwrap()));
    out.push(("step dropped".into(), assemble_step(&g, &TransportSpec::rotation2d(4.0), 0.2, 0.1, true).unwrap()));
    let g = grid(&[3, 3], 1, 4.0);
    out.push(("step shear".into(), assemble_step(&g, &TransportSpec::shear2d(8.0), 0.5, 0.1, false).unwrap()));
    out.push(("c-V1 shear".into(), cv1_circuit(&g, &TransportSpec::shear2d(8.0), 0.1).unwrap()));
    let g = grid(&[2, 2, 2], 2, 2.0);
    out.push(("step 3d".into(), assemble_step(&g, &TransportSpec::shear3d(4.0), 0.3, 0.1, false).unwrap()));
    let g = grid(&[3], 2, 4.0);
    let step = assemble_step(&g, &TransportSpec::constant(&[0.8]), 0.4, 0.1, false).unwrap();
    out.push(("decomposed step".into(), decompose(&step)));
    out.push(("step".into(), step));
    out
}

#[test]
fn every_emitted_circuit_matches_dense_product() {
    let mut r = rng(11);
    for (name, circ) in emitted_circuits() {
        assert!(circ.n_qubits <= 10, "{name}");
        let u = circuit_to_matrix(&circ).unwrap();
        let psi = random_amps(circ.n_qubits, &mut r);
        let e = max_abs_v(&run(&circ, &psi), &dense_apply(&u, &psi));
        assert!(e <= 1e-10, "{name}: {e:e}");
        let dim = u.nrows();
        let unitarity = max_abs(&(u.adjoint() * &u - identity(dim)));
        assert!(unitarity <= 1e-10, "{name}: unitarity {unitarity:e}");
    }
}

#[test]
fn circuits_act_linearly() {
    let mut r = rng(12);
    let (a, b) = (C64::new(0.3, -0.8), C64::new(-1.2, 0.1));
    for (name, circ) in emitted_circuits() {
        let n = circ.n_qubits;
        let p1 = random_amps(n, &mut r);
        let p2 = random_amps(n, &mut r);
        let mix: Vec<C64> = p1.iter().zip(&p2).map(|(x, y)| a * x + b * y).collect();
        let lhs = run(&circ, &mix);
        let rhs: Vec<C64> = run(&circ, &p1)
            .iter()
            .zip(run(&circ, &p2))
            .map(|(x, y)| a * x + b * y)
            .collect();
        assert!(max_abs_v(&lhs, &rhs) <= 1e-10, "{name}");
    }
}

#[test]
fn w1_on_random_three_qubit_state() {
    let c = w_j(3, 1, 0.3, 0.0, false).unwrap();
    let psi = random_amps(3, &mut rng(3));
    // pair rotation on (even, odd) neighbours: cos g on the diagonal, i sin g off it
    let (s, co) = 0.3f64.sin_cos();
    let mut want = vec![C64::new(0.0, 0.0); 8];
    for a in (0..8).step_by(2) {
        want[a] = co * psi[a] + C64::new(0.0, s) * psi[a + 1];
        want[a + 1] = C64::new(0.0, s) * psi[a] + co * psi[a + 1];
    }
    assert!(max_abs_v(&run(&c, &psi), &want) < 1e-12);
}

#[test]
fn gaussian_times_warped_ancilla_is_outer_product() {
    let g = grid(&[3, 3], 2, 4.0);
    let mix = GaussianMixture::centered(2, 8.0, 2.0);
    let f = sample_initial(&mix, &g).unwrap();
    let warp = WarpSpec::new(4.0, 2).unwrap();
    let w = ancilla_init(&warp).unwrap();
    let s = load_product_state(&f, &w, &g.layout()).unwrap();
    assert!((s.norm_sqr() - 1.0).abs() < 1e-12);

    // independent construction from the raw Gaussian and raw e^{-|p|}
    let raw: Vec<f64> = (0..64)
        .map(|i| {
            let (x, y) = ((i % 8) as f64, (i / 8) as f64);
            let mut v = 0.0;
            for mx in -2..=2 {
                for my in -2..=2 {
                    let dx = x - 4.0 + 8.0 * mx as f64;
                    let dy = y - 4.0 + 8.0 * my as f64;
                    v += (-(dx * dx + dy * dy) / (2.0 * 4.0)).exp();
                }
            }
            v
        })
        .collect();
    let pr = std::f64::consts::PI * 4.0;
    let wa: Vec<f64> = (0..4).map(|j| (-(-pr + j as f64 * 2.0 * pr / 4.0).abs()).exp()).collect();
    let nf = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nw = wa.iter().map(|v| v * v).sum::<f64>().sqrt();
    for k in 0..4 {
        for i in 0..64 {
            let want = raw[i] / nf * wa[k] / nw;
            assert!((s.amplitudes()[i + 64 * k].re - want).abs() < 1e-12);
            assert_eq!(s.amplitudes()[i + 64 * k].im, 0.0);
        }
    }
}

#[test]
fn product_state_projection() {
    let layout = RegisterLayout::new(vec![("x".into(), 0..2)], 2..4);
    let f = FieldArray::new(vec![4], vec![1.0, 2.0, -2.0, 4.0]).unwrap();
    let mut e = vec![C64::new(0.0, 0.0); 4];
    e[2] = C64::new(1.0, 0.0);
    let s = load_product_state(&f, &e, &layout).unwrap();
    let (u, w) = s.extract_field(2).unwrap();
    assert!((w - 1.0).abs() < 1e-14);
    for (a, b) in u.data().iter().zip([0.2, 0.4, -0.4, 0.8]) {
        assert!((a - b).abs() < 1e-15);
    }
    assert!(matches!(s.extract_field(1), Err(Error::DegenerateProjection(_))));
    assert!(s.extract_field(4).is_err());
}

#[test]
fn evolved_shear_state_matches_dense_pipeline() {
    // 8x8 shear with one ancilla: 3+3+1 qubits
    let g = grid(&[3, 3], 1, 4.0);
    let t = TransportSpec::shear2d(8.0);
    let mix = GaussianMixture::centered(2, 8.0, 1.5);
    let f = sample_initial(&mix, &g).unwrap();
    let (dt, steps) = (0.25, 6);
    let ev = evolve(&g, &t, 0.0, dt, steps, &f, false).unwrap();

    let u = circuit_to_matrix(&assemble_step(&g, &t, 0.0, dt, false).unwrap()).unwrap();
    let tr = dense_ancilla_transform(6, 1);
    let pr = 4.0 * std::f64::consts::PI;
    let w = [(-pr).exp(), 1.0];
    let nw = (w[0] * w[0] + w[1] * w[1]).sqrt();
    let psi0: Vec<C64> = (0..128).map(|i| c(f.data()[i % 64] * w[i / 64] / nw)).collect();
    let mut m = tr.clone();
    for _ in 0..steps {
        m = &u * m;
    }
    let m = tr.adjoint() * m;
    let out = dense_apply(&m, &psi0);
    let block = &out[64..128];
    let weight: f64 = block.iter().map(|z| z.norm_sqr()).sum();
    assert!((ev.weight - weight).abs() < 1e-12, "{} vs {weight}", ev.weight);
    // the projected block is complex; the field is its real part, renormalised
    let nr = block.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
    for (a, b) in ev.field.data().iter().zip(block) {
        assert!((a - b.re / nr).abs() < 1e-10);
    }
}

#[test]
fn sampling_contracts() {
    let s = advq::statevec::zero_state(1).unwrap();
    let h = s.sample_counts(100, 1).unwrap();
    assert_eq!(h.len(), 1);
    assert_eq!(h["0"], 100);

    let amps = vec![c(0.5); 4];
    let s = QuantumState::from_amplitudes(amps, RegisterLayout::flat(2)).unwrap();
    let h = s.sample_counts(1_000_000, 42).unwrap();
    assert_eq!(h.values().sum::<u64>(), 1_000_000);
    let bound = 3.0 * (250_000.0f64 * 0.75).sqrt();
    for v in h.values() {
        assert!((*v as f64 - 250_000.0).abs() <= bound);
    }
    assert_eq!(h, s.sample_counts(1_000_000, 42).unwrap());
    assert!(s.sample_counts(0, 1).is_err());
}

#[test]
fn gate_validation_errors() {
    let mut s = advq::statevec::zero_state(2).unwrap();
    assert!(matches!(s.apply_gate(&Gate::X(2)), Err(Error::QubitRange { .. })));
    assert!(matches!(
        s.apply_gate(&Gate::Cnot { control: 1, target: 1 }),
        Err(Error::DuplicateQubit(1))
    ));
    assert!(s.apply_circuit(&Circuit::new(3)).is_err());
    assert!(matches!(advq::statevec::zero_state_capped(40, 26), Err(Error::Capacity { .. })));
}
