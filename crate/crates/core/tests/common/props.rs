//! Randomised invariant checks shared by the property tests and the
//! acceptance run.

use advq::field::{FieldArray, GridSpec};
use advq::gates::{circuit_from_text, circuit_to_text, Circuit, Gate, PairRotation};
use advq::hamiltonian::{build_full_H, build_s, hermiticity_error, SKind};
use advq::oracle::fd_solve;
use advq::postprocess::{savgol2d, threshold_mitigate};
use advq::schrodingerise::{energy, prepare, recover, WarpSpec};
use advq::statevec::{QuantumState, RegisterLayout};
use advq::transport::TransportSpec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use super::random_amps;

type Check = fn(u32) -> Result<(), String>;

pub const CHECKS: [(&str, Check); 8] = [
    ("norm preservation", norm_preservation),
    ("hermiticity", hermiticity),
    ("circulant structure", circulant_structure),
    ("prepare/recover round trip", round_trip),
    ("savitzky-golay polynomial reproduction", savgol_polynomials),
    ("fd_solve mass conservation", fd_mass),
    ("mitigation norm and support", mitigation_support),
    ("circuit text round trip", text_round_trip),
];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

type RawGate = (u8, usize, usize, f64);

fn build_gate(n: usize, (kind, a, b, angle): RawGate) -> Gate {
    let q = a % n;
    let r = if b % n == q { (q + 1) % n } else { b % n };
    match kind % 8 {
        0 => Gate::X(q),
        1 => Gate::H(q),
        2 => Gate::Rz { target: q, theta: angle },
        3 => Gate::Phase { target: q, lambda: angle },
        4 => Gate::Cnot { control: q, target: r },
        5 => Gate::Controlled {
            controls: vec![(q, a % 2 == 0)],
            body: Circuit::from_gates(n, vec![Gate::H(r), Gate::Rz { target: r, theta: angle }, Gate::GlobalPhase(angle)]),
        },
        6 => Gate::Pair(PairRotation {
            register: (0..n).collect(),
            level: 1 + b % n,
            gamma_tau: angle,
            lambda: angle * 0.7,
            x: a % 2 == 1,
        }),
        _ => {
            let body: Vec<Gate> = vec![
                Gate::Pair(PairRotation {
                    register: (0..n - 1).collect(),
                    level: 1 + b % (n - 1),
                    gamma_tau: angle,
                    lambda: -angle,
                    x: false,
                }),
                Gate::GlobalPhase(angle),
            ];
            Gate::Power {
                ancilla: vec![n - 1],
                body: Circuit::from_gates(n, body),
            }
        }
    }
}

fn circuit_strategy() -> impl Strategy<Value = (Circuit, u64)> {
    (2usize..=6, prop::collection::vec((any::<u8>(), 0usize..64, 0usize..64, -3.0f64..3.0), 1..40), any::<u64>())
        .prop_map(|(n, raw, seed)| {
            let gates = raw.into_iter().map(|g| build_gate(n, g)).collect();
            (Circuit::from_gates(n, gates), seed)
        })
}

pub fn norm_preservation(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&circuit_strategy(), |(c, seed)| {
        let amps = random_amps(c.n_qubits, &mut super::rng(seed));
        let mut s = QuantumState::from_amplitudes(amps, RegisterLayout::flat(c.n_qubits)).unwrap();
        s.apply_circuit(&c).unwrap();
        let drift = (s.norm_sqr() - 1.0).abs();
        ensure(drift <= 1e-10 * c.len() as f64, || format!("drift {drift:e} over {} gates", c.len()))
    }))
}

fn transport_strategy(d: usize) -> impl Strategy<Value = TransportSpec> {
    (0u8..4, prop::collection::vec(-1.0f64..1.0, d), 0.01f64..1.0).prop_map(move |(kind, v, s)| match (kind, d) {
        (0, _) => TransportSpec::constant(&v),
        (1, 2) => TransportSpec::shear_with_scale(2, 0, 1, s),
        (2, 2) => TransportSpec::rotation2d(4.0 / s),
        (_, 1) => TransportSpec::constant(&v),
        _ => TransportSpec::none(d),
    })
}

pub fn hermiticity(cases: u32) -> Result<(), String> {
    let strat = (1usize..=2).prop_flat_map(|d| {
        (
            prop::collection::vec(1usize..=3, d),
            0usize..=2,
            0.5f64..8.0,
            transport_strategy(d),
            0.0f64..2.0,
        )
    });
    finish(runner(cases).run(&strat, |(n, n_p, r, t, dd)| {
        let g = GridSpec::new(n, n_p, r).unwrap();
        if g.total_qubits() > 9 {
            return Ok(());
        }
        let h = build_full_H(&g, &t, dd).unwrap();
        let e = hermiticity_error(&h);
        ensure(e <= 1e-10, || format!("hermiticity error {e:e}"))
    }))
}

pub fn circulant_structure(cases: u32) -> Result<(), String> {
    let strat = (1usize..=6, 0u8..3);
    finish(runner(cases).run(&strat, |(n, k)| {
        let kind = [SKind::S1, SKind::S2, SKind::SD][k as usize];
        let s = build_s(n, kind).unwrap();
        let dim = 1usize << n;
        for i in 0..dim {
            for j in 0..dim {
                let a = s[(i, j)];
                let b = s[((i + 1) % dim, (j + 1) % dim)];
                ensure((a - b).norm() <= 1e-15, || format!("{kind:?} n={n} breaks at ({i},{j})"))?;
            }
        }
        Ok(())
    }))
}

pub fn round_trip(cases: u32) -> Result<(), String> {
    let strat = (
        prop::collection::vec(1usize..=3, 1..=2),
        1usize..=4,
        0.25f64..6.0,
        any::<u64>(),
    );
    finish(runner(cases).run(&strat, |(n, n_p, r, seed)| {
        let g = GridSpec::new(n, n_p, r).unwrap();
        let mut rr = super::rng(seed);
        let f = FieldArray::from_fn(g.shape(), |_| rand::Rng::gen_range(&mut rr, -1.0..1.0));
        let warp = WarpSpec::new(r, n_p).unwrap();
        let s = prepare(&f, &warp, &g.layout()).unwrap();
        let (u, w) = recover(&s, &warp).unwrap();
        let want = f.normalized().unwrap();
        let e = u.data().iter().zip(want.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(e <= 1e-10, || format!("round trip error {e:e}"))?;
        let en = energy(&s).unwrap();
        ensure((en - w).abs() <= 1e-12 && (0.0..=1.0 + 1e-12).contains(&en), || format!("energy {en} weight {w}"))
    }))
}

pub fn savgol_polynomials(cases: u32) -> Result<(), String> {
    let strat = (1usize..=5, 0usize..=5, prop::collection::vec(-1.0f64..1.0, 6)).prop_filter(
        "order below window",
        |(h, o, _)| *o < 2 * h + 1,
    );
    finish(runner(cases).run(&strat, |(half, order, coef)| {
        let window = 2 * half + 1;
        let n = 64;
        let poly = |x: f64| {
            let t = (x - 32.0) / 16.0;
            coef[..=order].iter().rev().fold(0.0, |acc, c| acc * t + c)
        };
        let f = FieldArray::from_fn(vec![n], |c| poly(c[0] as f64));
        let out = savgol2d(&f, window, order).unwrap();
        for x in half..n - half {
            let e = (out.data()[x] - f.data()[x]).abs();
            ensure(e <= 1e-10, || format!("window {window} order {order} x {x}: {e:e}"))?;
        }
        Ok(())
    }))
}

pub fn fd_mass(cases: u32) -> Result<(), String> {
    let strat = (
        prop::collection::vec(2usize..=5, 1..=2),
        0.0f64..0.5,
        0.01f64..1.0,
        1usize..8,
        any::<u64>(),
        any::<bool>(),
    );
    finish(runner(cases).run(&strat, |(n, dd, dt, steps, seed, shear)| {
        let g = GridSpec::new(n.clone(), 0, 1.0).unwrap();
        let d = g.dim();
        let t = if shear && d == 2 {
            TransportSpec::shear2d(g.axis_len(1) as f64)
        } else {
            TransportSpec::constant(&vec![0.7; d])
        };
        let mut rr = super::rng(seed);
        let mut f = FieldArray::from_fn(g.shape(), |_| rand::Rng::gen_range(&mut rr, 0.0..1.0));
        let s = f.sum();
        f.data_mut().iter_mut().for_each(|v| *v /= s);
        let dt = dt.min(0.45 / (d as f64 * dd.max(1e-9))).min(0.5);
        let u = fd_solve(&g, &t, dd, dt, steps, &f).unwrap();
        let e = (u.sum() - 1.0).abs();
        ensure(e <= 1e-12 * steps as f64, || format!("mass drift {e:e}"))
    }))
}

pub fn mitigation_support(cases: u32) -> Result<(), String> {
    let strat = (prop::collection::vec(0.0f64..1.0, 64), 0.0f64..0.01);
    finish(runner(cases).run(&strat, |(v, eps)| {
        let f = FieldArray::new(vec![8, 8], v).unwrap();
        if f.norm() == 0.0 {
            return Ok(());
        }
        let out = match threshold_mitigate(&f, eps) {
            Ok(o) => o,
            Err(_) => return Ok(()),
        };
        ensure((out.norm() - 1.0).abs() <= 1e-12, || "norm".into())?;
        for (a, b) in out.data().iter().zip(f.data()) {
            ensure(*b != 0.0 || *a == 0.0, || "support grew".into())?;
        }
        Ok(())
    }))
}

pub fn text_round_trip(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&circuit_strategy(), |(c, _)| {
        let back = circuit_from_text(&circuit_to_text(&c)).unwrap();
        ensure(back.gates == c.gates && back.n_qubits == c.n_qubits, || "text round trip".into())
    }))
}
