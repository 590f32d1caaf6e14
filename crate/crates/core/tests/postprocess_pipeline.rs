mod common;

use std::collections::BTreeMap;

use advq::field::FieldArray;
use advq::oracle::{rel_l2, sample_initial, GaussianMixture};
use advq::postprocess::{
    counts_to_field, sample_field, savgol2d, savgol_coefficients, threshold_mitigate, ShotHistogram,
};
use common::grid;

fn hist(pairs: &[(&str, u64)]) -> ShotHistogram {
    let width = pairs[0].0.len();
    let counts: BTreeMap<String, u64> = pairs.iter().map(|(k, c)| (k.to_string(), *c)).collect();
    ShotHistogram::new(counts, width).unwrap()
}

fn gaussian(q: usize, sigma: f64) -> FieldArray {
    let g = grid(&[q, q], 0, 1.0);
    sample_initial(&GaussianMixture::centered(2, (1 << q) as f64, sigma), &g).unwrap()
}

fn nonzeros(f: &FieldArray) -> usize {
    f.data().iter().filter(|v| **v != 0.0).count()
}

#[test]
fn exact_frequencies_recover_the_amplitudes() {
    // amplitudes (1, 2, 2, 4) / 5, bit 0 is the x index
    let h = hist(&[("00", 1), ("01", 4), ("10", 4), ("11", 16)]);
    assert_eq!(h.shots, 25);
    let f = counts_to_field(&h, &[2, 2]).unwrap();
    for (a, b) in f.data().iter().zip([0.2, 0.4, 0.4, 0.8]) {
        assert!((a - b).abs() < 1e-15);
    }
    let f = counts_to_field(&hist(&[("10", 7)]), &[4]).unwrap();
    assert_eq!(f.data(), &[0.0, 0.0, 1.0, 0.0]);
    assert!(counts_to_field(&h, &[8]).is_err());
}

#[test]
fn sampled_field_error_follows_shot_noise() {
    let u = gaussian(3, 1.5);
    let shots = 100_000;
    let f = counts_to_field(&sample_field(&u, shots, 7).unwrap(), &[8, 8]).unwrap();
    let e = rel_l2(&f, &u).unwrap();
    assert!(e <= 3.0 * (256.0 / shots as f64).sqrt(), "{e}");
    let f = counts_to_field(&sample_field(&u, 10_000_000, 8).unwrap(), &[8, 8]).unwrap();
    let e = rel_l2(&f, &u).unwrap();
    assert!(e < 1e-2, "{e}");
}

#[test]
fn sampling_is_seeded() {
    let u = gaussian(3, 2.0);
    assert_eq!(sample_field(&u, 5000, 3).unwrap(), sample_field(&u, 5000, 3).unwrap());
    assert_ne!(sample_field(&u, 5000, 3).unwrap(), sample_field(&u, 5000, 4).unwrap());
    assert!(sample_field(&FieldArray::zeros(vec![3]), 10, 1).is_err());
}

#[test]
fn threshold_edge_cases() {
    let u = gaussian(3, 1.5);
    assert_eq!(threshold_mitigate(&u, 0.0).unwrap(), u.normalized().unwrap());
    let mut one = FieldArray::zeros(vec![4, 4]);
    one.data_mut()[9] = 0.3;
    let out = threshold_mitigate(&one, 1e-3).unwrap();
    assert_eq!(out.data()[9], 1.0);
    assert_eq!(nonzeros(&out), 1);
    assert!(threshold_mitigate(&u, -1.0).is_err());
    assert!(threshold_mitigate(&u, 10.0).is_err());
}

#[test]
fn threshold_cut_grows_with_the_row() {
    // equal weights on rows 0 and 3: the cut (y+1) eps removes only row 3
    let mut f = FieldArray::zeros(vec![4, 4]);
    f.data_mut()[0] = 1.0;
    f.data_mut()[12] = 1.0;
    f.data_mut()[5] = 10.0;
    let n2 = f.norm().powi(2);
    let eps = 0.5 / n2;
    let out = threshold_mitigate(&f, eps).unwrap();
    assert_eq!(nonzeros(&out), 2);
    assert_eq!(out.data()[12], 0.0);
    // the removed weight is split evenly over the two survivors
    let share = 1.0 / n2 / 2.0;
    assert!((out.data()[0] - (1.0 / n2 + share).sqrt()).abs() < 1e-15);
    assert!((out.data()[5] - (100.0 / n2 + share).sqrt()).abs() < 1e-15);
}

#[test]
fn threshold_prunes_a_noise_floor() {
    let u = gaussian(4, 2.0);
    let noisy = FieldArray::from_fn(vec![16, 16], |c| {
        (0.99 * u.get(c).powi(2) + 0.01 / 256.0).sqrt()
    });
    let f = counts_to_field(&sample_field(&noisy, 10_000, 21).unwrap(), &[16, 16]).unwrap();
    let out = threshold_mitigate(&f, 1e-5).unwrap();
    assert!(nonzeros(&out) < nonzeros(&f), "{} vs {}", nonzeros(&out), nonzeros(&f));
    assert!((out.norm() - 1.0).abs() < 1e-12);
    assert!(rel_l2(&out, &u).unwrap() < rel_l2(&f, &u).unwrap());
}

#[test]
fn savgol_reference_weights() {
    let w = savgol_coefficients(5, 2).unwrap();
    for (a, b) in w.iter().zip([-3.0, 12.0, 17.0, 12.0, -3.0]) {
        assert!((a - b / 35.0).abs() < 1e-14);
    }
    let w = savgol_coefficients(7, 3).unwrap();
    for (a, b) in w.iter().zip([-2.0, 3.0, 6.0, 7.0, 6.0, 3.0, -2.0]) {
        assert!((a - b / 21.0).abs() < 1e-14);
    }
    assert!(savgol_coefficients(6, 2).is_err());
    assert!(savgol_coefficients(5, 5).is_err());
}

#[test]
fn savgol_identity_constant_and_quadratic() {
    let u = gaussian(4, 2.0);
    let out = savgol2d(&u, 7, 6).unwrap();
    assert!(u.data().iter().zip(out.data()).all(|(a, b)| (a - b).abs() < 1e-12));

    let flat = FieldArray::from_fn(vec![16, 16], |_| 0.25);
    let out = savgol2d(&flat, 7, 3).unwrap();
    assert!(out.data().iter().all(|v| (v - 0.25).abs() < 1e-14));

    let quad = FieldArray::from_fn(vec![16, 16], |c| {
        let (x, y) = (c[0] as f64, c[1] as f64);
        1.0 + 0.1 * x - 0.05 * y + 0.02 * x * y - 0.01 * y * y
    });
    let out = savgol2d(&quad, 7, 3).unwrap();
    for x in 3..13 {
        for y in 3..13 {
            assert!((out.get(&[x, y]) - quad.get(&[x, y])).abs() < 1e-12);
        }
    }
    assert!(savgol2d(&FieldArray::zeros(vec![4, 4]), 7, 3).is_err());
}

#[test]
fn smoothing_reduces_shot_noise() {
    let u = gaussian(5, 4.0);
    let f = counts_to_field(&sample_field(&u, 20_000, 5).unwrap(), &[32, 32]).unwrap();
    let s = savgol2d(&f, 7, 3).unwrap().normalized().unwrap();
    assert!(rel_l2(&s, &u).unwrap() < rel_l2(&f, &u).unwrap());
}

#[test]
fn histogram_text_and_postselection() {
    let h = hist(&[("000", 5), ("011", 2), ("100", 7), ("111", 1)]);
    let back = ShotHistogram::from_text(&h.to_text()).unwrap();
    assert_eq!(back, h);
    let p = h.postselect(2, 1).unwrap();
    assert_eq!(p.width, 2);
    assert_eq!(p.shots, 8);
    assert_eq!(p.counts["00"], 7);
    assert_eq!(p.counts["11"], 1);
    let p0 = h.postselect(2, 0).unwrap();
    assert_eq!(p0.shots, 7);
    assert_eq!(h.postselect(3, 0).unwrap(), h);
    assert!(h.postselect(4, 0).is_err());
    assert!(ShotHistogram::from_text("01,3\n011,1\n").is_err());
    assert!(ShotHistogram::from_text("0x,3\n").is_err());
    assert!(ShotHistogram::from_text("01;3\n").is_err());
}
