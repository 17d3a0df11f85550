//! Statistical behavior of the sketching operators: norm preservation,
//! singular-value support, subspace-embedding distortion and sampling laws.
//! Every test runs on fixed seeds, so the gates are deterministic.

use lowrank::dense::DenseMatrix;
use lowrank::qr::orth;
use lowrank::sketch::{SketchKind, SketchOperator};
use lowrank::svd::singular_values;

fn col_norm(m: &DenseMatrix, j: usize) -> f64 {
    m.col(j).iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn gaussian_norm_preservation_in_the_mean() {
    // E ||G x||^2 = ||x||^2: sample mean over 500 seeds within 10%
    let m = 1000;
    let s = 50;
    let x = DenseMatrix::from_fn(m, 1, |i, _| ((i as f64 * 0.37).sin() + 1.2) / 1.0);
    let xn = col_norm(&x, 0);
    let x = x.scale(1.0 / xn);
    let mut acc = 0.0;
    for seed in 7..507u64 {
        let g = SketchOperator::gaussian(m, s, seed).unwrap();
        let gx = g.apply_left(&x).unwrap();
        acc += gx.frob_norm_sq();
    }
    let mean = acc / 500.0;
    assert!((mean - 1.0).abs() <= 0.10, "mean ||Gx||^2 = {mean}");
}

#[test]
fn gaussian_singular_values_in_marchenko_pastur_interval() {
    // singular values of sqrt(s) * G for a 100 x 200 draw lie in
    // [sqrt(200) - sqrt(100), sqrt(200) + sqrt(100)] within 5% slack
    let (m, s) = (200usize, 100usize);
    let g = SketchOperator::gaussian(m, s, 7).unwrap();
    let scaled = g.densify().scale((s as f64).sqrt());
    let sv = singular_values(&scaled).unwrap();
    let lo = (m as f64).sqrt() - (s as f64).sqrt();
    let hi = (m as f64).sqrt() + (s as f64).sqrt();
    let slack = 0.05 * hi;
    for &v in &sv {
        assert!(
            v >= lo - slack && v <= hi + slack,
            "singular value {v} outside [{lo}, {hi}] + 5%"
        );
    }
}

#[test]
fn subspace_embedding_smoke_for_all_three_kinds() {
    // distortion of a fixed 10-dimensional subspace of R^500 at s = 100
    // stays under 0.7 for every embedding kind; a loose sanity gate
    let (m, s, d) = (500usize, 100usize, 10usize);
    let basis = orth(&DenseMatrix::gaussian(m, d, 31)).unwrap();
    for kind in [
        SketchKind::Gaussian,
        SketchKind::SparseSign,
        SketchKind::Srtt,
    ] {
        let op = SketchOperator::build(kind, m, s, 77).unwrap();
        let sketched = op.apply_left(&basis).unwrap(); // s x d
        let mut worst: f64 = 0.0;
        let mut probe = DenseMatrix::gaussian(d, 1000, 55);
        for j in 0..probe.cols() {
            let n = col_norm(&probe, j);
            for v in probe.col_mut(j) {
                *v /= n;
            }
        }
        let images = lowrank::dense::matmul(&sketched, &probe).unwrap();
        for j in 0..probe.cols() {
            // ||basis * c|| = 1 exactly for unit c, so the distortion is
            // |  ||S A c|| - 1 |
            worst = worst.max((col_norm(&images, j) - 1.0).abs());
        }
        assert!(worst < 0.7, "{kind:?}: distortion {worst}");
    }
}

#[test]
fn srtt_distortion_on_random_unit_vectors() {
    // 200 random unit vectors in R^500 at s = 4 * 10: max distortion
    // below the loose 0.5 gate
    let (m, s) = (500usize, 40usize);
    let op = SketchOperator::srtt(m, s, 99).unwrap();
    let mut probes = DenseMatrix::gaussian(m, 200, 101);
    for j in 0..probes.cols() {
        let n = col_norm(&probes, j);
        for v in probes.col_mut(j) {
            *v /= n;
        }
    }
    let images = op.apply_left(&probes).unwrap();
    let mut worst: f64 = 0.0;
    for j in 0..probes.cols() {
        worst = worst.max((col_norm(&images, j) - 1.0).abs());
    }
    assert!(worst < 0.5, "max distortion {worst}");
}

#[test]
fn column_sampling_uniform_law() {
    // m = 10, s = 1 over 10^4 operator seeds drawn from a fixed stream:
    // each index sampled with frequency 0.1 +- 0.01
    let mut seed_stream = lowrank::rng::Stream::new(2, 0);
    let mut counts = [0usize; 10];
    for _ in 0..10_000 {
        let op = SketchOperator::column_sampling(10, 1, seed_stream.next_u64()).unwrap();
        let dense = op.densify();
        let idx = (0..10).find(|&c| dense[(0, c)] == 1.0).unwrap();
        counts[idx] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        let freq = c as f64 / 10_000.0;
        assert!((freq - 0.1).abs() <= 0.01, "index {i}: frequency {freq}");
    }
}

#[test]
fn sparse_sign_signs_are_balanced() {
    // >= 1e5 sign draws: positive fraction within 4 binomial sigmas of 1/2
    let (m, s, zeta) = (12_500usize, 16usize, 8usize);
    let op = SketchOperator::sparse_sign(m, s, zeta, 2024).unwrap();
    let dense = op.densify();
    let mut pos = 0usize;
    let mut total = 0usize;
    for c in 0..m {
        for r in 0..s {
            let v = dense[(r, c)];
            if v != 0.0 {
                total += 1;
                if v > 0.0 {
                    pos += 1;
                }
            }
        }
    }
    assert_eq!(total, m * zeta);
    let n = total as f64;
    let four_sigma = 4.0 * (n * 0.25).sqrt();
    assert!(
        ((pos as f64) - n / 2.0).abs() <= four_sigma,
        "positive signs {pos} of {total}"
    );
}
