use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqg_core::lattice::FrequencyLattice;
use sqg_core::norms::{hom_norm_sq, interpolation_gap};
use sqg_core::{
    fractional_power, high_pass, hom_norm, inhom_norm, l2_norm, low_pass, make_lattice, riesz_velocity,
    scalar_product, FieldGenerator, SpectralField,
};

fn grf(lat: &Arc<FrequencyLattice>, slope: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FieldGenerator::GaussianRandomField { slope }.generate(lat, &mut rng)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn mask_for_128_keeps_modes_up_to_42() {
    let lat = make_lattice(128, 2.0 * PI).unwrap();
    let kept: Vec<i64> = (0..lat.len()).filter(|&i| lat.dealias_mask()[i]).map(|i| lat.mode(i).0.abs()).collect();
    assert_eq!(kept.iter().copied().max(), Some(42));
    assert!(!lat.dealias_mask()[lat.index_of(43, 0)]);
    assert!(lat.dealias_mask()[lat.index_of(-42, 42)]);
}

#[test]
fn cosine_example_norms() {
    let lat = make_lattice(32, 2.0 * PI).unwrap();
    let f = SpectralField::from_fn(&lat, |x, _| x.cos());
    assert!((l2_norm(&f).powi(2) - 2.0 * PI * PI).abs() < 1e-10);
    for s in [0.5, 1.0, 1.5] {
        assert!((hom_norm(&f, s).powi(2) - 2.0 * PI * PI).abs() < 1e-10);
        let inhom = inhom_norm(&f, s).unwrap();
        assert!((inhom.powi(2) - 4.0 * PI * PI).abs() < 1e-10);
    }
    let g = SpectralField::from_fn(&lat, |x, y| (2.0 * x + y).sin());
    assert!((hom_norm(&g, 1.0).powi(2) - 5.0 * 2.0 * PI * PI).abs() < 1e-9);
}

#[test]
fn riesz_examples() {
    let lat = make_lattice(16, 2.0 * PI).unwrap();
    let grid: Vec<(f64, f64)> = (0..16 * 16)
        .map(|k| ((k / 16) as f64 * lat.dx(), (k % 16) as f64 * lat.dx()))
        .collect();

    let u = riesz_velocity(&SpectralField::from_fn(&lat, |x, _| x.cos()));
    let want2: Vec<f64> = grid.iter().map(|&(x, _)| -x.sin()).collect();
    assert!(max_abs_diff(&u.u1.inverse_transform(), &vec![0.0; 256]) < 1e-12);
    assert!(max_abs_diff(&u.u2.inverse_transform(), &want2) < 1e-12);

    let u = riesz_velocity(&SpectralField::from_fn(&lat, |_, y| y.cos()));
    let want1: Vec<f64> = grid.iter().map(|&(_, y)| y.sin()).collect();
    assert!(max_abs_diff(&u.u1.inverse_transform(), &want1) < 1e-12);
    assert!(max_abs_diff(&u.u2.inverse_transform(), &vec![0.0; 256]) < 1e-12);
}

#[test]
fn pass_filter_examples() {
    let lat = make_lattice(32, 2.0 * PI).unwrap();
    let f = SpectralField::from_fn(&lat, |x, y| x.cos() + (3.0 * y).cos() + (5.0 * x).sin());
    let low = low_pass(&f, 3.0);
    let high = high_pass(&f, 3.0);
    let want_low = SpectralField::from_fn(&lat, |x, _| x.cos());
    let want_high = SpectralField::from_fn(&lat, |x, y| (3.0 * y).cos() + (5.0 * x).sin());
    assert!(max_abs_diff(&low.inverse_transform(), &want_low.inverse_transform()) < 1e-12);
    assert!(max_abs_diff(&high.inverse_transform(), &want_high.inverse_transform()) < 1e-12);
    // below the lowest mode everything is high frequency
    assert!(low_pass(&f, 0.5).is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(seed in any::<u64>(), n in prop::sample::select(vec![8usize, 16, 24, 32])) {
        let lat = make_lattice(n, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..n * n).map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5).collect();
        let mean = samples.iter().sum::<f64>() / (n * n) as f64;
        let f = SpectralField::forward_transform(&lat, &samples).unwrap();
        let back = f.inverse_transform();
        let centred: Vec<f64> = samples.iter().map(|v| v - mean).collect();
        prop_assert!(max_abs_diff(&back, &centred) < 1e-12);
    }

    #[test]
    fn parseval_matches_quadrature(seed in any::<u64>(), slope in 0.5f64..3.0, box_len in 1.0f64..10.0) {
        let lat = make_lattice(32, box_len).unwrap();
        let f = grf(&lat, slope, seed);
        let vals = f.inverse_transform();
        let quad: f64 = vals.iter().map(|v| v * v).sum::<f64>() * lat.dx() * lat.dx();
        let spec = l2_norm(&f).powi(2);
        prop_assert!((quad - spec).abs() <= 1e-12 * spec.max(1e-300));
    }

    #[test]
    fn fractional_powers_compose(seed in any::<u64>(), s in -1.5f64..2.0, t in -1.5f64..2.0) {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let f = grf(&lat, 1.5, seed);
        let a = fractional_power(&fractional_power(&f, s), t);
        let b = fractional_power(&f, s + t);
        let scale = b.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let diff = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12 * scale);
    }

    #[test]
    fn projections_split_the_field(seed in any::<u64>(), delta in 0.1f64..12.0) {
        let lat = make_lattice(32, 2.0 * PI).unwrap();
        let f = grf(&lat, 1.0, seed);
        let lo = low_pass(&f, delta);
        let hi = high_pass(&f, delta);
        let lolo = low_pass(&lo, delta);
        let hihi = high_pass(&hi, delta);
        prop_assert_eq!(lolo.coeffs(), lo.coeffs());
        prop_assert_eq!(hihi.coeffs(), hi.coeffs());
        for i in 0..lat.len() {
            prop_assert_eq!(lo.coeffs()[i] + hi.coeffs()[i], f.coeffs()[i]);
        }
        prop_assert_eq!(scalar_product(&lo, &hi, 0.0, true).unwrap(), 0.0);
    }

    #[test]
    fn cauchy_schwarz(s1 in any::<u64>(), s2 in any::<u64>(), s in -1.0f64..2.5) {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let f = grf(&lat, 1.0, s1);
        let g = grf(&lat, 2.0, s2);
        let lhs = scalar_product(&f, &g, s, true).unwrap().abs();
        let rhs = hom_norm(&f, s) * hom_norm(&g, s);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn homogeneous_norm_scales_under_box_change(seed in any::<u64>(), s in 0.0f64..2.0) {
        // same coefficients, box twice as large: |ξ| halves and area quadruples
        let a = make_lattice(16, 2.0 * PI).unwrap();
        let b = make_lattice(16, 4.0 * PI).unwrap();
        let f = grf(&a, 1.0, seed);
        let g = SpectralField::from_coeffs(&b, f.coeffs().to_vec()).unwrap();
        let want = hom_norm_sq(&f, s) * 4.0 * 2f64.powf(-2.0 * s);
        prop_assert!((hom_norm_sq(&g, s) - want).abs() <= 1e-12 * want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interpolation_gap_nonnegative(
        seed in any::<u64>(),
        alpha in 0.01f64..0.49,
        slope in 0.0f64..4.0,
        gen in 0usize..3,
    ) {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = match gen {
            0 => FieldGenerator::GaussianRandomField { slope }.generate(&lat, &mut rng),
            1 => FieldGenerator::DyadicBumps { decay: slope }.generate(&lat, &mut rng),
            _ => FieldGenerator::MultiMode { modes: vec![(1, 0), (2, 3), (-4, 1)] }.generate(&lat, &mut rng),
        };
        let gap = interpolation_gap(&f, alpha).unwrap();
        let scale = hom_norm(&f, 2.0 - 2.0 * alpha);
        prop_assert!(gap >= -1e-12 * scale, "gap {} scale {}", gap, scale);
    }
}
