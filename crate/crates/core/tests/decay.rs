use std::f64::consts::PI;

use proptest::prelude::*;
use sqg_core::decay::{
    cauchy_in_time_check, decay_experiment, duhamel_highfreq_bound, occupation_report, split_diagnostics,
    split_sigma, DecayOptions,
};
use sqg_core::{inhom_norm, l2_norm, make_lattice, simulate, SolverConfig, SpectralField, SqgError};

fn quick_opts() -> DecayOptions {
    DecayOptions { c_split: Some(0.15), c_cauchy: Some(0.16), ..Default::default() }
}

#[test]
fn linear_high_mode_duhamel_integral_closed_form() {
    let alpha = 0.25;
    let lat = make_lattice(16, 2.0 * PI).unwrap();
    let theta0 = SpectralField::from_fn(&lat, |x, _| (3.0 * x).cos());
    let mut cfg = SolverConfig::new(alpha, 0.005, 12.0, 16, 2.0 * PI, 100.0);
    cfg.nonlinear = false;
    cfg.snapshot_every = 1;
    let traj = simulate(&theta0, &cfg).unwrap();
    let (integral, bound) = duhamel_highfreq_bound(&traj, 2.0, alpha, 0.15).unwrap();
    let sigma = split_sigma(alpha);
    let k: f64 = 3.0;
    let want = k.powf(-2.0 * sigma) * l2_norm(&theta0).powi(2) / (2.0 * k.powf(2.0 * alpha));
    assert!(((integral - want) / want).abs() < 1e-4, "{integral} vs {want}");
    assert!(integral <= bound);
    assert!(duhamel_highfreq_bound(&traj, 2.0, 0.3, 0.15).is_err());
}

#[test]
fn cutoff_above_every_mode_reduces_to_l2_ledger() {
    let lat = make_lattice(16, 2.0 * PI).unwrap();
    let theta0 = SpectralField::from_fn(&lat, |x, y| 0.05 * ((x + y).cos() + (2.0 * y).sin()));
    let mut cfg = SolverConfig::new(0.3, 0.01, 1.0, 16, 2.0 * PI, 10.0);
    cfg.snapshot_every = 5;
    let traj = simulate(&theta0, &cfg).unwrap();
    let d = split_diagnostics(&traj, 1e3, 0.15).unwrap();
    assert_eq!(d.int_v_negsigma, 0.0);
    assert_eq!(d.sup_w_l2, l2_norm(&theta0));
    assert!(d.pass());
}

#[test]
fn cauchy_ratio_for_linear_single_mode() {
    let alpha = 0.2;
    let c = 0.16;
    let lat = make_lattice(16, 2.0 * PI).unwrap();
    let theta0 = SpectralField::from_fn(&lat, |_, y| 0.3 * (2.0 * y).cos());
    let mut cfg = SolverConfig::new(alpha, 0.02, 2.0, 16, 2.0 * PI, 10.0);
    cfg.nonlinear = false;
    cfg.output_every = 10;
    cfg.snapshot_every = 1;
    let traj = simulate(&theta0, &cfg).unwrap();
    let report = cauchy_in_time_check(&traj, alpha, c).unwrap();

    let rate = 2f64.powf(2.0 * alpha);
    let m = inhom_norm(&theta0, 2.0 - 2.0 * alpha).unwrap();
    let l2 = l2_norm(&theta0);
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    let mut want = 0.0f64;
    for (j, tj) in times.iter().enumerate() {
        for ti in &times[..j] {
            let diff = ((-rate * ti).exp() - (-rate * tj).exp()) * l2;
            want = want.max(diff / ((1.0 + c * m) * m * (tj - ti)));
        }
    }
    assert_eq!(report.pairs, times.len() * (times.len() - 1) / 2);
    assert!(((report.worst_ratio - want) / want).abs() < 1e-10, "{} vs {want}", report.worst_ratio);
    assert!(report.pass);
}

#[test]
fn single_small_mode_decays_at_linear_rate() {
    let alpha = 0.25;
    let lat = make_lattice(32, 2.0 * PI).unwrap();
    let theta0 = SpectralField::from_fn(&lat, |x, y| 1e-3 * (x + y).sin());
    let cfg = SolverConfig::new(alpha, 0.01, 4.0, 32, 2.0 * PI, 10.0);
    let out = decay_experiment(&cfg, &theta0, &quick_opts()).unwrap();
    let want = (-(2f64.powf(alpha)) * 4.0).exp();
    assert!(((out.report.terminal_ratio - want) / want).abs() < 1e-6);
    assert!(out.report.gate.pass && !out.report.forced);
    for key in ["energy_ledger", "split_eps_delta", "duhamel_m_delta", "occupation", "interpolation", "cauchy_in_time"] {
        assert!(out.report.verdicts[key], "{key}");
    }
    assert_eq!(out.residuals.rows.len(), out.report.samples);
    assert_eq!(out.residuals.header.len(), out.residuals.rows[0].len());
}

#[test]
fn zero_data_gives_trivial_report() {
    let lat = make_lattice(16, 2.0 * PI).unwrap();
    let cfg = SolverConfig::new(0.25, 0.1, 1.0, 16, 2.0 * PI, 1.0);
    let out = decay_experiment(&cfg, &SpectralField::zeros(&lat), &quick_opts()).unwrap();
    let r = &out.report;
    assert!(r.pass);
    assert_eq!(r.terminal_ratio, 0.0);
    assert_eq!(r.cauchy.worst_ratio, 0.0);
    assert!(r.split.iter().all(|d| d.sup_w_l2 == 0.0 && d.int_v_negsigma == 0.0 && d.m_delta == 0.0));
    assert_eq!(r.occupation.l2.measure_estimate, 0.0);
}

#[test]
fn large_data_refused_unless_forced() {
    let lat = make_lattice(16, 2.0 * PI).unwrap();
    let theta0 = SpectralField::from_fn(&lat, |x, y| 2.0 * (x.cos() + (x - y).sin()));
    let cfg = SolverConfig::new(0.25, 0.01, 0.5, 16, 2.0 * PI, 1.0);
    match decay_experiment(&cfg, &theta0, &quick_opts()) {
        Err(SqgError::GateFailed { norm, eps0 }) => assert!(norm > eps0),
        other => panic!("expected gate failure, got {other:?}"),
    }
    let forced = DecayOptions { force: true, ..quick_opts() };
    let out = decay_experiment(&cfg, &theta0, &forced).unwrap();
    assert!(out.report.forced && !out.report.gate.pass);
    let json = serde_json::to_value(&out.report).unwrap();
    assert_eq!(json["forced"], true);
    assert_eq!(json["gate"]["pass"], false);
}

#[test]
fn residual_csv_has_one_line_per_sample() {
    let lat = make_lattice(16, 2.0 * PI).unwrap();
    let theta0 = SpectralField::from_fn(&lat, |x, _| 0.01 * (2.0 * x).cos());
    let cfg = SolverConfig::new(0.25, 0.05, 1.0, 16, 2.0 * PI, 1.0);
    let out = decay_experiment(&cfg, &theta0, &quick_opts()).unwrap();
    let mut buf = Vec::new();
    out.residuals.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("t,L2,H2m2a,H2m2a_hom,H2ma,interp_gap,w_L2@"));
    assert_eq!(lines.len(), out.report.samples + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn chebyshev_holds_for_any_series(
        steps in prop::collection::vec(0.001f64..1.0, 1..60),
        values in prop::collection::vec(0.0f64..10.0, 60),
        threshold in 0.01f64..5.0,
        exponent in 1.0f64..4.0,
    ) {
        let mut times = vec![0.0];
        for h in &steps {
            times.push(times.last().unwrap() + h);
        }
        let v = &values[..times.len()];
        let r = occupation_report(&times, v, threshold, exponent).unwrap();
        prop_assert!(r.pass);
        prop_assert!(r.measure_estimate <= *times.last().unwrap() + 1e-12);
    }
}
