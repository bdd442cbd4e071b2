//! Numerical version of the small-data decay argument: low/high frequency
//! splitting, the Duhamel bound on the high part, occupation-time estimates
//! and the end-to-end decay of `‖θ(t)‖_{H^{2-2α}}`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};
use crate::field::SpectralField;
use crate::lab::product_constant;
use crate::lattice::FrequencyLattice;
use crate::norms::{interpolation_gap_from_norms, l2_norm};
use crate::operators::{high_pass, low_pass};
use crate::solver::{
    energy_ledger, simulate_observed, smallness_gate, GateDecision, LedgerReport, NormSample, SampleObserver,
    SolverConfig, TrajectoryRecord,
};

/// Trapezoidal rule on a (possibly nonuniform) grid.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum()
}

/// Per-sample weights of [`trapezoid`]; they sum to `t_last - t_first`.
pub fn trapezoid_weights(t: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; t.len()];
    for (i, pair) in t.windows(2).enumerate() {
        let h = 0.5 * (pair[1] - pair[0]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// High-frequency order `2 - 3α`.
pub fn split_sigma(alpha: f64) -> f64 {
    2.0 - 3.0 * alpha
}

/// `{k_min/2, k_min, 2k_min, 4k_min}`
pub fn default_delta_ladder(lattice: &FrequencyLattice) -> Vec<f64> {
    let k = lattice.k_min();
    vec![0.5 * k, k, 2.0 * k, 4.0 * k]
}

/// Squared norms of `w_δ = A_δ(D)θ` and `v_δ = B_δ(D)θ` at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitSample {
    pub w_l2_sq: f64,
    pub w_ha_sq: f64,
    pub v_l2_sq: f64,
    pub v_ha_sq: f64,
    pub v_negsigma_sq: f64,
    /// `max |ŵ + v̂ - θ̂|` over all modes.
    pub reconstruction_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRow {
    pub t: f64,
    pub l2_sq: f64,
    pub ha_sq: f64,
    pub per_delta: Vec<SplitSample>,
}

/// Streams the frequency split over a run, one row per observed sample.
#[derive(Clone, Debug)]
pub struct SplitSeries {
    alpha: f64,
    deltas: Vec<f64>,
    modulus: Vec<f64>,
    pow_a: Vec<f64>,
    pow_neg: Vec<f64>,
    weight: f64,
    rows: Vec<SplitRow>,
}

impl SplitSeries {
    pub fn new(lattice: &FrequencyLattice, alpha: f64, deltas: &[f64]) -> Result<Self> {
        if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(SqgError::InvalidParameter(format!("cutoff must be positive, got {d}")));
        }
        let sigma = split_sigma(alpha);
        let modulus = lattice.modulus().to_vec();
        let pow = |p: f64| modulus.iter().map(|&m| if m > 0.0 { m.powf(p) } else { 0.0 }).collect();
        Ok(SplitSeries {
            alpha,
            deltas: deltas.to_vec(),
            pow_a: pow(2.0 * alpha),
            pow_neg: pow(-2.0 * sigma),
            modulus,
            weight: lattice.parseval_weight(),
            rows: Vec::new(),
        })
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn rows(&self) -> &[SplitRow] {
        &self.rows
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    fn push(&mut self, t: f64, theta: &SpectralField) {
        let mut per = vec![SplitSample::default(); self.deltas.len()];
        let (mut l2, mut ha) = (0.0, 0.0);
        for (i, c) in theta.coeffs().iter().enumerate().skip(1) {
            let e = c.norm_sqr();
            let ea = e * self.pow_a[i];
            l2 += e;
            ha += ea;
            for (s, &d) in per.iter_mut().zip(&self.deltas) {
                if self.modulus[i] < d {
                    s.w_l2_sq += e;
                    s.w_ha_sq += ea;
                } else {
                    s.v_l2_sq += e;
                    s.v_ha_sq += ea;
                    s.v_negsigma_sq += e * self.pow_neg[i];
                }
            }
        }
        let w = self.weight;
        for (s, &d) in per.iter_mut().zip(&self.deltas) {
            for x in [&mut s.w_l2_sq, &mut s.w_ha_sq, &mut s.v_l2_sq, &mut s.v_ha_sq, &mut s.v_negsigma_sq] {
                *x *= w;
            }
            let (lo, hi) = (low_pass(theta, d), high_pass(theta, d));
            s.reconstruction_defect = lo
                .coeffs()
                .iter()
                .zip(hi.coeffs())
                .zip(theta.coeffs())
                .map(|((a, b), c)| (a + b - c).norm())
                .fold(0.0, f64::max);
        }
        self.rows.push(SplitRow { t, l2_sq: l2 * w, ha_sq: ha * w, per_delta: per });
    }

    /// `‖v_δ(t)‖_{L²}` for ladder entry `k`.
    pub fn v_l2(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.per_delta[k].v_l2_sq.sqrt()).collect()
    }

    /// Diagnostics for every ladder entry. `c_hat` is the product-law
    /// constant for `s1 = s2 = α`.
    pub fn diagnostics(&self, c_hat: f64, tol: f64) -> Result<Vec<SplitDiagnostics>> {
        if self.rows.len() < 2 {
            return Err(SqgError::InvalidParameter(format!(
                "split diagnostics need at least two samples, got {}",
                self.rows.len()
            )));
        }
        let alpha = self.alpha;
        let sigma = split_sigma(alpha);
        let t = self.times();
        let first = &self.rows[0];
        let theta0_l2 = first.l2_sq.sqrt();
        let ha4: Vec<f64> = self.rows.iter().map(|r| r.ha_sq * r.ha_sq).collect();
        let int_ha4 = trapezoid(&t, &ha4);
        let a = alpha / (sigma + alpha);
        Ok(self
            .deltas
            .iter()
            .enumerate()
            .map(|(k, &delta)| {
                let col = |f: fn(&SplitSample) -> f64| -> Vec<f64> { self.rows.iter().map(|r| f(&r.per_delta[k])).collect() };
                let w_l2 = col(|s| s.w_l2_sq);
                let sup_w_l2 = w_l2.iter().cloned().fold(0.0, f64::max).sqrt();
                let int_w_ha = trapezoid(&t, &col(|s| s.w_ha_sq));
                let eps_delta = first.per_delta[k].w_l2_sq + c_hat * delta.powf(2.0 - 2.0 * alpha) * theta0_l2.powi(3);
                let int_v_negsigma = trapezoid(&t, &col(|s| s.v_negsigma_sq));
                let (m_delta, m_delta_printed) = m_delta_bounds(delta, alpha, theta0_l2, c_hat, int_ha4);

                let mut embedding_violations = 0;
                let mut max_parseval_defect = 0.0f64;
                let mut max_reconstruction_defect = 0.0f64;
                for r in &self.rows {
                    let s = &r.per_delta[k];
                    let rhs = s.v_negsigma_sq.powf(a) * s.v_ha_sq.powf(1.0 - a);
                    if s.v_l2_sq > rhs * (1.0 + 1e-12) {
                        embedding_violations += 1;
                    }
                    let scale = r.l2_sq.max(f64::MIN_POSITIVE);
                    max_parseval_defect = max_parseval_defect.max((s.w_l2_sq + s.v_l2_sq - r.l2_sq).abs() / scale);
                    max_reconstruction_defect = max_reconstruction_defect.max(s.reconstruction_defect);
                }
                let eps_pass = sup_w_l2 * sup_w_l2 <= eps_delta * (1.0 + tol) && int_w_ha <= eps_delta * (1.0 + tol) / 2.0;
                SplitDiagnostics {
                    delta,
                    sigma,
                    sup_w_l2,
                    int_w_ha,
                    eps_delta,
                    int_v_negsigma,
                    m_delta,
                    m_delta_printed,
                    eps_pass,
                    m_pass: int_v_negsigma <= m_delta * (1.0 + tol),
                    printed_m_holds: int_v_negsigma <= m_delta_printed * (1.0 + tol),
                    embedding_violations,
                    max_parseval_defect,
                    max_reconstruction_defect,
                    samples: self.rows.len(),
                }
            })
            .collect())
    }
}

impl SampleObserver for SplitSeries {
    fn observe(&mut self, t: f64, theta: &SpectralField) {
        self.push(t, theta);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitDiagnostics {
    pub delta: f64,
    /// `2 - 3α`
    pub sigma: f64,
    /// `sup_t ‖w_δ(t)‖_{L²}`
    pub sup_w_l2: f64,
    /// `∫‖w_δ‖²_{Ḣ^α}`
    pub int_w_ha: f64,
    /// `‖w_δ⁰‖²_{L²} + C δ^{2-2α} ‖θ⁰‖³_{L²}`
    pub eps_delta: f64,
    /// `∫‖v_δ‖²_{Ḣ^{-σ}}`
    pub int_v_negsigma: f64,
    /// Bound on `int_v_negsigma` used for the verdict.
    pub m_delta: f64,
    /// The squared-sum expression without the nonlinear contribution,
    /// reported for comparison only.
    pub m_delta_printed: f64,
    pub eps_pass: bool,
    pub m_pass: bool,
    pub printed_m_holds: bool,
    /// Samples where `‖v‖²_{L²} ≤ ‖v‖^{2a}_{Ḣ^{-σ}} ‖v‖^{2(1-a)}_{Ḣ^α}` fails.
    pub embedding_violations: usize,
    /// `max |‖w‖² + ‖v‖² - ‖θ‖²| / ‖θ‖²`
    pub max_parseval_defect: f64,
    pub max_reconstruction_defect: f64,
    pub samples: usize,
}

impl SplitDiagnostics {
    pub fn pass(&self) -> bool {
        self.eps_pass && self.m_pass && self.embedding_violations == 0 && self.max_reconstruction_defect == 0.0
    }
}

/// `(M_δ, printed form)`.
///
/// The linear part of `v_δ` contributes at most `δ^{-2σ-2α}‖θ⁰‖²/2`. The
/// Duhamel part, via the exponential-kernel bound and the product law with
/// constant `c_hat`, contributes at most `2δ^{-2α} c_hat² ∫‖θ‖⁴_{Ḣ^α}`. The
/// two combine by Minkowski in `L²_t Ḣ^{-σ}`.
fn m_delta_bounds(delta: f64, alpha: f64, theta0_l2: f64, c_hat: f64, int_ha4: f64) -> (f64, f64) {
    let sigma = split_sigma(alpha);
    let e0 = theta0_l2 * theta0_l2;
    let lin = delta.powf(-2.0 * sigma - 2.0 * alpha) * e0 / 2.0;
    let nl = 2.0 * delta.powf(-2.0 * alpha) * c_hat * c_hat * int_ha4;
    let m = (lin.sqrt() + nl.sqrt()).powi(2);
    let printed = (delta.powf(-2.0 * sigma) * delta.powf(-2.0 * alpha) * e0 / 2.0 + delta.powf(-2.0 * alpha) * e0).powi(2);
    (m, printed)
}

fn snapshot_split(traj: &TrajectoryRecord, deltas: &[f64]) -> Result<SplitSeries> {
    if traj.snapshots.len() < 2 {
        return Err(SqgError::InvalidParameter(format!(
            "trajectory holds {} snapshots, need at least 2",
            traj.snapshots.len()
        )));
    }
    let lat = traj.snapshots[0].field.lattice();
    let mut split = SplitSeries::new(lat, traj.alpha, deltas)?;
    for s in &traj.snapshots {
        s.field.check_same(&traj.snapshots[0].field)?;
        split.push(s.t, &s.field);
    }
    Ok(split)
}

/// Split diagnostics from a trajectory's stored snapshots.
pub fn split_diagnostics(traj: &TrajectoryRecord, delta: f64, c_hat: f64) -> Result<SplitDiagnostics> {
    Ok(snapshot_split(traj, &[delta])?.diagnostics(c_hat, 1e-6)?.remove(0))
}

/// `(∫‖v_δ‖²_{Ḣ^{-σ}}, M_δ)` from stored snapshots.
pub fn duhamel_highfreq_bound(traj: &TrajectoryRecord, delta: f64, alpha: f64, c_hat: f64) -> Result<(f64, f64)> {
    if traj.alpha != alpha {
        return Err(SqgError::InvalidParameter(format!(
            "trajectory was run with alpha = {}, not {alpha}",
            traj.alpha
        )));
    }
    let d = split_diagnostics(traj, delta, c_hat)?;
    Ok((d.int_v_negsigma, d.m_delta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationReport {
    pub threshold: f64,
    pub exponent: f64,
    /// Total sample weight where the value exceeds the threshold.
    pub measure_estimate: f64,
    /// `ε^{-p} ∫ value^p`
    pub bound: f64,
    /// Earliest sample at or below the threshold; `None` if there is none.
    pub first_good_time: Option<f64>,
    pub pass: bool,
}

/// Chebyshev occupation estimate for a sampled series. Each sample carries
/// its trapezoid weight, so the bound holds exactly at the quadrature level.
pub fn occupation_report(times: &[f64], values: &[f64], threshold: f64, exponent: f64) -> Result<OccupationReport> {
    if times.is_empty() || times.len() != values.len() {
        return Err(SqgError::InvalidParameter(format!(
            "need a nonempty series with matching lengths, got {} times and {} values",
            times.len(),
            values.len()
        )));
    }
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(SqgError::InvalidParameter(format!("threshold must be positive, got {threshold}")));
    }
    if !(exponent >= 1.0 && exponent.is_finite()) {
        return Err(SqgError::InvalidParameter(format!("exponent must be >= 1, got {exponent}")));
    }
    let w = trapezoid_weights(times);
    let measure_estimate: f64 = w.iter().zip(values).filter(|(_, &v)| v > threshold).map(|(w, _)| w).sum();
    let bound = w.iter().zip(values).map(|(w, v)| w * (v / threshold).powf(exponent)).sum::<f64>();
    let first_good_time = times.iter().zip(values).find(|(_, &v)| v <= threshold).map(|(&t, _)| t);
    Ok(OccupationReport {
        threshold,
        exponent,
        measure_estimate,
        bound,
        first_good_time,
        pass: measure_estimate <= bound * (1.0 + 1e-12),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    /// `max ‖θ(t) - θ(t')‖_{L²} / ((1 + C M) M |t' - t|)` over snapshot pairs.
    pub worst_ratio: f64,
    pub pairs: usize,
    pub c_hat: f64,
    pub pass: bool,
}

/// Lipschitz-in-time check in `L²`, with `M` the running sup of
/// `‖θ‖_{H^{2-2α}}` up to the later time of each pair.
pub fn cauchy_in_time_check(traj: &TrajectoryRecord, alpha: f64, c_hat: f64) -> Result<CauchyReport> {
    let snaps = &traj.snapshots;
    if snaps.len() < 2 {
        return Err(SqgError::InvalidParameter(format!("need at least 2 snapshots, got {}", snaps.len())));
    }
    if traj.alpha != alpha {
        return Err(SqgError::InvalidParameter(format!(
            "trajectory was run with alpha = {}, not {alpha}",
            traj.alpha
        )));
    }
    let series = &traj.series.samples;
    let running_sup = |t: f64| -> f64 {
        let from_series = series.iter().take_while(|s| s.t <= t).map(|s| s.h_crit).fold(0.0, f64::max);
        let from_snaps = snaps
            .iter()
            .take_while(|s| s.t <= t)
            .map(|s| crate::norms::inhom_norm(&s.field, 2.0 - 2.0 * alpha).unwrap_or(0.0))
            .fold(0.0, f64::max);
        from_series.max(from_snaps)
    };
    let sups: Vec<f64> = snaps.iter().map(|s| running_sup(s.t)).collect();
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for j in 1..snaps.len() {
        let m = sups[j];
        for i in 0..j {
            let dt = snaps[j].t - snaps[i].t;
            if dt <= 0.0 {
                continue;
            }
            pairs += 1;
            let diff = l2_norm(&(&snaps[j].field - &snaps[i].field));
            let denom = (1.0 + c_hat * m) * m * dt;
            worst = worst.max(crate::lab::ratio(diff, denom));
        }
    }
    Ok(CauchyReport { worst_ratio: worst, pairs, c_hat, pass: worst <= 1.0 + 1e-9 })
}

/// Knobs of [`decay_experiment`]. `None` picks the documented default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecayOptions {
    pub deltas: Option<Vec<f64>>,
    /// Product-law constant for `s1 = s2 = α`.
    pub c_split: Option<f64>,
    /// Product-law constant for `(1 - 2α, 2α)`.
    pub c_cauchy: Option<f64>,
    /// Good-time threshold on `‖θ‖_{L²}`; default a tenth of the initial value.
    pub eps_l2: Option<f64>,
    /// Good-time threshold on `‖θ‖_{Ḣ^{2-2α}}`; default a tenth of the initial value.
    pub eps_h: Option<f64>,
    pub tol: f64,
    pub tol_l2: f64,
    pub tol_h: f64,
    pub terminal_target: f64,
    /// Run even if the smallness gate fails.
    pub force: bool,
    /// Seed for fitting the constants.
    pub fit_seed: u64,
    /// Snapshots kept for the Cauchy check.
    pub snapshots: usize,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            deltas: None,
            c_split: None,
            c_cauchy: None,
            eps_l2: None,
            eps_h: None,
            tol: 1e-6,
            tol_l2: 1e-4,
            tol_h: 1e-3,
            terminal_target: 0.01,
            force: false,
            fit_seed: 0,
            snapshots: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSummary {
    /// Smallest `rhs - lhs` of the interpolation inequality over samples.
    pub min_gap: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationSet {
    /// `{t : ‖θ‖_{L²} > eps_l2}`; its first good time is `t0`.
    pub l2: OccupationReport,
    /// `{t : ‖v_δ‖_{L²} > eps_l2/2}` per ladder entry.
    pub e_delta: Vec<OccupationReport>,
    /// `{t ≥ t0 : ‖θ‖_{Ḣ^{2-2α}} > eps_h}`, absent when no `t0` was found.
    pub f_eps: Option<OccupationReport>,
    /// `eps_h^{-p} ∫_{t0} ‖θ‖_{L²}^{α/(1-α)} ‖θ‖²_{Ḣ^{2-α}}`, which dominates
    /// the Chebyshev bound of `f_eps` through the interpolation inequality.
    pub f_eps_integral_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub config: SolverConfig,
    pub gate: GateDecision,
    pub forced: bool,
    pub steps: usize,
    pub samples: usize,
    pub c_split: f64,
    pub c_cauchy: f64,
    pub eps_l2: f64,
    pub eps_h: f64,
    pub ledger: LedgerReport,
    pub split: Vec<SplitDiagnostics>,
    pub occupation: OccupationSet,
    pub interpolation: InterpolationSummary,
    pub cauchy: CauchyReport,
    /// `‖θ(t_end)‖_{H^{2-2α}} / ‖θ⁰‖_{H^{2-2α}}` (0 for zero data).
    pub terminal_ratio: f64,
    /// `‖θ(t_end)‖_{L²} / ‖θ⁰‖_{L²}`
    pub terminal_l2_ratio: f64,
    pub terminal_target: f64,
    pub verdicts: BTreeMap<String, bool>,
    pub pass: bool,
}

/// Per-sample residual table written next to the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayResiduals {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl DecayResiduals {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DecayOutcome {
    pub report: DecayReport,
    pub residuals: DecayResiduals,
    pub trajectory: TrajectoryRecord,
}

fn ratio_or_zero(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

/// Runs the solver from `theta0` and evaluates the whole decay pipeline.
///
/// Refuses with [`SqgError::GateFailed`] when the data are not small, unless
/// `opts.force` is set.
pub fn decay_experiment(cfg: &SolverConfig, theta0: &SpectralField, opts: &DecayOptions) -> Result<DecayOutcome> {
    cfg.validate()?;
    let alpha = cfg.alpha;
    let gate = smallness_gate(theta0, cfg)?;
    if !gate.pass && !opts.force {
        return Err(SqgError::GateFailed { norm: gate.norm, eps0: gate.eps0 });
    }
    let lat = theta0.lattice().clone();
    let deltas = opts.deltas.clone().unwrap_or_else(|| default_delta_ladder(&lat));
    let c_split = match opts.c_split {
        Some(c) => c,
        None => product_constant(alpha, alpha, opts.fit_seed)?,
    };
    let c_cauchy = match opts.c_cauchy {
        Some(c) => c,
        None => product_constant(1.0 - 2.0 * alpha, 2.0 * alpha, opts.fit_seed)?,
    };

    let mut run_cfg = cfg.clone();
    if run_cfg.snapshot_every == 0 {
        let expected = (cfg.t_end / cfg.dt / cfg.output_every as f64).ceil() as usize + 1;
        run_cfg.snapshot_every = (expected / opts.snapshots.max(2)).max(1);
    }
    let mut split = SplitSeries::new(&lat, alpha, &deltas)?;
    let traj = simulate_observed(theta0, &run_cfg, &mut split)?;

    let samples: &[NormSample] = &traj.series.samples;
    let times = traj.series.times();
    let first = samples[0];
    let last = *samples.last().expect("at least one sample");
    let eps_l2 = opts.eps_l2.unwrap_or(0.1 * first.l2).max(f64::MIN_POSITIVE);
    let eps_h = opts.eps_h.unwrap_or(0.1 * first.h_crit_hom).max(f64::MIN_POSITIVE);

    let ledger = energy_ledger(&traj, opts.tol_l2, opts.tol_h);
    let split_diag = split.diagnostics(c_split, opts.tol)?;

    let l2_vals: Vec<f64> = samples.iter().map(|s| s.l2).collect();
    let l2_occ = occupation_report(&times, &l2_vals, eps_l2, 2.0)?;
    let e_delta = (0..deltas.len())
        .map(|k| occupation_report(&split.times(), &split.v_l2(k), eps_l2 / 2.0, 2.0))
        .collect::<Result<Vec<_>>>()?;
    let p = (2.0 - alpha) / (1.0 - alpha);
    let (f_eps, f_eps_integral_bound) = match l2_occ.first_good_time {
        Some(t0) => {
            let tail: Vec<&NormSample> = samples.iter().filter(|s| s.t >= t0).collect();
            let tt: Vec<f64> = tail.iter().map(|s| s.t).collect();
            let hv: Vec<f64> = tail.iter().map(|s| s.h_crit_hom).collect();
            let integrand: Vec<f64> = tail
                .iter()
                .map(|s| s.l2.powf(alpha / (1.0 - alpha)) * s.h_top * s.h_top)
                .collect();
            let ib = trapezoid(&tt, &integrand) / eps_h.powf(p);
            (Some(occupation_report(&tt, &hv, eps_h, p)?), Some(ib))
        }
        None => (None, None),
    };

    let mut min_gap = f64::INFINITY;
    let mut interp_violations = 0;
    let gaps: Vec<f64> = samples
        .iter()
        .map(|s| {
            let g = interpolation_gap_from_norms(s.l2, s.h_crit_hom, s.h_top, alpha);
            min_gap = min_gap.min(g);
            if g < -1e-12 * s.h_crit_hom {
                interp_violations += 1;
            }
            g
        })
        .collect();

    let cauchy = cauchy_in_time_check(&traj, alpha, c_cauchy)?;
    let terminal_ratio = ratio_or_zero(last.h_crit, first.h_crit);
    let terminal_l2_ratio = ratio_or_zero(last.l2, first.l2);

    let mut verdicts = BTreeMap::new();
    verdicts.insert("energy_ledger".to_string(), ledger.pass());
    verdicts.insert("split_eps_delta".to_string(), split_diag.iter().all(|d| d.eps_pass));
    verdicts.insert("duhamel_m_delta".to_string(), split_diag.iter().all(|d| d.m_pass));
    verdicts.insert(
        "split_reconstruction".to_string(),
        split_diag.iter().all(|d| d.max_reconstruction_defect == 0.0 && d.embedding_violations == 0),
    );
    verdicts.insert(
        "occupation".to_string(),
        l2_occ.pass && e_delta.iter().all(|r| r.pass) && f_eps.as_ref().is_none_or(|r| r.pass),
    );
    verdicts.insert("interpolation".to_string(), interp_violations == 0);
    verdicts.insert("cauchy_in_time".to_string(), cauchy.pass);
    verdicts.insert("terminal_ratio".to_string(), terminal_ratio < opts.terminal_target);
    let pass = verdicts.values().all(|&v| v);

    let mut header: Vec<String> = ["t", "L2", "H2m2a", "H2m2a_hom", "H2ma", "interp_gap"].map(String::from).to_vec();
    for d in &deltas {
        header.push(format!("w_L2@{d}"));
        header.push(format!("v_L2@{d}"));
        header.push(format!("v_Hneg@{d}"));
    }
    let rows = samples
        .iter()
        .zip(&gaps)
        .zip(split.rows())
        .map(|((s, &g), r)| {
            let mut row = vec![s.t, s.l2, s.h_crit, s.h_crit_hom, s.h_top, g];
            for x in &r.per_delta {
                row.extend([x.w_l2_sq.sqrt(), x.v_l2_sq.sqrt(), x.v_negsigma_sq.sqrt()]);
            }
            row
        })
        .collect();

    let report = DecayReport {
        config: run_cfg,
        gate,
        forced: opts.force && !gate.pass,
        steps: traj.steps,
        samples: samples.len(),
        c_split,
        c_cauchy,
        eps_l2,
        eps_h,
        ledger,
        split: split_diag,
        occupation: OccupationSet { l2: l2_occ, e_delta, f_eps, f_eps_integral_bound },
        interpolation: InterpolationSummary {
            min_gap: if min_gap.is_finite() { min_gap } else { 0.0 },
            violations: interp_violations,
        },
        cauchy,
        terminal_ratio,
        terminal_l2_ratio,
        terminal_target: opts.terminal_target,
        verdicts,
        pass,
    };
    Ok(DecayOutcome { report, residuals: DecayResiduals { header, rows }, trajectory: traj })
}
