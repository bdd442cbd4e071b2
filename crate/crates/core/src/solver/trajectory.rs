use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};
use crate::field::SpectralField;
use crate::norms::{scalar_product, NormTable};
use crate::solver::config::SolverConfig;
use crate::solver::stepper::{all_finite, Stepper};

/// Norms of `θ(t)` at one sample time plus the running dissipation integrals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub t: f64,
    /// `‖θ‖_{L²}`
    pub l2: f64,
    /// `‖θ‖_{Ḣ^α}`
    pub h_alpha: f64,
    /// `‖θ‖_{Ḣ^{2-2α}}`
    pub h_crit_hom: f64,
    /// `‖θ‖_{H^{2-2α}}`
    pub h_crit: f64,
    /// `‖θ‖_{Ḣ^{2-α}}`
    pub h_top: f64,
    /// `∫₀ᵗ ‖|D|^α θ‖²_{L²}`
    pub d_l2: f64,
    /// `∫₀ᵗ ‖|D|^α θ‖²_{H^{2-2α}}`
    pub d_h: f64,
}

/// Time-indexed norms. Integrals use the trapezoidal rule on the sample grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub samples: Vec<NormSample>,
}

impl NormSeries {
    pub const CSV_HEADER: &'static str = "t,L2,Ha,H2m2a_hom,H2m2a,H2ma,D_L2,D_H";

    /// Appends a sample from squared homogeneous norms of orders
    /// `(0, α, 2-2α, 2-α)`.
    pub fn push(&mut self, t: f64, sq: [f64; 4]) {
        let [l2, ha, hc, ht] = sq;
        let (d_l2, d_h) = match self.samples.last() {
            None => (0.0, 0.0),
            Some(prev) => {
                let h = t - prev.t;
                let prev_l2 = prev.h_alpha * prev.h_alpha;
                let prev_h = prev_l2 + prev.h_top * prev.h_top;
                (
                    prev.d_l2 + 0.5 * h * (prev_l2 + ha),
                    prev.d_h + 0.5 * h * (prev_h + ha + ht),
                )
            }
        };
        self.samples.push(NormSample {
            t,
            l2: l2.sqrt(),
            h_alpha: ha.sqrt(),
            h_crit_hom: hc.sqrt(),
            h_crit: (l2 + hc).sqrt(),
            h_top: ht.sqrt(),
            d_l2,
            d_h,
        });
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&NormSample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&NormSample> {
        self.samples.last()
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                s.t, s.l2, s.h_alpha, s.h_crit_hom, s.h_crit, s.h_top, s.d_l2, s.d_h
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub field: SpectralField,
}

/// Output of [`simulate`].
#[derive(Clone, Debug, Default)]
pub struct TrajectoryRecord {
    pub alpha: f64,
    pub series: NormSeries,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    /// Largest `|⟨N(θ), θ⟩_{L²}| / (‖θ‖_{L²} ‖θ‖²_{H¹})` seen at any step.
    pub max_pairing_ratio: f64,
    pub min_dt: f64,
    pub max_dt: f64,
}

impl TrajectoryRecord {
    pub fn times(&self) -> Vec<f64> {
        self.series.times()
    }
}

/// Callback invoked on every norm sample with the current field.
pub trait SampleObserver {
    fn observe(&mut self, t: f64, theta: &SpectralField);
}

impl SampleObserver for () {
    fn observe(&mut self, _: f64, _: &SpectralField) {}
}

impl<F: FnMut(f64, &SpectralField)> SampleObserver for F {
    fn observe(&mut self, t: f64, theta: &SpectralField) {
        self(t, theta)
    }
}

/// Integrates from `theta0` to `cfg.t_end`, sampling norms every
/// `cfg.output_every` steps and at the final time.
pub fn simulate(theta0: &SpectralField, cfg: &SolverConfig) -> Result<TrajectoryRecord> {
    simulate_observed(theta0, cfg, &mut ())
}

pub fn simulate_observed(
    theta0: &SpectralField,
    cfg: &SolverConfig,
    observer: &mut dyn SampleObserver,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let lat = theta0.lattice().clone();
    if lat.n() != cfg.n || lat.box_len() != cfg.box_len {
        return Err(SqgError::InvalidConfig(format!(
            "initial field lattice (n = {}, L = {}) does not match config (n = {}, L = {})",
            lat.n(),
            lat.box_len(),
            cfg.n,
            cfg.box_len
        )));
    }
    let alpha = cfg.alpha;
    let table = NormTable::new(&lat, &[0.0, alpha, 2.0 - 2.0 * alpha, 2.0 - alpha, 1.0]);
    let mut rec = TrajectoryRecord {
        alpha,
        min_dt: f64::INFINITY,
        ..Default::default()
    };
    let mut samples_taken = 0usize;
    let mut take_sample = |rec: &mut TrajectoryRecord, t: f64, theta: &SpectralField, last: bool| {
        let sq = table.squared_norms(theta);
        rec.series.push(t, [sq[0], sq[1], sq[2], sq[3]]);
        if cfg.snapshot_every > 0 && (samples_taken.is_multiple_of(cfg.snapshot_every) || last) {
            rec.snapshots.push(Snapshot { t, field: theta.clone() });
        }
        samples_taken += 1;
        observer.observe(t, theta);
        sq
    };

    let mut theta = theta0.clone();
    let mut t = 0.0f64;
    let sq0 = take_sample(&mut rec, t, &theta, false);
    let ceiling = cfg.blowup_factor * (sq0[0] + sq0[2]).sqrt();
    let mut stepper = Stepper::new(&lat, alpha, cfg.nonlinear);
    let dx = lat.dx();

    let abort = |rec: TrajectoryRecord, time: f64, reason: String| SqgError::Instability {
        time,
        reason,
        partial: Box::new(rec),
    };

    while cfg.t_end - t > 1e-12 * cfg.t_end {
        let (k1, speed) = stepper.forcing(&theta);
        if cfg.nonlinear && !theta.is_zero() {
            let pairing = scalar_product(&k1, &theta, 0.0, true)?.abs();
            let sq = table.squared_norms(&theta);
            let scale = sq[0].sqrt() * (sq[0] + sq[4]);
            if scale > 0.0 {
                rec.max_pairing_ratio = rec.max_pairing_ratio.max(pairing / scale);
            }
        }
        let cfl_dt = if speed > 0.0 { cfg.cfl * dx / speed } else { f64::INFINITY };
        let mut dt = cfg.dt;
        if dt > cfl_dt {
            if cfg.adaptive_dt {
                dt = cfl_dt;
            } else {
                return Err(abort(
                    rec,
                    t,
                    format!("dt = {dt} exceeds the advective limit {cfl_dt:.3e} (max |u| = {speed:.3e})"),
                ));
            }
        }
        let remaining = cfg.t_end - t;
        if dt >= remaining * (1.0 - 1e-9) {
            dt = remaining;
        }
        theta = stepper.finish(&theta, &k1, dt);
        rec.steps += 1;
        rec.min_dt = rec.min_dt.min(dt);
        rec.max_dt = rec.max_dt.max(dt);
        t = if dt == remaining { cfg.t_end } else { t + dt };

        if !all_finite(&theta) {
            return Err(abort(rec, t, "non-finite coefficient".into()));
        }
        let last = t >= cfg.t_end;
        if rec.steps.is_multiple_of(cfg.output_every) || last {
            let sq = take_sample(&mut rec, t, &theta, last);
            let norm = (sq[0] + sq[2]).sqrt();
            if !norm.is_finite() || (ceiling > 0.0 && norm > ceiling) {
                return Err(abort(
                    rec,
                    t,
                    format!("suspected blow-up: ‖θ‖_H^(2-2α) = {norm:.3e} exceeds ceiling {ceiling:.3e}"),
                ));
            }
        }
    }
    if rec.steps == 0 {
        rec.min_dt = 0.0;
    }
    Ok(rec)
}
