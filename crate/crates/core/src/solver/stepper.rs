//! Integrating-factor RK4 (Lawson) for `∂_t θ = -|D|^{2α}θ - N(θ)`.
//!
//! The dissipation is applied exactly through `E(h) = e^{-h|ξ|^{2α}}`:
//!
//! ```text
//! k1 = F(θ)
//! k2 = F(E(h/2)(θ + h/2 k1))
//! k3 = F(E(h/2)θ + h/2 k2)
//! k4 = F(E(h)θ + h E(h/2) k3)
//! θ' = E(h)θ + h/6 (E(h) k1 + 2E(h/2)(k2 + k3) + k4)
//! ```
//!
//! with `F = -N`. With `N ≡ 0` a step is the exact linear flow.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SqgError};
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;
use crate::solver::config::SolverConfig;
use crate::solver::nonlinear::nonlinear_with_speed;

pub struct Stepper {
    lattice: Arc<FrequencyLattice>,
    nonlinear: bool,
    symbol: Vec<f64>,
    cached_dt: f64,
    half: Vec<f64>,
    full: Vec<f64>,
}

impl Stepper {
    pub fn new(lattice: &Arc<FrequencyLattice>, alpha: f64, nonlinear: bool) -> Self {
        let symbol = lattice.modulus().iter().map(|k| k.powf(2.0 * alpha)).collect();
        Self {
            lattice: lattice.clone(),
            nonlinear,
            symbol,
            cached_dt: f64::NAN,
            half: Vec::new(),
            full: Vec::new(),
        }
    }

    /// `-N(θ)` and the grid maximum of `|u_θ|`.
    pub fn forcing(&self, theta: &SpectralField) -> (SpectralField, f64) {
        if !self.nonlinear {
            return (SpectralField::zeros(&self.lattice), 0.0);
        }
        let (nl, speed) = nonlinear_with_speed(theta);
        (nl.scaled(-1.0), speed)
    }

    fn factors(&mut self, dt: f64) {
        if self.cached_dt == dt {
            return;
        }
        self.half = self.symbol.iter().map(|s| (-0.5 * dt * s).exp()).collect();
        self.full = self.symbol.iter().map(|s| (-dt * s).exp()).collect();
        self.cached_dt = dt;
    }

    /// Completes a step of size `dt` given the first stage `k1 = -N(θ)`.
    pub fn finish(&mut self, theta: &SpectralField, k1: &SpectralField, dt: f64) -> SpectralField {
        self.factors(dt);
        let (half, full) = (&self.half, &self.full);
        let th = theta.coeffs();
        let lat = &self.lattice;
        let combine = |f: &dyn Fn(usize) -> Complex64| -> SpectralField {
            SpectralField::from_raw(lat, (0..th.len()).map(f).collect())
        };

        if !self.nonlinear {
            return combine(&|i| th[i] * full[i]);
        }
        let a = k1.coeffs();
        let s2 = combine(&|i| (th[i] + a[i] * (0.5 * dt)) * half[i]);
        let k2 = self.forcing(&s2).0;
        let b = k2.coeffs();
        let s3 = combine(&|i| th[i] * half[i] + b[i] * (0.5 * dt));
        let k3 = self.forcing(&s3).0;
        let c = k3.coeffs();
        let s4 = combine(&|i| th[i] * full[i] + c[i] * (dt * half[i]));
        let k4 = self.forcing(&s4).0;
        let d = k4.coeffs();
        combine(&|i| {
            th[i] * full[i] + (a[i] * full[i] + (b[i] + c[i]) * (2.0 * half[i]) + d[i]) * (dt / 6.0)
        })
    }

    /// One full step of size `dt`.
    pub fn advance(&mut self, theta: &SpectralField, dt: f64) -> SpectralField {
        let (k1, _) = self.forcing(theta);
        self.finish(theta, &k1, dt)
    }
}

pub(crate) fn all_finite(f: &SpectralField) -> bool {
    f.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// A single step of size `cfg.dt`. Fails if the result is not finite.
pub fn step(theta: &SpectralField, cfg: &SolverConfig) -> Result<SpectralField> {
    cfg.validate()?;
    let mut stepper = Stepper::new(theta.lattice(), cfg.alpha, cfg.nonlinear);
    let next = stepper.advance(theta, cfg.dt);
    if !all_finite(&next) {
        return Err(SqgError::Instability {
            time: cfg.dt,
            reason: "non-finite coefficient after one step".into(),
            partial: Box::default(),
        });
    }
    Ok(next)
}
