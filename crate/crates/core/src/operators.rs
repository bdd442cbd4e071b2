//! Fourier multipliers: fractional powers of `|D|`, the Riesz velocity,
//! frequency projections, the scaling map and pointwise products.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SqgError};
use crate::field::SpectralField;
use crate::lattice::{make_lattice, FrequencyLattice};

/// Velocity `u = ∇^⊥|D|^{-1}θ`, i.e. `û₁ = -iξ₂/|ξ| θ̂`, `û₂ = iξ₁/|ξ| θ̂`.
#[derive(Clone, Debug)]
pub struct VelocityField {
    pub u1: SpectralField,
    pub u2: SpectralField,
}

impl VelocityField {
    /// Largest `|ξ·û(ξ)|` over all modes, scaled by the largest coefficient.
    pub fn divergence_defect(&self) -> f64 {
        let lat = self.u1.lattice();
        let scale = self
            .u1
            .coeffs()
            .iter()
            .chain(self.u2.coeffs())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        (0..lat.len())
            .map(|i| {
                let (a, b) = lat.wavenumber(i);
                (self.u1.coeffs()[i] * a + self.u2.coeffs()[i] * b).norm() / (scale * lat.k_max())
            })
            .fold(0.0, f64::max)
    }
}

/// `|D|^s f`: multiplies each coefficient by `|ξ|^s`. The zero mode maps to 0.
pub fn fractional_power(f: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    let modulus = f.lattice().modulus();
    f.map_real_multiplier(|i| if i == 0 { 0.0 } else { modulus[i].powf(s) })
}

fn odd_multiplier(f: &SpectralField, symbol: impl Fn(usize) -> f64) -> SpectralField {
    let lat = f.lattice();
    let nyq = lat.nyquist_mask();
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if nyq[i] || i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(-c.im, c.re) * symbol(i)
            }
        })
        .collect();
    SpectralField::from_raw(lat, coeffs)
}

/// `(∂₁f, ∂₂f)`.
pub fn gradient(f: &SpectralField) -> (SpectralField, SpectralField) {
    let lat = f.lattice().clone();
    (
        odd_multiplier(f, |i| lat.xi1()[i]),
        odd_multiplier(f, |i| lat.xi2()[i]),
    )
}

/// Divergence-free velocity of an active scalar. Nyquist modes are zeroed.
pub fn riesz_velocity(theta: &SpectralField) -> VelocityField {
    let lat = theta.lattice().clone();
    let m = lat.modulus();
    let u1 = odd_multiplier(theta, |i| -lat.xi2()[i] / m[i]);
    let u2 = odd_multiplier(theta, |i| lat.xi1()[i] / m[i]);
    VelocityField { u1, u2 }
}

/// `A_δ(D)θ`: keeps modes with `|ξ| < δ`.
pub fn low_pass(theta: &SpectralField, delta: f64) -> SpectralField {
    let m = theta.lattice().modulus();
    theta.map_real_multiplier(|i| if m[i] < delta { 1.0 } else { 0.0 })
}

/// `B_δ(D)θ = θ - A_δ(D)θ`: keeps modes with `|ξ| >= δ`.
pub fn high_pass(theta: &SpectralField, delta: f64) -> SpectralField {
    let m = theta.lattice().modulus();
    theta.map_real_multiplier(|i| if m[i] < delta { 0.0 } else { 1.0 })
}

/// `λ^{2α-1} θ(λx)` on the companion lattice with box `L/λ`.
///
/// The physical samples are unchanged index-wise while every wavenumber is
/// multiplied by `λ`, so no interpolation is involved. `λ` must be a
/// positive integer.
pub fn rescale_field(theta: &SpectralField, lambda: f64, alpha: f64) -> Result<SpectralField> {
    if !(lambda >= 1.0 && lambda.fract() == 0.0 && lambda.is_finite()) {
        return Err(SqgError::InvalidParameter(format!(
            "scaling factor must be a positive integer, got {lambda}"
        )));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(SqgError::InvalidParameter(format!(
            "alpha must lie in (0, 1/2), got {alpha}"
        )));
    }
    let lat = theta.lattice();
    let target = if lambda == 1.0 {
        lat.clone()
    } else {
        make_lattice(lat.n(), lat.box_len() / lambda)?
    };
    let amp = lambda.powf(2.0 * alpha - 1.0);
    let coeffs = theta.coeffs().iter().map(|c| c * amp).collect();
    Ok(SpectralField::from_raw(&target, coeffs))
}

/// Power of two close to `1 / max|c|`, so rescaling is exact.
fn balance(f: &SpectralField) -> f64 {
    let m = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if m > 0.0 && m.is_finite() {
        2f64.powi(-(m.log2().floor() as i32))
    } else {
        1.0
    }
}

/// Products of pairs of real fields evaluated in physical space. Two real
/// fields share one complex transform; each is first brought to unit scale
/// so the smaller one does not pick up the larger one's round-off.
fn to_physical_pair(a: &SpectralField, b: &SpectralField) -> (Vec<f64>, Vec<f64>) {
    let (sa, sb) = (balance(a), balance(b));
    let mut buf: Vec<Complex64> = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x * sa + Complex64::new(-y.im, y.re) * sb)
        .collect();
    a.lattice().fft2(&mut buf, true);
    buf.into_iter().map(|c| (c.re / sa, c.im / sb)).unzip()
}

pub(crate) fn physical_pair(a: &SpectralField, b: &SpectralField) -> (Vec<f64>, Vec<f64>) {
    to_physical_pair(a, b)
}

fn from_physical_masked(lat: &Arc<FrequencyLattice>, samples: Vec<f64>, dealias: bool) -> SpectralField {
    let mut buf: Vec<Complex64> = samples.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    lat.fft2(&mut buf, false);
    if dealias {
        for (c, &keep) in buf.iter_mut().zip(lat.dealias_mask()) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
    SpectralField::from_coeffs(lat, buf).expect("buffer matches lattice")
}

pub(crate) fn physical_to_spectral(lat: &Arc<FrequencyLattice>, samples: Vec<f64>, dealias: bool) -> SpectralField {
    from_physical_masked(lat, samples, dealias)
}

/// Product `fg` on the same lattice, with the 2/3-rule mask applied. When
/// both inputs are dealiased the kept modes are exact.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same(g)?;
    let (pf, pg) = to_physical_pair(f, g);
    let prod = pf.iter().zip(&pg).map(|(a, b)| a * b).collect();
    Ok(from_physical_masked(f.lattice(), prod, true))
}

/// Exact product `fg` (mean removed), returned on the padded `2n` lattice
/// so that no mode of the product aliases.
pub fn exact_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same(g)?;
    let fine = f.lattice().padded();
    let (ff, gf) = (f.resample(&fine)?, g.resample(&fine)?);
    let (pf, pg) = to_physical_pair(&ff, &gf);
    let prod = pf.iter().zip(&pg).map(|(a, b)| a * b).collect();
    Ok(from_physical_masked(&fine, prod, false))
}
