//! Sobolev norms and pairings on the periodic box.
//!
//! All norms are weighted so the `L²` norm equals the physical integral over
//! one period (see [`FrequencyLattice::parseval_weight`]). The zero mode is
//! never counted. The inhomogeneous norm is the equivalent form
//! `‖f‖²_{H^s} = ‖f‖²_{L²} + ‖|D|^s f‖²_{L²}`.
//!
//! [`FrequencyLattice::parseval_weight`]: crate::lattice::FrequencyLattice::parseval_weight

use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order")]
pub enum NormKind {
    L2,
    HomSobolev(f64),
    InhomSobolev(f64),
}

impl NormKind {
    pub fn eval(&self, f: &SpectralField) -> Result<f64> {
        match *self {
            NormKind::L2 => Ok(hom_norm(f, 0.0)),
            NormKind::HomSobolev(s) => {
                check_order(s)?;
                Ok(hom_norm(f, s))
            }
            NormKind::InhomSobolev(s) => inhom_norm(f, s),
        }
    }
}

fn check_order(s: f64) -> Result<()> {
    if s.is_finite() {
        Ok(())
    } else {
        Err(SqgError::InvalidParameter(format!("Sobolev order must be finite, got {s}")))
    }
}

/// `Σ_{ξ≠0} |ξ|^{2s} |c(ξ)|² · w`.
pub fn hom_norm_sq(f: &SpectralField, s: f64) -> f64 {
    let lat = f.lattice();
    let m = lat.modulus();
    let sum: f64 = if s == 0.0 {
        f.coeffs().iter().skip(1).map(|c| c.norm_sqr()).sum()
    } else {
        f.coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| m[i].powf(2.0 * s) * c.norm_sqr())
            .sum()
    };
    sum * lat.parseval_weight()
}

/// `‖f‖_{Ḣ^s} = ‖|D|^s f‖_{L²}`.
pub fn hom_norm(f: &SpectralField, s: f64) -> f64 {
    hom_norm_sq(f, s).sqrt()
}

pub fn l2_norm(f: &SpectralField) -> f64 {
    hom_norm(f, 0.0)
}

/// `sqrt(‖f‖²_{L²} + ‖f‖²_{Ḣ^s})`, defined for `s > 0`.
pub fn inhom_norm(f: &SpectralField, s: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(SqgError::InvalidParameter(format!(
            "inhomogeneous order must be positive, got {s}"
        )));
    }
    Ok((hom_norm_sq(f, 0.0) + hom_norm_sq(f, s)).sqrt())
}

/// Real part of the weighted coefficient pairing `⟨f, g⟩_{Ḣ^s}` (or
/// `⟨f, g⟩_{L²} + ⟨f, g⟩_{Ḣ^s}` when `homogeneous` is false).
pub fn scalar_product(f: &SpectralField, g: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    f.check_same(g)?;
    check_order(s)?;
    let lat = f.lattice();
    let m = lat.modulus();
    let sum: f64 = f
        .coeffs()
        .iter()
        .zip(g.coeffs())
        .enumerate()
        .skip(1)
        .map(|(i, (a, b))| {
            let w = if s == 0.0 { 1.0 } else { m[i].powf(2.0 * s) };
            let w = if homogeneous || s == 0.0 { w } else { 1.0 + w };
            w * (a.re * b.re + a.im * b.im)
        })
        .sum();
    Ok(sum * lat.parseval_weight())
}

/// `RHS - LHS` of `‖θ‖_{Ḣ^{2-2α}} ≤ ‖θ‖_{L²}^{α/(2-α)} ‖θ‖_{Ḣ^{2-α}}^{(2-2α)/(2-α)}`.
pub fn interpolation_gap(theta: &SpectralField, alpha: f64) -> Result<f64> {
    if theta.is_zero() {
        return Err(SqgError::Degenerate("interpolation gap of the zero field".into()));
    }
    Ok(interpolation_gap_from_norms(
        l2_norm(theta),
        hom_norm(theta, 2.0 - 2.0 * alpha),
        hom_norm(theta, 2.0 - alpha),
        alpha,
    ))
}

/// Same gap from precomputed `(‖θ‖_{L²}, ‖θ‖_{Ḣ^{2-2α}}, ‖θ‖_{Ḣ^{2-α}})`.
pub fn interpolation_gap_from_norms(l2: f64, h_crit: f64, h_top: f64, alpha: f64) -> f64 {
    let a = alpha / (2.0 - alpha);
    let rhs = l2.powf(a) * h_top.powf(1.0 - a);
    rhs - h_crit
}

/// Precomputed `|ξ|^{2s}` tables for repeated norm evaluation on one lattice.
#[derive(Clone, Debug)]
pub struct NormTable {
    orders: Vec<f64>,
    weights: Vec<Vec<f64>>,
    parseval: f64,
}

impl NormTable {
    pub fn new(lattice: &FrequencyLattice, orders: &[f64]) -> Self {
        let m = lattice.modulus();
        let weights = orders
            .iter()
            .map(|&s| {
                m.iter()
                    .enumerate()
                    .map(|(i, &k)| if i == 0 { 0.0 } else if s == 0.0 { 1.0 } else { k.powf(2.0 * s) })
                    .collect()
            })
            .collect();
        Self {
            orders: orders.to_vec(),
            weights,
            parseval: lattice.parseval_weight(),
        }
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    /// Squared homogeneous norms for every tabulated order, in one pass.
    pub fn squared_norms(&self, f: &SpectralField) -> Vec<f64> {
        let mut acc = vec![0.0; self.orders.len()];
        for (i, c) in f.coeffs().iter().enumerate() {
            let p = c.norm_sqr();
            if p == 0.0 {
                continue;
            }
            for (a, w) in acc.iter_mut().zip(&self.weights) {
                *a += w[i] * p;
            }
        }
        acc.iter_mut().for_each(|a| *a *= self.parseval);
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_lattice;
    use crate::operators::{fractional_power, high_pass, low_pass};
    use std::f64::consts::PI;

    #[test]
    fn cosine_norms() {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(&lat, |x, _| x.cos());
        let l2sq = 2.0 * PI * PI;
        assert!((hom_norm_sq(&f, 0.0) - l2sq).abs() < 1e-10);
        for s in [-1.5, -0.3, 0.25, 1.0, 2.7] {
            assert!((hom_norm(&f, s) - l2sq.sqrt()).abs() < 1e-10);
            if s > 0.0 {
                assert!((inhom_norm(&f, s).unwrap() - (2.0 * l2sq).sqrt()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_field_norms() {
        let lat = make_lattice(8, 1.0).unwrap();
        let z = SpectralField::zeros(&lat);
        for s in [-1.0, 0.0, 0.5, 3.0] {
            assert_eq!(hom_norm(&z, s), 0.0);
        }
        assert_eq!(inhom_norm(&z, 0.5).unwrap(), 0.0);
        assert!(interpolation_gap(&z, 0.25).is_err());
    }

    #[test]
    fn inhom_rejects_nonpositive_order() {
        let lat = make_lattice(8, 1.0).unwrap();
        let z = SpectralField::zeros(&lat);
        assert!(inhom_norm(&z, 0.0).is_err());
        assert!(inhom_norm(&z, -1.0).is_err());
        assert!(NormKind::HomSobolev(f64::NAN).eval(&z).is_err());
    }

    #[test]
    fn orthogonal_modes_pair_to_zero() {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(&lat, |x, _| x.cos());
        let g = SpectralField::from_fn(&lat, |x, _| (2.0 * x).cos());
        assert!(scalar_product(&f, &g, 0.7, true).unwrap().abs() < 1e-10);
        let ff = scalar_product(&f, &f, 0.7, true).unwrap();
        assert!((ff - hom_norm_sq(&f, 0.7)).abs() < 1e-10);
        let other = make_lattice(8, 2.0 * PI).unwrap();
        let h = SpectralField::zeros(&other);
        assert!(matches!(scalar_product(&f, &h, 0.0, true), Err(SqgError::LatticeMismatch)));
    }

    #[test]
    fn single_mode_interpolation_is_equality() {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(&lat, |x, y| (3.0 * x + y).cos());
        let gap = interpolation_gap(&f, 0.3).unwrap();
        assert!(gap.abs() < 1e-10 * hom_norm(&f, 1.4));
    }

    #[test]
    fn gaussian_half_order_matches_radial_integral() {
        // ‖e^{-|x|²/2}‖²_{Ḣ^s} on ℝ² = (2π)^{-2} ∫ |ξ|^{2s} (2π)² e^{-|ξ|²} dξ
        //                           = 2π ∫ r^{2s+1} e^{-r²} dr = π Γ(s+1)
        let lat = make_lattice(256, 40.0).unwrap();
        let c = 20.0;
        let f = SpectralField::from_fn(&lat, |x, y| (-((x - c).powi(2) + (y - c).powi(2)) / 2.0).exp());
        let s = 0.5;
        let gamma_1_5 = PI.sqrt() / 2.0;
        let oracle = (PI * gamma_1_5).sqrt();
        let got = hom_norm(&f, s);
        assert!(((got - oracle) / oracle).abs() < 1e-3, "{got} vs {oracle}");
    }

    #[test]
    fn norm_table_matches_direct() {
        let lat = make_lattice(16, 3.0).unwrap();
        let f = SpectralField::from_fn(&lat, |x, y| (2.0 * PI * x / 3.0).sin() + (4.0 * PI * y / 3.0).cos() * 0.3);
        let t = NormTable::new(&lat, &[0.0, 0.25, 1.5]);
        let sq = t.squared_norms(&f);
        for (v, s) in sq.iter().zip([0.0, 0.25, 1.5]) {
            assert!((v - hom_norm_sq(&f, s)).abs() < 1e-12 * (1.0 + v));
        }
    }

    #[test]
    fn bernstein_on_low_band() {
        let lat = make_lattice(32, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(&lat, |x, y| (x + 2.0 * y).sin() + (5.0 * x).cos() + (y * 9.0).sin());
        let delta = 6.0;
        let lo = low_pass(&f, delta);
        for (s, t) in [(1.0, 0.0), (2.0, 0.5), (0.5, -1.0)] {
            assert!(hom_norm(&lo, s) <= delta.powf(s - t) * hom_norm(&lo, t) * (1.0 + 1e-12));
        }
        let hi = high_pass(&f, delta);
        let parts = hom_norm_sq(&lo, 0.0) + hom_norm_sq(&hi, 0.0);
        assert!((parts - hom_norm_sq(&f, 0.0)).abs() < 1e-10);
        let _ = fractional_power(&f, 1.0);
    }
}
