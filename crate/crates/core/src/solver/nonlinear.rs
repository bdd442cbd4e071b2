use crate::field::SpectralField;
use crate::operators::{gradient, physical_pair, physical_to_spectral, riesz_velocity, VelocityField};

/// Dealiased `u·∇θ` for a given velocity. Equal to `div(θu)` when `div u = 0`.
pub fn advection_term(u: &VelocityField, theta: &SpectralField) -> SpectralField {
    advect(u, theta).0
}

/// Dealiased transport term `u_θ·∇θ` of the equation.
pub fn nonlinear_term(theta: &SpectralField) -> SpectralField {
    advect(&riesz_velocity(theta), theta).0
}

/// `u_θ·∇θ` together with `max |u_θ|` on the grid.
pub(crate) fn nonlinear_with_speed(theta: &SpectralField) -> (SpectralField, f64) {
    advect(&riesz_velocity(theta), theta)
}

fn advect(u: &VelocityField, theta: &SpectralField) -> (SpectralField, f64) {
    let (g1, g2) = gradient(theta);
    let (pu1, pu2) = physical_pair(&u.u1, &u.u2);
    let (pg1, pg2) = physical_pair(&g1, &g2);
    let mut speed = 0.0f64;
    let prod: Vec<f64> = (0..pu1.len())
        .map(|i| {
            speed = speed.max(pu1[i].hypot(pu2[i]));
            pu1[i] * pg1[i] + pu2[i] * pg2[i]
        })
        .collect();
    (physical_to_spectral(theta.lattice(), prod, true), speed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_lattice;
    use std::f64::consts::PI;

    #[test]
    fn zero_and_single_mode_vanish() {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        assert!(nonlinear_term(&SpectralField::zeros(&lat)).is_zero());
        let f = SpectralField::from_fn(&lat, |x, y| 0.7 * (2.0 * x - y).cos());
        let nl = nonlinear_term(&f);
        let scale = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(nl.coeffs().iter().all(|c| c.norm() < 1e-12 * scale * scale));
    }
}
