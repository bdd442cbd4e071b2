use crate::error::{Result, SqgError};

/// Both sides of `|a^σ - c^σ| ≤ σ2^{σ-1} b (c^{σ-1} + b^{σ-1})` with
/// `a = |ξ|`, `c = |η|` and the gap `b = |a - c|`.
///
/// Since `b ≤ |ξ - η|` and the right side grows with `b`, the vector form
/// follows from this scalar one. `0^0` is taken as 1.
pub fn check_elementary(xi_mag: f64, eta_mag: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(sigma >= 1.0 && sigma.is_finite()) {
        return Err(SqgError::InvalidParameter(format!("sigma must be >= 1, got {sigma}")));
    }
    if !(xi_mag >= 0.0 && eta_mag >= 0.0) {
        return Err(SqgError::InvalidParameter("magnitudes must be nonnegative".into()));
    }
    let gap = (xi_mag - eta_mag).abs();
    Ok(sides(xi_mag, eta_mag, gap, sigma))
}

/// Vector form with `b = |ξ - η|`.
pub fn check_elementary_vector(xi: (f64, f64), eta: (f64, f64), sigma: f64) -> Result<(f64, f64)> {
    if !(sigma >= 1.0 && sigma.is_finite()) {
        return Err(SqgError::InvalidParameter(format!("sigma must be >= 1, got {sigma}")));
    }
    let a = xi.0.hypot(xi.1);
    let c = eta.0.hypot(eta.1);
    let gap = (xi.0 - eta.0).hypot(xi.1 - eta.1);
    Ok(sides(a, c, gap, sigma))
}

fn sides(a: f64, c: f64, gap: f64, sigma: f64) -> (f64, f64) {
    let lhs = (a.powf(sigma) - c.powf(sigma)).abs();
    let rhs = sigma * 2f64.powf(sigma - 1.0) * gap * (c.powf(sigma - 1.0) + gap.powf(sigma - 1.0));
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_magnitudes() {
        let (l, r) = check_elementary(2.5, 2.5, 1.7).unwrap();
        assert_eq!(l, 0.0);
        assert!(r >= 0.0);
    }

    #[test]
    fn sigma_one_substitution() {
        // σ = 1: rhs = 2⁰·1·b·(c⁰ + b⁰) = 2b
        let (l, r) = check_elementary(3.0, 1.0, 1.0).unwrap();
        assert_eq!(l, 2.0);
        assert_eq!(r, 4.0);
    }

    #[test]
    fn rejects_small_sigma() {
        assert!(check_elementary(1.0, 2.0, 0.99).is_err());
        assert!(check_elementary(-1.0, 2.0, 1.5).is_err());
        assert!(check_elementary_vector((1.0, 0.0), (0.0, 1.0), 0.5).is_err());
    }
}
