use crate::error::{Result, SqgError};

/// Both sides of `(∫₀ᵀ e^{-σ(T-z)} h dz)² ≤ 2σ⁻¹ ∫₀ᵀ e^{-σ(T-z)} h² dz`, with
/// `h` sampled at `h.len()` uniform points on `[0, T]` and trapezoidal
/// quadrature.
pub fn check_exp_kernel(h: &[f64], horizon: f64, sigma: f64) -> Result<(f64, f64)> {
    if h.len() < 2 {
        return Err(SqgError::InvalidParameter("need at least two samples of h".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(SqgError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(SqgError::InvalidParameter(format!("horizon must be positive, got {horizon}")));
    }
    if let Some(bad) = h.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(SqgError::InvalidParameter(format!("h must be finite and nonnegative, found {bad}")));
    }
    let m = h.len() - 1;
    let step = horizon / m as f64;
    let (mut first, mut second) = (0.0, 0.0);
    for (i, &v) in h.iter().enumerate() {
        let w = if i == 0 || i == m { 0.5 } else { 1.0 };
        let kernel = (-sigma * (horizon - i as f64 * step)).exp();
        first += w * kernel * v;
        second += w * kernel * v * v;
    }
    first *= step;
    second *= step;
    Ok((first * first, 2.0 / sigma * second))
}
