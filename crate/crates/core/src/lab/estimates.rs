//! Field-level checks of the product laws and the transport estimates.
//! Every check returns both sides without the unknown constant; the ratio
//! is the empirical lower bound for that constant.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};
use crate::field::SpectralField;
use crate::norms::{hom_norm, scalar_product};
use crate::operators::{exact_product, riesz_velocity};
use crate::solver::advection_term;

/// `lhs / rhs`, with `0/0 = 0` and `x/0 = ∞` for `x > 0`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductLawCheck {
    /// `‖fg‖_{Ḣ^{s1+s2-1}}`, mean of `fg` excluded.
    pub lhs: f64,
    /// `‖f‖_{Ḣ^{s1}}‖g‖_{Ḣ^{s2}} + ‖f‖_{Ḣ^{s2}}‖g‖_{Ḣ^{s1}}`
    pub rhs_two_term: f64,
    /// `‖f‖_{Ḣ^{s1}}‖g‖_{Ḣ^{s2}}`, present when `s2 < 1`.
    pub rhs_one_term: Option<f64>,
}

impl ProductLawCheck {
    pub fn ratio_two_term(&self) -> f64 {
        ratio(self.lhs, self.rhs_two_term)
    }

    pub fn ratio_one_term(&self) -> Option<f64> {
        self.rhs_one_term.map(|r| ratio(self.lhs, r))
    }
}

/// Product laws in homogeneous spaces, evaluated on the exact (unaliased)
/// product. Requires `s1 < 1` and `s1 + s2 > 0`.
pub fn check_product_law(f: &SpectralField, g: &SpectralField, s1: f64, s2: f64) -> Result<ProductLawCheck> {
    if !(s1 < 1.0 && s1 + s2 > 0.0 && s2.is_finite()) {
        return Err(SqgError::InvalidParameter(format!(
            "product law needs s1 < 1 and s1 + s2 > 0, got s1 = {s1}, s2 = {s2}"
        )));
    }
    let fg = exact_product(f, g)?;
    let lhs = hom_norm(&fg, s1 + s2 - 1.0);
    let (f1, f2, g1, g2) = (hom_norm(f, s1), hom_norm(f, s2), hom_norm(g, s1), hom_norm(g, s2));
    Ok(ProductLawCheck {
        lhs,
        rhs_two_term: f1 * g2 + f2 * g1,
        rhs_one_term: (s2 < 1.0).then_some(f1 * g2),
    })
}

/// Dealiased copy of `f`, provided everything outside the mask is round-off.
fn resolved(f: &SpectralField) -> Result<SpectralField> {
    let mask = f.lattice().dealias_mask();
    let (mut inside, mut outside) = (0.0f64, 0.0f64);
    for (c, &keep) in f.coeffs().iter().zip(mask) {
        if keep {
            inside = inside.max(c.norm());
        } else {
            outside = outside.max(c.norm());
        }
    }
    if outside <= 1e-12 * inside || outside == 0.0 {
        Ok(f.dealiased())
    } else {
        Err(SqgError::InvalidParameter(
            "field must be supported inside the dealiasing mask".into(),
        ))
    }
}

fn require_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(SqgError::InvalidParameter(format!("alpha must lie in (0, 1/2), got {alpha}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrilinearCheck {
    /// `|⟨u_θ·∇θ, θ⟩_{H^σ}|`
    pub lhs: f64,
    /// `σ2^σ ‖θ‖_{Ḣ^{2-2α}} ‖θ‖²_{Ḣ^{σ+α}}`
    pub rhs_without_c: f64,
}

impl TrilinearCheck {
    pub fn ratio(&self) -> f64 {
        ratio(self.lhs, self.rhs_without_c)
    }
}

/// `⟨u_θ·∇θ, θ⟩_{Ḣ^s}` summed over triads `p + q = k` inside the mask, with
/// the weight symmetrized to `(|k|^{2s} - |q|^{2s}) / 2`.
///
/// For divergence-free `u` the triads `(p, q, k)` and `(p, -k, -q)` carry
/// opposite terms, so the symmetrized sum equals the plain pairing while the
/// part that cancels exactly never enters the floating-point sum. The `L²`
/// pairing is identically zero in this form.
pub fn transport_pairing(theta: &SpectralField, s: f64) -> Result<f64> {
    let theta = resolved(theta)?;
    let lat = theta.lattice();
    let n = lat.n() as i64;
    let n2 = (n * n) as f64;
    let m = lat.modulus();
    // (j1, j2, |ξ|^{2s}, amplitude)
    let active: Vec<(i64, i64, f64, Complex64)> = theta
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(i, c)| *i != 0 && c.norm() > 0.0)
        .map(|(i, c)| {
            let (j1, j2) = lat.mode(i);
            (j1, j2, m[i].powf(2.0 * s), c / n2)
        })
        .collect();
    let k0 = 2.0 * std::f64::consts::PI / lat.box_len();
    // a_p / |ξ_p| on a zero-padded square wide enough for every k - q
    let jm = (n - 1) / 3;
    let width = 4 * jm + 1;
    let mut grid = vec![Complex64::new(0.0, 0.0); (width * width) as usize];
    for &(j1, j2, _, a) in &active {
        let i = lat.index_of(j1, j2);
        grid[((j1 + 2 * jm) * width + j2 + 2 * jm) as usize] = a / m[i];
    }
    let partials: Vec<(f64, f64)> = active
        .par_iter()
        .map(|&(k1, k2, wk, ak)| {
            let mut acc = Neumaier::default();
            let akc = ak.conj();
            for &(q1, q2, wq, aq) in &active {
                let (p1, p2) = (k1 - q1, k2 - q2);
                let ap = grid[((p1 + 2 * jm) * width + p2 + 2 * jm) as usize];
                if ap.re == 0.0 && ap.im == 0.0 {
                    continue;
                }
                // û(p)·iξ_q = -a_p (ξ_p × ξ_q) / |ξ_p|
                let cross = (p1 * q2 - p2 * q1) as f64;
                acc.add((wk - wq) * cross * (ap * aq * akc).re);
            }
            (acc.sum, acc.comp)
        })
        .collect();
    let mut total = Neumaier::default();
    for (a, b) in partials {
        total.add(a);
        total.add(b);
    }
    let l = lat.box_len();
    Ok(-0.5 * total.value() * k0 * k0 * l * l)
}

/// Compensated summation.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn check_trilinear(theta: &SpectralField, sigma: f64, alpha: f64) -> Result<TrilinearCheck> {
    if !(sigma >= 1.0 && sigma.is_finite()) {
        return Err(SqgError::InvalidParameter(format!("sigma must be >= 1, got {sigma}")));
    }
    require_alpha(alpha)?;
    let theta = &resolved(theta)?;
    let lhs = transport_pairing(theta, sigma)?.abs();
    let sq = hom_norm(theta, sigma + alpha);
    let rhs = sigma * 2f64.powf(sigma) * hom_norm(theta, 2.0 - 2.0 * alpha) * sq * sq;
    Ok(TrilinearCheck { lhs, rhs_without_c: rhs })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilinearCheck {
    /// `|⟨u_ω·∇θ, θ⟩_{H^{2-2α}}|`
    pub lhs: f64,
    /// `‖ω‖_{Ḣ^{2-α}} ‖θ‖_{Ḣ^{2-2α}} ‖θ‖_{Ḣ^{2-α}}`
    pub rhs_mixed: f64,
    /// `‖ω‖_{Ḣ^{2-2α}} ‖θ‖²_{Ḣ^{2-α}}`
    pub rhs_top: f64,
}

impl BilinearCheck {
    pub fn ratio_mixed(&self) -> f64 {
        ratio(self.lhs, self.rhs_mixed)
    }

    pub fn ratio_top(&self) -> f64 {
        ratio(self.lhs, self.rhs_top)
    }
}

pub fn check_bilinear(omega: &SpectralField, theta: &SpectralField, alpha: f64) -> Result<BilinearCheck> {
    require_alpha(alpha)?;
    omega.check_same(theta)?;
    let omega = &resolved(omega)?;
    let theta = &resolved(theta)?;
    let crit = 2.0 - 2.0 * alpha;
    let top = 2.0 - alpha;
    let adv = advection_term(&riesz_velocity(omega), theta);
    let lhs = scalar_product(&adv, theta, crit, false)?.abs();
    let (w_top, w_crit) = (hom_norm(omega, top), hom_norm(omega, crit));
    let (t_top, t_crit) = (hom_norm(theta, top), hom_norm(theta, crit));
    Ok(BilinearCheck {
        lhs,
        rhs_mixed: w_top * t_crit * t_top,
        rhs_top: w_crit * t_top * t_top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_lattice;
    use std::f64::consts::PI;

    #[test]
    fn zero_fields_give_zero_ratio() {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let z = SpectralField::zeros(&lat);
        let c = check_product_law(&z, &z, 0.25, 0.25).unwrap();
        assert_eq!(c.ratio_two_term(), 0.0);
        assert_eq!(c.ratio_one_term(), Some(0.0));
        assert_eq!(check_trilinear(&z, 1.0, 0.25).unwrap().ratio(), 0.0);
        let b = check_bilinear(&z, &z, 0.25).unwrap();
        assert_eq!((b.ratio_mixed(), b.ratio_top()), (0.0, 0.0));
    }

    #[test]
    fn parameter_ranges() {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let z = SpectralField::zeros(&lat);
        assert!(check_product_law(&z, &z, 1.0, 0.5).is_err());
        assert!(check_product_law(&z, &z, 0.2, -0.3).is_err());
        assert!(check_product_law(&z, &z, 0.5, 1.2).unwrap().rhs_one_term.is_none());
        assert!(check_trilinear(&z, 0.9, 0.25).is_err());
        assert!(check_trilinear(&z, 1.0, 0.5).is_err());
        let rough = SpectralField::from_fn(&lat, |x, _| (7.0 * x).cos());
        assert!(check_trilinear(&rough, 1.0, 0.25).is_err());
    }

    #[test]
    fn single_mode_transport_vanishes() {
        let lat = make_lattice(16, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(&lat, |x, y| (x + 2.0 * y).cos());
        let t = check_trilinear(&f, 1.5, 0.25).unwrap();
        assert!(t.lhs <= 1e-12 * t.rhs_without_c);
        let b = check_bilinear(&f, &f, 0.25).unwrap();
        assert!(b.lhs <= 1e-12 * b.rhs_top);
    }

    #[test]
    fn triad_sum_matches_fft_pairing() {
        use crate::init::{sample_rng, FieldGenerator};
        use crate::solver::nonlinear_term;
        let lat = make_lattice(32, 5.0).unwrap();
        let f = FieldGenerator::GaussianRandomField { slope: 1.5 }.generate(&lat, &mut sample_rng(1, 0));
        for s in [0.0, 1.0, 1.7] {
            let nl = nonlinear_term(&f);
            let fft = scalar_product(&nl, &f, s, true).unwrap();
            let scale = hom_norm(&nl, s) * hom_norm(&f, s);
            assert!((transport_pairing(&f, s).unwrap() - fft).abs() <= 1e-12 * scale, "s = {s}");
        }
        assert_eq!(transport_pairing(&f, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(1.0, 4.0), 0.25);
    }
}
