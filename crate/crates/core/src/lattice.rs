//! Discrete Fourier grid on the periodic box `[0, L)²`.
//!
//! Coefficients are stored row-major over `(j1, j2)` in FFT order: storage
//! index `i` along an axis maps to the integer wavenumber `j = i` for
//! `i < n/2` and `j = i - n` otherwise, so `j ∈ [-n/2, n/2)`. The physical
//! sample `(i1, i2)` sits at `x = (i1, i2) · L/n`.
//!
//! The forward transform carries no scale factor and the inverse divides by
//! `n²`, so a coefficient `c_j` corresponds to the Fourier-series amplitude
//! `c_j / n²`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SqgError};

pub struct FrequencyLattice {
    n: usize,
    box_len: f64,
    k0: f64,
    xi1: Vec<f64>,
    xi2: Vec<f64>,
    modulus: Vec<f64>,
    dealias: Vec<bool>,
    nyquist: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    padded: OnceLock<Arc<FrequencyLattice>>,
}

impl fmt::Debug for FrequencyLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyLattice")
            .field("n", &self.n)
            .field("box_len", &self.box_len)
            .finish()
    }
}

/// Builds a lattice with `n × n` modes on a box of side `box_len`.
///
/// `n` must be even and at least 8.
pub fn make_lattice(n: usize, box_len: f64) -> Result<Arc<FrequencyLattice>> {
    if n < 8 || !n.is_multiple_of(2) {
        return Err(SqgError::InvalidLattice(format!(
            "n must be even and >= 8, got {n}"
        )));
    }
    if !(box_len.is_finite() && box_len > 0.0) {
        return Err(SqgError::InvalidLattice(format!(
            "box_len must be positive and finite, got {box_len}"
        )));
    }
    Ok(Arc::new(FrequencyLattice::build(n, box_len)))
}

/// Integer wavenumber for storage index `i` on an `n`-point axis.
#[inline]
pub fn signed_mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl FrequencyLattice {
    fn build(n: usize, box_len: f64) -> Self {
        let k0 = 2.0 * std::f64::consts::PI / box_len;
        let len = n * n;
        let mut xi1 = Vec::with_capacity(len);
        let mut xi2 = Vec::with_capacity(len);
        let mut modulus = Vec::with_capacity(len);
        let mut dealias = Vec::with_capacity(len);
        let mut nyquist = Vec::with_capacity(len);
        let half = n / 2;
        for i1 in 0..n {
            let j1 = signed_mode(i1, n);
            for i2 in 0..n {
                let j2 = signed_mode(i2, n);
                let (a, b) = (k0 * j1 as f64, k0 * j2 as f64);
                xi1.push(a);
                xi2.push(b);
                modulus.push(a.hypot(b));
                // 3|j| < n keeps quadratic products alias-free on kept modes
                dealias.push(3 * j1.unsigned_abs() < n as u64 && 3 * j2.unsigned_abs() < n as u64);
                nyquist.push(i1 == half || i2 == half);
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Self {
            n,
            box_len,
            k0,
            xi1,
            xi2,
            modulus,
            dealias,
            nyquist,
            fwd,
            inv,
            padded: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    /// Number of modes, `n²`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Wavenumber step `2π/L`; also the smallest nonzero `|ξ|`.
    pub fn k_min(&self) -> f64 {
        self.k0
    }

    /// Largest `|ξ|` on the lattice (the corner mode).
    pub fn k_max(&self) -> f64 {
        self.k0 * (self.n as f64 / 2.0) * std::f64::consts::SQRT_2
    }

    /// Physical grid spacing `L/n`.
    pub fn dx(&self) -> f64 {
        self.box_len / self.n as f64
    }

    /// Weight `w` with `‖f‖²_{L²} = w · Σ |c_j|²`, i.e. `L²/n⁴`.
    pub fn parseval_weight(&self) -> f64 {
        let n2 = (self.n * self.n) as f64;
        self.box_len * self.box_len / (n2 * n2)
    }

    pub fn xi1(&self) -> &[f64] {
        &self.xi1
    }

    pub fn xi2(&self) -> &[f64] {
        &self.xi2
    }

    /// `|ξ|` per mode.
    pub fn modulus(&self) -> &[f64] {
        &self.modulus
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.dealias
    }

    /// Modes on the Nyquist row or column. Odd multipliers (derivatives,
    /// Riesz transforms) zero these so the output stays real.
    pub fn nyquist_mask(&self) -> &[bool] {
        &self.nyquist
    }

    pub fn wavenumber(&self, idx: usize) -> (f64, f64) {
        (self.xi1[idx], self.xi2[idx])
    }

    /// Integer mode `(j1, j2)` at storage index `idx`.
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        (signed_mode(idx / self.n, self.n), signed_mode(idx % self.n, self.n))
    }

    /// Storage index of integer mode `(j1, j2)`, wrapping modulo `n`.
    pub fn index_of(&self, j1: i64, j2: i64) -> usize {
        let n = self.n as i64;
        (j1.rem_euclid(n) * n + j2.rem_euclid(n)) as usize
    }

    /// Storage index of the mode `-j`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i1, i2) = (idx / n, idx % n);
        ((n - i1) % n) * n + (n - i2) % n
    }

    /// Same discretization (size and box).
    pub fn same_as(&self, other: &FrequencyLattice) -> bool {
        std::ptr::eq(self, other) || (self.n == other.n && self.box_len == other.box_len)
    }

    /// Companion lattice with `2n` points on the same box, used for exact
    /// (alias-free) products of full-band fields.
    pub fn padded(&self) -> Arc<FrequencyLattice> {
        self.padded
            .get_or_init(|| Arc::new(FrequencyLattice::build(2 * self.n, self.box_len)))
            .clone()
    }

    /// In-place unnormalized 2D FFT of a row-major `n × n` buffer. The
    /// inverse direction divides by `n²`.
    pub fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len(), self.len());
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose_square(data, self.n);
        plan.process_with_scratch(data, &mut scratch);
        transpose_square(data, self.n);
        if inverse {
            let scale = 1.0 / self.len() as f64;
            data.iter_mut().for_each(|c| *c *= scale);
        }
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            data.swap(r * n + c, c * n + r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_sizes() {
        assert!(make_lattice(7, 1.0).is_err());
        assert!(make_lattice(6, 1.0).is_err());
        assert!(make_lattice(9, 1.0).is_err());
        assert!(make_lattice(8, 0.0).is_err());
        assert!(make_lattice(8, -1.0).is_err());
        assert!(make_lattice(8, f64::NAN).is_err());
    }

    #[test]
    fn unit_step_on_two_pi_box() {
        let lat = make_lattice(8, 2.0 * PI).unwrap();
        assert!((lat.k_min() - 1.0).abs() < 1e-15);
        let mut js: Vec<i64> = (0..8).map(|i| signed_mode(i, 8)).collect();
        js.sort();
        assert_eq!(js, (-4..=3).collect::<Vec<_>>());
        assert_eq!(lat.wavenumber(0), (0.0, 0.0));
        let idx = lat.index_of(-4, 3);
        assert_eq!(lat.mode(idx), (-4, 3));
        assert_eq!(lat.wavenumber(idx), (-4.0, 3.0));
    }

    #[test]
    fn half_box_doubles_step() {
        let lat = make_lattice(8, PI).unwrap();
        assert!((lat.k_min() - 2.0).abs() < 1e-15);
        assert_eq!(lat.wavenumber(lat.index_of(1, 0)), (2.0, 0.0));
    }

    #[test]
    fn dealias_mask_128() {
        let lat = make_lattice(128, 2.0 * PI).unwrap();
        let max_kept = (0..lat.len())
            .filter(|&i| lat.dealias_mask()[i])
            .map(|i| {
                let (a, b) = lat.mode(i);
                a.abs().max(b.abs())
            })
            .max()
            .unwrap();
        assert_eq!(max_kept, 42);
        assert!(lat.dealias_mask()[lat.index_of(42, -42)]);
        assert!(!lat.dealias_mask()[lat.index_of(43, 0)]);
    }

    #[test]
    fn dealias_mask_is_symmetric() {
        for n in [8, 12, 16, 64] {
            let lat = make_lattice(n, 3.0).unwrap();
            for i in 0..lat.len() {
                assert_eq!(lat.dealias_mask()[i], lat.dealias_mask()[lat.conjugate_index(i)]);
            }
        }
    }

    #[test]
    fn conjugate_index_negates_mode() {
        let lat = make_lattice(16, 1.0).unwrap();
        for i in 0..lat.len() {
            let (a, b) = lat.mode(i);
            let (c, d) = lat.mode(lat.conjugate_index(i));
            assert_eq!(lat.index_of(-a, -b), lat.index_of(c, d));
        }
    }

    #[test]
    fn fft_round_trip() {
        let lat = make_lattice(16, 1.0).unwrap();
        let orig: Vec<Complex64> = (0..lat.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut buf = orig.clone();
        lat.fft2(&mut buf, false);
        lat.fft2(&mut buf, true);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
