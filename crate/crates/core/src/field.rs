//! Real scalar fields stored as Fourier coefficients.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SqgError};
use crate::lattice::{signed_mode, FrequencyLattice};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A real, mean-zero field on a periodic box, held as its coefficients.
///
/// Every constructor projects onto the admissible subspace: the `(0,0)`
/// coefficient is zero and `c(-j) = conj(c(j))` holds exactly.
#[derive(Clone, Debug)]
pub struct SpectralField {
    lattice: Arc<FrequencyLattice>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(lattice: &Arc<FrequencyLattice>) -> Self {
        Self {
            lattice: lattice.clone(),
            coeffs: vec![ZERO; lattice.len()],
        }
    }

    /// Wraps raw coefficients, keeping only the real mean-zero part.
    pub fn from_coeffs(lattice: &Arc<FrequencyLattice>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(SqgError::ShapeMismatch {
                expected: lattice.len(),
                got: coeffs.len(),
            });
        }
        let mut f = Self {
            lattice: lattice.clone(),
            coeffs,
        };
        f.project();
        Ok(f)
    }

    /// Internal constructor for coefficient arrays already known to be
    /// admissible (outputs of symmetric multipliers on admissible inputs).
    pub(crate) fn from_raw(lattice: &Arc<FrequencyLattice>, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), lattice.len());
        Self {
            lattice: lattice.clone(),
            coeffs,
        }
    }

    /// Forward transform of physical samples (row-major, `x1` slow).
    ///
    /// The spatial mean is projected out: homogeneous norms and the Riesz
    /// symbols are undefined on the zero mode, and the dynamics conserve it.
    pub fn forward_transform(lattice: &Arc<FrequencyLattice>, samples: &[f64]) -> Result<Self> {
        if samples.len() != lattice.len() {
            return Err(SqgError::ShapeMismatch {
                expected: lattice.len(),
                got: samples.len(),
            });
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        lattice.fft2(&mut buf, false);
        Self::from_coeffs(lattice, buf)
    }

    /// Samples a function of `(x1, x2)` on the physical grid and transforms it.
    pub fn from_fn(lattice: &Arc<FrequencyLattice>, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = lattice.n();
        let dx = lattice.dx();
        let samples: Vec<f64> = (0..n * n)
            .map(|i| f((i / n) as f64 * dx, (i % n) as f64 * dx))
            .collect();
        Self::forward_transform(lattice, &samples).expect("sample count matches lattice")
    }

    /// Physical samples, row-major with `x1` slow.
    pub fn inverse_transform(&self) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        self.lattice.fft2(&mut buf, true);
        buf.into_iter().map(|c| c.re).collect()
    }

    pub fn lattice(&self) -> &Arc<FrequencyLattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of integer mode `(j1, j2)`.
    pub fn coeff(&self, j1: i64, j2: i64) -> Complex64 {
        self.coeffs[self.lattice.index_of(j1, j2)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn same_lattice(&self, other: &SpectralField) -> bool {
        self.lattice.same_as(&other.lattice)
    }

    pub(crate) fn check_same(&self, other: &SpectralField) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(SqgError::LatticeMismatch)
        }
    }

    /// Largest `|c(-j) - conj(c(j))|` over all modes.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[self.lattice.conjugate_index(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Multiplies each coefficient by a real, even symbol `m(|ξ|)`-like
    /// function of the storage index.
    pub fn map_real_multiplier(&self, m: impl Fn(usize) -> f64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * m(i)).collect();
        Self::from_raw(&self.lattice, coeffs)
    }

    /// Zeroes modes outside the 2/3-rule mask.
    pub fn dealiased(&self) -> Self {
        let mask = self.lattice.dealias_mask();
        self.map_real_multiplier(|i| if mask[i] { 1.0 } else { 0.0 })
    }

    pub fn is_dealiased(&self) -> bool {
        let mask = self.lattice.dealias_mask();
        self.coeffs
            .iter()
            .zip(mask)
            .all(|(c, &keep)| keep || (c.re == 0.0 && c.im == 0.0))
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_real_multiplier(|_| a)
    }

    /// Moves the field onto another lattice with the same box, zero-padding
    /// or truncating in spectral space. A Nyquist coefficient being padded is
    /// split evenly between `±n/2` so the result stays real.
    pub fn resample(&self, target: &Arc<FrequencyLattice>) -> Result<Self> {
        if target.box_len() != self.lattice.box_len() {
            return Err(SqgError::LatticeMismatch);
        }
        let (n_src, n_dst) = (self.lattice.n(), target.n());
        let scale = (n_dst * n_dst) as f64 / (n_src * n_src) as f64;
        let mut out = vec![ZERO; target.len()];
        let half_src = (n_src / 2) as i64;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let (j1, j2) = (signed_mode(idx / n_src, n_src), signed_mode(idx % n_src, n_src));
            if n_dst > n_src {
                // split Nyquist entries across both signs on the finer grid
                let s1: &[i64] = if j1 == -half_src { &[-half_src, half_src] } else { &[j1] };
                let s2: &[i64] = if j2 == -half_src { &[-half_src, half_src] } else { &[j2] };
                let share = scale / (s1.len() * s2.len()) as f64;
                for &a in s1 {
                    for &b in s2 {
                        out[target.index_of(a, b)] += c * share;
                    }
                }
            } else {
                let half_dst = (n_dst / 2) as i64;
                if j1.abs() < half_dst && j2.abs() < half_dst {
                    out[target.index_of(j1, j2)] += c * scale;
                }
            }
        }
        Self::from_coeffs(target, out)
    }

    fn project(&mut self) {
        self.coeffs[0] = ZERO;
        let lat = self.lattice.clone();
        for i in 0..self.coeffs.len() {
            let k = lat.conjugate_index(i);
            if k < i {
                continue;
            }
            if k == i {
                self.coeffs[i].im = 0.0;
            } else {
                let avg = (self.coeffs[i] + self.coeffs[k].conj()) * 0.5;
                self.coeffs[i] = avg;
                self.coeffs[k] = avg.conj();
            }
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(self.same_lattice(other), "fields live on different lattices");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Self::from_raw(&self.lattice, coeffs)
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}
