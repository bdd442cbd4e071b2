//! Reproducible random and deterministic field generators. Every generated
//! field is real, mean-zero and supported inside the dealiasing mask.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};
use crate::field::SpectralField;
use crate::lattice::FrequencyLattice;
use crate::norms::NormKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldGenerator {
    Zero,
    /// `cos(j·x)` on the lattice, times `amplitude`.
    SingleMode { j1: i64, j2: i64, amplitude: f64 },
    /// White noise shaped so that `|θ̂(ξ)| ~ |ξ|^{-slope}`.
    GaussianRandomField { slope: f64 },
    /// Random amplitudes and phases on a fixed list of modes.
    MultiMode { modes: Vec<(i64, i64)> },
    /// One random-phase shell per dyadic band `2^q ≤ |j| < 2^{q+1}`, shell
    /// amplitude `U(0,1)·2^{-decay·q}`.
    DyadicBumps { decay: f64 },
}

impl FieldGenerator {
    pub fn generate(&self, lattice: &Arc<FrequencyLattice>, rng: &mut ChaCha8Rng) -> SpectralField {
        let n = lattice.n();
        let n2 = (n * n) as f64;
        match self {
            FieldGenerator::Zero => SpectralField::zeros(lattice),
            FieldGenerator::SingleMode { j1, j2, amplitude } => {
                let mut c = vec![Complex64::new(0.0, 0.0); lattice.len()];
                c[lattice.index_of(*j1, *j2)] += amplitude * n2 / 2.0;
                c[lattice.index_of(-*j1, -*j2)] += amplitude * n2 / 2.0;
                SpectralField::from_coeffs(lattice, c).expect("sized").dealiased()
            }
            FieldGenerator::GaussianRandomField { slope } => {
                let noise: Vec<f64> = (0..lattice.len()).map(|_| rng.sample(StandardNormal)).collect();
                let white = SpectralField::forward_transform(lattice, &noise).expect("sized");
                let m = lattice.modulus();
                let mask = lattice.dealias_mask();
                white.map_real_multiplier(|i| {
                    if i == 0 || !mask[i] {
                        0.0
                    } else {
                        (m[i] / lattice.k_min()).powf(-slope)
                    }
                })
            }
            FieldGenerator::MultiMode { modes } => {
                let mut c = vec![Complex64::new(0.0, 0.0); lattice.len()];
                for &(j1, j2) in modes {
                    let amp: f64 = rng.sample(StandardNormal);
                    let phase = rng.random::<f64>() * std::f64::consts::TAU;
                    let z = Complex64::from_polar(amp * n2 / 2.0, phase);
                    c[lattice.index_of(j1, j2)] += z;
                    c[lattice.index_of(-j1, -j2)] += z.conj();
                }
                SpectralField::from_coeffs(lattice, c).expect("sized").dealiased()
            }
            FieldGenerator::DyadicBumps { decay } => {
                let mut c = vec![Complex64::new(0.0, 0.0); lattice.len()];
                let jmax = (n as f64 / 3.0).ceil() as i64;
                let mut q = 0;
                while (1i64 << q) < jmax {
                    let shell_amp = rng.random::<f64>() * 2f64.powf(-decay * q as f64);
                    let (lo, hi) = ((1i64 << q) as f64, (1i64 << (q + 1)) as f64);
                    let members: Vec<usize> = (0..lattice.len())
                        .filter(|&i| {
                            let (a, b) = lattice.mode(i);
                            let r = ((a * a + b * b) as f64).sqrt();
                            r >= lo && r < hi && lattice.dealias_mask()[i]
                        })
                        .collect();
                    let per = shell_amp * n2 / (members.len().max(1) as f64).sqrt();
                    for i in members {
                        let phase = rng.random::<f64>() * std::f64::consts::TAU;
                        c[i] += Complex64::from_polar(per, phase);
                    }
                    q += 1;
                }
                SpectralField::from_coeffs(lattice, c).expect("sized").dealiased()
            }
        }
    }
}

/// Overall size of generated initial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Amplitude {
    /// Keep the generator's natural scale.
    Raw,
    /// Rescale so that `‖θ⁰‖_{H^{2-2α}}` equals `value`.
    Absolute { value: f64 },
    /// Rescale so that `‖θ⁰‖_{H^{2-2α}} = fraction · eps0`.
    RelativeToEps0 { fraction: f64 },
}

/// Initial data description: a generator plus a target amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub generator: FieldGenerator,
    #[serde(default = "default_amplitude")]
    pub amplitude: Amplitude,
}

fn default_amplitude() -> Amplitude {
    Amplitude::Raw
}

impl InitialData {
    pub fn build(&self, lattice: &Arc<FrequencyLattice>, alpha: f64, eps0: f64, seed: u64) -> Result<SpectralField> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = self.generator.generate(lattice, &mut rng);
        let target = match self.amplitude {
            Amplitude::Raw => return Ok(f),
            Amplitude::Absolute { value } => value,
            Amplitude::RelativeToEps0 { fraction } => fraction * eps0,
        };
        normalize_to(&f, NormKind::InhomSobolev(2.0 - 2.0 * alpha), target)
    }
}

/// Rescales `f` so that `kind` evaluates to `target`. The zero field is
/// returned as-is (any target but 0 is then an error).
pub fn normalize_to(f: &SpectralField, kind: NormKind, target: f64) -> Result<SpectralField> {
    if !(target >= 0.0 && target.is_finite()) {
        return Err(SqgError::InvalidParameter(format!("target norm must be >= 0, got {target}")));
    }
    let current = kind.eval(f)?;
    if current == 0.0 {
        if target == 0.0 {
            return Ok(f.clone());
        }
        return Err(SqgError::Degenerate("cannot rescale the zero field to a nonzero norm".into()));
    }
    Ok(f.scaled(target / current))
}

/// Deterministic per-sample generator: stream `index` of the ChaCha8 family
/// seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_lattice;
    use crate::norms::inhom_norm;

    #[test]
    fn generated_fields_are_admissible() {
        let lat = make_lattice(32, 2.0 * std::f64::consts::PI).unwrap();
        let gens = [
            FieldGenerator::GaussianRandomField { slope: 2.0 },
            FieldGenerator::MultiMode { modes: vec![(1, 0), (2, 3), (-4, 1)] },
            FieldGenerator::DyadicBumps { decay: 1.0 },
            FieldGenerator::SingleMode { j1: 2, j2: 1, amplitude: 0.3 },
        ];
        for g in gens {
            let f = g.generate(&lat, &mut sample_rng(7, 0));
            assert!(!f.is_zero(), "{g:?}");
            assert!(f.is_dealiased());
            assert_eq!(f.hermitian_defect(), 0.0);
            assert_eq!(f.coeffs()[0], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn same_seed_same_field() {
        let lat = make_lattice(16, 1.0).unwrap();
        let g = FieldGenerator::GaussianRandomField { slope: 3.0 };
        let a = g.generate(&lat, &mut sample_rng(11, 3));
        let b = g.generate(&lat, &mut sample_rng(11, 3));
        let c = g.generate(&lat, &mut sample_rng(11, 4));
        assert_eq!(a.coeffs(), b.coeffs());
        assert_ne!(a.coeffs(), c.coeffs());
    }

    #[test]
    fn amplitude_targets() {
        let lat = make_lattice(16, 2.0 * std::f64::consts::PI).unwrap();
        let init = InitialData {
            generator: FieldGenerator::GaussianRandomField { slope: 3.0 },
            amplitude: Amplitude::RelativeToEps0 { fraction: 0.1 },
        };
        let f = init.build(&lat, 0.25, 2.0, 5).unwrap();
        assert!((inhom_norm(&f, 1.5).unwrap() - 0.2).abs() < 1e-12);
        let zero = InitialData { generator: FieldGenerator::Zero, amplitude: Amplitude::Absolute { value: 1.0 } };
        assert!(zero.build(&lat, 0.25, 2.0, 5).is_err());
    }
}
