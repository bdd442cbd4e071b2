//! Brute-force references. Everything here works on explicit mode maps in
//! Fourier-series amplitude units and never touches an FFT.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use sqg_core::{FrequencyLattice, SpectralField};

pub type Modes = BTreeMap<(i64, i64), Complex64>;

/// Fourier-series amplitudes `a_j` with `f(x) = Σ a_j e^{i k0 j·x}`.
pub fn amps(f: &SpectralField) -> Modes {
    let lat = f.lattice();
    let n2 = (lat.n() * lat.n()) as f64;
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (lat.mode(i), c / n2))
        .collect()
}

pub fn k0(lat: &FrequencyLattice) -> f64 {
    2.0 * PI / lat.box_len()
}

pub fn conv(a: &Modes, b: &Modes) -> Modes {
    let mut out = Modes::new();
    for (&(p1, p2), x) in a {
        for (&(q1, q2), y) in b {
            *out.entry((p1 + q1, p2 + q2)).or_default() += x * y;
        }
    }
    out
}

pub fn add(a: &Modes, b: &Modes) -> Modes {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(*k).or_default() += v;
    }
    out
}

pub fn multiplier(a: &Modes, m: impl Fn(f64, f64) -> Complex64) -> Modes {
    a.iter().map(|(&(j1, j2), v)| ((j1, j2), v * m(j1 as f64, j2 as f64))).collect()
}

/// `(∂1 f, ∂2 f)`
pub fn grad(a: &Modes, k0: f64) -> (Modes, Modes) {
    (
        multiplier(a, |j1, _| Complex64::new(0.0, k0 * j1)),
        multiplier(a, |_, j2| Complex64::new(0.0, k0 * j2)),
    )
}

/// `u = (-R2 θ, R1 θ)` with `R_i = ∂_i |D|^{-1}`.
pub fn riesz(a: &Modes) -> (Modes, Modes) {
    let r = |j1: f64, j2: f64, c: f64| {
        let m = j1.hypot(j2);
        if m == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, c / m)
        }
    };
    (multiplier(a, |j1, j2| r(j1, j2, -j2)), multiplier(a, |j1, j2| r(j1, j2, j1)))
}

/// Keeps modes with `3|j_i| < n` on both axes.
pub fn mask(a: &Modes, n: usize) -> Modes {
    a.iter()
        .filter(|(&(j1, j2), _)| 3 * j1.unsigned_abs() < n as u64 && 3 * j2.unsigned_abs() < n as u64)
        .map(|(k, v)| (*k, *v))
        .collect()
}

/// `u·∇θ` with the dealiasing mask applied.
pub fn advection(u: &(Modes, Modes), theta: &Modes, k0: f64, n: usize) -> Modes {
    let (d1, d2) = grad(theta, k0);
    mask(&add(&conv(&u.0, &d1), &conv(&u.1, &d2)), n)
}

pub fn nonlinear(theta: &Modes, k0: f64, n: usize) -> Modes {
    advection(&riesz(theta), theta, k0, n)
}

/// `‖f‖²_{Ḣ^s}` over one period, zero mode excluded.
pub fn hom_norm_sq(a: &Modes, s: f64, k0: f64, box_len: f64) -> f64 {
    a.iter()
        .filter(|(&k, _)| k != (0, 0))
        .map(|(&(j1, j2), v)| (k0 * (j1 as f64).hypot(j2 as f64)).powf(2.0 * s) * v.norm_sqr())
        .sum::<f64>()
        * box_len
        * box_len
}

/// Physical samples by direct summation.
pub fn synth(a: &Modes, n: usize, box_len: f64) -> Vec<f64> {
    let k0 = 2.0 * PI / box_len;
    let dx = box_len / n as f64;
    let mut out = vec![0.0; n * n];
    for i1 in 0..n {
        for i2 in 0..n {
            let (x1, x2) = (i1 as f64 * dx, i2 as f64 * dx);
            out[i1 * n + i2] = a
                .iter()
                .map(|(&(j1, j2), v)| (v * Complex64::from_polar(1.0, k0 * (j1 as f64 * x1 + j2 as f64 * x2))).re)
                .sum();
        }
    }
    out
}

/// `⟨f, g⟩_{Ḣ^s}` as a physical-space Riemann sum of `|D|^s f · |D|^s g`;
/// exact for trigonometric polynomials below the Nyquist band.
pub fn pairing(a: &Modes, b: &Modes, s: f64, n: usize, box_len: f64) -> f64 {
    let k0 = 2.0 * PI / box_len;
    let lift = |m: &Modes| {
        let m: Modes = m.iter().filter(|(&k, _)| k != (0, 0)).map(|(k, v)| (*k, *v)).collect();
        multiplier(&m, |j1, j2| Complex64::new((k0 * j1.hypot(j2)).powf(s), 0.0))
    };
    let (fa, fb) = (synth(&lift(a), n, box_len), synth(&lift(b), n, box_len));
    let dx = box_len / n as f64;
    fa.iter().zip(&fb).map(|(x, y)| x * y).sum::<f64>() * dx * dx
}

/// `max |field - oracle| / max |oracle|` over all modes of either.
pub fn rel_diff(field: &SpectralField, oracle: &Modes) -> f64 {
    let got = amps(field);
    let scale = oracle.values().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (k, v) in oracle {
        worst = worst.max((got.get(k).copied().unwrap_or_default() - v).norm());
    }
    for (k, v) in &got {
        if !oracle.contains_key(k) {
            worst = worst.max(v.norm());
        }
    }
    worst / scale
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
