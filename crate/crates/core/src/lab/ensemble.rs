//! Ensemble sweeps that turn the pointwise checks into constant estimates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::elementary::check_elementary;
use super::estimates::{check_bilinear, check_product_law, check_trilinear, ratio};
use super::kernel::check_exp_kernel;
use crate::error::{Result, SqgError};
use crate::init::{sample_rng, FieldGenerator};
use crate::lattice::{make_lattice, FrequencyLattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    #[serde(rename = "2.1-productlaw-two-term")]
    ProductLawTwoTerm,
    #[serde(rename = "2.2-productlaw")]
    ProductLaw,
    #[serde(rename = "2.3-trilinear")]
    Trilinear,
    #[serde(rename = "2.4-bilinear")]
    Bilinear,
    #[serde(rename = "2.5-expkernel")]
    ExpKernel,
    #[serde(rename = "elementary")]
    Elementary,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::ProductLawTwoTerm,
        LemmaId::ProductLaw,
        LemmaId::Trilinear,
        LemmaId::Bilinear,
        LemmaId::ExpKernel,
        LemmaId::Elementary,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaId::ProductLawTwoTerm => "2.1-productlaw-two-term",
            LemmaId::ProductLaw => "2.2-productlaw",
            LemmaId::Trilinear => "2.3-trilinear",
            LemmaId::Bilinear => "2.4-bilinear",
            LemmaId::ExpKernel => "2.5-expkernel",
            LemmaId::Elementary => "elementary",
        }
    }

    /// Whether the check runs on random fields (as opposed to scalars or
    /// sampled functions of time).
    pub fn uses_fields(&self) -> bool {
        !matches!(self, LemmaId::ExpKernel | LemmaId::Elementary)
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = SqgError;

    /// Accepts the full id or its numeric prefix (`2.3`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        LemmaId::ALL
            .into_iter()
            .find(|id| {
                let full = id.as_str();
                full == s || full.split('-').next() == Some(s)
            })
            .ok_or_else(|| SqgError::InvalidParameter(format!("unknown lemma id `{s}`")))
    }
}

/// Exponents and tolerances shared by the checks. Each lemma reads only the
/// fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmaParams {
    pub alpha: f64,
    /// Product-law exponents.
    pub s1: f64,
    pub s2: f64,
    /// Trilinear orders, one shape per entry.
    pub sigmas: Vec<f64>,
    /// Relative slack for the scalar and quadrature checks.
    pub tol: f64,
    /// Grid points per sampled `h` in the kernel sweep.
    pub kernel_grid: usize,
}

impl LemmaParams {
    pub fn for_alpha(alpha: f64) -> Self {
        LemmaParams {
            alpha,
            s1: 1.0 - 2.0 * alpha,
            s2: alpha,
            sigmas: vec![1.0, 2.0 - 2.0 * alpha],
            tol: 1e-12,
            kernel_grid: 1001,
        }
    }

    fn echo(&self, which: LemmaId) -> serde_json::Value {
        use serde_json::json;
        match which {
            LemmaId::ProductLawTwoTerm | LemmaId::ProductLaw => json!({"s1": self.s1, "s2": self.s2}),
            LemmaId::Trilinear => json!({"alpha": self.alpha, "sigmas": self.sigmas}),
            LemmaId::Bilinear => json!({"alpha": self.alpha}),
            LemmaId::ExpKernel => json!({"tol": self.tol, "grid": self.kernel_grid}),
            LemmaId::Elementary => json!({"tol": self.tol}),
        }
    }
}

impl Default for LemmaParams {
    fn default() -> Self {
        LemmaParams::for_alpha(0.25)
    }
}

/// Default spectral slope for a field ensemble: steep enough that every norm
/// entering the check converges under refinement.
pub fn default_slope(which: LemmaId, params: &LemmaParams) -> f64 {
    match which {
        LemmaId::ProductLawTwoTerm | LemmaId::ProductLaw => params.s1.max(params.s2) + 2.0,
        LemmaId::Trilinear => params.sigmas.iter().cloned().fold(1.0, f64::max) + params.alpha + 2.0,
        _ => 4.0 - params.alpha,
    }
}

#[derive(Clone, Debug)]
pub struct EnsembleSpec {
    pub count: usize,
    pub generator: FieldGenerator,
    pub seed: u64,
    pub lattice: Arc<FrequencyLattice>,
}

impl EnsembleSpec {
    /// Gaussian random fields with the default slope for `which`.
    pub fn default_for(which: LemmaId, params: &LemmaParams, lattice: &Arc<FrequencyLattice>, count: usize, seed: u64) -> Self {
        EnsembleSpec {
            count,
            generator: FieldGenerator::GaussianRandomField { slope: default_slope(which, params) },
            seed,
            lattice: lattice.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeEcho {
    pub n: usize,
    pub box_len: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: LemmaId,
    pub samples: usize,
    pub max_ratio: f64,
    pub violations: usize,
    pub estimated_constant: f64,
    pub seed: u64,
    pub lattice: LatticeEcho,
    pub params: serde_json::Value,
    /// Every sample had both sides zero, so nothing was tested.
    pub degenerate: bool,
    pub ratios_by_shape: BTreeMap<String, f64>,
}

impl LemmaReport {
    pub fn pass(&self) -> bool {
        self.violations == 0 && self.max_ratio.is_finite()
    }
}

/// Per-sample outcome: one `(lhs, rhs)` pair per shape.
type Outcome = Vec<(f64, f64)>;

fn field_outcome(which: LemmaId, spec: &EnsembleSpec, params: &LemmaParams, index: u64) -> Result<Outcome> {
    let mut rng = sample_rng(spec.seed, index);
    let f = spec.generator.generate(&spec.lattice, &mut rng);
    match which {
        LemmaId::ProductLawTwoTerm | LemmaId::ProductLaw => {
            let g = spec.generator.generate(&spec.lattice, &mut rng);
            let c = check_product_law(&f, &g, params.s1, params.s2)?;
            Ok(match which {
                LemmaId::ProductLawTwoTerm => vec![(c.lhs, c.rhs_two_term)],
                _ => {
                    let one = c.rhs_one_term.ok_or_else(|| {
                        SqgError::InvalidParameter("the one-term product law needs s2 < 1".into())
                    })?;
                    vec![(c.lhs, one)]
                }
            })
        }
        LemmaId::Trilinear => params
            .sigmas
            .iter()
            .map(|&s| check_trilinear(&f, s, params.alpha).map(|c| (c.lhs, c.rhs_without_c)))
            .collect(),
        LemmaId::Bilinear => {
            let theta = spec.generator.generate(&spec.lattice, &mut rng);
            let c = check_bilinear(&f, &theta, params.alpha)?;
            Ok(vec![(c.lhs, c.rhs_mixed), (c.lhs, c.rhs_top)])
        }
        _ => unreachable!("scalar lemmas have no field outcome"),
    }
}

fn elementary_outcome(seed: u64, index: u64) -> Result<Outcome> {
    let mut rng = sample_rng(seed, index);
    // log-uniform magnitudes over six decades, with occasional ties
    let a = 10f64.powf(rng.random_range(-3.0..3.0));
    let c = if rng.random_bool(0.05) { a } else { 10f64.powf(rng.random_range(-3.0..3.0)) };
    let sigma = rng.random_range(1.0..=2.0);
    Ok(vec![check_elementary(a, c, sigma)?])
}

fn kernel_outcome(seed: u64, index: u64, grid: usize) -> Result<Outcome> {
    let mut rng = sample_rng(seed, index);
    let horizon = 5.0 * (1.0 - rng.random::<f64>());
    let sigma = 10.0 * (1.0 - rng.random::<f64>());
    let pieces = rng.random_range(1..=20usize);
    let mut cuts: Vec<f64> = (0..pieces - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let values: Vec<f64> = (0..pieces).map(|_| rng.random::<f64>() * 10f64.powf(rng.random_range(-2.0..2.0))).collect();
    let m = grid.max(2) - 1;
    let h: Vec<f64> = (0..=m)
        .map(|i| {
            let z = i as f64 / m as f64;
            values[cuts.partition_point(|&c| c <= z)]
        })
        .collect();
    Ok(vec![check_exp_kernel(&h, horizon, sigma)?])
}

fn shape_names(which: LemmaId, params: &LemmaParams) -> Vec<String> {
    match which {
        LemmaId::Trilinear => params.sigmas.iter().map(|s| format!("sigma={s}")).collect(),
        LemmaId::Bilinear => vec!["mixed".into(), "top".into()],
        LemmaId::ProductLawTwoTerm => vec!["two_term".into()],
        LemmaId::ProductLaw => vec!["one_term".into()],
        LemmaId::ExpKernel => vec!["kernel".into()],
        LemmaId::Elementary => vec!["scalar".into()],
    }
}

/// Runs `which` over the ensemble and reports the largest observed ratio.
///
/// Field lemmas have no constant to violate, so a violation is a sample
/// whose right side vanishes while the left does not, or a non-finite side.
/// Scalar lemmas carry their constant, so a violation is `lhs > rhs(1+tol)`.
/// Results depend only on the seed: sample `i` draws from stream `i`.
pub fn estimate_constant(spec: &EnsembleSpec, which: LemmaId, params: &LemmaParams) -> Result<LemmaReport> {
    if spec.count < 10 {
        return Err(SqgError::InvalidParameter(format!("ensemble needs at least 10 samples, got {}", spec.count)));
    }
    let outcomes: Vec<Outcome> = (0..spec.count as u64)
        .into_par_iter()
        .map(|i| match which {
            LemmaId::Elementary => elementary_outcome(spec.seed, i),
            LemmaId::ExpKernel => kernel_outcome(spec.seed, i, params.kernel_grid),
            _ => field_outcome(which, spec, params, i),
        })
        .collect::<Result<_>>()?;

    let names = shape_names(which, params);
    let mut by_shape = vec![0.0f64; names.len()];
    let mut violations = 0;
    let mut degenerate = true;
    for sample in &outcomes {
        let mut bad = false;
        for (k, &(lhs, rhs)) in sample.iter().enumerate() {
            if !(lhs.is_finite() && rhs.is_finite()) {
                bad = true;
                continue;
            }
            if rhs > 0.0 || lhs > 0.0 {
                degenerate = false;
            }
            let r = ratio(lhs, rhs);
            if which.uses_fields() {
                bad |= !r.is_finite();
            } else {
                bad |= lhs > rhs * (1.0 + params.tol);
            }
            if r.is_finite() {
                by_shape[k] = by_shape[k].max(r);
            }
        }
        violations += bad as usize;
    }
    let max_ratio = by_shape.iter().cloned().fold(0.0, f64::max);
    Ok(LemmaReport {
        lemma_id: which,
        samples: spec.count,
        max_ratio,
        violations,
        estimated_constant: if degenerate { 0.0 } else { max_ratio },
        seed: spec.seed,
        lattice: LatticeEcho { n: spec.lattice.n(), box_len: spec.lattice.box_len() },
        params: params.echo(which),
        degenerate,
        ratios_by_shape: names.into_iter().zip(by_shape).collect(),
    })
}

/// Lattice and sample count used for the built-in constant fits.
pub const FIT_N: usize = 64;
pub const FIT_SAMPLES: usize = 200;

fn fit(which: LemmaId, params: &LemmaParams, seed: u64) -> Result<f64> {
    let lat = make_lattice(FIT_N, std::f64::consts::TAU)?;
    let spec = EnsembleSpec::default_for(which, params, &lat, FIT_SAMPLES, seed);
    Ok(estimate_constant(&spec, which, params)?.estimated_constant)
}

/// Fitted constant `K` in `|⟨u_θ·∇θ, θ⟩_{H^{2-2α}}| ≤ K‖θ‖_{Ḣ^{2-2α}}‖θ‖²_{Ḣ^{2-α}}`,
/// that is the trilinear estimate at `σ = 2 - 2α` with its `σ2^σ` prefactor
/// folded in. All ratios are scale invariant, so the box length is moot.
pub fn gate_constant(alpha: f64, seed: u64) -> Result<f64> {
    let sigma = 2.0 - 2.0 * alpha;
    let params = LemmaParams { sigmas: vec![sigma], ..LemmaParams::for_alpha(alpha) };
    Ok(fit(LemmaId::Trilinear, &params, seed)? * sigma * 2f64.powf(sigma))
}

/// Smallness threshold derived from [`gate_constant`]: a quarter of the
/// level at which the nonlinear pairing could match the dissipation.
pub fn default_eps0(alpha: f64, seed: u64) -> Result<f64> {
    let k = gate_constant(alpha, seed)?;
    if k > 0.0 {
        Ok(0.25 / k)
    } else {
        Err(SqgError::Degenerate("gate constant fit came out zero".into()))
    }
}

/// Fitted one-term product-law constant for `(s1, s2)`.
pub fn product_constant(s1: f64, s2: f64, seed: u64) -> Result<f64> {
    let params = LemmaParams { s1, s2, ..LemmaParams::default() };
    fit(LemmaId::ProductLaw, &params, seed)
}
