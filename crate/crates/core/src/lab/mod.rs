//! Randomized checks of the standalone inequalities behind the solver's
//! estimates, and the fitted constants they produce.

mod elementary;
mod ensemble;
mod estimates;
mod kernel;

pub use elementary::{check_elementary, check_elementary_vector};
pub use ensemble::{
    default_eps0, default_slope, estimate_constant, gate_constant, product_constant, EnsembleSpec, LatticeEcho,
    LemmaId, LemmaParams, LemmaReport, FIT_N, FIT_SAMPLES,
};
pub use estimates::{
    check_bilinear, check_product_law, check_trilinear, ratio, transport_pairing, BilinearCheck, ProductLawCheck, TrilinearCheck,
};
pub use kernel::check_exp_kernel;
