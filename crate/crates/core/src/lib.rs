//! Pseudo-spectral solver for the dissipative surface quasi-geostrophic
//! equation on a periodic box, with numerical checks of the estimates that
//! govern its small-data behaviour.
//!
//! ```
//! use sqg_core::{make_lattice, SpectralField, SolverConfig, simulate};
//!
//! let lat = make_lattice(32, std::f64::consts::TAU).unwrap();
//! let theta0 = SpectralField::from_fn(&lat, |x, y| 0.01 * (x.cos() + (x + y).sin()));
//! let cfg = SolverConfig::new(0.25, 0.01, 0.1, 32, std::f64::consts::TAU, 1.0);
//! let traj = simulate(&theta0, &cfg).unwrap();
//! assert!(traj.series.last().unwrap().l2 < traj.series.first().unwrap().l2);
//! ```

pub mod decay;
pub mod error;
pub mod field;
pub mod init;
pub mod lab;
pub mod lattice;
pub mod norms;
pub mod operators;
pub mod solver;

pub use error::{Result, SqgError};
pub use field::SpectralField;
pub use init::{Amplitude, FieldGenerator, InitialData};
pub use lattice::{make_lattice, FrequencyLattice};
pub use norms::{hom_norm, inhom_norm, l2_norm, scalar_product, NormKind};
pub use operators::{
    dealiased_product, exact_product, fractional_power, gradient, high_pass, low_pass, rescale_field,
    riesz_velocity, VelocityField,
};
pub use solver::{simulate, step, SolverConfig, TrajectoryRecord};
