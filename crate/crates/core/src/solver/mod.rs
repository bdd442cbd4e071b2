//! Time evolution of `∂_tθ + |D|^{2α}θ + u_θ·∇θ = 0` and its energy
//! bookkeeping.

mod config;
pub mod io;
mod ledger;
mod nonlinear;
mod stepper;
mod trajectory;

pub use config::SolverConfig;
pub use ledger::{blowup_monitor, energy_ledger, smallness_gate, BlowupMonitor, GateDecision, LedgerCheck, LedgerReport};
pub use nonlinear::{advection_term, nonlinear_term};
pub use stepper::{step, Stepper};
pub use trajectory::{
    simulate, simulate_observed, NormSample, NormSeries, SampleObserver, Snapshot, TrajectoryRecord,
};
