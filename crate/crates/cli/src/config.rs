//! TOML run configuration.
//!
//! Every key is optional; an empty file describes a 64² zero-data run.
//!
//! ```toml
//! [solver]
//! alpha = 0.25
//! dt = 0.01
//! t_end = 20.0
//! n = 128
//! box_len = 6.283185307179586
//! output_every = 1
//! eps0 = 80.0            # omit to use the fitted default
//! seed = 42
//! cfl = 0.5
//! adaptive_dt = true
//! nonlinear = true
//! snapshot_every = 0
//! blowup_factor = 1e6
//!
//! [initial]
//! generator = { kind = "gaussian_random_field", slope = 4.0 }
//! amplitude = { kind = "relative_to_eps0", fraction = 0.1 }
//!
//! [checks]
//! l2_ledger = true
//! h_ledger = true
//! blowup_monitor = true
//! tol_l2 = 1e-4
//! tol_h = 1e-3
//! write_snapshots = false
//!
//! [decay]
//! terminal_target = 0.01
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sqg_core::decay::DecayOptions;
use sqg_core::lab::default_eps0;
use sqg_core::{Amplitude, FieldGenerator, InitialData, SolverConfig};

use crate::failure::Failure;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverSection,
    pub initial: InitialSection,
    pub checks: Checks,
    pub decay: DecayOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub alpha: f64,
    pub dt: f64,
    pub t_end: f64,
    pub n: usize,
    pub box_len: f64,
    pub output_every: usize,
    pub eps0: Option<f64>,
    pub seed: u64,
    pub cfl: f64,
    pub adaptive_dt: bool,
    pub nonlinear: bool,
    pub snapshot_every: usize,
    pub blowup_factor: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let base = SolverConfig::new(0.25, 0.01, 1.0, 64, std::f64::consts::TAU, 1.0);
        SolverSection {
            alpha: base.alpha,
            dt: base.dt,
            t_end: base.t_end,
            n: base.n,
            box_len: base.box_len,
            output_every: base.output_every,
            eps0: None,
            seed: base.seed,
            cfl: base.cfl,
            adaptive_dt: base.adaptive_dt,
            nonlinear: base.nonlinear,
            snapshot_every: base.snapshot_every,
            blowup_factor: base.blowup_factor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub generator: FieldGenerator,
    pub amplitude: Amplitude,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection { generator: FieldGenerator::Zero, amplitude: Amplitude::Raw }
    }
}

impl InitialSection {
    pub fn data(&self) -> InitialData {
        InitialData { generator: self.generator.clone(), amplitude: self.amplitude }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    pub l2_ledger: bool,
    /// Only enforced when the smallness gate passes.
    pub h_ledger: bool,
    pub blowup_monitor: bool,
    pub tol_l2: f64,
    pub tol_h: f64,
    pub write_snapshots: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            l2_ledger: true,
            h_ledger: true,
            blowup_monitor: true,
            tol_l2: 1e-4,
            tol_h: 1e-3,
            write_snapshots: false,
        }
    }
}

/// Command-line values that replace config entries.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub box_len: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output_every: Option<usize>,
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Abort instead of shrinking dt when the advective limit is exceeded.
    #[arg(long)]
    pub fixed_dt: bool,
    /// Integrate the linear dissipative flow only.
    #[arg(long)]
    pub linear: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        let s = &mut self.solver;
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = o.$f { s.$f = v; })* };
        }
        set!(alpha, dt, t_end, n, box_len, seed, output_every, snapshot_every);
        if o.eps0.is_some() {
            s.eps0 = o.eps0;
        }
        if o.fixed_dt {
            s.adaptive_dt = false;
        }
        if o.linear {
            s.nonlinear = false;
        }
    }

    /// Solver config with `eps0` filled in, fitting it when absent.
    pub fn solver_config(&self) -> Result<SolverConfig, Failure> {
        let s = &self.solver;
        if !(s.alpha > 0.0 && s.alpha < 0.5) {
            return Err(Failure::Usage(format!("alpha must lie in (0, 1/2), got {}", s.alpha)));
        }
        let eps0 = match s.eps0 {
            Some(e) => e,
            None => default_eps0(s.alpha, 0).map_err(|e| Failure::Usage(e.to_string()))?,
        };
        let cfg = SolverConfig {
            alpha: s.alpha,
            dt: s.dt,
            t_end: s.t_end,
            n: s.n,
            box_len: s.box_len,
            output_every: s.output_every,
            eps0,
            seed: s.seed,
            cfl: s.cfl,
            adaptive_dt: s.adaptive_dt,
            nonlinear: s.nonlinear,
            snapshot_every: s.snapshot_every,
            blowup_factor: s.blowup_factor,
        };
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        let c: RunConfig = toml::from_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.solver.n, 64);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("[solver]\nalpah = 0.2").is_err());
    }

    #[test]
    fn generator_tables_parse() {
        let c: RunConfig = toml::from_str(
            "[initial]\ngenerator = { kind = \"single_mode\", j1 = 1, j2 = 0, amplitude = 0.1 }\n\
             amplitude = { kind = \"absolute\", value = 0.5 }",
        )
        .unwrap();
        assert_eq!(c.initial.generator, FieldGenerator::SingleMode { j1: 1, j2: 0, amplitude: 0.1 });
        assert_eq!(c.initial.amplitude, Amplitude::Absolute { value: 0.5 });
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::default();
        c.apply(&Overrides { alpha: Some(0.1), eps0: Some(3.0), linear: true, ..Default::default() });
        assert_eq!(c.solver.alpha, 0.1);
        assert_eq!(c.solver.eps0, Some(3.0));
        assert!(!c.solver.nonlinear);
        let cfg = c.solver_config().unwrap();
        assert_eq!(cfg.eps0, 3.0);
    }
}
