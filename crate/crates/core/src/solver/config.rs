use serde::{Deserialize, Serialize};

use crate::error::{Result, SqgError};
use crate::lattice::make_lattice;

/// Parameters of one time integration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Dissipation exponent, `0 < alpha < 1/2`.
    pub alpha: f64,
    /// Requested (maximum) time step.
    pub dt: f64,
    pub t_end: f64,
    pub n: usize,
    pub box_len: f64,
    /// Steps between norm samples.
    #[serde(default = "one")]
    pub output_every: usize,
    /// Smallness threshold on `‖θ⁰‖_{H^{2-2α}}`.
    pub eps0: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Shrink `dt` to the advective limit instead of aborting.
    #[serde(default = "yes")]
    pub adaptive_dt: bool,
    /// Disable to integrate the linear dissipative flow only.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Samples between stored snapshots; 0 stores none. The final sample is
    /// always stored when snapshots are enabled.
    #[serde(default)]
    pub snapshot_every: usize,
    /// Abort once `‖θ‖_{H^{2-2α}}` exceeds this multiple of its initial value.
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
}

fn one() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn default_cfl() -> f64 {
    0.5
}
fn default_blowup() -> f64 {
    1e6
}

impl SolverConfig {
    /// Config with the documented defaults for everything but the essentials.
    pub fn new(alpha: f64, dt: f64, t_end: f64, n: usize, box_len: f64, eps0: f64) -> Self {
        Self {
            alpha,
            dt,
            t_end,
            n,
            box_len,
            output_every: 1,
            eps0,
            seed: 0,
            cfl: default_cfl(),
            adaptive_dt: true,
            nonlinear: true,
            snapshot_every: 0,
            blowup_factor: default_blowup(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SqgError::InvalidConfig(m));
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return bad(format!("alpha must lie in (0, 1/2), got {}", self.alpha));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return bad(format!("t_end must be >= dt, got {}", self.t_end));
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return bad(format!("eps0 must be positive, got {}", self.eps0));
        }
        if self.output_every == 0 {
            return bad("output_every must be >= 1".into());
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if !(self.blowup_factor > 1.0) {
            return bad(format!("blowup_factor must exceed 1, got {}", self.blowup_factor));
        }
        make_lattice(self.n, self.box_len).map_err(|e| SqgError::InvalidConfig(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = SolverConfig::new(0.25, 0.01, 1.0, 16, 6.0, 1.0);
        assert!(ok.validate().is_ok());
        for broken in [
            SolverConfig { alpha: 0.5, ..ok.clone() },
            SolverConfig { alpha: 0.0, ..ok.clone() },
            SolverConfig { dt: 0.0, ..ok.clone() },
            SolverConfig { t_end: 0.001, ..ok.clone() },
            SolverConfig { eps0: 0.0, ..ok.clone() },
            SolverConfig { n: 9, ..ok.clone() },
            SolverConfig { output_every: 0, ..ok.clone() },
        ] {
            assert!(broken.validate().is_err(), "{broken:?}");
        }
    }
}
