//! Simulation configuration: lattice geometry, spectral decay, mollifier
//! width, and the seed. The spatial dimension of the lattice is deliberately
//! decoupled from the algebraic dimension: the law identities under test
//! (spectral slope, centredness, variance scaling) are dimension-agnostic,
//! and a small lattice dimension keeps runs desk-scale. Every report header
//! repeats this note.

use mirs_core::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SimConfig {
    /// Spatial lattice dimension, 1 to 3; independent of the algebraic d.
    pub dsim: u32,
    /// Spectral decay parameter, 0 < s < (dsim + 2)/2.
    pub s: f64,
    /// Time extent of the periodic lattice (even).
    pub grid_t: usize,
    /// Spatial extent per axis (even).
    pub grid_x: usize,
    /// Time spacing; held proportional to dx^2 across scaling studies.
    pub dt: f64,
    /// Space spacing.
    pub dx: f64,
    /// Width of the smooth spectral mollifier rho-hat.
    pub cutoff_rho: f64,
    /// Seed for the per-mode Gaussian draws.
    pub seed: u64,
}

impl SimConfig {
    /// Desk-scale default: one spatial dimension, 256 x 256, s = 1/4,
    /// parabolic spacings dt = dx^2.
    pub fn default_lab() -> Self {
        let dx = 1.0 / 64.0;
        SimConfig {
            dsim: 1,
            s: 0.25,
            grid_t: 256,
            grid_x: 256,
            dt: dx * dx,
            dx,
            cutoff_rho: 0.02,
            seed: 7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dsim) {
            return Err(Error::validation(format!(
                "lattice dimension {} outside 1..=3",
                self.dsim
            )));
        }
        let parabolic_dim = (self.dsim + 2) as f64;
        if !(self.s > 0.0 && self.s < parabolic_dim / 2.0) {
            return Err(Error::validation(format!(
                "decay parameter s = {} outside (0, {})",
                self.s,
                parabolic_dim / 2.0
            )));
        }
        for (name, n) in [("gridT", self.grid_t), ("gridX", self.grid_x)] {
            if n < 2 || n % 2 != 0 {
                return Err(Error::validation(format!(
                    "{name} = {n} must be even and at least 2"
                )));
            }
        }
        for (name, v) in [("dt", self.dt), ("dx", self.dx), ("cutoffRho", self.cutoff_rho)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Parabolic dimension of the lattice space-time, dsim + 2.
    pub fn parabolic_dim(&self) -> u32 {
        self.dsim + 2
    }

    /// Lattice shape, time axis first.
    pub fn shape(&self) -> Vec<usize> {
        let mut shape = vec![self.grid_t];
        shape.extend(std::iter::repeat(self.grid_x).take(self.dsim as usize));
        shape
    }

    /// Total number of lattice sites.
    pub fn sites(&self) -> usize {
        self.shape().iter().product()
    }

    /// Whether two configs describe the same lattice and spectrum, ignoring
    /// the seed; fields from different seeds of one ensemble satisfy this.
    pub fn same_lattice(&self, other: &SimConfig) -> bool {
        let key = |c: &SimConfig| {
            (
                c.dsim, c.s, c.grid_t, c.grid_x, c.dt, c.dx, c.cutoff_rho,
            )
        };
        key(self) == key(other)
    }

    /// The decoupling note embedded in every report.
    pub fn dimension_note(&self) -> String {
        format!(
            "lattice dimension dsim = {} is decoupled from the algebraic dimension; \
             the identities tested here are dimension-agnostic",
            self.dsim
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lab_validates() {
        assert!(SimConfig::default_lab().validate().is_ok());
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let mut cfg = SimConfig::default_lab();
        cfg.s = 1.6; // (dsim+2)/2 = 1.5
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default_lab();
        cfg.grid_t = 255;
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default_lab();
        cfg.dsim = 4;
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default_lab();
        cfg.dt = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn json_round_trip_uses_camel_case() {
        let cfg = SimConfig::default_lab();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"gridT\":256"));
        assert!(text.contains("\"cutoffRho\""));
        let back: SimConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn shape_and_sites() {
        let mut cfg = SimConfig::default_lab();
        cfg.dsim = 2;
        cfg.grid_x = 8;
        cfg.grid_t = 4;
        assert_eq!(cfg.shape(), vec![4, 8, 8]);
        assert_eq!(cfg.sites(), 256);
    }
}
