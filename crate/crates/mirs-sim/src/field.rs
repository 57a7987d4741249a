//! Real scalar fields on the periodic space-time lattice, stored row-major
//! with the time axis first.

use mirs_core::error::{Error, Result};

use crate::config::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldTag {
    Zeta,
    Z,
    Zeps,
}

impl std::fmt::Display for FieldTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldTag::Zeta => f.write_str("zeta"),
            FieldTag::Z => f.write_str("Z"),
            FieldTag::Zeps => f.write_str("Zeps"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LatticeField {
    config: SimConfig,
    tag: FieldTag,
    values: Vec<f64>,
}

impl LatticeField {
    pub fn new(config: SimConfig, tag: FieldTag, values: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if values.len() != config.sites() {
            return Err(Error::validation(format!(
                "field carries {} values for a lattice of {} sites",
                values.len(),
                config.sites()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("field contains non-finite values"));
        }
        Ok(LatticeField { config, tag, values })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Empirical mean over all sites; reported alongside every field.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Empirical variance over all sites.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / self.values.len() as f64
    }

    /// One time slice: `grid_x^dsim` consecutive values.
    pub fn time_slice(&self, t: usize) -> &[f64] {
        let slab = self.len() / self.config.grid_t;
        &self.values[t * slab..(t + 1) * slab]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SimConfig {
        let mut cfg = SimConfig::default_lab();
        cfg.grid_t = 4;
        cfg.grid_x = 2;
        cfg
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let cfg = small_config();
        assert!(LatticeField::new(cfg.clone(), FieldTag::Zeta, vec![0.0; 7]).is_err());
        assert!(LatticeField::new(cfg, FieldTag::Zeta, vec![0.0; 8]).is_ok());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let cfg = small_config();
        let mut values = vec![0.0; 8];
        values[3] = f64::NAN;
        assert!(LatticeField::new(cfg, FieldTag::Z, values).is_err());
    }

    #[test]
    fn mean_and_variance() {
        let cfg = small_config();
        let values = vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let field = LatticeField::new(cfg, FieldTag::Z, values).unwrap();
        assert_eq!(field.mean(), 0.0);
        assert_eq!(field.variance(), 1.0);
        assert_eq!(field.time_slice(1), &[1.0, -1.0]);
    }
}
