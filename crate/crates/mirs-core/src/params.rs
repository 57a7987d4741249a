//! Global parameters of the index calculus.
//!
//! The regularity exponent is an exact rational stand-in for a generic
//! (irrational) value; every place where that surrogate could collapse two
//! genuinely different exact quantities is guarded dynamically and reported
//! as `NonGenericParameters` instead of being silently absorbed.

use num::{BigRational, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{format_rational, is_integer, rat, rat_int};

/// Parameter pack: spatial dimension `d`, smallest noise slot `kmin` (odd),
/// regularity surrogate `alpha`, discount weight `kappa`, and integrability
/// exponent `pbar` controlling how much slack derivative specs are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureParams {
    d: u32,
    kmin: u32,
    alpha: BigRational,
    kappa: BigRational,
    pbar: BigRational,
}

impl StructureParams {
    /// Validates the full admissibility window:
    /// `-2/(kmin-1) < alpha < 0` (subcriticality), `0 < kappa < min(a, -2*alpha)`
    /// with `a = 2 + (kmin-1)*alpha`, and for `pbar`: `pbar > 2`,
    /// `kmin*alpha + D/pbar > 0`, `alpha - 2 + D/pbar < 0`, where `D = d + 2`.
    pub fn new(
        d: u32,
        kmin: u32,
        alpha: BigRational,
        kappa: BigRational,
        pbar: Option<BigRational>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::validation("spatial dimension must be positive"));
        }
        if kmin < 3 || kmin % 2 == 0 {
            return Err(Error::validation(format!(
                "smallest noise slot must be odd and >= 3, got {kmin}"
            )));
        }
        if !alpha.is_negative() {
            return Err(Error::validation(format!(
                "alpha must be negative, got {}",
                format_rational(&alpha)
            )));
        }
        let lower = rat(-2, (kmin - 1) as i64);
        if alpha <= lower {
            return Err(Error::validation(format!(
                "alpha must exceed {} for subcriticality, got {}",
                format_rational(&lower),
                format_rational(&alpha)
            )));
        }
        let a = rat_int(2) + rat_int((kmin - 1) as i64) * &alpha;
        let kappa_cap = a.clone().min(rat_int(-2) * &alpha);
        if !kappa.is_positive() || kappa >= kappa_cap {
            return Err(Error::validation(format!(
                "kappa must lie in (0, {}), got {}",
                format_rational(&kappa_cap),
                format_rational(&kappa)
            )));
        }
        let big_d = rat_int((d + 2) as i64);
        let pbar = match pbar {
            Some(p) => {
                Self::check_pbar(&p, &alpha, kmin, &big_d)?;
                p
            }
            None => Self::default_pbar(&alpha, kmin, &big_d)?,
        };
        Ok(StructureParams {
            d,
            kmin,
            alpha,
            kappa,
            pbar,
        })
    }

    fn check_pbar(p: &BigRational, alpha: &BigRational, kmin: u32, big_d: &BigRational) -> Result<()> {
        if *p <= rat_int(2) {
            return Err(Error::validation("pbar must exceed 2"));
        }
        let ratio = big_d / p;
        if rat_int(kmin as i64) * alpha + &ratio <= BigRational::zero() {
            return Err(Error::validation(
                "pbar too large: kmin*alpha + D/pbar must be positive",
            ));
        }
        if alpha - rat_int(2) + &ratio >= BigRational::zero() {
            return Err(Error::validation(
                "pbar too small: alpha - 2 + D/pbar must be negative",
            ));
        }
        Ok(())
    }

    /// Smallest rational above 2 with denominator at most 100 that satisfies
    /// both admissibility constraints and keeps `D/pbar` non-integral.
    fn default_pbar(alpha: &BigRational, kmin: u32, big_d: &BigRational) -> Result<BigRational> {
        let mut candidates: Vec<BigRational> = Vec::new();
        // The upper feasibility edge is D/pbar > -kmin*alpha, i.e.
        // pbar < D/(-kmin*alpha); no candidate beyond it can pass.
        let cap = big_d / (rat_int(-(kmin as i64)) * alpha);
        for q in 1..=100i64 {
            let mut p = 2 * q + 1;
            loop {
                let c = rat(p, q);
                if c >= cap {
                    break;
                }
                candidates.push(c);
                p += 1;
            }
        }
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            if Self::check_pbar(&c, alpha, kmin, big_d).is_ok() && !is_integer(&(big_d / &c)) {
                return Ok(c);
            }
        }
        Err(Error::validation(
            "no admissible pbar with denominator <= 100; supply one explicitly",
        ))
    }

    /// Default parameter pack: `d = 3`, `kmin = 3`, `alpha = -11/20`,
    /// `kappa = 1/100`, `pbar` chosen by the documented rule.
    pub fn standard() -> Self {
        StructureParams::new(3, 3, rat(-11, 20), rat(1, 100), None)
            .expect("default parameters are admissible")
    }

    /// Same defaults with a different regularity surrogate.
    pub fn standard_with_alpha(alpha: BigRational) -> Result<Self> {
        StructureParams::new(3, 3, alpha, rat(1, 100), None)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Number of space-time coordinates, `1 + d`.
    pub fn coords(&self) -> usize {
        1 + self.d as usize
    }

    pub fn kmin(&self) -> u32 {
        self.kmin
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn kappa(&self) -> &BigRational {
        &self.kappa
    }

    pub fn pbar(&self) -> &BigRational {
        &self.pbar
    }

    /// Parabolic space-time dimension `D = d + 2`.
    pub fn parabolic_dim(&self) -> u32 {
        self.d + 2
    }

    pub fn half_dim(&self) -> BigRational {
        rat((self.d + 2) as i64, 2)
    }

    /// Homogeneity step per noise slot, `a = 2 + (kmin-1)*alpha > 0`.
    pub fn noise_step(&self) -> BigRational {
        rat_int(2) + rat_int((self.kmin - 1) as i64) * &self.alpha
    }

    /// Slack `D/pbar` entering derivative-spec admissibility.
    pub fn derivative_slack(&self) -> BigRational {
        rat_int(self.parabolic_dim() as i64) / &self.pbar
    }

    /// Checks that a noise slot is part of the index alphabet.
    pub fn check_slot(&self, k: u32) -> Result<()> {
        if k < self.kmin || k % 2 == 0 {
            Err(Error::validation(format!(
                "noise slot {k} is not admissible (odd, >= {})",
                self.kmin
            )))
        } else {
            Ok(())
        }
    }

    /// Checks a space-time exponent has the right number of coordinates.
    pub fn check_coords(&self, len: usize) -> Result<()> {
        if len != self.coords() {
            Err(Error::validation(format!(
                "space-time exponent has {len} coordinates, expected {}",
                self.coords()
            )))
        } else {
            Ok(())
        }
    }
}

impl Default for StructureParams {
    fn default() -> Self {
        StructureParams::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_pack_is_admissible() {
        let p = StructureParams::standard();
        assert_eq!(p.d(), 3);
        assert_eq!(p.kmin(), 3);
        assert_eq!(p.parabolic_dim(), 5);
        assert_eq!(p.noise_step(), rat(9, 10));
        // Smallest admissible rational above 2 with denominator <= 100.
        assert_eq!(p.pbar(), &rat(201, 100));
        assert_eq!(p.derivative_slack(), rat(500, 201));
    }

    #[test]
    fn alpha_window_is_enforced() {
        assert!(StructureParams::standard_with_alpha(rat(1, 2)).is_err());
        assert!(StructureParams::standard_with_alpha(rat_int(-1)).is_err());
        assert!(StructureParams::standard_with_alpha(rat(-2, 5)).is_ok());
        // -1/2 is inside the admissibility window; only the dynamic genericity
        // validators reject it, not construction.
        assert!(StructureParams::standard_with_alpha(rat(-1, 2)).is_ok());
    }

    #[test]
    fn kappa_window_is_enforced() {
        let bad = StructureParams::new(3, 3, rat(-11, 20), rat_int(1), None);
        assert!(bad.is_err());
        let bad = StructureParams::new(3, 3, rat(-11, 20), rat_int(0), None);
        assert!(bad.is_err());
    }

    #[test]
    fn explicit_pbar_is_validated() {
        let ok = StructureParams::new(3, 3, rat(-11, 20), rat(1, 100), Some(rat(5, 2)));
        assert!(ok.is_ok());
        let too_big = StructureParams::new(3, 3, rat(-11, 20), rat(1, 100), Some(rat_int(4)));
        assert!(too_big.is_err());
        let too_small = StructureParams::new(3, 3, rat(-11, 20), rat(1, 100), Some(rat(3, 2)));
        assert!(too_small.is_err());
    }

    #[test]
    fn slot_checks() {
        let p = StructureParams::standard();
        assert!(p.check_slot(3).is_ok());
        assert!(p.check_slot(7).is_ok());
        assert!(p.check_slot(4).is_err());
        assert!(p.check_slot(1).is_err());
    }
}
