//! Exact linear forms `c0 + c_alpha * alpha + c_kappa * kappa`.
//!
//! Every graded quantity of the index calculus is such a form with rational
//! coefficients. Keeping the coefficients (not just the evaluated value)
//! makes "two quantities agree numerically but differ structurally"
//! detectable, which is exactly the non-genericity guard.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{BigRational, Zero};

use crate::error::{Error, Result};
use crate::params::StructureParams;
use crate::ratio::{format_rational, rat_int};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LinearForm {
    pub c0: BigRational,
    pub c_alpha: BigRational,
    pub c_kappa: BigRational,
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm::default()
    }

    pub fn constant(c0: BigRational) -> Self {
        LinearForm {
            c0,
            ..LinearForm::default()
        }
    }

    pub fn alpha_multiple(c_alpha: BigRational) -> Self {
        LinearForm {
            c_alpha,
            ..LinearForm::default()
        }
    }

    pub fn new(c0: BigRational, c_alpha: BigRational, c_kappa: BigRational) -> Self {
        LinearForm {
            c0,
            c_alpha,
            c_kappa,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c_alpha.is_zero() && self.c_kappa.is_zero()
    }

    pub fn eval(&self, params: &StructureParams) -> BigRational {
        &self.c0 + &self.c_alpha * params.alpha() + &self.c_kappa * params.kappa()
    }

    /// Compares two forms through their evaluations; an evaluation tie
    /// between structurally different forms is a genericity failure.
    pub fn compare(&self, other: &LinearForm, params: &StructureParams) -> Result<Ordering> {
        let ord = self.eval(params).cmp(&other.eval(params));
        if ord == Ordering::Equal && self != other {
            return Err(Error::non_generic(format!(
                "forms {self} and {other} collide at alpha = {}, kappa = {}",
                format_rational(params.alpha()),
                format_rational(params.kappa()),
            )));
        }
        Ok(ord)
    }

    /// Strict comparison against a plain rational threshold; a tie counts as
    /// non-generic unless the form is exactly that constant.
    pub fn compare_value(&self, value: &BigRational, params: &StructureParams) -> Result<Ordering> {
        self.compare(&LinearForm::constant(value.clone()), params)
    }

    pub fn scale(&self, c: &BigRational) -> LinearForm {
        LinearForm {
            c0: &self.c0 * c,
            c_alpha: &self.c_alpha * c,
            c_kappa: &self.c_kappa * c,
        }
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm {
            c0: &self.c0 + &rhs.c0,
            c_alpha: &self.c_alpha + &rhs.c_alpha,
            c_kappa: &self.c_kappa + &rhs.c_kappa,
        }
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        LinearForm {
            c0: &self.c0 - &rhs.c0,
            c_alpha: &self.c_alpha - &rhs.c_alpha,
            c_kappa: &self.c_kappa - &rhs.c_kappa,
        }
    }
}

impl AddAssign<&LinearForm> for LinearForm {
    fn add_assign(&mut self, rhs: &LinearForm) {
        self.c0 += &rhs.c0;
        self.c_alpha += &rhs.c_alpha;
        self.c_kappa += &rhs.c_kappa;
    }
}

impl SubAssign<&LinearForm> for LinearForm {
    fn sub_assign(&mut self, rhs: &LinearForm) {
        self.c0 -= &rhs.c0;
        self.c_alpha -= &rhs.c_alpha;
        self.c_kappa -= &rhs.c_kappa;
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self.scale(&rat_int(-1))
    }
}

impl Mul<&BigRational> for &LinearForm {
    type Output = LinearForm;
    fn mul(self, rhs: &BigRational) -> LinearForm {
        self.scale(rhs)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.c0.is_zero() {
            parts.push(format_rational(&self.c0));
        }
        if !self.c_alpha.is_zero() {
            parts.push(format!("{}*alpha", format_rational(&self.c_alpha)));
        }
        if !self.c_kappa.is_zero() {
            parts.push(format!("{}*kappa", format_rational(&self.c_kappa)));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn evaluation_at_standard_parameters() {
        let p = StructureParams::standard();
        let form = LinearForm::new(rat_int(2), rat_int(3), BigRational::zero());
        assert_eq!(form.eval(&p), rat(7, 20)); // 2 - 33/20
    }

    #[test]
    fn comparison_detects_collisions() {
        // At alpha = -1/2 the forms 4 + 5*alpha and 2 + alpha both evaluate
        // to 3/2 while being structurally different.
        let p = StructureParams::standard_with_alpha(rat(-1, 2)).unwrap();
        let lhs = LinearForm::new(rat_int(4), rat_int(5), BigRational::zero());
        let rhs = LinearForm::new(rat_int(2), rat_int(1), BigRational::zero());
        assert!(matches!(
            lhs.compare(&rhs, &p),
            Err(Error::NonGenericParameters(_))
        ));
        // Away from the collision the comparison is plain.
        let p = StructureParams::standard();
        assert_eq!(lhs.compare(&rhs, &p).unwrap(), Ordering::Less);
    }

    #[test]
    fn identical_forms_tie_cleanly() {
        let p = StructureParams::standard();
        let f = LinearForm::new(rat_int(7), BigRational::zero(), BigRational::zero());
        assert_eq!(f.compare(&f.clone(), &p).unwrap(), Ordering::Equal);
    }
}
