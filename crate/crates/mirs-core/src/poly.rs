//! Exact multivariate polynomials over named symbols with rational
//! coefficients. Coefficients of recentering maps and forcing expansions
//! live here; canonical `BTreeMap` storage makes equality structural.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num::{BigRational, One, Zero};

use crate::ratio::format_rational;

/// Interned-by-value symbol name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Self {
        Symbol(name.into())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Power product of symbols; the empty monomial is 1.
pub type Monomial = BTreeMap<Symbol, u32>;

/// Sparse polynomial; invariant: no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    pub fn symbol(s: Symbol) -> Self {
        let mut m = Monomial::new();
        m.insert(s, 1);
        let mut p = Poly::default();
        p.terms.insert(m, BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant term, zero if absent.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::new())
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// True when the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::default();
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v * c);
        }
        out
    }

    /// All symbols occurring with nonzero coefficient.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for s in m.keys() {
                out.insert(s.clone());
            }
        }
        out
    }

    /// Substitute polynomials for symbols; unlisted symbols stay themselves.
    pub fn subst(&self, map: &BTreeMap<Symbol, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (s, pow) in m {
                let base = map
                    .get(s)
                    .cloned()
                    .unwrap_or_else(|| Poly::symbol(s.clone()));
                for _ in 0..*pow {
                    term = &term * &base;
                }
            }
            out += term;
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }
}

impl AddAssign<Poly> for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs.clone();
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += -rhs;
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut m = ma.clone();
                for (s, p) in mb {
                    *m.entry(s.clone()).or_insert(0) += p;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let cs = format_rational(c);
            let negative = cs.starts_with('-');
            let abs = cs.trim_start_matches('-');
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mut wrote = false;
            if m.is_empty() || abs != "1" {
                f.write_str(abs)?;
                wrote = true;
            }
            for (s, p) in m {
                if wrote {
                    f.write_str("*")?;
                }
                if *p == 1 {
                    write!(f, "{s}")?;
                } else {
                    write!(f, "{s}^{p}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    fn x() -> Poly {
        Poly::symbol(Symbol::new("x"))
    }

    fn y() -> Poly {
        Poly::symbol(Symbol::new("y"))
    }

    #[test]
    fn ring_identities() {
        let p = &(&x() + &y()) * &(&x() - &y());
        let q = &x().pow(2) - &y().pow(2);
        assert_eq!(p, q);
        assert!((&p - &q).is_zero());
        assert_eq!(&p * &Poly::zero(), Poly::zero());
        assert_eq!(&p * &Poly::one(), p);
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut p = x();
        p += -&x();
        assert!(p.is_zero());
        assert!(p.terms.is_empty());
    }

    #[test]
    fn substitution_composes() {
        // (x + 1)^2 under x -> y - 1 gives y^2.
        let p = (&x() + &Poly::one()).pow(2);
        let mut map = BTreeMap::new();
        map.insert(Symbol::new("x"), &y() - &Poly::one());
        assert_eq!(p.subst(&map), y().pow(2));
    }

    #[test]
    fn symbols_are_collected() {
        let p = &(&x() * &y()) + &Poly::constant(rat(1, 2));
        let syms = p.symbols();
        assert_eq!(syms.len(), 2);
        assert!(syms.contains(&Symbol::new("x")));
    }

    #[test]
    fn display_is_stable() {
        let p = &(&x() - &y()).pow(2) + &Poly::constant(rat(1, 2));
        assert_eq!(format!("{p}"), "1/2 - 2*x*y + x^2 + y^2");
    }
}
