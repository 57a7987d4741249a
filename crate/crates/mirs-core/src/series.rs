//! Formal power series indexed by multiindices with polynomial coefficients.
//!
//! A series assigns to each multiindex `beta` a coefficient in the polynomial
//! ring; the variables `z_k`, `z_n` themselves are bookkeeping only, so the
//! series is just its (finitely supported) coefficient table. Products are
//! convolutions over splittings `beta = beta1 + beta2`; the partial
//! derivative in the slot `n` shifts the table by one `n`-unit.

use std::collections::BTreeMap;

use num::BigRational;

use crate::multiindex::{bracket, is_populated, order, MonomialIndex, Multiindex, Unit};
use crate::params::StructureParams;
use crate::poly::Poly;

/// Finitely supported coefficient table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalSeries {
    coeffs: BTreeMap<Multiindex, Poly>,
}

impl FormalSeries {
    pub fn zero() -> Self {
        FormalSeries::default()
    }

    /// The series `z^beta` with coefficient 1.
    pub fn monomial(beta: Multiindex) -> Self {
        let mut s = FormalSeries::default();
        s.coeffs.insert(beta, Poly::one());
        s
    }

    /// The constant series (coefficient at the zero multiindex).
    pub fn constant(p: Poly) -> Self {
        let mut s = FormalSeries::default();
        s.set(Multiindex::zero(), p);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, beta: &Multiindex) -> Poly {
        self.coeffs.get(beta).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn set(&mut self, beta: Multiindex, p: Poly) {
        if p.is_zero() {
            self.coeffs.remove(&beta);
        } else {
            self.coeffs.insert(beta, p);
        }
    }

    pub fn add_to(&mut self, beta: &Multiindex, p: Poly) {
        if p.is_zero() {
            return;
        }
        let cur = self.get(beta);
        self.set(beta.clone(), &cur + &p);
    }

    pub fn support(&self) -> impl Iterator<Item = &Multiindex> {
        self.coeffs.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Multiindex, &Poly)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, rhs: &FormalSeries) -> FormalSeries {
        let mut out = self.clone();
        for (b, p) in &rhs.coeffs {
            out.add_to(b, p.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> FormalSeries {
        let mut out = FormalSeries::default();
        for (b, p) in &self.coeffs {
            out.set(b.clone(), p.scale(c));
        }
        out
    }

    pub fn scale_poly(&self, q: &Poly) -> FormalSeries {
        let mut out = FormalSeries::default();
        for (b, p) in &self.coeffs {
            out.set(b.clone(), p * q);
        }
        out
    }

    /// Convolution product over splittings of each target index.
    pub fn mul(&self, rhs: &FormalSeries) -> FormalSeries {
        let mut out = FormalSeries::default();
        for (b1, p1) in &self.coeffs {
            for (b2, p2) in &rhs.coeffs {
                out.add_to(&b1.add(b2), p1 * p2);
            }
        }
        out
    }

    /// Partial derivative in the polynomial slot `n`:
    /// the `beta` coefficient becomes `(beta(n)+1)` times the coefficient at
    /// `beta + unit(n)`.
    pub fn derivative(&self, n: &MonomialIndex) -> FormalSeries {
        let mut out = FormalSeries::default();
        for (b, p) in &self.coeffs {
            let mult = b.poly_mult(n);
            if mult == 0 {
                continue;
            }
            let shifted = b
                .checked_sub(&Multiindex::unit_poly(n.clone()))
                .expect("slot multiplicity checked above");
            out.add_to(&shifted, p.scale(&BigRational::from_integer(mult.into())));
        }
        out
    }

    /// Iterated derivative along a list of slots.
    pub fn derivative_multi(&self, slots: &[MonomialIndex]) -> FormalSeries {
        let mut cur = self.clone();
        for n in slots {
            cur = cur.derivative(n);
        }
        cur
    }

    /// Restriction to populated indices.
    pub fn project_populated(&self, params: &StructureParams) -> FormalSeries {
        let mut out = FormalSeries::default();
        for (b, p) in &self.coeffs {
            if is_populated(b, params) {
                out.set(b.clone(), p.clone());
            }
        }
        out
    }

    /// Restriction to indices with nonnegative bracket.
    pub fn project_bracket_nonneg(&self) -> FormalSeries {
        self.filter(|b| bracket(b) >= 0)
    }

    /// Drop every index whose order evaluation exceeds the cutoff.
    pub fn truncate_order(&self, params: &StructureParams, cutoff: &BigRational) -> FormalSeries {
        self.filter(|b| order(b, params).eval(params) <= *cutoff)
    }

    /// Product with exact pruning: splittings whose combined order exceeds
    /// the cutoff are skipped. The order minus its value at the zero index
    /// is additive, so the skip is lossless; the result equals the full
    /// product followed by truncation.
    pub fn mul_truncated(
        &self,
        rhs: &FormalSeries,
        params: &StructureParams,
        cutoff: &BigRational,
    ) -> FormalSeries {
        let base = order(&Multiindex::zero(), params).eval(params);
        let ord = |b: &Multiindex| order(b, params).eval(params);
        let mut out = FormalSeries::default();
        for (b1, p1) in &self.coeffs {
            let o1 = ord(b1);
            for (b2, p2) in &rhs.coeffs {
                if &o1 + ord(b2) - &base > *cutoff {
                    continue;
                }
                out.add_to(&b1.add(b2), p1 * p2);
            }
        }
        out
    }

    /// Restriction to a caller-supplied predicate on indices.
    pub fn filter(&self, keep: impl Fn(&Multiindex) -> bool) -> FormalSeries {
        let mut out = FormalSeries::default();
        for (b, p) in &self.coeffs {
            if keep(b) {
                out.set(b.clone(), p.clone());
            }
        }
        out
    }
}

/// The generator series for a single unit, convenience for building products.
pub fn unit_series(unit: &Unit) -> FormalSeries {
    match unit {
        Unit::Noise(k) => FormalSeries::monomial(Multiindex::unit_noise(*k)),
        Unit::Poly(n) => FormalSeries::monomial(Multiindex::unit_poly(n.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Symbol;

    fn e(v: &[u32]) -> MonomialIndex {
        MonomialIndex(v.to_vec())
    }

    #[test]
    fn product_convolves_indices() {
        let a = FormalSeries::monomial(Multiindex::unit_noise(3));
        let b = FormalSeries::monomial(Multiindex::unit_poly(e(&[0, 0, 0, 0])));
        let ab = a.mul(&b);
        let expect = Multiindex::from_parts([(3, 1)], [(e(&[0, 0, 0, 0]), 1)]);
        assert_eq!(ab.get(&expect), Poly::one());
        assert_eq!(ab.len(), 1);
    }

    #[test]
    fn derivative_shifts_and_scales() {
        // d/dz_n (z_n^2) = 2 z_n.
        let n = e(&[0, 1, 0, 0]);
        let sq = FormalSeries::monomial(Multiindex::from_parts([], [(n.clone(), 2)]));
        let d = sq.derivative(&n);
        let unit = Multiindex::unit_poly(n.clone());
        assert_eq!(
            d.get(&unit),
            Poly::constant(BigRational::from_integer(2.into()))
        );
        // Second derivative gives the constant 2.
        let dd = d.derivative(&n);
        assert_eq!(
            dd.get(&Multiindex::zero()),
            Poly::constant(BigRational::from_integer(2.into()))
        );
        // Third derivative vanishes.
        assert!(dd.derivative(&n).is_zero());
    }

    #[test]
    fn leibniz_rule_on_a_product() {
        let n = e(&[1, 0, 0, 0]);
        let a = FormalSeries::monomial(Multiindex::unit_poly(n.clone()))
            .scale_poly(&Poly::symbol(Symbol::new("p")));
        let b = FormalSeries::monomial(Multiindex::from_parts([(3, 1)], [(n.clone(), 1)]));
        let lhs = a.mul(&b).derivative(&n);
        let rhs = a.derivative(&n).mul(&b).add(&a.mul(&b.derivative(&n)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pruned_product_equals_truncated_product() {
        let params = StructureParams::standard();
        let n0 = e(&[0, 0, 0, 0]);
        let n1 = e(&[0, 1, 0, 0]);
        let mut a = FormalSeries::zero();
        a.set(Multiindex::unit_poly(n0.clone()), Poly::one());
        a.set(Multiindex::unit_noise(3), Poly::one());
        let mut b = FormalSeries::zero();
        b.set(Multiindex::unit_poly(n1.clone()), Poly::one());
        b.set(Multiindex::from_parts([(5, 1)], [(n0.clone(), 1)]), Poly::one());
        let cutoff = BigRational::from_integer(9.into());
        let pruned = a.mul_truncated(&b, &params, &cutoff);
        let full = a.mul(&b).truncate_order(&params, &cutoff);
        assert_eq!(pruned, full);
        // The cutoff actually bites: the full product has more terms.
        assert!(a.mul(&b).len() > pruned.len());
    }

    #[test]
    fn population_projection_drops_unpopulated() {
        let params = StructureParams::standard();
        let mut s = FormalSeries::zero();
        let n0 = e(&[0, 0, 0, 0]);
        s.set(Multiindex::unit_poly(n0.clone()), Poly::one()); // populated
        s.set(
            Multiindex::from_parts([], [(n0.clone(), 2)]),
            Poly::one(),
        ); // two polynomial units: not populated
        let proj = s.project_populated(&params);
        assert_eq!(proj.len(), 1);
        assert_eq!(proj.get(&Multiindex::unit_poly(n0)), Poly::one());
    }
}
