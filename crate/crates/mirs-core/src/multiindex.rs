//! Multiindices over the two slot families of the model expansion: noise
//! slots (odd integers `k >= kmin`) and polynomial slots (space-time
//! exponents `n` in `N^{1+d}` with parabolic degree `2*n0 + n1 + ... + nd`),
//! together with their graded quantities as exact linear forms.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One};

use crate::error::Result;
use crate::linform::LinearForm;
use crate::params::StructureParams;
use crate::ratio::{binomial, factorial, rat_int};

/// Space-time exponent; coordinate 0 is time and counts double in the
/// parabolic degree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialIndex(pub Vec<u32>);

impl MonomialIndex {
    pub fn zero(coords: usize) -> Self {
        MonomialIndex(vec![0; coords])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Parabolic degree `2*n0 + n1 + ... + nd`.
    pub fn parabolic_degree(&self) -> u64 {
        let mut deg = 0u64;
        for (i, &c) in self.0.iter().enumerate() {
            deg += if i == 0 { 2 * c as u64 } else { c as u64 };
        }
        deg
    }

    pub fn coords(&self) -> usize {
        self.0.len()
    }

    /// Componentwise `<=`.
    pub fn dominates(&self, other: &MonomialIndex) -> bool {
        self.0.len() == other.0.len() && other.0.iter().zip(&self.0).all(|(o, s)| o <= s)
    }

    pub fn checked_sub(&self, other: &MonomialIndex) -> Option<MonomialIndex> {
        if !self.dominates(other) {
            return None;
        }
        Some(MonomialIndex(
            self.0.iter().zip(&other.0).map(|(s, o)| s - o).collect(),
        ))
    }

    pub fn add(&self, other: &MonomialIndex) -> MonomialIndex {
        MonomialIndex(self.0.iter().zip(&other.0).map(|(s, o)| s + o).collect())
    }

    /// Product of componentwise binomial coefficients.
    pub fn binomial(&self, lower: &MonomialIndex) -> BigInt {
        if !self.dominates(lower) {
            return BigInt::from(0);
        }
        self.0
            .iter()
            .zip(&lower.0)
            .map(|(n, m)| binomial(*n as u64, *m as u64))
            .product()
    }

    /// Product of componentwise factorials.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&c| factorial(c as u64)).product()
    }
}

impl fmt::Display for MonomialIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// One unit of a multiindex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Unit {
    Noise(u32),
    Poly(MonomialIndex),
}

/// Sparse multiindex over both slot families. Canonical by construction:
/// ordered maps, no zero multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Multiindex {
    noise: BTreeMap<u32, u32>,
    poly: BTreeMap<MonomialIndex, u32>,
}

impl Multiindex {
    pub fn zero() -> Self {
        Multiindex::default()
    }

    pub fn unit_noise(k: u32) -> Self {
        let mut m = Multiindex::zero();
        m.noise.insert(k, 1);
        m
    }

    pub fn unit_poly(n: MonomialIndex) -> Self {
        let mut m = Multiindex::zero();
        m.poly.insert(n, 1);
        m
    }

    pub fn from_parts(
        noise: impl IntoIterator<Item = (u32, u32)>,
        poly: impl IntoIterator<Item = (MonomialIndex, u32)>,
    ) -> Self {
        let mut m = Multiindex::zero();
        for (k, c) in noise {
            if c > 0 {
                *m.noise.entry(k).or_insert(0) += c;
            }
        }
        for (n, c) in poly {
            if c > 0 {
                *m.poly.entry(n).or_insert(0) += c;
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.noise.is_empty() && self.poly.is_empty()
    }

    pub fn noise_slots(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.noise.iter().map(|(&k, &c)| (k, c))
    }

    pub fn poly_slots(&self) -> impl Iterator<Item = (&MonomialIndex, u32)> + '_ {
        self.poly.iter().map(|(n, &c)| (n, c))
    }

    pub fn noise_mult(&self, k: u32) -> u32 {
        self.noise.get(&k).copied().unwrap_or(0)
    }

    pub fn poly_mult(&self, n: &MonomialIndex) -> u32 {
        self.poly.get(n).copied().unwrap_or(0)
    }

    /// Total noise multiplicity.
    pub fn noise_total(&self) -> u64 {
        self.noise.values().map(|&c| c as u64).sum()
    }

    /// Weighted noise count `sum_k (k-1) * mult(k)`.
    pub fn noise_weight(&self) -> u64 {
        self.noise
            .iter()
            .map(|(&k, &c)| (k as u64 - 1) * c as u64)
            .sum()
    }

    /// Noise multiplicity strictly above a slot threshold.
    pub fn noise_above(&self, k0: u32) -> u64 {
        self.noise
            .iter()
            .filter(|(&k, _)| k > k0)
            .map(|(_, &c)| c as u64)
            .sum()
    }

    /// Total polynomial multiplicity.
    pub fn poly_total(&self) -> u64 {
        self.poly.values().map(|&c| c as u64).sum()
    }

    /// Total parabolic degree of the polynomial part.
    pub fn poly_degree(&self) -> u64 {
        self.poly
            .iter()
            .map(|(n, &c)| n.parabolic_degree() * c as u64)
            .sum()
    }

    pub fn is_purely_polynomial(&self) -> bool {
        self.noise.is_empty()
    }

    /// Iterates units with multiplicity, noise slots first.
    pub fn units(&self) -> impl Iterator<Item = (Unit, u32)> + '_ {
        self.noise
            .iter()
            .map(|(&k, &c)| (Unit::Noise(k), c))
            .chain(self.poly.iter().map(|(n, &c)| (Unit::Poly(n.clone()), c)))
    }

    /// First unit in canonical order, if any.
    pub fn first_unit(&self) -> Option<Unit> {
        self.units().next().map(|(u, _)| u)
    }

    pub fn add(&self, other: &Multiindex) -> Multiindex {
        let mut out = self.clone();
        for (&k, &c) in &other.noise {
            *out.noise.entry(k).or_insert(0) += c;
        }
        for (n, &c) in &other.poly {
            *out.poly.entry(n.clone()).or_insert(0) += c;
        }
        out
    }

    pub fn add_unit(&self, unit: &Unit) -> Multiindex {
        match unit {
            Unit::Noise(k) => self.add(&Multiindex::unit_noise(*k)),
            Unit::Poly(n) => self.add(&Multiindex::unit_poly(n.clone())),
        }
    }

    /// Pointwise difference, `None` when `other` is not dominated.
    pub fn checked_sub(&self, other: &Multiindex) -> Option<Multiindex> {
        let mut out = self.clone();
        for (&k, &c) in &other.noise {
            let slot = out.noise.get_mut(&k)?;
            if *slot < c {
                return None;
            }
            *slot -= c;
            if *slot == 0 {
                out.noise.remove(&k);
            }
        }
        for (n, &c) in &other.poly {
            let slot = out.poly.get_mut(n)?;
            if *slot < c {
                return None;
            }
            *slot -= c;
            if *slot == 0 {
                out.poly.remove(n);
            }
        }
        Some(out)
    }

    pub fn sub_unit(&self, unit: &Unit) -> Option<Multiindex> {
        match unit {
            Unit::Noise(k) => self.checked_sub(&Multiindex::unit_noise(*k)),
            Unit::Poly(n) => self.checked_sub(&Multiindex::unit_poly(n.clone())),
        }
    }

    /// Componentwise `other <= self`.
    pub fn dominates(&self, other: &Multiindex) -> bool {
        other
            .noise
            .iter()
            .all(|(k, &c)| self.noise_mult(*k) >= c)
            && other.poly.iter().all(|(n, &c)| self.poly_mult(n) >= c)
    }

    /// Componentwise `other <= self` on the noise slots alone.
    pub fn noise_dominates(&self, other: &Multiindex) -> bool {
        other.noise.iter().all(|(k, &c)| self.noise_mult(*k) >= c)
    }

    /// Every nonzero sub-multiindex, in ascending canonical order.
    pub fn nonzero_subindices(&self) -> Vec<Multiindex> {
        let slots: Vec<(Unit, u32)> = self.units().collect();
        let mut out = Vec::new();
        let mut current = Multiindex::zero();
        fn rec(
            slots: &[(Unit, u32)],
            pos: usize,
            current: &mut Multiindex,
            out: &mut Vec<Multiindex>,
        ) {
            if pos == slots.len() {
                if !current.is_zero() {
                    out.push(current.clone());
                }
                return;
            }
            let (unit, max) = &slots[pos];
            for c in 0..=*max {
                let mut next = current.clone();
                match unit {
                    Unit::Noise(k) => {
                        if c > 0 {
                            next.noise.insert(*k, c);
                        }
                    }
                    Unit::Poly(n) => {
                        if c > 0 {
                            next.poly.insert(n.clone(), c);
                        }
                    }
                }
                rec(slots, pos + 1, &mut next, out);
            }
        }
        rec(&slots, 0, &mut current, &mut out);
        out.sort();
        out
    }

    /// Validates slots against the parameter pack.
    pub fn validate(&self, params: &StructureParams) -> Result<()> {
        for (&k, _) in &self.noise {
            params.check_slot(k)?;
        }
        for (n, _) in &self.poly {
            params.check_coords(n.coords())?;
        }
        Ok(())
    }
}

impl fmt::Display for Multiindex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (&k, &c) in &self.noise {
            if c == 1 {
                parts.push(format!("f{k}"));
            } else {
                parts.push(format!("f{k}^{c}"));
            }
        }
        for (n, &c) in &self.poly {
            let base = format!("e{n}");
            if c == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{c}"));
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Homogeneity form
/// `alpha * (1 + (kmin-1)*noise_total - poly_total) + 2*noise_total + poly_degree`.
pub fn homogeneity(beta: &Multiindex, params: &StructureParams) -> LinearForm {
    let noise_total = beta.noise_total() as i64;
    let poly_total = beta.poly_total() as i64;
    LinearForm::new(
        rat_int(2 * noise_total + beta.poly_degree() as i64),
        rat_int(1 + (params.kmin() as i64 - 1) * noise_total - poly_total),
        rat_int(0),
    )
}

/// Bracket `sum_k (k-1)*mult(k) - poly_total`; negative brackets flag
/// non-populated territory outside the two special families.
pub fn bracket(beta: &Multiindex) -> i64 {
    beta.noise_weight() as i64 - beta.poly_total() as i64
}

/// Order form `homogeneity + (D/2)*(1 + bracket)`; the well-ordering every
/// triangular argument descends along.
pub fn order(beta: &Multiindex, params: &StructureParams) -> LinearForm {
    let mut form = homogeneity(beta, params);
    form.c0 += params.half_dim() * rat_int(1 + bracket(beta));
    form
}

/// Discounted homogeneity `homogeneity - kappa * noise_above(kmin)`.
pub fn discounted_homogeneity(beta: &Multiindex, params: &StructureParams) -> LinearForm {
    let mut form = homogeneity(beta, params);
    form.c_kappa = rat_int(-(beta.noise_above(params.kmin()) as i64));
    form
}

/// Sector `f_kmin * (kmin polynomial units)`: populated with bracket -1, and
/// the only populated shape whose primary component vanishes identically.
pub fn is_special_sector(beta: &Multiindex, params: &StructureParams) -> bool {
    beta.noise_mult(params.kmin()) == 1
        && beta.noise_total() == 1
        && beta.poly_total() == params.kmin() as u64
}

/// Population predicate: a single polynomial unit, the special sector, or a
/// nonnegative bracket.
pub fn is_populated(beta: &Multiindex, params: &StructureParams) -> bool {
    if beta.is_purely_polynomial() && beta.poly_total() == 1 {
        return true;
    }
    is_special_sector(beta, params) || bracket(beta) >= 0
}

/// Order comparison; evaluation ties between structurally different order
/// forms surface as `NonGenericParameters`.
pub fn compare_order(
    beta: &Multiindex,
    gamma: &Multiindex,
    params: &StructureParams,
) -> Result<Ordering> {
    order(beta, params).compare(&order(gamma, params), params)
}

/// Multinomial coefficient `poly_total! / prod_n mult(n)!` of the polynomial
/// part; the combinatorial weight of the special sector's base values.
pub fn poly_multinomial(beta: &Multiindex) -> BigInt {
    let mut denom = BigInt::one();
    for (_, c) in beta.poly_slots() {
        denom *= factorial(c as u64);
    }
    factorial(beta.poly_total()) / denom
}

/// Exponent of the combined polynomial part, `sum_n n * mult(n)`.
pub fn poly_exponent_sum(beta: &Multiindex, coords: usize) -> MonomialIndex {
    let mut out = MonomialIndex::zero(coords);
    for (n, c) in beta.poly_slots() {
        for _ in 0..c {
            out = out.add(n);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    fn p() -> StructureParams {
        StructureParams::standard()
    }

    fn e(v: &[u32]) -> MonomialIndex {
        MonomialIndex(v.to_vec())
    }

    #[test]
    fn parabolic_degree_counts_time_twice() {
        assert_eq!(e(&[1, 0, 0, 0]).parabolic_degree(), 2);
        assert_eq!(e(&[0, 1, 1, 0]).parabolic_degree(), 2);
        assert_eq!(e(&[2, 1, 0, 3]).parabolic_degree(), 8);
    }

    #[test]
    fn unit_homogeneities() {
        let p = p();
        // Empty index: alpha itself.
        let empty = Multiindex::zero();
        assert_eq!(homogeneity(&empty, &p).eval(&p), rat(-11, 20));
        // Any noise unit: 2 + kmin*alpha, independent of the slot.
        for k in [3, 5, 9] {
            let f = Multiindex::unit_noise(k);
            assert_eq!(homogeneity(&f, &p).eval(&p), rat(7, 20)); // 2 - 33/20
        }
        // Polynomial unit: its parabolic degree.
        let en = Multiindex::unit_poly(e(&[0, 1, 0, 0]));
        assert_eq!(homogeneity(&en, &p).eval(&p), rat_int(1));
    }

    #[test]
    fn unit_orders_and_brackets() {
        let p = p();
        assert_eq!(order(&Multiindex::zero(), &p).eval(&p), rat(39, 20));
        let e0 = Multiindex::unit_poly(e(&[0, 0, 0, 0]));
        assert_eq!(order(&e0, &p).eval(&p), rat_int(0));
        assert_eq!(bracket(&e0), -1);
        let en = Multiindex::unit_poly(e(&[1, 0, 1, 0]));
        assert_eq!(order(&en, &p).eval(&p), rat_int(3));
        // Noise unit at slot k: 2 + kmin*alpha + (D/2)*k.
        let f3 = Multiindex::unit_noise(3);
        assert_eq!(bracket(&f3), 2);
        assert_eq!(order(&f3, &p).eval(&p), rat(157, 20)); // 7/20 + 15/2
        let f5 = Multiindex::unit_noise(5);
        assert_eq!(order(&f5, &p).eval(&p), rat(257, 20));
    }

    #[test]
    fn homogeneity_is_additive_up_to_base_point() {
        let p = p();
        let a = Multiindex::from_parts([(3, 2)], [(e(&[0, 1, 0, 0]), 1)]);
        let b = Multiindex::from_parts([(5, 1)], [(e(&[0, 0, 0, 0]), 2)]);
        let base = homogeneity(&Multiindex::zero(), &p);
        let lhs = homogeneity(&a.add(&b), &p);
        let rhs = &(&homogeneity(&a, &p) + &homogeneity(&b, &p)) - &base;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn population_families() {
        let p = p();
        // Single polynomial unit.
        assert!(is_populated(&Multiindex::unit_poly(e(&[2, 1, 0, 0])), &p));
        // Two polynomial units are not populated.
        let two = Multiindex::from_parts([], [(e(&[0, 0, 0, 0]), 2)]);
        assert!(!is_populated(&two, &p));
        // Special sector: f3 with exactly three polynomial units.
        let special = Multiindex::from_parts(
            [(3, 1)],
            [(e(&[0, 0, 0, 0]), 2), (e(&[0, 1, 0, 0]), 1)],
        );
        assert!(is_populated(&special, &p));
        // f5 with three polynomial units has bracket 1 >= 0.
        let f5poly = Multiindex::from_parts([(5, 1)], [(e(&[0, 0, 0, 0]), 3)]);
        assert_eq!(bracket(&f5poly), 1);
        assert!(is_populated(&f5poly, &p));
        // f3 with four polynomial units: bracket -2, not special.
        let f3four = Multiindex::from_parts([(3, 1)], [(e(&[0, 0, 0, 0]), 4)]);
        assert!(!is_populated(&f3four, &p));
        // Empty index: bracket 0.
        assert!(is_populated(&Multiindex::zero(), &p));
    }

    #[test]
    fn discounted_homogeneity_discounts_high_slots_only() {
        let p = p();
        let f3 = Multiindex::unit_noise(3);
        assert_eq!(discounted_homogeneity(&f3, &p), homogeneity(&f3, &p));
        let f5 = Multiindex::unit_noise(5);
        let disc = discounted_homogeneity(&f5, &p);
        assert_eq!(disc.c_kappa, rat_int(-1));
        assert_eq!(disc.eval(&p), homogeneity(&f5, &p).eval(&p) - rat(1, 100));
    }

    #[test]
    fn subindex_enumeration_is_complete() {
        let beta = Multiindex::from_parts([(3, 1)], [(e(&[0, 0, 0, 0]), 2)]);
        let subs = beta.nonzero_subindices();
        // Multiplicity choices (2even)*(3) - 1 empty = 5.
        assert_eq!(subs.len(), 5);
        assert!(subs.iter().all(|s| beta.dominates(s) && !s.is_zero()));
    }

    #[test]
    fn multinomial_of_polynomial_part() {
        let beta = Multiindex::from_parts(
            [(3, 1)],
            [(e(&[0, 0, 0, 0]), 2), (e(&[0, 1, 0, 0]), 1)],
        );
        assert_eq!(poly_multinomial(&beta), BigInt::from(3)); // 3!/2!
    }
}
