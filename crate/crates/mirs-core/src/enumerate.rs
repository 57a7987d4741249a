//! Exhaustive enumeration of populated multiindices below an order cutoff.
//!
//! The populated set splits into three disjoint families: single polynomial
//! units, the `f_kmin * (kmin polynomial units)` sector, and indices with
//! nonnegative bracket. Each family is searched inside finite a-priori
//! bounds; exact branch-and-bound pruning on the order form keeps the search
//! small, and a final exact filter makes the bounds harmless: inflating them
//! must (and does, see the stability diagnostic) reproduce the same set.

use std::collections::BTreeSet;

use num::{BigRational, Signed};

use crate::error::{Error, Result};
use crate::linform::LinearForm;
use crate::multiindex::{
    bracket, compare_order, discounted_homogeneity, homogeneity, is_populated, order,
    MonomialIndex, Multiindex,
};
use crate::params::StructureParams;
use crate::ratio::{floor_int, integer_in_half_open, is_integer, rat_int};

/// All populated multiindices with order at most `max_order`, sorted by
/// (order evaluation, canonical form), validated for genericity.
pub fn enumerate_populated(
    params: &StructureParams,
    max_order: &BigRational,
) -> Result<Vec<Multiindex>> {
    enumerate_populated_inflated(params, max_order, 1)
}

/// Same search with every a-priori bound multiplied by `inflate`; the result
/// must not depend on `inflate` (the final filter is exact), which the test
/// suite checks with `inflate = 2`.
pub fn enumerate_populated_inflated(
    params: &StructureParams,
    max_order: &BigRational,
    inflate: u64,
) -> Result<Vec<Multiindex>> {
    if inflate == 0 {
        return Err(Error::validation("bound inflation factor must be positive"));
    }
    let mut found: BTreeSet<Multiindex> = BTreeSet::new();

    // The empty index carries the base component and has bracket 0; the
    // bracket-sector search below only visits indices with noise, so it is
    // seeded here and the exact filter applies its order cutoff.
    found.insert(Multiindex::zero());
    collect_polynomial_units(params, max_order, inflate, &mut found);
    collect_special_sector(params, max_order, inflate, &mut found);
    collect_bracket_sector(params, max_order, inflate, &mut found);

    // Exact filter: population and the order cutoff, independent of bounds.
    let mut kept: Vec<Multiindex> = found
        .into_iter()
        .filter(|beta| {
            is_populated(beta, params) && order(beta, params).eval(params) <= *max_order
        })
        .collect();

    validate_genericity(params, &kept)?;

    kept.sort_by(|a, b| {
        let oa = order(a, params).eval(params);
        let ob = order(b, params).eval(params);
        oa.cmp(&ob).then_with(|| a.cmp(b))
    });
    // Equal-evaluation neighbours must carry identical order forms; the
    // validator has already rejected collisions, so ties are honest ties.
    Ok(kept)
}

/// Candidate polynomial exponents with parabolic degree at most `cap`,
/// sorted by (degree, coordinates) so degree is monotone along the pool and
/// budget searches can stop at the first overweight candidate.
fn monomial_indices_up_to(coords: usize, cap: u64) -> Vec<MonomialIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; coords];
    fn rec(coords: usize, pos: usize, budget: u64, current: &mut Vec<u32>, out: &mut Vec<MonomialIndex>) {
        if pos == coords {
            out.push(MonomialIndex(current.clone()));
            return;
        }
        let weight = if pos == 0 { 2 } else { 1 };
        let max = budget / weight;
        for c in 0..=max {
            current[pos] = c as u32;
            rec(coords, pos + 1, budget - c * weight, current, out);
        }
        current[pos] = 0;
    }
    rec(coords, 0, cap, &mut current, &mut out);
    out.sort_by_key(|n| (n.parabolic_degree(), n.clone()));
    out
}

fn collect_polynomial_units(
    params: &StructureParams,
    max_order: &BigRational,
    inflate: u64,
    found: &mut BTreeSet<Multiindex>,
) {
    // order(unit n) = |n|, so the degree cap is floor(max_order).
    if max_order.is_negative() {
        return;
    }
    let cap = match u64::try_from(floor_int(max_order)) {
        Ok(c) => c.saturating_mul(inflate),
        Err(_) => return,
    };
    for n in monomial_indices_up_to(params.coords(), cap) {
        found.insert(Multiindex::unit_poly(n));
    }
}

fn collect_special_sector(
    params: &StructureParams,
    max_order: &BigRational,
    inflate: u64,
    found: &mut BTreeSet<Multiindex>,
) {
    // order(f_kmin + n_1 + ... + n_kmin) = 2 + sum |n_i|.
    let budget = max_order - rat_int(2);
    if budget.is_negative() {
        return;
    }
    let cap = match u64::try_from(floor_int(&budget)) {
        Ok(c) => c.saturating_mul(inflate),
        Err(_) => return,
    };
    let pool = monomial_indices_up_to(params.coords(), cap);
    let slots = params.kmin() as usize;
    // Multisets of `slots` exponents with total degree <= cap: nondecreasing
    // positions into the sorted pool.
    fn rec(
        pool: &[MonomialIndex],
        from: usize,
        left: usize,
        budget: u64,
        picked: &mut Vec<MonomialIndex>,
        out: &mut Vec<Vec<MonomialIndex>>,
    ) {
        if left == 0 {
            out.push(picked.clone());
            return;
        }
        for i in from..pool.len() {
            let deg = pool[i].parabolic_degree();
            if deg > budget {
                break;
            }
            picked.push(pool[i].clone());
            rec(pool, i, left - 1, budget - deg, picked, out);
            picked.pop();
        }
    }
    let mut combos = Vec::new();
    rec(&pool, 0, slots, cap, &mut Vec::new(), &mut combos);
    for combo in combos {
        let mut beta = Multiindex::unit_noise(params.kmin());
        for n in combo {
            beta = beta.add(&Multiindex::unit_poly(n));
        }
        found.insert(beta);
    }
}

fn collect_bracket_sector(
    params: &StructureParams,
    max_order: &BigRational,
    inflate: u64,
    found: &mut BTreeSet<Multiindex>,
) {
    let alpha = params.alpha().clone();
    let half_d = params.half_dim();
    let step = params.noise_step();
    let slack = max_order - &alpha;
    if slack.is_negative() {
        return;
    }

    // A-priori bounds, then inflation. Poly multiplicity: each polynomial
    // unit costs at least -alpha of homogeneity above the base point.
    let poly_cap = to_cap(&(&slack / (-&alpha)), inflate);
    // Each unit's degree enters the homogeneity directly.
    let degree_cap = to_cap(&slack, inflate);
    // Noise weight: (D/2)*weight <= slack - D/2 + (D/2)*poly_total.
    let weight_cap = to_cap(
        &((&slack - &half_d) / &half_d + rat_int(poly_cap as i64)),
        inflate,
    );
    // Noise multiplicity: order >= alpha + step*count + D/2.
    let count_cap = to_cap(&((&slack - &half_d) / &step), inflate);

    let pool = monomial_indices_up_to(params.coords(), degree_cap);
    // Unit order costs: adding one polynomial unit `n` changes the order by
    // |n| - alpha - D/2. The pool is degree-sorted, so costs are
    // nondecreasing along it and the search can stop at the first candidate
    // that cannot be completed under the cutoff.
    let unit_costs: Vec<BigRational> = pool
        .iter()
        .map(|n| rat_int(n.parabolic_degree() as i64) - &alpha - &half_d)
        .collect();

    // Enumerate noise parts: odd slots kmin, kmin+2, ..., bounded by the
    // weight cap; multiplicities bounded by the count cap.
    let mut noise_parts: Vec<Multiindex> = Vec::new();
    let max_slot = params.kmin() as u64 + weight_cap.saturating_add(1);
    fn noise_rec(
        params: &StructureParams,
        slot: u64,
        max_slot: u64,
        weight_left: u64,
        count_left: u64,
        current: &Multiindex,
        out: &mut Vec<Multiindex>,
    ) {
        if !current.is_zero() {
            out.push(current.clone());
        }
        let mut k = slot;
        while k <= max_slot {
            let w = k - 1;
            if w > weight_left || count_left == 0 {
                break;
            }
            let next = current.add(&Multiindex::unit_noise(k as u32));
            noise_rec(
                params,
                k,
                max_slot,
                weight_left - w,
                count_left - 1,
                &next,
                out,
            );
            k += 2;
        }
    }
    noise_rec(
        params,
        params.kmin() as u64,
        max_slot,
        weight_cap,
        count_cap,
        &Multiindex::zero(),
        &mut noise_parts,
    );

    for noise in noise_parts {
        let weight = noise.noise_weight();
        // Bracket >= 0 caps the polynomial multiplicity at the noise weight.
        let slots_cap = weight.min(poly_cap);
        // Base order of the pure-noise index.
        let base = &alpha
            + &step * rat_int(noise.noise_total() as i64)
            + &half_d * rat_int(1 + weight as i64);
        let mut current = noise.clone();
        poly_rec(
            &pool,
            &unit_costs,
            0,
            slots_cap,
            &base,
            max_order,
            &mut current,
            found,
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn poly_rec(
    pool: &[MonomialIndex],
    costs: &[BigRational],
    from: usize,
    slots_left: u64,
    partial: &BigRational,
    max_order: &BigRational,
    current: &mut Multiindex,
    found: &mut BTreeSet<Multiindex>,
) {
    if partial <= max_order {
        found.insert(current.clone());
    }
    if slots_left == 0 || from == pool.len() {
        return;
    }
    for i in from..pool.len() {
        let next_partial = partial + &costs[i];
        // Exact prune: later slots draw from position >= i, so every further
        // unit costs at least costs[i]. If even filling the remaining slots
        // at that cheapest rate (or stopping, when it is positive) overshoots
        // the cutoff, candidate i is dead, and with costs nondecreasing along
        // the pool so is every later candidate.
        let floor = if costs[i].is_negative() {
            &next_partial + &costs[i] * rat_int((slots_left - 1) as i64)
        } else {
            next_partial.clone()
        };
        if &floor > max_order {
            break;
        }
        let mut next = current.add(&Multiindex::unit_poly(pool[i].clone()));
        poly_rec(
            pool,
            costs,
            i,
            slots_left - 1,
            &next_partial,
            max_order,
            &mut next,
            found,
        );
    }
}

fn to_cap(bound: &BigRational, inflate: u64) -> u64 {
    if bound.is_negative() {
        return 0;
    }
    u64::try_from(floor_int(bound))
        .map(|c| c.saturating_mul(inflate))
        .unwrap_or(0)
}

/// Genericity validators over a finite populated family:
/// no discounted homogeneity with nonnegative bracket may be a natural
/// number; no integer may separate a discounted homogeneity from its plain
/// homogeneity; and no two members may have colliding order evaluations with
/// structurally different forms.
pub fn validate_genericity(params: &StructureParams, set: &[Multiindex]) -> Result<()> {
    for beta in set {
        let disc = discounted_homogeneity(beta, params).eval(params);
        if bracket(beta) >= 0 && !disc.is_negative() && is_integer(&disc) {
            return Err(Error::non_generic(format!(
                "discounted homogeneity of {beta} is the natural number {disc}"
            )));
        }
        let hom = homogeneity(beta, params).eval(params);
        if integer_in_half_open(&disc, &hom) {
            return Err(Error::non_generic(format!(
                "an integer separates the discounted and plain homogeneities of {beta}"
            )));
        }
    }
    // Pairwise order collisions; grouping by evaluation keeps this linear in
    // practice.
    let mut by_eval: Vec<(BigRational, &Multiindex, LinearForm)> = set
        .iter()
        .map(|b| {
            let form = order(b, params);
            (form.eval(params), b, form)
        })
        .collect();
    by_eval.sort_by(|a, b| a.0.cmp(&b.0));
    for pair in by_eval.windows(2) {
        if pair[0].0 == pair[1].0 && pair[0].2 != pair[1].2 {
            return Err(Error::non_generic(format!(
                "order collision between {} and {} at value {}",
                pair[0].1, pair[1].1, pair[0].0
            )));
        }
    }
    Ok(())
}

/// Populated indices of homogeneity exactly 2: the degree-2 polynomial units
/// and the family `f_k + kmin polynomial zero-units` (order
/// `2 + (D/2)*(k - kmin)`). Anything else at homogeneity 2 inside the cutoff
/// is an internal inconsistency.
///
/// The search solves the homogeneity equation instead of sweeping the whole
/// populated set (which grows combinatorially in the cutoff): with S noise
/// units, P polynomial units of total degree T, the homogeneity evaluates to
/// (2S + T) + (1 + (kmin-1)S - P)*alpha, and equating it to 2 pins T for
/// each (S, P) in a finite window. Realizations are then enumerated exactly.
pub fn classify_degree_two(
    params: &StructureParams,
    max_order: &BigRational,
) -> Result<Vec<Multiindex>> {
    let two = rat_int(2);
    let mut found: BTreeSet<Multiindex> = BTreeSet::new();

    if *max_order >= two {
        // Single polynomial units: homogeneity |n| = 2.
        for n in monomial_indices_up_to(params.coords(), 2) {
            if n.parabolic_degree() == 2 {
                found.insert(Multiindex::unit_poly(n));
            }
        }
        // Special sector: homogeneity 2 + (total slot degree), so every
        // polynomial slot carries the zero exponent.
        let zero_unit = Multiindex::unit_poly(MonomialIndex::zero(params.coords()));
        let mut special = Multiindex::unit_noise(params.kmin());
        for _ in 0..params.kmin() {
            special = special.add(&zero_unit);
        }
        found.insert(special);
    }

    // Bracket sector. Polynomial units contribute |n| - alpha > 0 each and
    // noise units the step a > 0, so 2 = alpha + a*S + sum(|n|-alpha) caps S.
    let alpha = params.alpha();
    let step = params.noise_step();
    let half_d = params.half_dim();
    let s_max = to_cap(&((&two - alpha) / &step), 1);
    for s in 1..=s_max {
        let noise_coeff = rat_int(1) + rat_int(((params.kmin() - 1) as i64) * (s as i64));
        for p in 0.. {
            // Total degree forced by the homogeneity equation.
            let degree = &two
                - rat_int(2 * s as i64)
                - (&noise_coeff - rat_int(p as i64)) * alpha;
            if degree.is_negative() {
                break;
            }
            if !is_integer(&degree) {
                continue;
            }
            let degree = u64::try_from(floor_int(&degree)).unwrap_or(0);
            // Order 2 + (D/2)(1 + weight - P) <= cutoff bounds the weight;
            // the slack grows with P, so a failure here only skips this P.
            let weight_slack = (max_order - &two) / &half_d + rat_int(p as i64) - rat_int(1);
            if weight_slack.is_negative() {
                continue;
            }
            let weight_cap = to_cap(&weight_slack, 1);
            for noise in noise_multisets(params, s, weight_cap) {
                for poly in poly_multisets(params, p, degree) {
                    let beta = noise.add(&poly);
                    if !is_populated(&beta, params)
                        || order(&beta, params).eval(params) > *max_order
                    {
                        continue;
                    }
                    if homogeneity(&beta, params) != LinearForm::constant(two.clone()) {
                        return Err(Error::inconsistency(format!(
                            "realization {beta} drifted off the solved homogeneity"
                        )));
                    }
                    found.insert(beta);
                }
            }
        }
    }

    let mut out: Vec<Multiindex> = found.into_iter().collect();
    validate_genericity(params, &out)?;
    for beta in &out {
        let poly_unit_deg2 =
            beta.is_purely_polynomial() && beta.poly_total() == 1 && beta.poly_degree() == 2;
        let zero = MonomialIndex::zero(params.coords());
        let noise_with_zeros = beta.noise_total() == 1
            && beta.poly_total() == params.kmin() as u64
            && beta.poly_mult(&zero) == params.kmin();
        if !poly_unit_deg2 && !noise_with_zeros {
            return Err(Error::inconsistency(format!(
                "unexpected index {beta} at homogeneity 2"
            )));
        }
    }
    out.sort_by(|a, b| {
        let oa = order(a, params).eval(params);
        let ob = order(b, params).eval(params);
        oa.cmp(&ob).then_with(|| a.cmp(b))
    });
    Ok(out)
}

/// Multisets of `count` noise slots (odd, at least kmin) with total weight
/// sum(k - 1) at most `weight_cap`.
pub(crate) fn noise_multisets(
    params: &StructureParams,
    count: u64,
    weight_cap: u64,
) -> Vec<Multiindex> {
    let mut out = Vec::new();
    fn rec(
        slot: u64,
        left: u64,
        weight_left: u64,
        current: &Multiindex,
        out: &mut Vec<Multiindex>,
    ) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        let mut k = slot;
        while k - 1 <= weight_left {
            let next = current.add(&Multiindex::unit_noise(k as u32));
            rec(k, left - 1, weight_left - (k - 1), &next, out);
            k += 2;
        }
    }
    rec(
        params.kmin() as u64,
        count,
        weight_cap,
        &Multiindex::zero(),
        &mut out,
    );
    out
}

/// Multisets of `count` polynomial units with total parabolic degree exactly
/// `degree`.
fn poly_multisets(params: &StructureParams, count: u64, degree: u64) -> Vec<Multiindex> {
    let pool = monomial_indices_up_to(params.coords(), degree);
    let mut out = Vec::new();
    fn rec(
        pool: &[MonomialIndex],
        from: usize,
        left: u64,
        degree_left: u64,
        current: &Multiindex,
        out: &mut Vec<Multiindex>,
    ) {
        if left == 0 {
            if degree_left == 0 {
                out.push(current.clone());
            }
            return;
        }
        for i in from..pool.len() {
            let deg = pool[i].parabolic_degree();
            if deg > degree_left {
                break;
            }
            let next = current.add(&Multiindex::unit_poly(pool[i].clone()));
            rec(pool, i, left - 1, degree_left - deg, &next, out);
        }
    }
    rec(&pool, 0, count, degree, &Multiindex::zero(), &mut out);
    out
}

/// Convenience: the floor unit `e_0` never exceeds any populated index in
/// order; exposed for the property suites.
pub fn order_floor_holds(params: &StructureParams, beta: &Multiindex) -> Result<bool> {
    let zero_unit = Multiindex::unit_poly(MonomialIndex::zero(params.coords()));
    Ok(compare_order(&zero_unit, beta, params)? != std::cmp::Ordering::Greater)
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
    fn cutoff_zero_is_the_zero_unit_alone() {
        let set = enumerate_populated(&p(), &rat_int(0)).unwrap();
        assert_eq!(set, vec![Multiindex::unit_poly(e(&[0, 0, 0, 0]))]);
    }

    #[test]
    fn cutoff_two_has_thirteen_members() {
        let params = p();
        let set = enumerate_populated(&params, &rat_int(2)).unwrap();
        assert_eq!(set.len(), 13);
        // Eleven polynomial units of degree <= 2.
        let poly = set
            .iter()
            .filter(|b| b.is_purely_polynomial() && b.poly_total() == 1)
            .count();
        assert_eq!(poly, 11);
        // The empty index and the special f3 sector member.
        assert!(set.contains(&Multiindex::zero()));
        let special = Multiindex::from_parts([(3, 1)], [(e(&[0, 0, 0, 0]), 3)]);
        assert!(set.contains(&special));
        // Sorted head: the degree-0 unit at order 0.
        assert_eq!(set[0], Multiindex::unit_poly(e(&[0, 0, 0, 0])));
    }

    #[test]
    fn negative_cutoff_is_empty() {
        let set = enumerate_populated(&p(), &rat_int(-1)).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn inflation_does_not_change_the_set() {
        let params = p();
        for c in [rat_int(2), rat(9, 2), rat_int(6)] {
            let base = enumerate_populated_inflated(&params, &c, 1).unwrap();
            let wide = enumerate_populated_inflated(&params, &c, 2).unwrap();
            assert_eq!(base, wide);
        }
    }

    #[test]
    fn non_generic_alpha_is_rejected() {
        // At alpha = -1/2 the index f3 + e0 has discounted homogeneity
        // 2 + 2*alpha = 1, a natural number with nonnegative bracket.
        let params = StructureParams::standard_with_alpha(rat(-1, 2)).unwrap();
        let err = enumerate_populated(&params, &rat_int(6)).unwrap_err();
        assert!(matches!(err, Error::NonGenericParameters(_)));
    }

    #[test]
    fn degree_two_classification_at_default_parameters() {
        let params = p();
        let set = classify_degree_two(&params, &rat_int(20)).unwrap();
        let poly: Vec<_> = set.iter().filter(|b| b.is_purely_polynomial()).collect();
        let noise: Vec<_> = set.iter().filter(|b| !b.is_purely_polynomial()).collect();
        assert_eq!(poly.len(), 7);
        assert_eq!(noise.len(), 4); // k in {3, 5, 7, 9}
        for k in [3u32, 5, 7, 9] {
            let member = Multiindex::from_parts([(k, 1)], [(e(&[0, 0, 0, 0]), 3)]);
            assert!(set.contains(&member));
            let ord = order(&member, &params).eval(&params);
            assert_eq!(ord, rat_int(2) + rat(5, 2) * rat_int((k as i64) - 3));
        }
    }
}
