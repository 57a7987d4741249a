//! Symbolic expansion of the driving component at a populated multiindex into
//! scaling prefactors, law-adapted polynomial atoms, lower-order component
//! factors, counterterm symbols, and the noise, plus the dependency graph
//! certifying that the expansion recursion terminates.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linform::LinearForm;
use crate::multiindex::{
    bracket, homogeneity, is_populated, is_special_sector, order, MonomialIndex, Multiindex, Unit,
};
use crate::params::StructureParams;
use crate::ratio::{binomial, factorial, rat_int};

/// One additive term of an expanded driving component.
///
/// A term is the product of an `eps^(exponent)` prefactor, an exact rational
/// coefficient (carrying the sign), an optional degree-`w` polynomial atom
/// evaluated at the base component, component factors at the stored indices,
/// an optional counterterm symbol, and the noise flag; `taylor` marks the
/// product as wrapped in the complementary projection `id - T^(<cutoff)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiMinusTerm {
    eps_exponent: LinearForm,
    coefficient: BigRational,
    w_index: Option<u32>,
    pi_factors: Vec<Multiindex>,
    counterterm: Option<(u32, Multiindex)>,
    xi: bool,
    taylor: Option<LinearForm>,
}

impl PiMinusTerm {
    pub fn eps_exponent(&self) -> &LinearForm {
        &self.eps_exponent
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coefficient
    }

    pub fn w_index(&self) -> Option<u32> {
        self.w_index
    }

    pub fn pi_factors(&self) -> &[Multiindex] {
        &self.pi_factors
    }

    pub fn counterterm(&self) -> Option<&(u32, Multiindex)> {
        self.counterterm.as_ref()
    }

    pub fn is_xi(&self) -> bool {
        self.xi
    }

    pub fn taylor(&self) -> Option<&LinearForm> {
        self.taylor.as_ref()
    }

    /// Canonical unsigned rendering; factors that are identically the
    /// constant function (the zero-exponent polynomial unit and the
    /// degree-zero atom) are suppressed.
    fn body(&self) -> String {
        let mut pieces: Vec<String> = Vec::new();
        if !self.eps_exponent.is_zero() {
            pieces.push(format!("eps^({})", self.eps_exponent));
        }
        let coeff_slot = pieces.len();
        if let Some((k, beta0)) = &self.counterterm {
            pieces.push(format!("c^({k})[{beta0}]"));
        }
        if let Some(cutoff) = &self.taylor {
            pieces.push(format!("(id - T^(<{cutoff}))"));
        }
        if let Some(w) = self.w_index {
            if w >= 1 {
                pieces.push(format!("W{w}"));
            }
        }
        for factor in &self.pi_factors {
            if !is_unit_constant(factor) {
                pieces.push(format!("Pi[{factor}]"));
            }
        }
        if self.xi {
            pieces.push("xi".to_string());
        }
        let magnitude = self.coefficient.abs();
        if !magnitude.is_one() || pieces.is_empty() {
            pieces.insert(coeff_slot, crate::ratio::format_rational(&magnitude));
        }
        pieces.join(" ")
    }
}

/// The expanded driving component at one multiindex, stored as a term sum in
/// canonical order: noise-slot terms by ascending slot then factor count,
/// counterterm terms by ascending slot then subindex, the noise term last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiMinusExpr {
    beta: Multiindex,
    terms: Vec<PiMinusTerm>,
}

impl PiMinusExpr {
    pub fn beta(&self) -> &Multiindex {
        &self.beta
    }

    pub fn terms(&self) -> &[PiMinusTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for PiMinusExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            let negative = term.coefficient.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", term.body())?;
        }
        Ok(())
    }
}

/// The zero-exponent polynomial unit, whose component is the constant one.
fn is_unit_constant(idx: &Multiindex) -> bool {
    idx.is_purely_polynomial()
        && idx.poly_total() == 1
        && idx.poly_slots().next().is_some_and(|(n, _)| n.is_zero())
}

/// Support window for the counterterm symbol at slot `k`: `k` odd below the
/// base slot, a noise-only index with at least two units, and homogeneity
/// strictly below `2 + k*alpha`. The window comparison is exact and raises
/// the non-generic error on the boundary.
pub fn counterterm_support(k: u32, beta: &Multiindex, params: &StructureParams) -> Result<bool> {
    if k >= params.kmin() {
        return Err(Error::validation(format!(
            "counterterm slot {k} must lie strictly below the base slot {}",
            params.kmin()
        )));
    }
    if k % 2 == 0 || beta.is_zero() || beta.poly_total() > 0 || beta.noise_total() < 2 {
        return Ok(false);
    }
    beta.validate(params)?;
    let window = LinearForm::new(rat_int(2), rat_int(k as i64), rat_int(0));
    Ok(homogeneity(beta, params).compare(&window, params)? == Ordering::Less)
}

/// Cutoff of the complementary projection wrapped around the noise-slot
/// terms: `homogeneity - 2` when the index occupies a slot above the base one
/// and that form evaluates positive; nothing otherwise (below the base slot
/// alone the projection provably annihilates the products, and a nonpositive
/// cutoff makes the projection empty).
pub fn taylor_cutoff(beta: &Multiindex, params: &StructureParams) -> Result<Option<LinearForm>> {
    if !is_populated(beta, params) {
        return Err(Error::validation(format!(
            "projection cutoff is only defined at populated indices, got {beta}"
        )));
    }
    if beta.noise_above(params.kmin()) == 0 {
        return Ok(None);
    }
    let mut cutoff = homogeneity(beta, params);
    cutoff.c0 -= rat_int(2);
    if cutoff.eval(params) > BigRational::zero() {
        Ok(Some(cutoff))
    } else {
        Ok(None)
    }
}

/// A multiset decomposition of a remainder index into component factors,
/// together with the number of ordered arrangements realizing it.
struct FactorPartition {
    parts: Vec<Multiindex>,
    orderings: BigInt,
}

/// All decompositions of `remainder` into at most `max_parts` nonzero factors
/// whose components do not vanish identically: each part must be populated
/// and outside the special sector. Results are sorted by part count, then by
/// the factor lists.
fn partitions_into_factors(
    remainder: &Multiindex,
    max_parts: u64,
    params: &StructureParams,
) -> Vec<FactorPartition> {
    let mut candidates: Vec<Multiindex> = remainder
        .nonzero_subindices()
        .into_iter()
        .filter(|idx| is_populated(idx, params) && !is_special_sector(idx, params))
        .collect();
    candidates.sort();
    let mut found = Vec::new();
    let mut stack = Vec::new();
    collect_partitions(
        &candidates,
        0,
        remainder.clone(),
        max_parts,
        &mut stack,
        &mut found,
    );
    found.sort_by(|a, b| (a.parts.len(), &a.parts).cmp(&(b.parts.len(), &b.parts)));
    found
}

fn collect_partitions(
    candidates: &[Multiindex],
    position: usize,
    remaining: Multiindex,
    max_parts: u64,
    stack: &mut Vec<Multiindex>,
    found: &mut Vec<FactorPartition>,
) {
    if remaining.is_zero() {
        found.push(FactorPartition {
            parts: stack.clone(),
            orderings: orderings_count(stack),
        });
        return;
    }
    if stack.len() as u64 == max_parts {
        return;
    }
    for i in position..candidates.len() {
        if let Some(rest) = remaining.checked_sub(&candidates[i]) {
            stack.push(candidates[i].clone());
            collect_partitions(candidates, i, rest, max_parts, stack, found);
            stack.pop();
        }
    }
}

/// Ordered arrangements of a nondecreasing part list: `l! / prod(run!)`.
fn orderings_count(parts: &[Multiindex]) -> BigInt {
    let mut denominator = BigInt::one();
    let mut i = 0;
    while i < parts.len() {
        let mut j = i + 1;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        denominator *= factorial((j - i) as u64);
        i = j;
    }
    factorial(parts.len() as u64) / denominator
}

fn noise_part(beta: &Multiindex) -> Multiindex {
    let mut out = Multiindex::zero();
    for (k, mult) in beta.noise_slots() {
        for _ in 0..mult {
            out = out.add_unit(&Unit::Noise(k));
        }
    }
    out
}

/// The index `beta0 + k * e_0` whose expansion introduces the counterterm
/// symbol `(k, beta0)` with coefficient -1.
pub fn defining_index(k: u32, beta0: &Multiindex, params: &StructureParams) -> Multiindex {
    let unit = Unit::Poly(MonomialIndex::zero(params.coords()));
    let mut out = beta0.clone();
    for _ in 0..k {
        out = out.add_unit(&unit);
    }
    out
}

/// Expand the driving component at a populated multiindex.
///
/// Noise-slot terms peel one unit from each occupied slot `k` and distribute
/// the remainder over at most `k` factors; each decomposition contributes
/// `binom(k, l) * arrangements` with scaling exponent `(base - k) * alpha`
/// and polynomial atom degree `k - l`. Counterterm terms do the same below
/// the base slot for every noise subindex inside the support window, with a
/// minus sign and no scaling prefactor. The empty index adds the noise term.
/// Non-populated indices are rejected.
pub fn expand_pi_minus(beta: &Multiindex, params: &StructureParams) -> Result<PiMinusExpr> {
    beta.validate(params)?;
    if !is_populated(beta, params) {
        return Err(Error::validation(format!(
            "the expansion is only defined at populated indices, got {beta}"
        )));
    }
    let cutoff = taylor_cutoff(beta, params)?;
    let mut terms = Vec::new();

    for (k, _) in beta.noise_slots() {
        let remainder = beta
            .sub_unit(&Unit::Noise(k))
            .expect("occupied noise slot admits removal of one unit");
        let eps = LinearForm::alpha_multiple(rat_int(params.kmin() as i64 - k as i64));
        for partition in partitions_into_factors(&remainder, k as u64, params) {
            let l = partition.parts.len() as u64;
            terms.push(PiMinusTerm {
                eps_exponent: eps.clone(),
                coefficient: BigRational::from_integer(
                    binomial(k as u64, l) * partition.orderings,
                ),
                w_index: Some(k - l as u32),
                pi_factors: partition.parts,
                counterterm: None,
                xi: false,
                taylor: cutoff.clone(),
            });
        }
    }

    let noise_only = noise_part(beta);
    let mut subindices = noise_only.nonzero_subindices();
    subindices.sort();
    for k in (1..params.kmin()).step_by(2) {
        for beta0 in &subindices {
            if !counterterm_support(k, beta0, params)? {
                continue;
            }
            let remainder = beta
                .checked_sub(beta0)
                .expect("noise subindex admits subtraction");
            for partition in partitions_into_factors(&remainder, k as u64, params) {
                let l = partition.parts.len() as u64;
                terms.push(PiMinusTerm {
                    eps_exponent: LinearForm::zero(),
                    coefficient: -BigRational::from_integer(
                        binomial(k as u64, l) * partition.orderings,
                    ),
                    w_index: Some(k - l as u32),
                    pi_factors: partition.parts,
                    counterterm: Some((k, beta0.clone())),
                    xi: false,
                    taylor: None,
                });
            }
        }
    }

    if beta.is_zero() {
        terms.push(PiMinusTerm {
            eps_exponent: LinearForm::zero(),
            coefficient: BigRational::one(),
            w_index: None,
            pi_factors: Vec::new(),
            counterterm: None,
            xi: true,
            taylor: None,
        });
    }

    Ok(PiMinusExpr {
        beta: beta.clone(),
        terms,
    })
}

/// Exact grading identity on every noise-slot term: the scaling exponent plus
/// `alpha` times the atom degree plus the factor homogeneities plus two must
/// reproduce the homogeneity of the expanded index.
pub fn check_bookkeeping(expr: &PiMinusExpr, params: &StructureParams) -> Result<()> {
    let target = homogeneity(&expr.beta, params);
    for term in &expr.terms {
        if term.xi || term.counterterm.is_some() {
            continue;
        }
        let mut lhs = term.eps_exponent.clone();
        if let Some(w) = term.w_index {
            lhs += &LinearForm::alpha_multiple(rat_int(w as i64));
        }
        for factor in &term.pi_factors {
            lhs += &homogeneity(factor, params);
        }
        lhs.c0 += rat_int(2);
        if lhs != target {
            return Err(Error::inconsistency(format!(
                "grading bookkeeping failed at {}: term `{}` carries {} against {}",
                expr.beta,
                term.body(),
                lhs,
                target
            )));
        }
    }
    Ok(())
}

/// All counterterm symbols whose defining index lies in the populated set up
/// to `max_order`: indices whose polynomial part is exactly `k` copies of the
/// zero unit with `(k, noise part)` inside the support window.
pub fn enumerate_counterterms(
    params: &StructureParams,
    max_order: &BigRational,
) -> Result<Vec<(u32, Multiindex)>> {
    let mut out = Vec::new();
    for gamma in enumerate_defining_indices(params, max_order)? {
        let k = gamma.poly_total() as u32;
        let beta0 = noise_part(&gamma);
        out.push((k, beta0));
    }
    Ok(out)
}

/// The defining indices `beta0 + k * e_0` themselves, in enumeration order.
///
/// Direct search instead of a sweep of the populated set: a supported
/// `beta0` is purely noise, so its homogeneity `alpha + S*a` depends only on
/// the unit count S, and the support window `< 2 + k*alpha` caps S (the step
/// a is positive); the order of the defining index then caps the slot
/// weights. Each candidate still runs through `counterterm_support`, so the
/// non-generic boundary is detected exactly as in the pointwise predicate.
pub fn enumerate_defining_indices(
    params: &StructureParams,
    max_order: &BigRational,
) -> Result<Vec<Multiindex>> {
    let alpha = params.alpha();
    let step = params.noise_step();
    let half_d = params.half_dim();
    let mut out = Vec::new();
    for k in (1..params.kmin()).step_by(2) {
        let mut s = 2u64;
        loop {
            let probe = Multiindex::from_parts([(params.kmin(), s as u32)], std::iter::empty());
            if !counterterm_support(k, &probe, params)? {
                break;
            }
            // order(beta0 + k*e0) = alpha + S*a - k*alpha + (D/2)(1+w-k).
            let base = alpha + &step * rat_int(s as i64) - rat_int(k as i64) * alpha;
            let weight_slack =
                (max_order - &base) / &half_d + rat_int(k as i64) - rat_int(1);
            if !weight_slack.is_negative() {
                let weight_cap = to_cap(&weight_slack);
                for beta0 in crate::enumerate::noise_multisets(params, s, weight_cap) {
                    if !counterterm_support(k, &beta0, params)? {
                        continue;
                    }
                    let gamma = defining_index(k, &beta0, params);
                    if order(&gamma, params).eval(params) <= *max_order {
                        out.push(gamma);
                    }
                }
            }
            s += 1;
        }
    }
    out.sort_by(|a, b| {
        let oa = order(a, params).eval(params);
        let ob = order(b, params).eval(params);
        oa.cmp(&ob).then_with(|| a.cmp(b))
    });
    Ok(out)
}

fn to_cap(bound: &BigRational) -> u64 {
    if bound.is_negative() {
        return 0;
    }
    u64::try_from(crate::ratio::floor_int(bound)).unwrap_or(0)
}

/// A node of the dependency graph: a component at a multiindex, or a
/// counterterm symbol (always a leaf; its numeric value is outside the
/// algebra).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DepNode {
    Pi(Multiindex),
    Counterterm(u32, Multiindex),
}

impl DepNode {
    pub fn label(&self) -> String {
        match self {
            DepNode::Pi(idx) => format!("Pi[{idx}]"),
            DepNode::Counterterm(k, idx) => format!("c^({k})[{idx}]"),
        }
    }

    /// Well-ordering key: the order form of the index, with counterterm
    /// symbols keyed through their defining index.
    pub fn key(&self, params: &StructureParams) -> LinearForm {
        match self {
            DepNode::Pi(idx) => order(idx, params),
            DepNode::Counterterm(k, idx) => order(&defining_index(*k, idx, params), params),
        }
    }
}

/// Expansion dependency graph. Regular edges strictly descend in the order
/// key; the single self-reference a counterterm symbol makes through its
/// defining index is kept separately as a defining link at equal key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    nodes: BTreeSet<DepNode>,
    edges: BTreeSet<(DepNode, DepNode)>,
    defining: BTreeSet<(DepNode, DepNode)>,
}

impl DependencyGraph {
    pub fn nodes(&self) -> impl Iterator<Item = &DepNode> {
        self.nodes.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = &(DepNode, DepNode)> {
        self.edges.iter()
    }

    pub fn defining_links(&self) -> impl Iterator<Item = &(DepNode, DepNode)> {
        self.defining.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, node: &DepNode) -> bool {
        self.nodes.contains(node)
    }

    /// Nodes sorted by ascending order key (ties broken canonically); valid
    /// as a topological order because every edge strictly descends.
    pub fn topological(&self, params: &StructureParams) -> Vec<(DepNode, BigRational)> {
        let mut rows: Vec<(DepNode, BigRational)> = self
            .nodes
            .iter()
            .map(|node| (node.clone(), node.key(params).eval(params)))
            .collect();
        rows.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        rows
    }

    /// Graph description in DOT text format, nodes and edges in canonical
    /// order, defining links dashed.
    pub fn dot(&self) -> String {
        let mut out = String::from("digraph dependencies {\n");
        for node in &self.nodes {
            out.push_str(&format!("  \"{}\";\n", node.label()));
        }
        for (from, to) in &self.edges {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", from.label(), to.label()));
        }
        for (from, to) in &self.defining {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [style=dashed, label=\"defines\"];\n",
                from.label(),
                to.label()
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Every regular edge must strictly descend in the order key and every
    /// defining link must sit at exactly equal keys; a violation means the
    /// expansion recursion is not well-founded.
    fn verify_descent(&self, params: &StructureParams) -> Result<()> {
        for (from, to) in &self.edges {
            match to.key(params).compare(&from.key(params), params)? {
                Ordering::Less => {}
                _ => {
                    return Err(Error::inconsistency(format!(
                        "dependency edge {} -> {} does not descend in the order key",
                        from.label(),
                        to.label()
                    )));
                }
            }
        }
        for (from, to) in &self.defining {
            if from.key(params) != to.key(params) {
                return Err(Error::inconsistency(format!(
                    "defining link {} -> {} is not at equal order key",
                    from.label(),
                    to.label()
                )));
            }
        }
        Ok(())
    }
}

/// Dependency closure of the component at `beta`: expand, add one edge per
/// nonconstant factor, per positive-degree atom (to the base component), and
/// per counterterm symbol, then recurse into newly seen component nodes.
pub fn dependency_graph(beta: &Multiindex, params: &StructureParams) -> Result<DependencyGraph> {
    dependency_graph_with_slot_cap(beta, params, None)
}

/// Same closure, rejecting any index occupying a noise slot above `slot_cap`;
/// with the cap at the base slot this certifies that base-slot indices never
/// pull higher slots into their closure.
pub fn dependency_graph_with_slot_cap(
    beta: &Multiindex,
    params: &StructureParams,
    slot_cap: Option<u32>,
) -> Result<DependencyGraph> {
    let check_cap = |idx: &Multiindex| -> Result<()> {
        if let Some(cap) = slot_cap {
            for (k, _) in idx.noise_slots() {
                if k > cap {
                    return Err(Error::validation(format!(
                        "index {idx} occupies noise slot {k} above the cap {cap}"
                    )));
                }
            }
        }
        Ok(())
    };
    check_cap(beta)?;

    let mut nodes = BTreeSet::from([DepNode::Pi(beta.clone())]);
    let mut edges = BTreeSet::new();
    let mut defining = BTreeSet::new();
    let mut queue = vec![beta.clone()];

    while let Some(current) = queue.pop() {
        let expr = expand_pi_minus(&current, params)?;
        let from = DepNode::Pi(current.clone());
        for term in expr.terms() {
            if term.w_index().is_some_and(|w| w >= 1) {
                let target = DepNode::Pi(Multiindex::zero());
                if nodes.insert(target.clone()) {
                    queue.push(Multiindex::zero());
                }
                edges.insert((from.clone(), target));
            }
            for factor in term.pi_factors() {
                if is_unit_constant(factor) {
                    continue;
                }
                check_cap(factor)?;
                let target = DepNode::Pi(factor.clone());
                if nodes.insert(target.clone()) {
                    queue.push(factor.clone());
                }
                edges.insert((from.clone(), target.clone()));
            }
            if let Some((k, beta0)) = term.counterterm() {
                check_cap(beta0)?;
                let target = DepNode::Counterterm(*k, beta0.clone());
                nodes.insert(target.clone());
                if defining_index(*k, beta0, params) == current {
                    defining.insert((from.clone(), target));
                } else {
                    edges.insert((from.clone(), target));
                }
            }
        }
    }

    let graph = DependencyGraph {
        nodes,
        edges,
        defining,
    };
    graph.verify_descent(params)?;
    Ok(graph)
}

/// Population propagation: among populated indices, only those with
/// nonnegative bracket or in the special sector expand to a nonzero sum.
pub fn expansion_vanishes_off_sectors(beta: &Multiindex, params: &StructureParams) -> Result<bool> {
    let expr = expand_pi_minus(beta, params)?;
    if bracket(beta) >= 0 || is_special_sector(beta, params) || beta.is_zero() {
        Ok(true)
    } else {
        Ok(expr.is_zero())
    }
}
